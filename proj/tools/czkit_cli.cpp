// Command-line front end: wires kernels, grids, and test functions to the
// library and emits JSON/CSV reports. Subcommands: seminorm, decompose,
// whitney, apply, weaktype, verify, trace, range.

#include <CLI11.hpp>
#include <json.hpp>

#include <czkit/czkit.hpp>
#include <czkit/report_json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using czkit::inf;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config_error = 2;
constexpr int exit_inconclusive = 3;

double parse_exponent(const std::string& text, const char* flag) {
  if (text == "inf" || text == "Inf" || text == "INF") return inf;
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError(std::string(flag) + ": expected a number or 'inf', got '" + text +
                               "'");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(parse_exponent(tok, "list"));
  return out;
}

struct common_options {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  std::uint64_t seed = 1;
  double slack = 1e-2;
};

void add_common(CLI::App* cmd, common_options& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file; flags override its entries")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory for reports");
  cmd->add_option("--workers", opts.workers, "worker threads (0 = machine default / CZKIT_WORKERS)");
  cmd->add_option("--seed", opts.seed, "seed for built-in test functions");
  cmd->add_option("--slack", opts.slack, "relative slack for traced inequalities");
}

// JSON config: keys are long option names without dashes; command-line flags
// win over file entries.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  json cfg = json::parse(in);
  for (auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

czkit::kernel kernel_by_label(const std::string& label, int n, double custom_A) {
  if (label == "zero") return czkit::zero_kernel(n);
  if (label == "hilbert") return czkit::hilbert_kernel();
  if (label == "bump") return czkit::bump_kernel();
  if (label.rfind("riesz:", 0) == 0) {
    int comp = std::stoi(label.substr(6));
    return czkit::riesz_kernel(n, comp);
  }
  if (label.rfind("custom:", 0) == 0) {
    std::string path = label.substr(7);
    if (!fs::exists(path)) throw std::invalid_argument("custom kernel file not found: " + path);
    std::ifstream in(path);
    std::vector<std::pair<double, double>> samples;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0 ||
          line.rfind("axis0,", 0) == 0)
        continue;
      std::stringstream ss(line);
      std::string a, b;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b)) continue;
      samples.emplace_back(std::stod(a), std::stod(b));
    }
    return czkit::tabulated_kernel(std::move(samples), custom_A, label);
  }
  throw std::invalid_argument("unknown kernel label: " + label +
                              " (expected zero|hilbert|bump|riesz:i|custom:<path>)");
}

void write_report(const common_options& opts, const std::string& name, json report,
                  const json& config_echo) {
  report["config"] = config_echo;
  report["version"] = czkit::version_string;
  fs::create_directories(opts.out_dir);
  std::ofstream out(fs::path(opts.out_dir) / name);
  out << report.dump(2) << "\n";
  std::cout << report.dump() << std::endl;
}

int fail_config(const std::string& message) {
  json err{{"error", message}, {"version", czkit::version_string}};
  std::cout << err.dump() << std::endl;
  return exit_config_error;
}

std::vector<czkit::labeled_function> load_testset(const std::string& spec, double box_halfwidth,
                                                  double h, int count, std::uint64_t seed) {
  std::vector<czkit::labeled_function> out;
  if (spec == "standard" || spec.empty()) {
    czkit::grid g = czkit::make_uniform_grid(
        czkit::make_box({-box_halfwidth}, {box_halfwidth}), h);
    return czkit::standard_testset(g, count, seed);
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (!fs::exists(tok)) throw std::invalid_argument("testset file not found: " + tok);
    out.push_back({tok, czkit::read_csv(tok)});
  }
  if (out.empty()) throw std::invalid_argument("empty testset spec");
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"czkit: numerical Calderon-Zygmund toolkit"};
  app.require_subcommand(1);

  // ---- seminorm ----
  auto* sem = app.add_subcommand("seminorm", "kernel smoothness seminorm estimate");
  common_options sem_opts;
  std::string sem_kernel = "hilbert", sem_r = "inf", sem_radii = "";
  int sem_n = 1;
  double sem_A = 1.0, sem_yspace = 1e-3, sem_xspace = 1e-3, sem_rho = 1e4;
  bool sem_watson = false, sem_nocheck = false;
  sem->add_option("--kernel", sem_kernel, "kernel label");
  sem->add_option("--r", sem_r, "integrability index r (number or 'inf')");
  sem->add_flag("--watson", sem_watson, "use the annulus (Watson) seminorm");
  sem->add_option("--n", sem_n, "ambient dimension for zero/riesz kernels");
  sem->add_option("--A", sem_A, "size constant for custom kernels");
  sem->add_option("--R", sem_radii, "comma list of radii (default dyadic 2^-4..2^4)");
  sem->add_option("--y-spacing", sem_yspace, "shift lattice spacing relative to R");
  sem->add_option("--outer-spacing", sem_xspace, "outer lattice spacing relative to R");
  sem->add_option("--rho", sem_rho, "outer cutoff factor");
  sem->add_flag("--no-convergence-check", sem_nocheck, "skip the doubled-cutoff diagnostic");
  add_common(sem, sem_opts);

  // ---- decompose ----
  auto* dec = app.add_subcommand("decompose", "Calderon-Zygmund or NTV decomposition");
  common_options dec_opts;
  std::string dec_method = "cz", dec_input;
  double dec_q = 1.0, dec_height = 1.0;
  dec->add_option("--method", dec_method, "cz or ntv")->check(CLI::IsMember({"cz", "ntv"}));
  dec->add_option("--q", dec_q, "exponent q >= 1");
  dec->add_option("--height", dec_height, "decomposition height");
  dec->add_option("--input", dec_input, "grid function CSV")->check(CLI::ExistingFile);
  add_common(dec, dec_opts);

  // ---- whitney ----
  auto* whit = app.add_subcommand("whitney", "Whitney decomposition of a cell set");
  common_options whit_opts;
  std::string whit_input;
  whit->add_option("--omega", whit_input, "indicator grid function CSV")->check(CLI::ExistingFile);
  add_common(whit, whit_opts);

  // ---- apply ----
  auto* app_cmd = app.add_subcommand("apply", "apply the singular integral operator");
  common_options app_opts;
  std::string app_kernel = "hilbert", app_input, app_target_box;
  int app_n = 1;
  double app_A = 1.0, app_exclusion = 1.0;
  app_cmd->add_option("--kernel", app_kernel, "kernel label");
  app_cmd->add_option("--input", app_input, "grid function CSV")->check(CLI::ExistingFile);
  app_cmd->add_option("--n", app_n, "ambient dimension");
  app_cmd->add_option("--A", app_A, "size constant for custom kernels");
  app_cmd->add_option("--exclusion", app_exclusion, "principal-value exclusion in cells");
  app_cmd->add_option("--target-box", app_target_box,
                      "target box lo,hi (1-D; default: the input grid)");
  add_common(app_cmd, app_opts);

  // ---- weaktype ----
  auto* weak = app.add_subcommand("weaktype", "weak-type quasi-norm of a grid function");
  common_options weak_opts;
  std::string weak_input;
  double weak_q = 1.0, weak_alpha_lo = 1e-3, weak_alpha_hi = 1e2;
  int weak_per_decade = 50;
  weak->add_option("--q", weak_q, "exponent q >= 1");
  weak->add_option("--input", weak_input, "grid function CSV")->check(CLI::ExistingFile);
  weak->add_option("--alpha-min", weak_alpha_lo, "alpha grid lower end");
  weak->add_option("--alpha-max", weak_alpha_hi, "alpha grid upper end");
  weak->add_option("--alpha-per-decade", weak_per_decade, "alpha grid density");
  add_common(weak, weak_opts);

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "verify the weak (q,q) bound on a testset");
  common_options ver_opts;
  std::string ver_method = "cz", ver_kernel = "hilbert", ver_s = "2", ver_testset = "standard";
  int ver_n = 1, ver_count = 20, ver_per_decade = 50;
  double ver_q = 1.0, ver_B = 1.0, ver_A = 1.0, ver_h = 1.0 / 256, ver_halfwidth = 2.0;
  double ver_alpha_lo = 1e-3, ver_alpha_hi = 1e2;
  ver->add_option("--method", ver_method)->check(CLI::IsMember({"cz", "ntv"}));
  ver->add_option("--kernel", ver_kernel, "kernel label");
  ver->add_option("--q", ver_q, "exponent q >= 1");
  ver->add_option("--s", ver_s, "strong exponent (number or 'inf')");
  ver->add_option("--B", ver_B, "strong bound B on L^s");
  ver->add_option("--n", ver_n, "ambient dimension");
  ver->add_option("--A", ver_A, "size constant for custom kernels");
  ver->add_option("--testset", ver_testset, "'standard' or comma list of CSV paths");
  ver->add_option("--count", ver_count, "size of the standard testset");
  ver->add_option("--testset-h", ver_h, "grid spacing of the standard testset");
  ver->add_option("--testset-halfwidth", ver_halfwidth, "support half-width of the testset box");
  ver->add_option("--alpha-min", ver_alpha_lo, "alpha grid lower end");
  ver->add_option("--alpha-max", ver_alpha_hi, "alpha grid upper end");
  ver->add_option("--alpha-per-decade", ver_per_decade, "alpha grid density");
  add_common(ver, ver_opts);

  // ---- trace ----
  auto* tra = app.add_subcommand("trace", "per-inequality proof trace on one instance");
  common_options tra_opts;
  std::string tra_method = "cz", tra_kernel = "hilbert", tra_s = "2", tra_input, tra_testfn;
  int tra_n = 1;
  double tra_q = 1.0, tra_B = 1.0, tra_A = 1.0, tra_alpha = 1.0;
  tra->add_option("--method", tra_method)->check(CLI::IsMember({"cz", "ntv"}));
  tra->add_option("--kernel", tra_kernel, "kernel label");
  tra->add_option("--q", tra_q, "exponent q >= 1");
  tra->add_option("--s", tra_s, "strong exponent (number or 'inf')");
  tra->add_option("--B", tra_B, "strong bound B on L^s");
  tra->add_option("--n", tra_n, "ambient dimension");
  tra->add_option("--A", tra_A, "size constant for custom kernels");
  tra->add_option("--alpha", tra_alpha, "level of the weak-type inequality");
  tra->add_option("--input", tra_input, "grid function CSV")->check(CLI::ExistingFile);
  tra->add_option("--testfn", tra_testfn,
                  "built-in instance: indicator | step | bump (instead of --input)");
  add_common(tra, tra_opts);

  // ---- range ----
  auto* rng_cmd = app.add_subcommand("range", "interpolation interval of exponents");
  common_options rng_opts;
  double rng_q = 1.0;
  std::string rng_s = "inf";
  rng_cmd->add_option("--q", rng_q, "exponent q >= 1");
  rng_cmd->add_option("--s", rng_s, "strong exponent (number or 'inf')");
  add_common(rng_cmd, rng_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    common_options* opts = nullptr;
    if (active == sem) opts = &sem_opts;
    else if (active == dec) opts = &dec_opts;
    else if (active == whit) opts = &whit_opts;
    else if (active == app_cmd) opts = &app_opts;
    else if (active == weak) opts = &weak_opts;
    else if (active == ver) opts = &ver_opts;
    else if (active == tra) opts = &tra_opts;
    else opts = &rng_opts;

    // config file entries fill in flags that were not given
    if (auto* copt = active->get_option_no_throw("--config"); copt && copt->count() > 0)
      apply_config(active, opts->config_path);
    if (opts->workers > 0) czkit::set_worker_count(opts->workers);

    if (active == rng_cmd) {
      double s = parse_exponent(rng_s, "--s");
      auto r = czkit::interpolation_range(rng_q, s);
      json out{{"lower", r.lower},
               {"upper", czkit::finite_or_string(r.upper)},
               {"q", rng_q},
               {"s", czkit::finite_or_string(s)},
               {"version", czkit::version_string}};
      std::cout << out.dump() << std::endl;
      return exit_ok;
    }

    if (active == sem) {
      double r = parse_exponent(sem_r, "--r");
      czkit::kernel k = kernel_by_label(sem_kernel, sem_n, sem_A);
      czkit::seminorm_params p;
      if (!sem_radii.empty()) p.radii = parse_list(sem_radii);
      p.y_spacing = sem_yspace;
      p.outer_spacing = sem_xspace;
      p.outer_factor = sem_rho;
      p.convergence_check = !sem_nocheck;
      auto est = sem_watson ? czkit::watson_seminorm(k, r, p) : czkit::hr_seminorm(k, r, p);
      json echo{{"kernel", sem_kernel}, {"r", czkit::finite_or_string(r)},
                {"watson", sem_watson}, {"rho", sem_rho},
                {"y_spacing", sem_yspace}, {"outer_spacing", sem_xspace},
                {"seed", opts->seed}};
      write_report(*opts, "seminorm.json", czkit::to_json(est), echo);
      bool inconclusive = est.value > 0 && est.truncation_error > 0.1 * est.value;
      return inconclusive ? exit_inconclusive : exit_ok;
    }

    if (active == dec) {
      if (dec_input.empty()) return fail_config("decompose: --input is required");
      czkit::grid_function f = czkit::read_csv(dec_input);
      json echo{{"method", dec_method}, {"q", dec_q}, {"height", dec_height},
                {"input", dec_input}, {"seed", opts->seed}};
      bool ok;
      json rep;
      if (dec_method == "cz") {
        auto d = czkit::cz_decompose(f, dec_q, dec_height);
        rep = czkit::to_json(d);
        ok = true;
        for (const auto& pc : czkit::check_cz_properties(d)) ok = ok && pc.pass;
      } else {
        auto d = czkit::ntv_decompose(f, dec_q, dec_height);
        rep = czkit::to_json(d);
        ok = true;
        for (const auto& pc : czkit::check_ntv_properties(d)) ok = ok && pc.pass;
      }
      write_report(*opts, "decompose.json", std::move(rep), echo);
      return ok ? exit_ok : exit_check_failed;
    }

    if (active == whit) {
      if (whit_input.empty()) return fail_config("whitney: --omega is required");
      czkit::grid_function omega = czkit::read_csv(whit_input);
      auto wh = czkit::whitney_decompose(omega);
      json echo{{"omega", whit_input}};
      write_report(*opts, "whitney.json", czkit::to_json(wh), echo);
      return exit_ok;
    }

    if (active == app_cmd) {
      if (app_input.empty()) return fail_config("apply: --input is required");
      czkit::grid_function f = czkit::read_csv(app_input);
      czkit::operator_spec op;
      op.k = kernel_by_label(app_kernel, app_n, app_A);
      op.exclusion_factor = app_exclusion;
      czkit::grid targets = f.g;
      if (!app_target_box.empty()) {
        auto ends = parse_list(app_target_box);
        if (ends.size() != 2) return fail_config("apply: --target-box expects lo,hi");
        targets = czkit::make_uniform_grid(czkit::make_box({ends[0]}, {ends[1]}), f.g.spacing);
      }
      auto r = czkit::apply_operator(op, f, targets);
      fs::create_directories(opts->out_dir);
      czkit::write_csv(r.values, (fs::path(opts->out_dir) / "apply.csv").string());
      std::int64_t excluded = 0;
      for (auto e : r.excluded) excluded += e;
      json echo{{"kernel", app_kernel}, {"input", app_input}, {"exclusion", app_exclusion}};
      write_report(*opts, "apply.json",
                   json{{"targets", r.values.g.total()}, {"excluded_points", excluded}}, echo);
      return exit_ok;
    }

    if (active == weak) {
      if (weak_input.empty()) return fail_config("weaktype: --q and --input are required");
      czkit::grid_function u = czkit::read_csv(weak_input);
      auto alphas = czkit::log_alpha_grid(weak_alpha_lo, weak_alpha_hi, weak_per_decade);
      auto rep = czkit::weak_type_quasi_norm(u, weak_q, alphas);
      fs::create_directories(opts->out_dir);
      {
        std::ofstream curve(fs::path(opts->out_dir) / "weaktype.csv");
        curve << "alpha,distribution\n";
        for (std::size_t i = 0; i < rep.alphas.size(); ++i)
          curve << czkit::format_double(rep.alphas[i]) << ","
                << czkit::format_double(rep.distribution[i]) << "\n";
      }
      json echo{{"q", weak_q}, {"input", weak_input},
                {"alpha_min", weak_alpha_lo}, {"alpha_max", weak_alpha_hi}};
      write_report(*opts, "weaktype.json", czkit::to_json(rep), echo);
      return exit_ok;
    }

    if (active == ver) {
      double s = parse_exponent(ver_s, "--s");
      czkit::operator_spec op;
      op.k = kernel_by_label(ver_kernel, ver_n, ver_A);
      op.strong_exponent = s;
      op.strong_bound = ver_B;
      auto testset = load_testset(ver_testset, ver_halfwidth, ver_h, ver_count, ver_opts.seed);
      auto alphas = czkit::log_alpha_grid(ver_alpha_lo, ver_alpha_hi, ver_per_decade);
      auto method = ver_method == "cz" ? czkit::proof_method::cz : czkit::proof_method::ntv;
      auto rep = czkit::verify_theorem1(op, ver_q, testset, alphas, method);
      json echo{{"method", ver_method}, {"kernel", ver_kernel}, {"q", ver_q},
                {"s", czkit::finite_or_string(s)}, {"B", ver_B},
                {"testset", ver_testset}, {"count", ver_count}, {"seed", ver_opts.seed}};
      write_report(*opts, "verify.json", czkit::to_json(rep), echo);
      if (rep.inconclusive) return exit_inconclusive;
      return rep.pass ? exit_ok : exit_check_failed;
    }

    if (active == tra) {
      double s = parse_exponent(tra_s, "--s");
      czkit::operator_spec op;
      op.k = kernel_by_label(tra_kernel, tra_n, tra_A);
      op.strong_exponent = s;
      op.strong_bound = tra_B;
      czkit::grid_function f = [&] {
        if (!tra_input.empty()) return czkit::read_csv(tra_input);
        czkit::grid g = czkit::make_uniform_grid(czkit::make_box({0.0}, {1.0}), 1.0 / 256);
        if (tra_testfn == "step")
          return czkit::random_dyadic_step(g, tra_opts.seed, 4, 0.0, 1.0,
                                           tra_method == "ntv");
        if (tra_testfn == "bump") return czkit::smooth_bump(g, 0.5, 0.5);
        return czkit::indicator_1d(g, 0.0, 1.0);
      }();
      auto tr = tra_method == "cz"
                    ? czkit::trace_cz_proof(op, f, tra_alpha, tra_q, tra_opts.slack)
                    : czkit::trace_ntv_proof(op, f, tra_alpha, tra_q, tra_opts.slack);
      json echo{{"method", tra_method}, {"kernel", tra_kernel}, {"q", tra_q},
                {"s", czkit::finite_or_string(s)}, {"B", tra_B}, {"alpha", tra_alpha},
                {"input", tra_input.empty() ? tra_testfn : tra_input}, {"seed", tra_opts.seed},
                {"slack", tra_opts.slack}};
      write_report(*opts, "trace.json", czkit::to_json(tr), echo);
      return tr.overall ? exit_ok : exit_check_failed;
    }
  } catch (const std::exception& e) {
    return fail_config(e.what());
  }
  return fail_config("no subcommand handled");
}
