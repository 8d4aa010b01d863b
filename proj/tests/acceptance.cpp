// Acceptance suite: runs the end-to-end checks the library must satisfy and
// prints one pass/fail line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <czkit/czkit.hpp>

#include "oracles.hpp"

using namespace czkit;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

operator_spec hilbert_op(double s = 2.0, double B = 3.14159265358979324) {
  operator_spec op;
  op.k = hilbert_kernel();
  op.strong_exponent = s;
  op.strong_bound = B;
  return op;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- criterion 1: seminorm oracles -------------------------------------
void criterion1() {
  seminorm_params p; // default dyadic radii, y/outer spacing 1e-3, rho 1e4
  auto t0 = std::chrono::steady_clock::now();
  auto hr_inf = hr_seminorm(hilbert_kernel(), inf, p);
  double t_inf = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  auto hr_one = hr_seminorm(hilbert_kernel(), 1.0, p);
  double t_one = seconds_since(t0);
  auto watson_one = watson_seminorm(hilbert_kernel(), 1.0, p);

  const double want_inf = std::log(3.0);
  const double want_one = 3.0 * std::log(3.0) - 4.0 * std::log(2.0);
  bool ok = std::fabs(hr_inf.value - want_inf) <= 0.01 * want_inf &&
            std::fabs(hr_one.value - want_one) <= 0.01 * want_one &&
            std::fabs(watson_one.value - hr_inf.value) <= 0.01 * hr_inf.value &&
            t_inf < 60.0 && t_one < 60.0;
  report(1, "seminorm oracles", ok,
         "hr_inf=" + fmt(hr_inf.value) + " (ln3=" + fmt(want_inf) + "), hr_1=" +
             fmt(hr_one.value) + " (want " + fmt(want_one) + "), watson_1=" +
             fmt(watson_one.value) + ", t=" + fmt(t_inf) + "s/" + fmt(t_one) + "s");
}

// ---- criterion 2: monotonicity sweep ------------------------------------
void criterion2() {
  const std::vector<double> rs{1.0, 1.5, 2.0, 4.0, inf};
  bool ok = true;
  std::string detail;

  seminorm_params p1;
  p1.radii = {1.0};
  p1.y_spacing = 2e-3;
  p1.outer_spacing = 2e-3;
  p1.convergence_check = false;
  double prev = -1;
  for (double r : rs) {
    double v = hr_seminorm(hilbert_kernel(), r, p1).value;
    if (prev >= 0 && !(prev <= v + 1e-6 + 1e-3 * v)) ok = false;
    prev = v;
  }
  detail += "hilbert max=" + fmt(prev);

  seminorm_params p2;
  p2.radii = {1.0};
  p2.y_spacing = 0.25;
  p2.outer_spacing = 0.25;
  p2.outer_factor = 64.0;
  p2.convergence_check = false;
  prev = -1;
  for (double r : rs) {
    double v = hr_seminorm(riesz_kernel(2, 1), r, p2).value;
    if (prev >= 0 && !(prev <= v + 1e-6 + 1e-3 * v)) ok = false;
    prev = v;
  }
  detail += ", riesz:1 max=" + fmt(prev);
  report(2, "hr monotone in r", ok, detail);
}

// ---- criterion 3: CZ decomposition suite ---------------------------------
void criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(0xC25EEDu);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  bool ok = true;
  int instances = 0;
  std::string first_fail;
  for (int rep = 0; rep < 200; ++rep) {
    grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 256);
    int level = 3 + static_cast<int>(rng() % 3);
    grid_function f = random_dyadic_step(g, rng(), level, 0.0, 1.0, false);
    double q = (rep % 3 == 0) ? 1.0 : (rep % 3 == 1) ? 1.5 : 2.0;
    double height = lq_norm(f, inf) * (0.1 + 0.8 * unif(rng));
    auto dec = cz_decompose(f, q, height);
    ++instances;
    for (const auto& pc : check_cz_properties(dec))
      if (!pc.pass && first_fail.empty()) {
        ok = false;
        first_fail = pc.name + " lhs=" + fmt(pc.lhs) + " rhs=" + fmt(pc.rhs);
      }
  }
  double t = seconds_since(t0);
  ok = ok && t < 30.0;
  report(3, "cz properties (1)-(5)", ok,
         std::to_string(instances) + " instances, t=" + fmt(t) + "s" +
             (first_fail.empty() ? "" : ", first fail: " + first_fail));
}

// ---- criterion 4: NTV decomposition suite --------------------------------
void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(0x17CEED);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  bool ok = true;
  std::string first_fail;
  for (int rep = 0; rep < 200; ++rep) {
    grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 256);
    int level = 3 + static_cast<int>(rng() % 3);
    grid_function f = random_dyadic_step(g, rng(), level, 0.0, 1.0, true);
    double q = (rep % 3 == 0) ? 1.0 : (rep % 3 == 1) ? 1.5 : 2.0;
    double height = lq_norm(f, inf) * (0.3 + 0.5 * unif(rng));
    auto dec = ntv_decompose(f, q, height);
    for (const auto& pc : check_ntv_properties(dec))
      if (!pc.pass && first_fail.empty()) {
        ok = false;
        first_fail = pc.name + " lhs=" + fmt(pc.lhs) + " rhs=" + fmt(pc.rhs);
      }
    // maximal weak (1,1) at 20 levels per instance
    grid_function fq = dec.f;
    for (double& v : fq.values) v = std::pow(v, q);
    double peak = lq_norm(dec.maximal_of_fq, inf);
    for (int k = 1; k <= 20; ++k) {
      auto pc = maximal_weak11_check(fq, dec.maximal_of_fq, peak * k / 21.0);
      if (!pc.pass && first_fail.empty()) {
        ok = false;
        first_fail = "weak11 lhs=" + fmt(pc.lhs) + " rhs=" + fmt(pc.rhs);
      }
    }
  }
  double t = seconds_since(t0);
  report(4, "ntv properties + weak (1,1)", ok,
         "200 instances, t=" + fmt(t) + "s" +
             (first_fail.empty() ? "" : ", first fail: " + first_fail));
}

// ---- criterion 5: Whitney bracket ----------------------------------------
bool whitney_bracket_exact(const grid_function& omega, const whitney_result& wh) {
  const grid& g = omega.g;
  const int dim = g.dim();
  const std::int64_t n = g.cells[0];
  int cell_gen = 0;
  for (std::int64_t m = n; m > 1; m >>= 1) ++cell_gen;
  std::vector<std::array<std::int64_t, 3>> comp;
  for (std::int64_t i = 0; i < g.total(); ++i)
    if (omega.values[i] != 1.0) comp.push_back(g.unflat(i));
  for (const auto& qc : wh.cubes) {
    const std::int64_t S = std::int64_t{1} << (cell_gen - qc.generation);
    std::array<std::int64_t, 3> a{0, 0, 0};
    for (int d = 0; d < dim; ++d) a[d] = qc.coords[d] * S;
    std::int64_t best = n;
    for (int d = 0; d < dim; ++d) {
      best = std::min(best, a[d]);
      best = std::min(best, n - (a[d] + S));
    }
    std::int64_t d2 = best * best;
    for (const auto& v : comp) {
      std::int64_t acc = 0;
      for (int d = 0; d < dim; ++d) {
        std::int64_t gap = 0;
        if (v[d] + 1 < a[d]) gap = a[d] - (v[d] + 1);
        else if (v[d] > a[d] + S) gap = v[d] - (a[d] + S);
        acc += gap * gap;
      }
      d2 = std::min(d2, acc);
    }
    if (!(4 * dim * S * S <= d2 && d2 <= 64 * dim * S * S)) return false;
  }
  return true;
}

void criterion5() {
  std::mt19937_64 rng(0x3141);
  bool ok = true;
  std::string why;
  for (int rep = 0; rep < 100; ++rep) {
    const bool two_d = rep >= 60;
    grid g = two_d ? make_uniform_grid(make_box({0.0, 0.0}, {1.0, 1.0}), 1.0 / 32)
                   : make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 128);
    grid_function omega = make_grid_function(g);
    int blobs = 1 + static_cast<int>(rng() % 4);
    for (int b = 0; b < blobs; ++b) {
      std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
      for (int d = 0; d < g.dim(); ++d) {
        std::int64_t a1 = static_cast<std::int64_t>(rng() % g.cells[d]);
        std::int64_t a2 = static_cast<std::int64_t>(rng() % g.cells[d]);
        lo[d] = std::min(a1, a2);
        hi[d] = std::max(a1, a2);
      }
      std::array<std::int64_t, 3> idx = lo;
      for (;;) {
        omega.values[static_cast<std::size_t>(g.flat(idx))] = 1.0;
        int d = g.dim() - 1;
        while (d >= 0 && ++idx[d] > hi[d]) idx[d] = lo[d], --d;
        if (d < 0) break;
      }
    }
    auto wh = whitney_decompose(omega);
    if (!whitney_bracket_exact(omega, wh)) {
      ok = false;
      why = "bracket violated at rep " + std::to_string(rep);
      break;
    }
    if (static_cast<std::int64_t>(wh.residue_cells.size()) > wh.boundary_cell_count) {
      ok = false;
      why = "residue above boundary bound at rep " + std::to_string(rep);
      break;
    }
  }
  // hand-derived list for Omega = (0,1)
  {
    grid g = make_uniform_grid(make_box({0.0}, {1.0}), std::ldexp(1.0, -7));
    grid_function omega = make_grid_function(g, 1.0);
    auto wh = whitney_decompose(omega);
    auto brute = oracles::brute_whitney(omega);
    bool match = brute.size() == wh.cubes.size();
    std::vector<std::pair<int, std::int64_t>> expect_g3{{3, 2}, {3, 3}, {3, 4}, {3, 5}};
    for (auto [gen, c] : expect_g3) {
      bool found = false;
      for (const auto& qc : wh.cubes) found = found || (qc.generation == gen && qc.coords[0] == c);
      match = match && found;
    }
    for (std::size_t i = 0; match && i < brute.size(); ++i)
      match = brute[i].gen == wh.cubes[i].generation && brute[i].coords == wh.cubes[i].coords;
    if (!match) {
      ok = false;
      why = "unit-interval cube list mismatch";
    }
  }
  report(5, "whitney bracket 2..8 exact", ok, ok ? "100 random sets + unit interval" : why);
}

// ---- criterion 6: operator oracles ---------------------------------------
void criterion6() {
  const double h = std::ldexp(1.0, -12);
  bool ok = true;
  std::string detail;

  // T 1_{[0,1]}(2) = ln 2
  {
    grid src = make_uniform_grid(make_box({0.0}, {1.0}), h);
    grid_function f = indicator_1d(src, 0.0, 1.0);
    grid tg = make_uniform_grid(make_box({1.75 - 0.5 * h}, {2.25 + 0.5 * h}), h);
    auto r = apply_operator(hilbert_op(), f, tg);
    std::int64_t mid = tg.total() / 2;
    double got = r.values.values[static_cast<std::size_t>(mid)];
    ok = ok && std::fabs(tg.midpoint(mid)[0] - 2.0) < 1e-12 && std::fabs(got - std::log(2.0)) <= 1e-3;
    detail += "T1(2)=" + fmt(got);
  }
  // distribution of T 1 on [-8, 9]
  {
    grid src = make_uniform_grid(make_box({0.0}, {1.0}), h);
    grid_function f = indicator_1d(src, 0.0, 1.0);
    grid tg = make_uniform_grid(make_box({-8.0}, {9.0}), h);
    auto r = apply_operator(hilbert_op(), f, tg);
    double worst = 0;
    for (int k = 0; k <= 24; ++k) {
      double alpha = 0.25 * std::pow(16.0, k / 24.0); // log spaced in [0.25, 4]
      double got = distribution_function(r.values, alpha);
      worst = std::max(worst, std::fabs(got - oracles::hilbert_indicator_distribution(alpha)));
    }
    ok = ok && worst <= 1e-2;
    detail += ", dist_err=" + fmt(worst);
  }
  // weak-type quasi-norm on [-100, 101]
  {
    grid src = make_uniform_grid(make_box({0.0}, {1.0}), h);
    grid_function f = indicator_1d(src, 0.0, 1.0);
    grid tg = make_uniform_grid(make_box({-100.0}, {101.0}), h);
    auto r = apply_operator(hilbert_op(), f, tg);
    auto rep = weak_type_quasi_norm(r.values, 1.0, log_alpha_grid(1e-3, 1e2, 50));
    ok = ok && rep.quasi_norm >= 1.9 && rep.quasi_norm <= 2.0;
    detail += ", quasi=" + fmt(rep.quasi_norm);
  }
  report(6, "operator oracles", ok, detail);
}

// ---- criterion 7: theorem constants --------------------------------------
void criterion7() {
  double c_cz = theorem_constant(1, 1.0, 2.0, proof_method::cz);
  double c_ntv = theorem_constant(1, 1.0, 2.0, proof_method::ntv);
  bool ok = c_cz == 14.0 && c_ntv == 28574.0;
  report(7, "theorem constants exact", ok, "cz=" + fmt(c_cz) + ", ntv=" + fmt(c_ntv));
}

// ---- criterion 8: end-to-end weak (q,q) verification ----------------------
void criterion8() {
  auto t0 = std::chrono::steady_clock::now();
  grid g = make_uniform_grid(make_box({-2.0}, {2.0}), 1.0 / 256);
  auto testset = standard_testset(g, 20, 0xC0FFEE);
  seminorm_params p;
  p.radii = {1.0};
  p.y_spacing = 1e-3;
  p.outer_spacing = 1e-3;
  auto rep = verify_theorem1(hilbert_op(), 1.0, testset, log_alpha_grid(1e-3, 1e2, 50),
                             proof_method::cz, p, 16.0);
  double t = seconds_since(t0);
  bool ok = rep.pass && rep.constant == 14.0 && rep.margin >= 10.0 && !rep.inconclusive &&
            t < 300.0;
  report(8, "theorem 1 end to end", ok,
         "max_ratio=" + fmt(rep.max_ratio) + ", margin=" + fmt(rep.margin) + ", t=" + fmt(t) +
             "s");
}

// ---- criterion 9: proof traces --------------------------------------------
void criterion9() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string first_fail;
  auto run_trace = [&](proof_method m, const operator_spec& op, const grid_function& f,
                       double alpha, double q, const std::string& tag) {
    proof_trace tr = m == proof_method::cz ? trace_cz_proof(op, f, alpha, q)
                                           : trace_ntv_proof(op, f, alpha, q);
    if (!tr.overall && first_fail.empty()) {
      ok = false;
      for (const auto& st : tr.steps)
        if (!st.pass) {
          first_fail = tag + "/" + st.name + " lhs=" + fmt(st.lhs) + " rhs=" + fmt(st.rhs);
          break;
        }
    }
    return tr;
  };

  grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 256);
  operator_spec bump_inf;
  bump_inf.k = bump_kernel();
  bump_inf.strong_exponent = inf;
  bump_inf.strong_bound = 10.0;

  // nine finite-s instances + one s = inf per method
  int done = 0;
  for (int i = 0; i < 9; ++i) {
    grid_function f = random_dyadic_step(g, 1000 + i, 3 + i % 3, 0.0, 1.0, false);
    double q = (i % 3 == 0) ? 1.0 : (i % 3 == 1) ? 1.5 : 2.0;
    operator_spec op = (q == 2.0) ? hilbert_op(4.0, 7.6) : hilbert_op();
    run_trace(proof_method::cz, op, f, 1.0, q, "cz#" + std::to_string(i));
    ++done;
  }
  {
    grid_function f = random_dyadic_step(g, 2000, 4, 0.0, 1.0, false);
    auto tr = run_trace(proof_method::cz, bump_inf, f, 10.0, 1.0, "cz-inf");
    bool empty_step = false;
    for (const auto& st : tr.steps)
      empty_step = empty_step || (st.name == "good part empty" && st.lhs == 0.0 && st.pass);
    if (!empty_step) {
      ok = false;
      if (first_fail.empty()) first_fail = "cz-inf good-part step missing";
    }
    ++done;
  }
  for (int i = 0; i < 9; ++i) {
    grid_function f = random_dyadic_step(g, 3000 + i, 3 + i % 3, 0.0, 1.0, true);
    double q = (i % 3 == 0) ? 1.0 : (i % 3 == 1) ? 1.5 : 2.0;
    operator_spec op = (q == 2.0) ? hilbert_op(4.0, 7.6) : hilbert_op();
    run_trace(proof_method::ntv, op, f, 1.0, q, "ntv#" + std::to_string(i));
    ++done;
  }
  {
    grid_function f = random_dyadic_step(g, 4000, 4, 0.0, 1.0, true);
    auto tr = run_trace(proof_method::ntv, bump_inf, f, 10.0, 1.0, "ntv-inf");
    bool empty_step = false;
    for (const auto& st : tr.steps)
      empty_step = empty_step || (st.name == "good part empty" && st.lhs == 0.0 && st.pass);
    if (!empty_step) {
      ok = false;
      if (first_fail.empty()) first_fail = "ntv-inf good-part step missing";
    }
    ++done;
  }
  double t = seconds_since(t0);
  report(9, "proof traces", ok,
         std::to_string(done) + " instances, t=" + fmt(t) + "s" +
             (first_fail.empty() ? "" : ", first fail: " + first_fail));
}

// ---- criterion 10: interpolation range + L^p stability ---------------------
void criterion10() {
  bool ok = true;
  std::string detail;
  {
    auto r1 = interpolation_range(1.0, inf);
    auto r2 = interpolation_range(2.0, 4.0);
    auto r3 = interpolation_range(2.0, 3.0);
    ok = r1.lower == 1.0 && r1.upper == inf && r2.lower == 4.0 / 3.0 && r2.upper == 4.0 &&
         r3.lower == 1.5 && r3.upper == 3.0;
    detail = "ranges exact";
  }
  {
    grid g = make_uniform_grid(make_box({-2.0}, {2.0}), 1.0 / 256);
    std::vector<labeled_function> testset{
        {"bump", smooth_bump(g, 0.0, 1.0)},
        {"dipole", dipole(g, 0.0, 1.0, 0.5)},
        {"step", random_dyadic_step(g, 11, 3, 0.0, 1.0, false)}};
    auto rep = verify_lp_range(hilbert_op(), 1.0, testset, {1.25, 1.5, 2.0, 3.0});
    ok = ok && rep.refinement_stable;
    double worst = 0;
    for (const auto& row : rep.rows) worst = std::max(worst, row.drift);
    detail += ", worst drift=" + fmt(worst);
  }
  report(10, "interpolation range + Lp stability", ok, detail);
}

} // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  std::printf("czkit acceptance suite (%s)\n", version_string);
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
