#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cz_decomposition.hpp"
#include "ntv_decomposition.hpp"
#include "operator.hpp"
#include "proof_trace.hpp"
#include "seminorm.hpp"
#include "verify.hpp"
#include "version.hpp"
#include "whitney.hpp"

namespace czkit {

using nlohmann::json;

inline json finite_or_string(double v) {
  if (v == inf) return json("inf");
  if (v == -inf) return json("-inf");
  return json(v);
}

inline json to_json(const seminorm_estimate& est) {
  json slices = json::array();
  for (const auto& s : est.slices) slices.push_back({{"R", s.radius}, {"value", s.value}});
  return json{{"value", est.value},
              {"truncation_error", est.truncation_error},
              {"slices", slices},
              {"params",
               {{"radii", est.params.radii},
                {"y_spacing", est.params.y_spacing},
                {"outer_spacing", est.params.outer_spacing},
                {"outer_factor", est.params.outer_factor},
                {"convergence_check", est.params.convergence_check}}}};
}

inline json cube_entry(const cube& c, double mass) {
  json center = json::array();
  for (int d = 0; d < c.dim; ++d) center.push_back(c.center[d]);
  return json{{"center", center}, {"side", c.side}, {"mass", mass}};
}

inline json properties_json(const std::vector<property_check>& checks) {
  // one entry per numbered property; multi-part properties report the part
  // with the largest lhs/rhs ratio
  json props = json::object();
  auto ratio = [](double lhs, double rhs) { return rhs > 0 ? lhs / rhs : (lhs > 0 ? inf : 0.0); };
  for (const auto& pc : checks) {
    std::string key = pc.name.substr(0, pc.name.find(' '));
    json entry{{"lhs", pc.lhs}, {"rhs", pc.rhs}, {"pass", pc.pass}};
    if (!props.contains(key)) {
      props[key] = entry;
      continue;
    }
    bool merged_pass = props[key]["pass"].get<bool>() && pc.pass;
    if (ratio(pc.lhs, pc.rhs) >
        ratio(props[key]["lhs"].get<double>(), props[key]["rhs"].get<double>()))
      props[key] = entry;
    props[key]["pass"] = merged_pass;
  }
  return props;
}

inline json to_json(const cz_decomposition& dec) {
  json cubes = json::array();
  const double cellvol = dec.decomposition_grid.cell_volume();
  for (std::size_t j = 0; j < dec.cubes.size(); ++j) {
    double mass = 0;
    detail::for_each_cube_cell(dec.decomposition_grid, dec.cell_generation, dec.cubes[j],
                               [&](std::int64_t flat) {
                                 mass += std::fabs(dec.f.values[static_cast<std::size_t>(flat)]);
                               });
    cubes.push_back(cube_entry(dec.cubes[j].to_cube(), mass * cellvol));
  }
  return json{{"method", "cz"},
              {"height", dec.height},
              {"q", dec.q},
              {"dilate_factor", dec.dilate_factor},
              {"cubes", cubes},
              {"properties", properties_json(check_cz_properties(dec))}};
}

inline json to_json(const ntv_decomposition& dec) {
  json cubes = json::array();
  for (std::size_t j = 0; j < dec.cubes.size(); ++j)
    cubes.push_back(cube_entry(dec.cubes[j].to_cube(), dec.piece_masses[j]));
  json ecubes = json::array();
  for (std::size_t j = 0; j < dec.compensating.size(); ++j)
    ecubes.push_back(cube_entry(dec.compensating[j], dec.piece_masses[j]));
  return json{{"method", "ntv"},
              {"height", dec.height},
              {"q", dec.q},
              {"dilate_factor", dec.dilate_factor},
              {"omega_measure", dec.omega_measure},
              {"residue_measure", dec.residue_measure},
              {"cubes", cubes},
              {"compensating_cubes", ecubes},
              {"properties", properties_json(check_ntv_properties(dec))}};
}

inline json to_json(const whitney_result& wh) {
  json cubes = json::array();
  for (const auto& qc : wh.cubes) cubes.push_back(cube_entry(qc.to_cube(), 0.0));
  return json{{"cubes", cubes},
              {"residue_measure", wh.residue_measure},
              {"residue_cells", wh.residue_cells.size()},
              {"boundary_cell_count", wh.boundary_cell_count}};
}

inline json to_json(const proof_trace& tr) {
  json steps = json::array();
  for (const auto& st : tr.steps)
    steps.push_back({{"name", st.name},
                     {"anchor", st.anchor},
                     {"lhs", st.lhs},
                     {"rhs", st.rhs},
                     {"tol", st.tol},
                     {"pass", st.pass}});
  return json{{"method", method_name(tr.method)},
              {"steps", steps},
              {"overall", tr.overall},
              {"alpha", tr.alpha},
              {"q", tr.q},
              {"s", finite_or_string(tr.s)},
              {"B", tr.strong_bound},
              {"gamma", tr.gamma},
              {"height", tr.height},
              {"kernel_seminorm", tr.kernel_seminorm},
              {"constant", tr.constant},
              {"cube_count", tr.cube_count},
              {"f_norm_q", tr.f_norm_q}};
}

inline json to_json(const weak_type_report& rep) {
  return json{{"quasi_norm", rep.quasi_norm}, {"argmax_alpha", rep.argmax_alpha}};
}

inline json to_json(const theorem_report& rep) {
  json per_f = json::array();
  for (std::size_t i = 0; i < rep.test_labels.size(); ++i) {
    double worst = 0;
    for (double r : rep.ratios[i]) worst = std::max(worst, r);
    per_f.push_back({{"label", rep.test_labels[i]}, {"max_ratio", worst}});
  }
  return json{{"kernel", rep.kernel_label},
              {"method", rep.method},
              {"q", rep.q},
              {"s", finite_or_string(rep.s)},
              {"B", rep.strong_bound},
              {"kernel_seminorm", to_json(rep.kernel_seminorm)},
              {"tests", per_f},
              {"max_ratio", rep.max_ratio},
              {"constant", rep.constant},
              {"margin", finite_or_string(rep.margin)},
              {"inconclusive", rep.inconclusive},
              {"pass", rep.pass}};
}

inline json to_json(const lp_range_report& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"p", r.p},
                    {"max_ratio_h", r.max_ratio_coarse},
                    {"max_ratio_h_over_2", r.max_ratio_fine},
                    {"drift", r.drift}});
  return json{{"lower", rep.range.lower},
              {"upper", finite_or_string(rep.range.upper)},
              {"rows", rows},
              {"drift_tolerance", rep.drift_tolerance},
              {"refinement_stable", rep.refinement_stable}};
}

} // namespace czkit
