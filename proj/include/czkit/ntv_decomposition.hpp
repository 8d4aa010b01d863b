#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cz_decomposition.hpp" // property_check, for_each_cube_cell
#include "dyadic.hpp"
#include "grid.hpp"
#include "maximal.hpp"
#include "operator.hpp" // distribution_function
#include "whitney.hpp"

namespace czkit {

// Decomposition in the style of Nazarov, Treil, and Volberg: Omega is the
// superlevel set of the maximal function of f^q, tiled by Whitney cubes; the
// bad pieces are plain restrictions f 1_{Q_j} and the mean correction is
// carried by calibrated indicator masses on concentric cubes E_j.
//
// The grid is padded (concentrically, staying on the dyadic lattice) far
// enough that every point beyond the padded box provably has maximal average
// at most height^q, so the discrete Omega is the honest superlevel set.
// Whitney cubes cannot cover cells of Omega that hug its boundary; those
// cells are reported as residue and f = good + sum b_j + f 1_{residue}.
struct ntv_decomposition {
  grid decomposition_grid;
  grid_function f; // embedded input
  grid_function maximal_of_fq;
  std::vector<char> omega_mask; // per cell of the padded grid
  double omega_measure = 0;
  grid_function good; // f off Omega
  grid_function bad;  // f on the union of Whitney cubes
  std::vector<dyadic_cube> cubes;
  std::vector<double> piece_masses; // int of b_j over Q_j
  std::vector<cube> compensating;   // E_j, side |E_j|^{1/n}
  std::vector<std::int64_t> residue_cells;
  double residue_measure = 0;
  std::int64_t boundary_cell_count = 0;
  double height = 1;
  double q = 1;
  double dilate_factor = 17; // side ratio of Q_j* to Q_j: 17 sqrt(n)
  int cell_generation = 0;
};

inline ntv_decomposition ntv_decompose(const grid_function& input, double q, double height) {
  if (q < 1.0) throw std::invalid_argument("ntv_decompose: q must be >= 1");
  if (!(height > 0)) throw std::invalid_argument("ntv_decompose: height must be positive");
  check_finite(input, "ntv_decompose");
  for (double v : input.values)
    if (v < 0) throw std::invalid_argument("ntv_decompose: f must be nonnegative");
  (void)dyadic_cell_generation(input.g, "ntv_decompose");

  const int dim = input.g.dim();
  const std::int64_t n_in = input.g.cells[0];
  if (n_in < 2) throw std::invalid_argument("ntv_decompose: need at least 2 cells per axis");
  const double L = input.g.domain.length(0);
  const double h = input.g.spacing;
  const double threshold = std::pow(height, q);

  double mass_q = 0;
  for (double v : input.values) mass_q += std::pow(v, q);
  mass_q *= input.g.cell_volume();

  // Beyond distance D from the support, every centered-cube average of f^q is
  // at most mass / (2 D)^n; padding by twice the critical distance leaves a
  // 2^n safety factor.
  const double dstar = 0.5 * std::pow(mass_q / threshold, 1.0 / dim);
  const double pad = std::max(2.0 * dstar, 4.0 * h);
  int g_levels = 0;
  while (std::ldexp(L, g_levels) < L + 2.0 * pad) {
    ++g_levels;
    if (g_levels > 24) throw std::invalid_argument("ntv_decompose: height too small for this grid");
  }
  {
    double total_cells = std::pow(2.0, dim * g_levels) * static_cast<double>(input.g.total());
    if (total_cells > double(1 << 24))
      throw std::invalid_argument("ntv_decompose: padded grid too large; increase the height");
  }
  const std::int64_t offset = n_in * ((std::int64_t{1} << g_levels) - 1) / 2;

  grid padded = input.g;
  for (int d = 0; d < dim; ++d) {
    padded.cells[d] = n_in << g_levels;
    padded.domain.lower[d] = input.g.domain.lower[d] - static_cast<double>(offset) * h;
    padded.domain.upper[d] = padded.domain.lower[d] + static_cast<double>(padded.cells[d]) * h;
  }

  grid_function f = make_grid_function(padded);
  for (std::int64_t i = 0; i < input.g.total(); ++i) {
    auto idx = input.g.unflat(i);
    for (int d = 0; d < dim; ++d) idx[d] += offset;
    f.values[static_cast<std::size_t>(padded.flat(idx))] = input.values[i];
  }

  ntv_decomposition out;
  out.decomposition_grid = padded;
  out.f = f;
  out.height = height;
  out.q = q;
  out.dilate_factor = 17.0 * std::sqrt(static_cast<double>(dim));
  out.cell_generation = dyadic_cell_generation(padded, "ntv_decompose");

  grid_function fq = f;
  for (double& v : fq.values) v = std::pow(v, q);
  out.maximal_of_fq = maximal_function(fq);

  grid_function indicator = make_grid_function(padded);
  out.omega_mask.assign(static_cast<std::size_t>(padded.total()), 0);
  std::int64_t omega_count = 0;
  for (std::int64_t i = 0; i < padded.total(); ++i) {
    if (out.maximal_of_fq.values[static_cast<std::size_t>(i)] > threshold) {
      out.omega_mask[static_cast<std::size_t>(i)] = 1;
      indicator.values[static_cast<std::size_t>(i)] = 1.0;
      ++omega_count;
    }
  }
  out.omega_measure = static_cast<double>(omega_count) * padded.cell_volume();

  whitney_result wh = whitney_decompose(indicator);
  out.cubes = std::move(wh.cubes);
  out.residue_cells = std::move(wh.residue_cells);
  out.residue_measure = wh.residue_measure;
  out.boundary_cell_count = wh.boundary_cell_count;

  out.good = f;
  for (std::int64_t i = 0; i < padded.total(); ++i)
    if (out.omega_mask[static_cast<std::size_t>(i)]) out.good.values[static_cast<std::size_t>(i)] = 0;

  out.bad = make_grid_function(padded);
  const double cellvol = padded.cell_volume();
  const double ed_const = std::pow(out.dilate_factor, -static_cast<double>(dim) / q) / height;
  for (const auto& qc : out.cubes) {
    double mass = 0;
    detail::for_each_cube_cell(padded, out.cell_generation, qc, [&](std::int64_t flat) {
      double v = f.values[static_cast<std::size_t>(flat)];
      out.bad.values[static_cast<std::size_t>(flat)] = v;
      mass += v;
    });
    mass *= cellvol;
    out.piece_masses.push_back(mass);
    double evol = ed_const * mass;
    if (evol > qc.volume() * (1.0 + 1e-12))
      throw std::logic_error(
          "ntv_decompose: |E_j| formula exceeds |Q_j| (discretization fault; property (3) broken)");
    cube e;
    e.dim = dim;
    e.center = qc.to_cube().center;
    e.side = std::pow(evol, 1.0 / dim);
    out.compensating.push_back(e);
  }
  return out;
}

// Properties (1)-(4) of the construction plus the facts about the E_j; the
// measured weak (1,1) constant of the maximal operator is checked separately
// (see maximal_weak11_holds).
inline std::vector<property_check> check_ntv_properties(const ntv_decomposition& dec) {
  const int n = dec.decomposition_grid.dim();
  const double q = dec.q;
  const double t = dec.height;
  const double cellvol = dec.decomposition_grid.cell_volume();
  const double fq_norm = lq_norm(dec.f, q);
  const double dil = dec.dilate_factor; // 17 sqrt(n)

  std::vector<property_check> out;
  auto push = [&](const std::string& name, double lhs, double rhs) {
    out.push_back({name, lhs, rhs, property_holds(lhs, rhs)});
  };

  push("(1) good sup bound", lq_norm(dec.good, inf), t);
  push("(1) good q-norm", lq_norm(dec.good, q), fq_norm);

  double total_cube_volume = 0;
  bool disjoint = true;
  {
    std::vector<char> seen(static_cast<std::size_t>(dec.decomposition_grid.total()), 0);
    for (const auto& qc : dec.cubes) {
      total_cube_volume += qc.volume();
      detail::for_each_cube_cell(dec.decomposition_grid, dec.cell_generation, qc,
                                 [&](std::int64_t flat) {
                                   if (seen[static_cast<std::size_t>(flat)]) disjoint = false;
                                   seen[static_cast<std::size_t>(flat)] = 1;
                                 });
    }
  }
  property_check p2{"(2) disjoint cubes, total volume", total_cube_volume,
                    std::pow(3.0, n) * std::pow(t, -q) * std::pow(fq_norm, q), true};
  p2.pass = disjoint && property_holds(p2.lhs, p2.rhs);
  out.push_back(p2);

  double worst3 = 0;
  double bad_q_q = 0, bad_1 = 0;
  double worst_e = 0, worst_mean = 0;
  bool e_inside = true;
  for (std::size_t j = 0; j < dec.cubes.size(); ++j) {
    const auto& qc = dec.cubes[j];
    double vol = qc.volume();
    double piece_q = 0;
    detail::for_each_cube_cell(dec.decomposition_grid, dec.cell_generation, qc,
                               [&](std::int64_t flat) {
                                 double b = dec.bad.values[static_cast<std::size_t>(flat)];
                                 piece_q += std::pow(b, q);
                               });
    piece_q *= cellvol;
    bad_q_q += piece_q;
    bad_1 += dec.piece_masses[j];
    worst3 = std::max(worst3, piece_q / (std::pow(dil, n) * std::pow(t, q) * vol));

    const cube& e = dec.compensating[j];
    if (e.side > qc.side() * (1.0 + 1e-12)) e_inside = false;
    worst_e = std::max(worst_e, e.volume() / vol);
    double calibrated = std::pow(dil, static_cast<double>(n) / q) * t * e.volume();
    double scale = std::max(dec.piece_masses[j], t * vol);
    if (scale > 0)
      worst_mean = std::max(worst_mean, std::fabs(dec.piece_masses[j] - calibrated) / scale);
  }
  push("(3) piece q-norm vs cube volume", worst3, 1.0);
  push("(4) bad q-norm", std::pow(bad_q_q, 1.0 / q), fq_norm);
  push("(4) bad L1 norm", bad_1,
       std::pow(dil, static_cast<double>(n) / q) * std::pow(3.0, n) * std::pow(t, 1.0 - q) *
           std::pow(fq_norm, q));
  property_check pe{"E_j inside Q_j, volume ratio", worst_e, 1.0, true};
  pe.pass = e_inside && property_holds(pe.lhs, pe.rhs);
  out.push_back(pe);
  out.push_back({"E_j mean-zero calibration", worst_mean, 1e-12, worst_mean <= 1e-12});
  return out;
}

// lambda |{M u > lambda}| <= 3^n ||u||_1, the Vitali bound for the centered
// cube maximal operator.
inline property_check maximal_weak11_check(const grid_function& u, const grid_function& mu,
                                           double lambda) {
  double lhs = lambda * distribution_function(mu, lambda);
  double rhs = std::pow(3.0, u.g.dim()) * lq_norm(u, 1.0);
  return {"maximal weak (1,1)", lhs, rhs, property_holds(lhs, rhs)};
}

} // namespace czkit
