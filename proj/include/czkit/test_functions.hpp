#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"

namespace czkit {

struct labeled_function {
  std::string label;
  grid_function values;
};

// Splits every cell into 2^n children carrying the parent value: the same
// L^q function represented at spacing h/2.
inline grid_function refine_split(const grid_function& u) {
  grid fine = u.g;
  fine.spacing = 0.5 * u.g.spacing;
  for (int d = 0; d < u.g.dim(); ++d) fine.cells[d] = 2 * u.g.cells[d];
  grid_function v = make_grid_function(fine);
  const std::int64_t total = fine.total();
  for (std::int64_t i = 0; i < total; ++i) {
    auto idx = fine.unflat(i);
    std::array<std::int64_t, 3> coarse{0, 0, 0};
    for (int d = 0; d < u.g.dim(); ++d) coarse[d] = idx[d] / 2;
    v.values[static_cast<std::size_t>(i)] = u.values[static_cast<std::size_t>(u.g.flat(coarse))];
  }
  return v;
}

// Indicator of [a, b) sampled on the grid (n = 1); exact when a and b sit on
// the cell lattice.
inline grid_function indicator_1d(const grid& g, double a, double b) {
  if (g.dim() != 1) throw std::invalid_argument("indicator_1d: grid must be 1-D");
  grid_function u = make_grid_function(g);
  for (std::int64_t i = 0; i < g.total(); ++i) {
    double x = g.point(0, i);
    if (x > a && x < b) u.values[static_cast<std::size_t>(i)] = 1.0;
  }
  return u;
}

// Piecewise-constant function on 2^level dyadic subintervals of [a, a+len),
// values drawn from the seeded generator; nonneg selects [0.25, 4] instead
// of [-2, 2] \ {small}.
inline grid_function random_dyadic_step(const grid& g, std::uint64_t seed, int level, double a,
                                        double len, bool nonneg) {
  if (g.dim() != 1) throw std::invalid_argument("random_dyadic_step: grid must be 1-D");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::int64_t pieces = std::int64_t{1} << level;
  std::vector<double> vals(static_cast<std::size_t>(pieces));
  for (auto& v : vals) {
    if (nonneg)
      v = 0.25 + 3.75 * unit(rng);
    else {
      v = -2.0 + 4.0 * unit(rng);
      if (std::fabs(v) < 0.1) v = 0.1; // keep the norm away from zero
    }
  }
  grid_function u = make_grid_function(g);
  for (std::int64_t i = 0; i < g.total(); ++i) {
    double x = g.point(0, i);
    if (x <= a || x >= a + len) continue;
    auto k = static_cast<std::int64_t>((x - a) / len * static_cast<double>(pieces));
    if (k >= 0 && k < pieces) u.values[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(k)];
  }
  return u;
}

inline grid_function smooth_bump(const grid& g, double center, double halfwidth,
                                 double amplitude = 1.0) {
  if (g.dim() != 1) throw std::invalid_argument("smooth_bump: grid must be 1-D");
  return sample(g, [&](const vec3& x) {
    double t = (x[0] - center) / halfwidth;
    if (std::fabs(t) >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / (1.0 - t * t));
  });
}

// Mean-zero pair of opposite bumps.
inline grid_function dipole(const grid& g, double center, double separation, double halfwidth) {
  grid_function plus = smooth_bump(g, center - 0.5 * separation, halfwidth, 1.0);
  grid_function minus = smooth_bump(g, center + 0.5 * separation, halfwidth, -1.0);
  for (std::size_t i = 0; i < plus.values.size(); ++i) plus.values[i] += minus.values[i];
  return plus;
}

// The verification corpus: dyadic indicators, seeded dyadic step functions,
// smooth bumps, and dipoles, all supported well inside the given grid box.
inline std::vector<labeled_function> standard_testset(const grid& g, int count,
                                                      std::uint64_t seed) {
  std::vector<labeled_function> out;
  auto add = [&](std::string label, grid_function f) {
    if (static_cast<int>(out.size()) < count) out.push_back({std::move(label), std::move(f)});
  };
  add("indicator[0,1)", indicator_1d(g, 0.0, 1.0));
  add("indicator[0,1/2)", indicator_1d(g, 0.0, 0.5));
  add("indicator[1/4,3/8)", indicator_1d(g, 0.25, 0.375));
  add("indicator[1/2,1)", indicator_1d(g, 0.5, 1.0));
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 8; ++i) {
    int level = 3 + static_cast<int>(rng() % 3);
    add("step#" + std::to_string(i), random_dyadic_step(g, rng(), level, 0.0, 1.0, false));
  }
  add("bump(0.5,0.5)", smooth_bump(g, 0.5, 0.5));
  add("bump(0,1)", smooth_bump(g, 0.0, 1.0));
  add("bump(1,0.25)", smooth_bump(g, 1.0, 0.25, 2.0));
  add("bump(-0.5,0.75)", smooth_bump(g, -0.5, 0.75, 0.5));
  add("dipole(0.5,1,0.5)", dipole(g, 0.5, 1.0, 0.5));
  add("dipole(0,0.5,0.25)", dipole(g, 0.0, 0.5, 0.25));
  add("dipole(0.25,1.5,0.5)", dipole(g, 0.25, 1.5, 0.5));
  add("dipole(0,2,0.75)", dipole(g, 0.0, 2.0, 0.75));
  while (static_cast<int>(out.size()) < count) {
    int i = static_cast<int>(out.size());
    add("extra-step#" + std::to_string(i), random_dyadic_step(g, rng(), 4, 0.0, 1.0, false));
  }
  return out;
}

} // namespace czkit
