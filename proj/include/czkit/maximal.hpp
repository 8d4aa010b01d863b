#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "parallel.hpp"

namespace czkit {

namespace detail {

// Inclusive n-D prefix sums for O(1) window sums (weights are cell counts of
// u; multiply by h^n at the call site).
struct window_sums {
  std::array<std::int64_t, 3> cells{1, 1, 1};
  int dim = 1;
  std::vector<double> table;

  explicit window_sums(const grid_function& u) {
    dim = u.g.dim();
    cells = u.g.cells;
    table = u.values;
    // sweep each axis in turn
    std::int64_t stride = 1;
    for (int d = dim - 1; d >= 0; --d) {
      const std::int64_t n = cells[d];
      const std::int64_t total = u.g.total();
      for (std::int64_t base = 0; base < total; ++base) {
        std::int64_t pos = (base / stride) % n;
        if (pos > 0) table[base] += table[base - stride];
      }
      stride *= n;
    }
  }

  // sum of u over the index window [lo, hi] (clamped), inclusive
  double window(std::array<std::int64_t, 3> lo, std::array<std::int64_t, 3> hi) const {
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::max<std::int64_t>(lo[d], 0);
      hi[d] = std::min<std::int64_t>(hi[d], cells[d] - 1);
      if (lo[d] > hi[d]) return 0;
    }
    double acc = 0;
    // inclusion-exclusion over the 2^dim corners
    for (int mask = 0; mask < (1 << dim); ++mask) {
      std::array<std::int64_t, 3> idx{0, 0, 0};
      int sign = 1;
      bool valid = true;
      for (int d = 0; d < dim; ++d) {
        if (mask & (1 << d)) {
          idx[d] = lo[d] - 1;
          sign = -sign;
          if (idx[d] < 0) {
            valid = false;
            break;
          }
        } else {
          idx[d] = hi[d];
        }
      }
      if (!valid) continue;
      std::int64_t flat = 0;
      for (int d = 0; d < dim; ++d) flat = flat * cells[d] + idx[d];
      acc += sign * table[flat];
    }
    return acc;
  }
};

} // namespace detail

// Centered Hardy-Littlewood maximal function over cubes: at each grid point
// the max over cubes of side (2k+1)h, k = 0, 1, ..., of the average of u with
// u extended by zero outside the grid box. The k = 0 term is the single-cell
// average, so M u >= u pointwise. This is the variant whose weak (1,1)
// constant is the Vitali covering constant 3^n.
inline grid_function maximal_function(const grid_function& u) {
  for (double v : u.values)
    if (v < 0) throw std::invalid_argument("maximal_function: input must be nonnegative");
  const grid& g = u.g;
  const int dim = g.dim();
  detail::window_sums sums(u);

  // The max over radii only has to visit cubes between first touching and
  // fully covering the support box: smaller cubes average zero and larger
  // ones dilute the full support mass.
  std::array<std::int64_t, 3> supp_lo{0, 0, 0}, supp_hi{-1, -1, -1};
  bool any = false;
  for (std::int64_t i = 0; i < g.total(); ++i) {
    if (u.values[static_cast<std::size_t>(i)] == 0.0) continue;
    auto idx = g.unflat(i);
    if (!any) {
      supp_lo = supp_hi = idx;
      any = true;
    } else {
      for (int d = 0; d < dim; ++d) {
        supp_lo[d] = std::min(supp_lo[d], idx[d]);
        supp_hi[d] = std::max(supp_hi[d], idx[d]);
      }
    }
  }
  if (!any) return make_grid_function(g);

  grid_function out = make_grid_function(g);
  parallel_for(g.total(), [&](std::int64_t i) {
    auto idx = g.unflat(i);
    // k = 0 is the single-cell average, taken directly so M u >= u exactly
    double best = u.values[static_cast<std::size_t>(i)];
    std::int64_t k_touch = 0, k_cover = 0;
    for (int d = 0; d < dim; ++d) {
      k_touch = std::max({k_touch, supp_lo[d] - idx[d], idx[d] - supp_hi[d]});
      k_cover = std::max({k_cover, supp_hi[d] - idx[d], idx[d] - supp_lo[d]});
    }
    for (std::int64_t k = std::max<std::int64_t>(1, k_touch); k <= k_cover; ++k) {
      std::array<std::int64_t, 3> lo = idx, hi = idx;
      for (int d = 0; d < dim; ++d) {
        lo[d] -= k;
        hi[d] += k;
      }
      double mass = sums.window(lo, hi);
      double side = static_cast<double>(2 * k + 1);
      double cellsin = 1;
      for (int d = 0; d < dim; ++d) cellsin *= side;
      best = std::max(best, mass / cellsin);
    }
    out.values[static_cast<std::size_t>(i)] = best;
  });
  return out;
}

} // namespace czkit
