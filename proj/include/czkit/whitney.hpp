#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dyadic.hpp"
#include "grid.hpp"

namespace czkit {

struct whitney_result {
  std::vector<dyadic_cube> cubes;       // maximal dyadic Q subset Omega with 2 diam(Q) <= dist(Q, Omega^c)
  std::vector<std::int64_t> residue_cells; // cells of Omega left uncovered (flat grid indices)
  double residue_measure = 0;
  std::int64_t boundary_cell_count = 0; // cells of Omega with dist(cell, Omega^c) < 2 sqrt(n) h
};

namespace detail {

// All geometry in integer cell units at the finest generation; comparisons of
// 2 diam <= dist <= 8 diam reduce to exact integer inequalities on squares.
struct whitney_workspace {
  int dim = 1;
  std::int64_t n_cells = 1; // per axis
  const std::vector<char>* in_omega = nullptr;

  // squared distance between the closed cube [a, a+S]^n and the closed unit
  // cell at v, in cell units
  static std::int64_t cube_cell_dist2(const std::array<std::int64_t, 3>& a, std::int64_t S,
                                      const std::array<std::int64_t, 3>& v, int dim) {
    std::int64_t d2 = 0;
    for (int d = 0; d < dim; ++d) {
      std::int64_t gap = 0;
      if (v[d] + 1 < a[d]) gap = a[d] - (v[d] + 1);
      else if (v[d] > a[d] + S) gap = v[d] - (a[d] + S);
      d2 += gap * gap;
    }
    return d2;
  }

  // squared distance from the cube to the complement of the grid box
  std::int64_t outside_dist2(const std::array<std::int64_t, 3>& a, std::int64_t S) const {
    std::int64_t best = n_cells; // per-axis gaps are < n_cells
    for (int d = 0; d < dim; ++d) {
      best = std::min(best, a[d]);
      best = std::min(best, n_cells - (a[d] + S));
    }
    return best * best;
  }

  // Exact squared distance to the complement, capped: returns a value >= cap
  // when every complement cell is at squared distance >= cap. Only cells
  // within the cap radius matter, so the scan stays local to the cube.
  std::int64_t dist2_to_complement(const std::array<std::int64_t, 3>& a, std::int64_t S,
                                   std::int64_t cap) const {
    std::int64_t best = outside_dist2(a, S);
    if (best >= cap) best = cap;
    if (best == 0) return 0;
    std::int64_t radius = 1;
    while (radius * radius < std::min(best, cap)) ++radius;
    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      lo[d] = std::max<std::int64_t>(0, a[d] - radius - 1);
      hi[d] = std::min<std::int64_t>(n_cells - 1, a[d] + S + radius);
    }
    std::array<std::int64_t, 3> v = lo;
    for (;;) {
      std::int64_t flat = 0;
      for (int d = 0; d < dim; ++d) flat = flat * n_cells + v[d];
      if (!(*in_omega)[static_cast<std::size_t>(flat)]) {
        std::int64_t d2 = cube_cell_dist2(a, S, v, dim);
        if (d2 < best) best = d2;
        if (best == 0) return 0;
      }
      int d = dim - 1;
      while (d >= 0 && ++v[d] > hi[d]) v[d] = lo[d], --d;
      if (d < 0) break;
    }
    return best;
  }

  bool cube_inside_omega(const std::array<std::int64_t, 3>& a, std::int64_t S) const {
    std::array<std::int64_t, 3> idx = a;
    for (;;) {
      std::int64_t flat = 0;
      for (int d = 0; d < dim; ++d) flat = flat * n_cells + idx[d];
      if (!(*in_omega)[static_cast<std::size_t>(flat)]) return false;
      int d = dim - 1;
      while (d >= 0 && ++idx[d] == a[d] + S) idx[d] = a[d], --d;
      if (d < 0) return true;
    }
  }

  bool cube_touches_omega(const std::array<std::int64_t, 3>& a, std::int64_t S) const {
    std::array<std::int64_t, 3> idx = a;
    for (;;) {
      std::int64_t flat = 0;
      for (int d = 0; d < dim; ++d) flat = flat * n_cells + idx[d];
      if ((*in_omega)[static_cast<std::size_t>(flat)]) return true;
      int d = dim - 1;
      while (d >= 0 && ++idx[d] == a[d] + S) idx[d] = a[d], --d;
      if (d < 0) return false;
    }
  }
};

} // namespace detail

// Whitney decomposition of a discrete open set: Omega is the union of grid
// cells where the indicator is exactly 1. Returns the maximal dyadic cubes
// Q subset Omega with 2 diam(Q) <= d(Q, Omega^c); the complement includes
// everything outside the grid box. Maximality of the selection forces
// d(Q, Omega^c) <= 6 diam(Q), inside the bracket [2 diam, 8 diam]. Cells of
// Omega closer than 2 sqrt(n) h to the complement cannot carry a legal cube
// of any generation and may remain uncovered; they are reported as residue.
inline whitney_result whitney_decompose(const grid_function& omega) {
  const grid& g = omega.g;
  const int dim = g.dim();
  const int cell_gen = dyadic_cell_generation(g, "whitney_decompose");
  const std::int64_t n_cells = g.cells[0];

  std::vector<char> in_omega(static_cast<std::size_t>(g.total()));
  for (std::int64_t i = 0; i < g.total(); ++i) {
    double v = omega.values[i];
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument("whitney_decompose: indicator values must be exactly 0 or 1");
    in_omega[static_cast<std::size_t>(i)] = (v == 1.0);
  }

  detail::whitney_workspace ws;
  ws.dim = dim;
  ws.n_cells = n_cells;
  ws.in_omega = &in_omega;

  whitney_result out;
  const dyadic_frame frame = frame_of_grid(g);

  // top-down: select the first cube on each branch satisfying the criterion,
  // which is exactly the maximal one
  struct item {
    int gen;
    std::array<std::int64_t, 3> coords;
  };
  std::vector<item> stack{{0, {0, 0, 0}}};
  std::vector<char> covered(static_cast<std::size_t>(g.total()), 0);
  while (!stack.empty()) {
    item it = stack.back();
    stack.pop_back();
    const std::int64_t S = std::int64_t{1} << (cell_gen - it.gen); // side in cells
    std::array<std::int64_t, 3> a{0, 0, 0};
    for (int d = 0; d < dim; ++d) a[d] = it.coords[d] * S;

    if (!ws.cube_touches_omega(a, S)) continue;
    if (ws.cube_inside_omega(a, S)) {
      // criterion (2 diam)^2 <= dist^2  <=>  4 n S^2 <= dist2
      const std::int64_t need = 4 * dim * S * S;
      if (ws.dist2_to_complement(a, S, need) >= need) {
        dyadic_cube q;
        q.frame = frame;
        q.generation = it.gen;
        q.coords = it.coords;
        out.cubes.push_back(q);
        // mark covered cells
        std::array<std::int64_t, 3> idx = a;
        for (;;) {
          std::int64_t flat = 0;
          for (int d = 0; d < dim; ++d) flat = flat * n_cells + idx[d];
          covered[static_cast<std::size_t>(flat)] = 1;
          int d = dim - 1;
          while (d >= 0 && ++idx[d] == a[d] + S) idx[d] = a[d], --d;
          if (d < 0) break;
        }
        continue;
      }
    }
    if (it.gen == cell_gen) continue; // cell-level cube failed: residue
    for (std::int64_t bits = 0; bits < (std::int64_t{1} << dim); ++bits) {
      item child;
      child.gen = it.gen + 1;
      for (int d = 0; d < dim; ++d) child.coords[d] = 2 * it.coords[d] + ((bits >> d) & 1);
      stack.push_back(child);
    }
  }

  for (std::int64_t i = 0; i < g.total(); ++i) {
    if (in_omega[static_cast<std::size_t>(i)] && !covered[static_cast<std::size_t>(i)])
      out.residue_cells.push_back(i);
    if (in_omega[static_cast<std::size_t>(i)]) {
      auto v = g.unflat(i);
      if (ws.dist2_to_complement(v, 1, 4 * dim) < 4 * dim) ++out.boundary_cell_count;
    }
  }
  out.residue_measure = static_cast<double>(out.residue_cells.size()) * g.cell_volume();

  // deterministic order: by generation, then coordinates
  std::sort(out.cubes.begin(), out.cubes.end(), [](const dyadic_cube& x, const dyadic_cube& y) {
    if (x.generation != y.generation) return x.generation < y.generation;
    return x.coords < y.coords;
  });
  return out;
}

} // namespace czkit
