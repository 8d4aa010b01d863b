#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadic.hpp"
#include "grid.hpp"
#include "maximal.hpp" // window_sums

namespace czkit {

struct property_check {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  bool pass = true;
};

inline bool property_holds(double lhs, double rhs, double rel_tol = 1e-12) {
  return lhs <= rhs * (1.0 + rel_tol) + 1e-300;
}

// L^q Calderon-Zygmund decomposition at a given height: maximal dyadic cubes
// where the average of |f|^q exceeds height^q, mean-corrected bad pieces, and
// the bounded good part. Everything lives on the root grid, which extends the
// input grid (zero-filled) until the root average drops below the threshold.
struct cz_decomposition {
  grid decomposition_grid;
  grid_function f;    // input embedded in the root grid
  grid_function good; // f off the cubes, the cube average on each cube
  grid_function bad;  // f - good = sum of the mean-zero pieces
  std::vector<dyadic_cube> cubes;
  std::vector<double> cube_averages; // average of f over each Q_j
  double height = 1;
  double q = 1;
  double dilate_factor = 2; // side ratio of Q_j* to Q_j: 2 sqrt(n)
  int cell_generation = 0;
};

inline cz_decomposition cz_decompose(const grid_function& input, double q, double height,
                                     std::optional<int> root_levels_up = std::nullopt) {
  if (q < 1.0) throw std::invalid_argument("cz_decompose: q must be >= 1");
  if (!(height > 0)) throw std::invalid_argument("cz_decompose: height must be positive");
  check_finite(input, "cz_decompose");
  if (!(lq_norm(input, q) > 0)) throw std::invalid_argument("cz_decompose: f must have positive L^q norm");
  (void)dyadic_cell_generation(input.g, "cz_decompose");

  const int dim = input.g.dim();
  const double L = input.g.domain.length(0);
  double mass_q = 0;
  for (double v : input.values) mass_q += std::pow(std::fabs(v), q);
  mass_q *= input.g.cell_volume();
  const double threshold = std::pow(height, q);

  // Root: the smallest dyadic ancestor of the grid box (growing up and to the
  // right in the tree anchored at the box corner) whose |f|^q average is at
  // or below the threshold.
  auto root_average = [&](int j) {
    double vol = 1;
    for (int d = 0; d < dim; ++d) vol *= std::ldexp(L, j);
    return mass_q / vol;
  };
  int levels = 0;
  if (root_levels_up) {
    levels = *root_levels_up;
    if (levels < 0) throw std::invalid_argument("cz_decompose: root_levels_up must be >= 0");
    if (root_average(levels) > threshold)
      throw std::invalid_argument(
          "cz_decompose: root average of |f|^q exceeds height^q; choose a larger root");
  } else {
    while (root_average(levels) > threshold) {
      ++levels;
      if (levels > 40) throw std::invalid_argument("cz_decompose: cannot find a legal root");
    }
  }
  {
    double total_cells = std::pow(2.0, dim * levels) * static_cast<double>(input.g.total());
    if (total_cells > double(1 << 24))
      throw std::invalid_argument("cz_decompose: root grid too large; increase the height");
  }

  // Embed f in the root grid (original cells occupy the low corner).
  grid root = input.g;
  for (int d = 0; d < dim; ++d) {
    root.domain.upper[d] = root.domain.lower[d] + std::ldexp(L, levels);
    root.cells[d] = input.g.cells[d] << levels;
  }
  grid_function f = make_grid_function(root);
  for (std::int64_t i = 0; i < input.g.total(); ++i) {
    auto idx = input.g.unflat(i);
    f.values[static_cast<std::size_t>(root.flat(idx))] = input.values[i];
  }

  grid_function fq = f;
  for (double& v : fq.values) v = std::pow(std::fabs(v), q);
  detail::window_sums sums_q(fq);
  detail::window_sums sums_f(f);

  cz_decomposition out;
  out.decomposition_grid = root;
  out.f = f;
  out.height = height;
  out.q = q;
  out.dilate_factor = 2.0 * std::sqrt(static_cast<double>(dim));
  out.cell_generation = dyadic_cell_generation(root, "cz_decompose");

  const dyadic_frame frame = frame_of_grid(root);

  struct item {
    int gen;
    std::array<std::int64_t, 3> coords;
  };
  std::vector<item> stack{{0, {0, 0, 0}}};
  while (!stack.empty()) {
    item it = stack.back();
    stack.pop_back();
    const std::int64_t S = std::int64_t{1} << (out.cell_generation - it.gen);
    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      lo[d] = it.coords[d] * S;
      hi[d] = lo[d] + S - 1;
    }
    double cells_in = 1;
    for (int d = 0; d < dim; ++d) cells_in *= static_cast<double>(S);
    double avg_q = sums_q.window(lo, hi) / cells_in;
    if (it.gen > 0 && avg_q > threshold) {
      dyadic_cube qc;
      qc.frame = frame;
      qc.generation = it.gen;
      qc.coords = it.coords;
      out.cubes.push_back(qc);
      out.cube_averages.push_back(sums_f.window(lo, hi) / cells_in);
      continue;
    }
    if (avg_q == 0.0 || it.gen == out.cell_generation) continue;
    for (std::int64_t bits = 0; bits < (std::int64_t{1} << dim); ++bits) {
      item child;
      child.gen = it.gen + 1;
      for (int d = 0; d < dim; ++d) child.coords[d] = 2 * it.coords[d] + ((bits >> d) & 1);
      stack.push_back(child);
    }
  }
  std::vector<std::size_t> order(out.cubes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = out.cubes[a];
    const auto& y = out.cubes[b];
    if (x.generation != y.generation) return x.generation < y.generation;
    return x.coords < y.coords;
  });
  {
    std::vector<dyadic_cube> cs;
    std::vector<double> as;
    for (std::size_t i : order) {
      cs.push_back(out.cubes[i]);
      as.push_back(out.cube_averages[i]);
    }
    out.cubes = std::move(cs);
    out.cube_averages = std::move(as);
  }

  out.good = f;
  out.bad = make_grid_function(root);
  for (std::size_t j = 0; j < out.cubes.size(); ++j) {
    const auto& qc = out.cubes[j];
    const std::int64_t S = std::int64_t{1} << (out.cell_generation - qc.generation);
    std::array<std::int64_t, 3> a{0, 0, 0};
    for (int d = 0; d < dim; ++d) a[d] = qc.coords[d] * S;
    std::array<std::int64_t, 3> idx = a;
    for (;;) {
      std::int64_t flat = root.flat(idx);
      out.good.values[static_cast<std::size_t>(flat)] = out.cube_averages[j];
      out.bad.values[static_cast<std::size_t>(flat)] =
          f.values[static_cast<std::size_t>(flat)] - out.cube_averages[j];
      int d = dim - 1;
      while (d >= 0 && ++idx[d] == a[d] + S) idx[d] = a[d], --d;
      if (d < 0) break;
    }
  }
  return out;
}

namespace detail {

// Iterates the flat grid indices covered by a dyadic cube of the grid's tree.
template <class F>
inline void for_each_cube_cell(const grid& g, int cell_generation, const dyadic_cube& qc, F&& body) {
  const int dim = g.dim();
  const std::int64_t S = std::int64_t{1} << (cell_generation - qc.generation);
  std::array<std::int64_t, 3> a{0, 0, 0};
  for (int d = 0; d < dim; ++d) a[d] = qc.coords[d] * S;
  std::array<std::int64_t, 3> idx = a;
  for (;;) {
    body(g.flat(idx));
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == a[d] + S) idx[d] = a[d], --d;
    if (d < 0) return;
  }
}

} // namespace detail

// The five properties of the L^q decomposition, evaluated on a result. The
// set-level facts are exact; integral comparisons carry a 1e-12-scale
// rounding allowance.
inline std::vector<property_check> check_cz_properties(const cz_decomposition& dec) {
  const int n = dec.decomposition_grid.dim();
  const double q = dec.q;
  const double t = dec.height;
  const double cellvol = dec.decomposition_grid.cell_volume();
  const double fq_norm = lq_norm(dec.f, q);
  const double f_sup = lq_norm(dec.f, inf);

  std::vector<property_check> out;
  auto push = [&](const std::string& name, double lhs, double rhs) {
    out.push_back({name, lhs, rhs, property_holds(lhs, rhs)});
  };

  push("(1) good sup bound", lq_norm(dec.good, inf), std::pow(2.0, n / q) * t);
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
                    std::pow(t, -q) * std::pow(fq_norm, q), true};
  p2.pass = disjoint && property_holds(p2.lhs, p2.rhs);
  out.push_back(p2);

  double worst3 = 0, worst4 = 0;
  double bad_q_q = 0, bad_1 = 0;
  for (std::size_t j = 0; j < dec.cubes.size(); ++j) {
    const auto& qc = dec.cubes[j];
    double vol = qc.volume();
    double piece_q = 0, piece_int = 0, piece_abs = 0;
    detail::for_each_cube_cell(dec.decomposition_grid, dec.cell_generation, qc,
                               [&](std::int64_t flat) {
                                 double b = dec.bad.values[static_cast<std::size_t>(flat)];
                                 piece_q += std::pow(std::fabs(b), q);
                                 piece_int += b;
                                 piece_abs += std::fabs(b);
                               });
    piece_q *= cellvol;
    piece_int *= cellvol;
    piece_abs *= cellvol;
    bad_q_q += piece_q;
    bad_1 += piece_abs;
    worst3 = std::max(worst3, piece_q / (std::pow(2.0, n + q) * std::pow(t, q) * vol));
    if (f_sup > 0) worst4 = std::max(worst4, std::fabs(piece_int) / (vol * f_sup));
  }
  push("(3) piece q-norm vs cube volume", worst3, 1.0);
  out.push_back({"(4) mean zero pieces", worst4, 1e-12, worst4 <= 1e-12});
  push("(5) bad q-norm", std::pow(bad_q_q, 1.0 / q),
       std::pow(2.0, (n + q) / q) * fq_norm);
  push("(5) bad L1 norm", bad_1, 2.0 * std::pow(t, 1.0 - q) * std::pow(fq_norm, q));
  return out;
}

} // namespace czkit
