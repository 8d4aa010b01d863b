#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace czkit {

// Anchor of a dyadic tree: the generation-0 cube has corner `origin` and side
// `base`; generation k cubes have side base * 2^-k (k may be negative).
struct dyadic_frame {
  int dim = 1;
  vec3 origin{};
  double base = 1.0;
};

struct dyadic_cube {
  dyadic_frame frame;
  int generation = 0;
  std::array<std::int64_t, 3> coords{0, 0, 0};

  double side() const { return std::ldexp(frame.base, -generation); }
  double diameter() const { return std::sqrt(static_cast<double>(frame.dim)) * side(); }

  double volume() const {
    double v = 1;
    for (int d = 0; d < frame.dim; ++d) v *= side();
    return v;
  }

  cube to_cube() const {
    cube c;
    c.dim = frame.dim;
    c.side = side();
    for (int d = 0; d < frame.dim; ++d)
      c.center[d] = frame.origin[d] + (static_cast<double>(coords[d]) + 0.5) * c.side;
    return c;
  }

  dyadic_cube parent() const {
    dyadic_cube p = *this;
    p.generation = generation - 1;
    for (int d = 0; d < frame.dim; ++d) {
      // floor division, valid for negative coordinates too
      std::int64_t c = coords[d];
      p.coords[d] = (c >= 0) ? c / 2 : -((-c + 1) / 2);
    }
    return p;
  }

  std::vector<dyadic_cube> children() const {
    const int n = frame.dim;
    std::vector<dyadic_cube> kids;
    kids.reserve(std::size_t{1} << n);
    for (std::int64_t bits = 0; bits < (std::int64_t{1} << n); ++bits) {
      dyadic_cube k = *this;
      k.generation = generation + 1;
      for (int d = 0; d < n; ++d) k.coords[d] = 2 * coords[d] + ((bits >> d) & 1);
      kids.push_back(k);
    }
    return kids;
  }
};

// Decomposition algorithms run on grids whose box is the generation-0 cube of
// a dyadic tree and whose cells are the leaves; that requires a square box
// with a power-of-two cell count, checked here.
inline bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline int dyadic_cell_generation(const grid& g, const char* who) {
  const std::int64_t n0 = g.cells[0];
  for (int d = 1; d < g.dim(); ++d)
    if (g.cells[d] != n0)
      throw std::invalid_argument(std::string(who) + ": grid box must be square");
  if (!is_power_of_two(n0))
    throw std::invalid_argument(std::string(who) + ": cells per axis must be a power of two");
  int gen = 0;
  for (std::int64_t m = n0; m > 1; m >>= 1) ++gen;
  return gen;
}

inline dyadic_frame frame_of_grid(const grid& g) {
  dyadic_frame f;
  f.dim = g.dim();
  f.origin = g.domain.lower;
  f.base = g.domain.length(0);
  return f;
}

} // namespace czkit
