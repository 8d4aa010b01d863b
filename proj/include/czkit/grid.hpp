#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace czkit {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Points live in R^n with n <= 3; unused entries stay zero.
using vec3 = std::array<double, 3>;

inline double norm2(const vec3& x, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += x[d] * x[d];
  return std::sqrt(s);
}

// Hoelder conjugate with the conventions 1' = inf and inf' = 1.
inline double conjugate_exponent(double p) {
  if (p < 1.0) throw std::invalid_argument("conjugate_exponent: p < 1");
  if (p == 1.0) return inf;
  if (p == inf) return 1.0;
  return p / (p - 1.0);
}

// v_n, the volume of the unit ball in R^n. Integer dimensions up to 3 are
// returned in closed form so downstream constants stay exact.
inline double unit_ball_volume(int n) {
  if (n <= 0) throw std::invalid_argument("unit_ball_volume: n must be >= 1");
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default:
      return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  }
}

struct box {
  int dim = 1;
  vec3 lower{};
  vec3 upper{};

  double length(int axis) const { return upper[axis] - lower[axis]; }
};

inline box make_box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.size() != upper.size() || lower.empty() || lower.size() > 3)
    throw std::invalid_argument("make_box: need matching corners, dimension 1..3");
  box b;
  b.dim = static_cast<int>(lower.size());
  for (int d = 0; d < b.dim; ++d) {
    b.lower[d] = lower[d];
    b.upper[d] = upper[d];
    if (!(b.lower[d] < b.upper[d]))
      throw std::invalid_argument("make_box: lower[" + std::to_string(d) +
                                  "] must be < upper[" + std::to_string(d) + "]");
  }
  return b;
}

// Uniform grid with one spacing on every axis; samples sit at cell midpoints
// lower + (k + 1/2) h, values stored row-major with axis 0 slowest.
struct grid {
  box domain;
  double spacing = 1.0;
  std::array<std::int64_t, 3> cells{1, 1, 1};

  int dim() const { return domain.dim; }

  std::int64_t total() const {
    std::int64_t t = 1;
    for (int d = 0; d < dim(); ++d) t *= cells[d];
    return t;
  }

  double cell_volume() const {
    double v = 1;
    for (int d = 0; d < dim(); ++d) v *= spacing;
    return v;
  }

  double point(int axis, std::int64_t i) const {
    return domain.lower[axis] + (static_cast<double>(i) + 0.5) * spacing;
  }

  std::int64_t flat(const std::array<std::int64_t, 3>& idx) const {
    std::int64_t f = 0;
    for (int d = 0; d < dim(); ++d) f = f * cells[d] + idx[d];
    return f;
  }

  std::array<std::int64_t, 3> unflat(std::int64_t f) const {
    std::array<std::int64_t, 3> idx{0, 0, 0};
    for (int d = dim() - 1; d >= 0; --d) {
      idx[d] = f % cells[d];
      f /= cells[d];
    }
    return idx;
  }

  vec3 midpoint(std::int64_t f) const {
    auto idx = unflat(f);
    vec3 x{};
    for (int d = 0; d < dim(); ++d) x[d] = point(d, idx[d]);
    return x;
  }
};

inline grid make_uniform_grid(const box& b, double h) {
  if (!(h > 0)) throw std::invalid_argument("make_uniform_grid: spacing must be positive");
  grid g;
  g.domain = b;
  g.spacing = h;
  for (int d = 0; d < b.dim; ++d) {
    double ratio = b.length(d) / h;
    double rounded = std::round(ratio);
    if (rounded < 1 || std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
      throw std::invalid_argument(
          "make_uniform_grid: axis " + std::to_string(d) +
          " length is not an integer multiple of the spacing");
    g.cells[d] = static_cast<std::int64_t>(rounded);
  }
  return g;
}

struct grid_function {
  grid g;
  std::vector<double> values;

  double& operator[](std::int64_t i) { return values[i]; }
  double operator[](std::int64_t i) const { return values[i]; }
};

inline grid_function make_grid_function(const grid& g, double fill = 0.0) {
  grid_function u;
  u.g = g;
  u.values.assign(static_cast<std::size_t>(g.total()), fill);
  return u;
}

template <class F>
inline grid_function sample(const grid& g, F&& f) {
  grid_function u = make_grid_function(g);
  const std::int64_t n = g.total();
  for (std::int64_t i = 0; i < n; ++i) u.values[i] = f(g.midpoint(i));
  return u;
}

inline void check_finite(const grid_function& u, const char* who) {
  for (double v : u.values)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": values must be finite");
}

// Midpoint Riemann sum h^n * sum(values); stands in for every integral over
// R^n (functions are extended by zero off the grid box).
inline double integrate(const grid_function& u) {
  double s = 0;
  for (double v : u.values) s += v;
  return s * u.g.cell_volume();
}

inline double lq_norm(const grid_function& u, double q) {
  if (q < 1.0) throw std::invalid_argument("lq_norm: q must be >= 1");
  if (q == inf) {
    double m = 0;
    for (double v : u.values) m = std::max(m, std::fabs(v));
    return m;
  }
  double s = 0;
  if (q == 1.0) {
    for (double v : u.values) s += std::fabs(v);
  } else if (q == 2.0) {
    for (double v : u.values) s += v * v;
  } else {
    for (double v : u.values) s += std::pow(std::fabs(v), q);
  }
  return std::pow(s * u.g.cell_volume(), 1.0 / q);
}

// Axis-aligned cube given by center and side length.
struct cube {
  int dim = 1;
  vec3 center{};
  double side = 1.0;

  double diameter() const { return std::sqrt(static_cast<double>(dim)) * side; }
  double volume() const {
    double v = 1;
    for (int d = 0; d < dim; ++d) v *= side;
    return v;
  }
  bool contains(const vec3& x) const {
    for (int d = 0; d < dim; ++d)
      if (std::fabs(x[d] - center[d]) > 0.5 * side) return false;
    return true;
  }
};

} // namespace czkit
