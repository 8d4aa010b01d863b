#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace czkit {

enum class kernel_kind { generic, zero, hilbert, riesz, bump };

// Convolution kernel K on R^n \ {0} with size constant A: |K(x)| <= A/|x|^n.
// Built-in kernels carry a kind tag so hot loops can inline the evaluator.
struct kernel {
  kernel_kind kind = kernel_kind::generic;
  int dim = 1;
  int component = 1; // Riesz component index (1-based)
  double size_constant = 1.0;
  bool homogeneous = false; // K(t x) = t^-n K(x) for t > 0
  std::string label = "custom";
  std::function<double(const vec3&)> fn;

  double operator()(const vec3& x) const;
};

namespace detail {

inline double eval_riesz(const vec3& x, int dim, int component) {
  double r = norm2(x, dim);
  double rn = r;
  for (int d = 0; d < dim; ++d) rn *= r; // r^(n+1)
  return x[component - 1] / rn;
}

inline double eval_bump(const vec3& x) {
  double t = x[0];
  if (std::fabs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

} // namespace detail

inline double kernel::operator()(const vec3& x) const {
  switch (kind) {
    case kernel_kind::zero: return 0.0;
    case kernel_kind::hilbert: return 1.0 / x[0];
    case kernel_kind::riesz: return detail::eval_riesz(x, dim, component);
    case kernel_kind::bump: return detail::eval_bump(x);
    default: return fn(x);
  }
}

// Instantiates f with an inlineable evaluator for the kernel's kind. The hot
// quadrature loops go through this so built-ins avoid std::function calls.
template <class F>
inline decltype(auto) dispatch_kernel(const kernel& k, F&& f) {
  switch (k.kind) {
    case kernel_kind::zero:
      return f([](const vec3&) { return 0.0; });
    case kernel_kind::hilbert:
      return f([](const vec3& x) { return 1.0 / x[0]; });
    case kernel_kind::riesz:
      return f([n = k.dim, c = k.component](const vec3& x) { return detail::eval_riesz(x, n, c); });
    case kernel_kind::bump:
      return f([](const vec3& x) { return detail::eval_bump(x); });
    default:
      return f([&k](const vec3& x) { return k.fn(x); });
  }
}

// Checked evaluation: rejects x = 0 and any sample violating the size bound.
inline double evaluate_kernel(const kernel& k, const vec3& x) {
  double r = norm2(x, k.dim);
  if (!(r > 0)) throw std::invalid_argument("evaluate_kernel: x must be nonzero");
  double v = k(x);
  double bound = k.size_constant / std::pow(r, k.dim);
  if (std::fabs(v) > bound * (1.0 + 1e-9))
    throw std::domain_error("evaluate_kernel: size bound A/|x|^n violated at |x| = " +
                            std::to_string(r));
  return v;
}

namespace detail {

// Size-bound validation on a deterministic random point cloud; radii are
// log-uniform in [1e-3, 1e3]. The bound is only needed so the operator is
// well-defined, but a violating kernel is rejected up front.
inline void validate_size_bound(const kernel& k) {
  std::mt19937_64 rng(0x637a6b69746b6eULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 256; ++i) {
    double r = std::exp(std::log(1e-3) + unit(rng) * (std::log(1e3) - std::log(1e-3)));
    vec3 dir{};
    double len = 0;
    do {
      for (int d = 0; d < k.dim; ++d) dir[d] = gauss(rng);
      len = norm2(dir, k.dim);
    } while (len < 1e-8);
    vec3 x{};
    for (int d = 0; d < k.dim; ++d) x[d] = dir[d] / len * r;
    double v = k(x);
    double bound = k.size_constant / std::pow(r, k.dim);
    if (std::fabs(v) > bound * (1.0 + 1e-9))
      throw std::domain_error("kernel '" + k.label + "': size bound violated at |x| = " +
                              std::to_string(r));
  }
}

} // namespace detail

inline kernel zero_kernel(int n = 1) {
  kernel k;
  k.kind = kernel_kind::zero;
  k.dim = n;
  k.size_constant = 1.0;
  k.homogeneous = true;
  k.label = "zero";
  return k;
}

// K(x) = 1/x on R \ {0}; A = 1, homogeneous of degree -1.
inline kernel hilbert_kernel() {
  kernel k;
  k.kind = kernel_kind::hilbert;
  k.dim = 1;
  k.size_constant = 1.0;
  k.homogeneous = true;
  k.label = "hilbert";
  return k;
}

// K(x) = x_i / |x|^{n+1}; A = 1, homogeneous of degree -n.
inline kernel riesz_kernel(int n, int component) {
  if (n < 2 || n > 3) throw std::invalid_argument("riesz_kernel: n must be 2 or 3");
  if (component < 1 || component > n)
    throw std::invalid_argument("riesz_kernel: component out of range");
  kernel k;
  k.kind = kernel_kind::riesz;
  k.dim = n;
  k.component = component;
  k.size_constant = 1.0;
  k.homogeneous = true;
  k.label = "riesz:" + std::to_string(component);
  return k;
}

// Smooth kernel supported in [-1, 1]; differences K(x-y) - K(x) vanish once
// the inner radius passes the support, which makes seminorm slices exactly
// zero for large R. It is also bounded on L^inf with norm at most its mass.
inline kernel bump_kernel() {
  kernel k;
  k.kind = kernel_kind::bump;
  k.dim = 1;
  k.size_constant = 1.0;
  k.homogeneous = false;
  k.label = "bump";
  return k;
}

// 1-D kernel from a sample table (x, K(x)), linearly interpolated inside the
// table's range and zero outside it.
inline kernel tabulated_kernel(std::vector<std::pair<double, double>> samples, double A,
                               std::string label = "custom") {
  if (samples.size() < 2) throw std::invalid_argument("tabulated_kernel: need at least 2 samples");
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i - 1].first < samples[i].first))
      throw std::invalid_argument("tabulated_kernel: duplicate abscissa");
  if (!(A > 0)) throw std::invalid_argument("tabulated_kernel: A must be positive");
  kernel k;
  k.dim = 1;
  k.size_constant = A;
  k.label = std::move(label);
  k.fn = [tab = std::move(samples)](const vec3& x) {
    double t = x[0];
    if (t <= tab.front().first || t >= tab.back().first) {
      if (t == tab.front().first) return tab.front().second;
      if (t == tab.back().first) return tab.back().second;
      return 0.0;
    }
    auto it = std::upper_bound(tab.begin(), tab.end(), std::make_pair(t, inf));
    auto lo = it - 1;
    double w = (t - lo->first) / (it->first - lo->first);
    return lo->second + w * (it->second - lo->second);
  };
  detail::validate_size_bound(k);
  return k;
}

} // namespace czkit
