#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "kernel.hpp"
#include "parallel.hpp"

namespace czkit {

// Discretization knobs for the smoothness seminorms. The sup over R > 0 is
// replaced by a finite radius set (dyadic by default; for homogeneous kernels
// the slices are R-independent, so this loses nothing). Spacings are relative
// to R: the shift variable y is sampled at y_spacing * R over the ball
// |y| <= R, and the outer integral over 2R <= |x| <= outer_factor * R uses
// cells of size outer_spacing * R at the inner edge, growing geometrically
// with |x| to match the kernel's decay. With convergence_check on, the
// maximizing slice is recomputed with the outer cutoff doubled and the
// difference is reported as the truncation error estimate.
struct seminorm_params {
  std::vector<double> radii{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0, 4.0, 8.0, 16.0};
  double y_spacing = 1e-3;
  double outer_factor = 1e4;
  double outer_spacing = 1e-3;
  bool convergence_check = true;
};

struct seminorm_slice {
  double radius;
  double value;
};

struct seminorm_estimate {
  double value = 0;                    // max over the radius set
  std::vector<seminorm_slice> slices;  // one entry per R, ascending
  double truncation_error = 0;         // |slice at 2*rho - slice at rho| at the argmax R
  seminorm_params params;
};

namespace detail {

inline void validate_seminorm_args(double r, const seminorm_params& p, const char* who) {
  if (r < 1.0) throw std::invalid_argument(std::string(who) + ": r must be >= 1");
  if (p.radii.empty()) throw std::invalid_argument(std::string(who) + ": empty radius set");
  if (!(p.outer_factor > 2.0)) throw std::invalid_argument(std::string(who) + ": outer factor must exceed 2");
  if (!(p.y_spacing > 0) || !(p.outer_spacing > 0))
    throw std::invalid_argument(std::string(who) + ": spacings must be positive");
  for (double R : p.radii)
    if (!(R > 0)) throw std::invalid_argument(std::string(who) + ": radii must be positive");
}

// Lattice budget: the quadrature point counts grow like spacing^-n, which is
// easy to blow up in higher dimensions; fail early with a clear message.
inline void check_lattice_budget(double per_axis, int dim, const char* what) {
  double total = 1;
  for (int d = 0; d < dim; ++d) total *= per_axis;
  if (total > 3e7)
    throw std::invalid_argument(std::string(what) +
                                ": lattice would need ~" + std::to_string(total) +
                                " points; coarsen the spacing for this dimension");
}

// One geometric shell 2^m R <= |x| < 2^{m+1} R (the last one clipped at the
// outer cutoff), discretized by a midpoint lattice whose cell size scales
// with the inner radius. Kernel values K(x_c) are cached since they do not
// depend on the shift y.
struct shell_quadrature {
  double inner = 0, outer = 0;
  double cell_volume = 0;
  std::vector<vec3> centers;
  std::vector<double> kernel_at_center;
};

template <class K>
inline std::vector<shell_quadrature> build_shells(K&& keval, int dim, double R, double rho,
                                                  double outer_spacing_rel) {
  std::vector<shell_quadrature> shells;
  const double cutoff = rho * R;
  for (double a = 2.0 * R; a < cutoff * (1.0 - 1e-12); a *= 2.0) {
    shell_quadrature s;
    s.inner = a;
    s.outer = std::min(2.0 * a, cutoff);
    const double w_target = outer_spacing_rel * (a / 2.0);
    if (dim == 1) {
      std::int64_t m = std::max<std::int64_t>(1, std::llround((s.outer - s.inner) / w_target));
      double w = (s.outer - s.inner) / static_cast<double>(m);
      s.cell_volume = w;
      s.centers.reserve(static_cast<std::size_t>(2 * m));
      for (std::int64_t i = 0; i < m; ++i) {
        double x = s.inner + (static_cast<double>(i) + 0.5) * w;
        s.centers.push_back(vec3{x, 0, 0});
        s.centers.push_back(vec3{-x, 0, 0});
      }
    } else {
      std::int64_t m = std::max<std::int64_t>(2, std::llround(2.0 * s.outer / w_target));
      check_lattice_budget(static_cast<double>(m), dim, "seminorm outer lattice");
      double w = 2.0 * s.outer / static_cast<double>(m);
      s.cell_volume = 1;
      for (int d = 0; d < dim; ++d) s.cell_volume *= w;
      std::array<std::int64_t, 3> idx{0, 0, 0};
      for (;;) {
        vec3 x{};
        for (int d = 0; d < dim; ++d) x[d] = -s.outer + (static_cast<double>(idx[d]) + 0.5) * w;
        double rr = norm2(x, dim);
        if (rr >= s.inner && rr < s.outer) s.centers.push_back(x);
        int d = dim - 1;
        while (d >= 0 && ++idx[d] == m) idx[d--] = 0;
        if (d < 0) break;
      }
    }
    s.kernel_at_center.reserve(s.centers.size());
    for (const vec3& x : s.centers) s.kernel_at_center.push_back(keval(x));
    shells.push_back(std::move(s));
  }
  return shells;
}

// Midpoint samples of the ball |y| <= R; weights are normalized empirically
// so the L^r average in y is taken against a genuine probability measure,
// which makes monotonicity in r hold at the discrete level.
struct ball_samples {
  std::vector<vec3> points;
  double weight = 0;       // single cell volume
  double total_weight = 0; // sum over kept cells
};

inline ball_samples build_ball(int dim, double R, double y_spacing_rel) {
  ball_samples b;
  std::int64_t m = std::max<std::int64_t>(1, std::llround(2.0 / y_spacing_rel));
  check_lattice_budget(static_cast<double>(m), dim, "seminorm shift lattice");
  double w = 2.0 * R / static_cast<double>(m);
  b.weight = 1;
  for (int d = 0; d < dim; ++d) b.weight *= w;
  std::array<std::int64_t, 3> idx{0, 0, 0};
  for (;;) {
    vec3 y{};
    for (int d = 0; d < dim; ++d) y[d] = -R + (static_cast<double>(idx[d]) + 0.5) * w;
    if (norm2(y, dim) <= R * (1.0 + 1e-12)) b.points.push_back(y);
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == m) idx[d--] = 0;
    if (d < 0) break;
  }
  b.total_weight = b.weight * static_cast<double>(b.points.size());
  return b;
}

// Inner Hoermander integral at one shift: int |K(x - y) - K(x)| dx over the
// shell family.
template <class K>
inline double shift_integral(K&& keval, int dim, const std::vector<shell_quadrature>& shells,
                             const vec3& y) {
  double total = 0;
  for (const auto& s : shells) {
    double acc = 0;
    const std::size_t m = s.centers.size();
    for (std::size_t i = 0; i < m; ++i) {
      vec3 xy = s.centers[i];
      for (int d = 0; d < dim; ++d) xy[d] -= y[d];
      acc += std::fabs(keval(xy) - s.kernel_at_center[i]);
    }
    total += acc * s.cell_volume;
  }
  return total;
}

template <class K>
inline double hr_slice(K&& keval, int dim, double r, double R, double rho,
                       const seminorm_params& p) {
  auto shells = build_shells(keval, dim, R, rho, p.outer_spacing);
  auto ball = build_ball(dim, R, p.y_spacing);
  std::vector<double> phi(ball.points.size());
  parallel_for(static_cast<std::int64_t>(ball.points.size()), [&](std::int64_t i) {
    phi[static_cast<std::size_t>(i)] = shift_integral(keval, dim, shells, ball.points[static_cast<std::size_t>(i)]);
  });
  if (r == inf) {
    double m = 0;
    for (double v : phi) m = std::max(m, v);
    return m;
  }
  double acc = 0;
  const double wnorm = ball.weight / ball.total_weight;
  for (double v : phi) acc += wnorm * std::pow(v, r);
  return std::pow(acc, 1.0 / r);
}

template <class K>
inline double watson_slice(K&& keval, int dim, double r, double R, double rho,
                           const seminorm_params& p) {
  auto shells = build_shells(keval, dim, R, rho, p.outer_spacing);
  // Watson's sum runs over full dyadic annuli only.
  while (!shells.empty() && shells.back().outer < 2.0 * shells.back().inner * (1.0 - 1e-12))
    shells.pop_back();
  auto ball = build_ball(dim, R, p.y_spacing);
  const double weight_exponent = static_cast<double>(dim) / conjugate_exponent(r);
  std::vector<double> sums(ball.points.size());
  parallel_for(static_cast<std::int64_t>(ball.points.size()), [&](std::int64_t iy) {
    const vec3& y = ball.points[static_cast<std::size_t>(iy)];
    double total = 0;
    for (const auto& s : shells) {
      double acc = 0;
      double peak = 0;
      const std::size_t m = s.centers.size();
      for (std::size_t i = 0; i < m; ++i) {
        vec3 xy = s.centers[i];
        for (int d = 0; d < dim; ++d) xy[d] -= y[d];
        double diff = std::fabs(keval(xy) - s.kernel_at_center[i]);
        if (r == inf)
          peak = std::max(peak, diff);
        else
          acc += std::pow(diff, r);
      }
      double piece = (r == inf) ? peak : std::pow(acc * s.cell_volume, 1.0 / r);
      total += std::pow(s.inner, weight_exponent) * piece;
    }
    sums[static_cast<std::size_t>(iy)] = total;
  });
  double m = 0;
  for (double v : sums) m = std::max(m, v);
  return m;
}

template <class Slice>
inline seminorm_estimate assemble_estimate(const seminorm_params& p, Slice&& slice_at) {
  seminorm_params sorted = p;
  std::sort(sorted.radii.begin(), sorted.radii.end());
  seminorm_estimate est;
  est.params = sorted;
  double best = -1;
  double best_R = sorted.radii.front();
  for (double R : sorted.radii) {
    double v = slice_at(R, sorted.outer_factor);
    est.slices.push_back({R, v});
    if (v > best) {
      best = v;
      best_R = R;
    }
  }
  est.value = best;
  if (sorted.convergence_check) {
    double refined = slice_at(best_R, 2.0 * sorted.outer_factor);
    est.truncation_error = std::fabs(refined - best);
  }
  return est;
}

} // namespace detail

// [K]_{H_r} = sup_R [ (1/(v_n R^n)) int_{|y|<=R} ( int_{|x|>=2R} |K(x-y)-K(x)| dx )^r dy ]^{1/r};
// r = inf recovers the Hoermander seminorm [K]_H. The y-sup for r = inf is a
// max over lattice samples and therefore biased slightly low.
inline seminorm_estimate hr_seminorm(const kernel& k, double r, const seminorm_params& p = {}) {
  detail::validate_seminorm_args(r, p, "hr_seminorm");
  return dispatch_kernel(k, [&](auto&& keval) {
    return detail::assemble_estimate(p, [&](double R, double rho) {
      return detail::hr_slice(keval, k.dim, r, R, rho, p);
    });
  });
}

// Watson's annulus form: sup_R sup_{|y|<=R} sum_m (2^m R)^{n/r'}
// [ int_{2^m R <= |x| < 2^{m+1} R} |K(x-y)-K(x)|^r dx ]^{1/r}, the sum
// truncated at the last full annulus inside the outer cutoff. For r = 1 the
// sum telescopes to the full outer integral, matching [K]_H; for r = inf the
// bracket is the essential sup on each annulus.
inline seminorm_estimate watson_seminorm(const kernel& k, double r, const seminorm_params& p = {}) {
  detail::validate_seminorm_args(r, p, "watson_seminorm");
  return dispatch_kernel(k, [&](auto&& keval) {
    return detail::assemble_estimate(p, [&](double R, double rho) {
      return detail::watson_slice(keval, k.dim, r, R, rho, p);
    });
  });
}

} // namespace czkit
