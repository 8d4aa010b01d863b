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

// Hypotheses of the weak-type theorem: the kernel, a strong exponent s with
// operator bound B on L^s, and the principal-value exclusion radius in units
// of the source grid spacing.
struct operator_spec {
  kernel k;
  double strong_exponent = 2.0;
  double strong_bound = 1.0;
  double exclusion_factor = 1.0;
};

struct operator_result {
  grid_function values;
  std::vector<std::uint8_t> excluded; // per target: 1 if any source cell was excluded
};

// Tf(x) = int K(x - y) f(y) dy by midpoint quadrature over the source cells,
// skipping cells with |x - y| < eps * h. When the target sits on the source
// lattice the surviving cells pair symmetrically about x, so the odd leading
// part of the singularity cancels; away from supp f no cell is excluded and
// the rule is plain midpoint quadrature.
inline operator_result apply_operator(const operator_spec& op, const grid_function& f,
                                      const grid& targets) {
  const grid& src = f.g;
  if (targets.domain.dim != src.domain.dim)
    throw std::invalid_argument("apply_operator: dimension mismatch");
  if (targets.spacing > src.spacing * (1.0 + 1e-12))
    throw std::invalid_argument("apply_operator: target grid is coarser than the source grid");
  if (op.k.dim != src.dim()) throw std::invalid_argument("apply_operator: kernel dimension mismatch");

  // Only nonzero source cells contribute; gather them once.
  std::vector<vec3> sources;
  std::vector<double> weights;
  const std::int64_t ns = src.total();
  for (std::int64_t i = 0; i < ns; ++i) {
    if (f.values[i] != 0.0) {
      sources.push_back(src.midpoint(i));
      weights.push_back(f.values[i]);
    }
  }

  const double cellvol = src.cell_volume();
  const double excl = op.exclusion_factor * src.spacing;
  const double excl2 = excl * excl;
  const int dim = src.dim();

  operator_result out;
  out.values = make_grid_function(targets);
  out.excluded.assign(static_cast<std::size_t>(targets.total()), 0);

  dispatch_kernel(op.k, [&](auto&& keval) {
    parallel_for(targets.total(), [&](std::int64_t t) {
      const vec3 x = targets.midpoint(t);
      double acc = 0;
      std::uint8_t flagged = 0;
      const std::size_t m = sources.size();
      for (std::size_t i = 0; i < m; ++i) {
        vec3 d{};
        double r2 = 0;
        for (int a = 0; a < dim; ++a) {
          d[a] = x[a] - sources[i][a];
          r2 += d[a] * d[a];
        }
        if (r2 < excl2) {
          flagged = 1;
          continue;
        }
        acc += keval(d) * weights[i];
      }
      out.values.values[static_cast<std::size_t>(t)] = acc * cellvol;
      out.excluded[static_cast<std::size_t>(t)] = flagged;
    });
  });
  return out;
}

// |{ |u| > alpha }| as a grid measure.
inline double distribution_function(const grid_function& u, double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("distribution_function: alpha must be positive");
  std::int64_t count = 0;
  for (double v : u.values)
    if (std::fabs(v) > alpha) ++count;
  return static_cast<double>(count) * u.g.cell_volume();
}

struct weak_type_report {
  std::vector<double> alphas;
  std::vector<double> distribution;
  double quasi_norm = 0;
  double argmax_alpha = 0;
};

// sup_alpha alpha |{ |u| > alpha }|^{1/q} over the supplied alpha grid.
inline weak_type_report weak_type_quasi_norm(const grid_function& u, double q,
                                             const std::vector<double>& alphas) {
  if (q < 1.0) throw std::invalid_argument("weak_type_quasi_norm: q must be >= 1");
  if (alphas.empty()) throw std::invalid_argument("weak_type_quasi_norm: empty alpha grid");
  weak_type_report rep;
  rep.alphas = alphas;
  std::sort(rep.alphas.begin(), rep.alphas.end());
  rep.distribution.reserve(rep.alphas.size());
  rep.argmax_alpha = rep.alphas.front();
  for (double a : rep.alphas) {
    double dist = distribution_function(u, a);
    rep.distribution.push_back(dist);
    double val = a * std::pow(dist, 1.0 / q);
    if (val > rep.quasi_norm) {
      rep.quasi_norm = val;
      rep.argmax_alpha = a;
    }
  }
  return rep;
}

// Logarithmic alpha grid: the weak-type sup can sit at either extreme, so the
// default spans several decades.
inline std::vector<double> log_alpha_grid(double lo = 1e-3, double hi = 1e2,
                                          int per_decade = 50) {
  if (!(lo > 0) || !(hi > lo) || per_decade < 1)
    throw std::invalid_argument("log_alpha_grid: bad range");
  std::vector<double> out;
  const double step = std::pow(10.0, 1.0 / per_decade);
  for (double a = lo; a <= hi * (1.0 + 1e-12); a *= step) out.push_back(a);
  return out;
}

// max over probes of ||Tf||_s / ||f||_s, a lower bound on the true operator
// norm (finite grids and truncation bias it low). Zero-norm probes are
// skipped; their count is reported through `skipped`.
inline double operator_norm_lower_bound(const operator_spec& op, double s,
                                        const std::vector<grid_function>& probes,
                                        int* skipped = nullptr) {
  if (probes.empty()) throw std::invalid_argument("operator_norm_lower_bound: no probes");
  if (!(s > 1.0)) throw std::invalid_argument("operator_norm_lower_bound: s must exceed 1");
  double best = 0;
  int skip = 0;
  for (const auto& f : probes) {
    double denom = lq_norm(f, s);
    if (!(denom > 0)) {
      ++skip;
      continue;
    }
    operator_result tf = apply_operator(op, f, f.g);
    best = std::max(best, lq_norm(tf.values, s) / denom);
  }
  if (skipped) *skipped = skip;
  if (skip == static_cast<int>(probes.size()))
    throw std::invalid_argument("operator_norm_lower_bound: all probes had zero norm");
  return best;
}

// Open interval (min(s', q), max(q', s)) of exponents p for which the strong
// bound interpolates/dualizes from the weak (q, q) endpoint.
struct p_range {
  double lower = 1;
  double upper = inf;
};

inline p_range interpolation_range(double q, double s) {
  if (q < 1.0) throw std::invalid_argument("interpolation_range: q must be >= 1");
  if (!(s > q)) throw std::invalid_argument("interpolation_range: s must exceed q");
  p_range r;
  r.lower = std::min(conjugate_exponent(s), q);
  r.upper = std::max(conjugate_exponent(q), s);
  return r;
}

} // namespace czkit
