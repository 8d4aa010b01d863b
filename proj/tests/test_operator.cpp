#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <czkit/operator.hpp>
#include <czkit/test_functions.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace czkit;

namespace {

// target grid with x = 2 exactly on a midpoint
grid targets_around(double center, double halfwidth, double h) {
  return make_uniform_grid(make_box({center - halfwidth - 0.5 * h}, {center + halfwidth + 0.5 * h}),
                           h);
}

operator_spec hilbert_op() {
  operator_spec op;
  op.k = hilbert_kernel();
  op.strong_exponent = 2.0;
  op.strong_bound = 3.14159265358979324;
  return op;
}

} // namespace

TEST_CASE("zero kernel maps everything to zero") {
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 32);
  grid_function f = indicator_1d(g, 0.0, 1.0);
  operator_spec op;
  op.k = zero_kernel();
  auto r = apply_operator(op, f, g);
  for (double v : r.values.values) CHECK(v == 0.0);
}

TEST_CASE("hilbert of the unit indicator at x = 2: ln 2") {
  const double h = std::ldexp(1.0, -12);
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), h);
  grid_function f = indicator_1d(g, 0.0, 1.0);
  grid tg = targets_around(2.0, 0.25, h);
  auto r = apply_operator(hilbert_op(), f, tg);
  std::int64_t mid = tg.total() / 2;
  CHECK(tg.midpoint(mid)[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::fabs(r.values.values[mid] - std::log(2.0)) < 1e-3);
  CHECK(std::fabs(r.values.values[mid] - oracles::hilbert_indicator(2.0)) < 1e-3);
  CHECK(r.excluded[mid] == 0);
}

TEST_CASE("odd symmetry at the midpoint of the interval") {
  const double h = std::ldexp(1.0, -10);
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), h);
  grid_function f = indicator_1d(g, 0.0, 1.0);
  auto r = apply_operator(hilbert_op(), f, g);
  std::int64_t mid = g.total() / 2; // first cell right of 1/2
  // value at the two central cells is +-, tiny by cancellation
  CHECK(std::fabs(r.values.values[mid] + r.values.values[mid - 1]) < 1e-10);
  CHECK(r.excluded[mid] == 1);
}

TEST_CASE("coarser targets are rejected") {
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 32);
  grid coarse = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 16);
  grid_function f = indicator_1d(g, 0.0, 1.0);
  CHECK_THROWS_AS(apply_operator(hilbert_op(), f, coarse), std::invalid_argument);
}

TEST_CASE("linearity and translation covariance") {
  const double h = 1.0 / 64;
  grid g = make_uniform_grid(make_box({-2.0}, {2.0}), h);
  grid_function a = smooth_bump(g, -0.5, 0.5);
  grid_function b = random_dyadic_step(g, 5, 3, 0.0, 1.0, false);
  grid_function combo = make_grid_function(g);
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = 2.0 * a.values[i] - 3.0 * b.values[i];
  auto op = hilbert_op();
  auto ra = apply_operator(op, a, g);
  auto rb = apply_operator(op, b, g);
  auto rc = apply_operator(op, combo, g);
  for (std::int64_t i = 0; i < g.total(); ++i) {
    double want = 2.0 * ra.values.values[i] - 3.0 * rb.values.values[i];
    CHECK(rc.values.values[i] == doctest::Approx(want).epsilon(1e-10));
  }

  // shift by exactly 16 cells
  grid_function shifted = make_grid_function(g);
  for (std::int64_t i = 16; i < g.total(); ++i) shifted.values[i] = a.values[i - 16];
  auto rs = apply_operator(op, shifted, g);
  for (std::int64_t i = 16; i < g.total(); ++i)
    CHECK(rs.values.values[i] == doctest::Approx(ra.values.values[i - 16]).epsilon(1e-12));
}

TEST_CASE("distribution function of T(indicator): 2/sinh(alpha)") {
  const double h = std::ldexp(1.0, -12);
  grid src = make_uniform_grid(make_box({0.0}, {1.0}), h);
  grid_function f = indicator_1d(src, 0.0, 1.0);
  grid tg = make_uniform_grid(make_box({-8.0}, {9.0}), h);
  auto r = apply_operator(hilbert_op(), f, tg);
  for (double alpha : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    double got = distribution_function(r.values, alpha);
    double want = oracles::hilbert_indicator_distribution(alpha);
    CHECK(std::fabs(got - want) < 1e-2);
  }
  CHECK(distribution_function(r.values, 1e9) == 0.0);
}

TEST_CASE("distribution function is nonincreasing and quasi-norm is homogeneous") {
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 128);
  grid_function u = random_dyadic_step(g, 17, 4, 0.0, 1.0, false);
  auto alphas = log_alpha_grid(1e-2, 10.0, 20);
  auto rep = weak_type_quasi_norm(u, 1.0, alphas);
  for (std::size_t i = 1; i < rep.distribution.size(); ++i)
    CHECK(rep.distribution[i] <= rep.distribution[i - 1] + 1e-15);
  // scale by a power of two: exact homogeneity with the rescaled grid
  grid_function u8 = u;
  for (double& v : u8.values) v *= 8.0;
  std::vector<double> alphas8;
  for (double a : alphas) alphas8.push_back(8.0 * a);
  auto rep8 = weak_type_quasi_norm(u8, 1.0, alphas8);
  CHECK(rep8.quasi_norm == doctest::Approx(8.0 * rep.quasi_norm).epsilon(1e-12));
  CHECK(rep8.argmax_alpha == doctest::Approx(8.0 * rep.argmax_alpha).epsilon(1e-12));
  // Chebyshev for q = 1
  CHECK(rep.quasi_norm <= lq_norm(u, 1.0) * (1 + 1e-12));
}

TEST_CASE("quasi-norm of the indicator approaches 1 from below") {
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 256);
  grid_function u = indicator_1d(g, 0.0, 1.0);
  std::vector<double> alphas;
  for (double a = 1e-3; a < 1.0; a += 1e-3) alphas.push_back(a);
  auto rep = weak_type_quasi_norm(u, 1.0, alphas);
  CHECK(rep.quasi_norm >= 0.99);
  CHECK(rep.quasi_norm <= 1.0 + 1e-12);
}

TEST_CASE("operator norm lower bound: hilbert on L^2 sits in [2.8, pi]") {
  const double h = std::ldexp(1.0, -10);
  grid g = make_uniform_grid(make_box({-8.0}, {9.0}), h);
  std::vector<grid_function> probes;
  probes.push_back(smooth_bump(g, 0.0, 1.0));
  probes.push_back(smooth_bump(g, 0.5, 0.5));
  double v = operator_norm_lower_bound(hilbert_op(), 2.0, probes);
  CHECK(v >= 2.8);
  CHECK(v <= 3.14159265358979324);
}

TEST_CASE("scale family: dilating a probe leaves the ratio unchanged") {
  const double h = 1.0 / 512;
  grid g = make_uniform_grid(make_box({-2.0}, {2.0}), h);
  grid_function f = smooth_bump(g, 0.0, 1.0);
  grid g2 = make_uniform_grid(make_box({-1.0}, {1.0}), h / 2);
  grid_function f2 = sample(g2, [&](const vec3& x) {
    double t = 2.0 * x[0];
    return std::fabs(t) >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - t * t));
  });
  auto op = hilbert_op();
  double r1 = operator_norm_lower_bound(op, 2.0, {f});
  double r2 = operator_norm_lower_bound(op, 2.0, {f2});
  CHECK(std::fabs(r1 - r2) < 1e-3);
}

TEST_CASE("zero probes are skipped, all-zero rejected") {
  grid g = make_uniform_grid(make_box({0.0}, {1.0}), 1.0 / 16);
  std::vector<grid_function> probes{make_grid_function(g, 0.0)};
  CHECK_THROWS_AS(operator_norm_lower_bound(hilbert_op(), 2.0, probes), std::invalid_argument);
  probes.push_back(indicator_1d(g, 0.0, 1.0));
  int skipped = 0;
  double v = operator_norm_lower_bound(hilbert_op(), 2.0, probes, &skipped);
  CHECK(skipped == 1);
  CHECK(v > 0);
}

TEST_CASE("interpolation range arithmetic") {
  auto r1 = interpolation_range(1.0, inf);
  CHECK(r1.lower == 1.0);
  CHECK(r1.upper == inf);
  auto r2 = interpolation_range(2.0, 4.0);
  CHECK(r2.lower == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(r2.upper == 4.0);
  auto r3 = interpolation_range(2.0, 3.0);
  CHECK(r3.lower == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r3.upper == 3.0);
  CHECK_THROWS_AS(interpolation_range(2.0, 2.0), std::invalid_argument);
  // q > 1 and s < inf: properly inside (1, inf)
  auto r4 = interpolation_range(1.5, 2.5);
  CHECK(r4.lower > 1.0);
  CHECK(r4.upper < inf);
}
