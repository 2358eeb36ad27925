#include <cmath>
#include <numbers>

#include "doctest.h"
#include "phasemoments/error.hpp"
#include "phasemoments/estimator.hpp"
#include "phasemoments/kernels.hpp"

using namespace phasemoments;

namespace {

constexpr double kPi = std::numbers::pi;

KernelSpec spec_for(int k, double eta = 1.0) {
  KernelSpec s;
  s.k = k;
  s.eta = eta;
  return s;
}

}  // namespace

// mpmath values from tools/oracle_values.py: coefficients from the binomial
// sum at 40 digits, series sums by Euler-Maclaurin, closed integral forms by
// adaptive quadrature.

TEST_CASE("series coefficients") {
  CHECK(series_coeff(1, 0, 1.0) == doctest::Approx(0.70710678118654752).epsilon(1e-14));
  CHECK(series_coeff(1, 1, 1.0) == doctest::Approx(-0.034517796864424587).epsilon(1e-13));
  CHECK(series_coeff(2, 3, 1.0) == doctest::Approx(-2.3210661426603079e-5).epsilon(1e-12));
  CHECK(series_coeff(3, 10, 1.0) == doctest::Approx(2.2272478535948376e-18).epsilon(1e-12));
  CHECK(series_coeff(4, 25, 1.0) == doctest::Approx(-1.6202658160399784e-51).epsilon(1e-12));
  CHECK(series_coeff(5, 40, 1.0) == doctest::Approx(1.1567396023476027e-88).epsilon(1e-12));
}

TEST_CASE("series coefficients scale with the efficiency") {
  for (int l : {0, 3, 7}) {
    const double ratio = series_coeff(3, l, 0.8) / series_coeff(3, l, 1.0);
    CHECK(ratio == doctest::Approx(std::pow(0.8, -(l + 1.5))).epsilon(1e-13));
  }
  CHECK_THROWS_AS(series_coeff(1, 0, 0.5), Error);
}

TEST_CASE("F_k series sums") {
  CHECK(f_series_sum(1, 3) == doctest::Approx(1.6875123821707831).epsilon(1e-10));
  CHECK(f_series_sum(1, 4) == doctest::Approx(0.55085972429562363).epsilon(1e-10));
  CHECK(f_series_sum(1, 5) == doctest::Approx(0.20180695970247455).epsilon(1e-10));
  CHECK(f_series_sum(2, 5) == doctest::Approx(0.98557721339821916).epsilon(1e-10));
  CHECK(f_series_sum(2, 6) == doctest::Approx(0.22333877501944777).epsilon(1e-10));
  CHECK(f_series_sum(3, 9) == doctest::Approx(0.01407722209785987).epsilon(1e-10));
  // The remainder makes the result insensitive to where the explicit part stops.
  CHECK(f_series_sum(1, 3, 200) == doctest::Approx(f_series_sum(1, 3, 5000)).epsilon(1e-10));
  CHECK_THROWS_AS(f_series_sum(2, 4), Error);
}

TEST_CASE("F_k vanishes for k < 3") {
  CHECK(poly_F(1, 0.7, 1.0) == 0.0);
  CHECK(poly_F(2, 0.7, 1.0) == 0.0);
  CHECK(poly_F(3, 0.7, 1.0) != 0.0);
}

TEST_CASE("classical kernels") {
  CHECK(classical_kernel(1, 2.0) == 0.25);
  CHECK(classical_kernel(1, -2.0) == -0.25);
  CHECK(classical_kernel(3, 2.0) == -0.75);
  CHECK(classical_kernel(2, std::exp(1.0)) == doctest::Approx(1.0 / kPi));
  CHECK(classical_kernel(4, std::exp(1.0)) == doctest::Approx(-2.0 / kPi));
  CHECK_THROWS_AS(classical_kernel(2, 0.0), Error);
  CHECK_THROWS_AS(classical_kernel(0, 1.0), Error);
}

TEST_CASE("classical identity holds for all radii") {
  for (int k = 1; k <= 5; ++k) {
    for (double r : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      CAPTURE(k);
      CAPTURE(r);
      CHECK(std::abs(classical_identity(k, r) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("closed integral forms match the mpmath oracle") {
  CHECK(integral_kernel_k1(0.25) == doctest::Approx(0.083374742524033809).epsilon(1e-12));
  CHECK(integral_kernel_k1(1.0) == doctest::Approx(0.23820972967561007).epsilon(1e-12));
  CHECK(integral_kernel_k1(2.0) == doctest::Approx(0.25669648521780924).epsilon(1e-12));
  CHECK(integral_kernel_k1(3.5) == doctest::Approx(0.25115541124448615).epsilon(1e-12));
  const double base = integral_kernel_k2(0.5);
  CHECK(integral_kernel_k2(1.0) - base == doctest::Approx(0.24642686002013554).epsilon(1e-11));
  CHECK(integral_kernel_k2(2.0) - base == doctest::Approx(0.54311149122887262).epsilon(1e-11));
  CHECK(integral_kernel_k2(3.5) - base == doctest::Approx(0.71967506593422689).epsilon(1e-11));
}

TEST_CASE("series kernel agrees with the closed forms") {
  const QuantumKernel k1(spec_for(1));
  const QuantumKernel k2(spec_for(2));
  const double c = k2(0.5) - integral_kernel_k2(0.5);
  for (double x = 0.0; x <= 4.0; x += 0.125) {
    CAPTURE(x);
    CHECK(std::abs(k1(x) - integral_kernel_k1(x)) < 1e-9);
    if (x > 0.0) CHECK(std::abs(k2(x) - integral_kernel_k2(x) - c) < 1e-9);
  }
}

TEST_CASE("kernels have parity (-1)^k") {
  for (int k = 1; k <= 5; ++k) {
    const QuantumKernel q(spec_for(k));
    for (double x : {0.3, 1.7, 3.9, 4.5, 9.0}) {
      const double sign = k % 2 ? -1.0 : 1.0;
      CHECK(q(-x) == doctest::Approx(sign * q(x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernels are continuous at the switch point") {
  for (int k = 1; k <= 5; ++k) {
    for (double eta : {1.0, 0.8}) {
      const QuantumKernel q(spec_for(k, eta));
      const double xs = q.switch_point();
      CHECK(xs == doctest::Approx(4.0 / std::sqrt(eta)));
      CAPTURE(k);
      CAPTURE(eta);
      CHECK(std::abs(q(xs * (1 - 1e-12)) - q(xs * (1 + 1e-12))) < 1e-8);
    }
  }
}

TEST_CASE("kernels approach their classical limits") {
  const QuantumKernel k1(spec_for(1));
  const QuantumKernel k2(spec_for(2));
  for (double x : {4.0, 6.0, 10.0, 50.0}) CHECK(std::abs(k1(x) - 0.25) < 1e-2);
  for (double x : {8.0, 12.0, 40.0}) CHECK(std::abs(k2(2 * x) - k2(x) - std::log(2.0) / kPi) < 1e-2);
}

TEST_CASE("quantum identity on a subset of levels") {
  for (int k = 1; k <= 5; ++k) {
    const auto t = build_kernel_table(spec_for(k));
    for (int n : {0, 1, 5, 17, 30}) {
      CAPTURE(k);
      CAPTURE(n);
      CHECK(std::abs(q_matrix_element(k, n + k, n, t) - 1.0) < 1e-3);
    }
  }
}

TEST_CASE("kernel table interpolates the direct kernel") {
  for (int k : {1, 2, 5}) {
    const auto spec = spec_for(k);
    const QuantumKernel q(spec);
    const auto t = build_kernel_table(spec);
    CHECK(t.node(0) == doctest::Approx(-t.switch_point()));
    CHECK(t.node(t.size() - 1) == doctest::Approx(t.switch_point()));
    double scale = 0.0;
    for (double v : t.values()) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < t.size(); i += 37) CHECK(t(t.node(i)) == doctest::Approx(q(t.node(i))).epsilon(1e-12));
    for (double x = -6.0; x <= 6.0; x += 0.0731) {
      CAPTURE(x);
      CHECK(std::abs(t(x) - q(x)) < 1e-5 * scale);
    }
  }
}

TEST_CASE("compensated kernel smeared at eta reproduces the ideal kernel") {
  // Even kernels are defined up to a constant, so compare their differences.
  for (int k : {1, 2, 3}) {
    const auto ideal = build_kernel_table(spec_for(k));
    const auto comp = build_kernel_table(spec_for(k, 0.8));
    const double c = k % 2 ? 0.0 : smeared_kernel(comp, 0.0, 0.8) - ideal(0.0);
    for (double x = -7.0; x <= 7.0; x += 0.35) {
      CAPTURE(k);
      CAPTURE(x);
      CHECK(std::abs(smeared_kernel(comp, x, 0.8) - ideal(x) - c) < 5e-4);
    }
  }
}

TEST_CASE("smear error table matches direct evaluation") {
  const auto t = build_kernel_table(spec_for(1));
  const SmearErrorTable g(t, 0.8, 8.0);
  CHECK(g.k() == 1);
  CHECK(g.eta() == 0.8);
  for (double x : {-9.0, -3.3, 0.0, 0.72, 5.5, 12.0}) {
    CHECK(g(x) == doctest::Approx(smear_error_kernel(t, x, 0.8)).epsilon(1e-4).scale(1e-6));
  }
  // Smearing pulls the odd kernel towards zero near the origin.
  CHECK(smear_error_kernel(1, 1.0, 0.8) < 0.0);
}

TEST_CASE("kernel parameters are validated") {
  CHECK_THROWS_AS(QuantumKernel(spec_for(1, 0.5)), Error);
  CHECK_THROWS_AS(QuantumKernel(spec_for(0)), Error);
  KernelSpec s = spec_for(1);
  s.l0 = kMaxSeriesOrder + 1;
  CHECK_THROWS_AS(QuantumKernel{s}, Error);
  s = spec_for(1);
  s.x0 = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  CHECK_THROWS_AS(build_kernel_table(spec_for(1), 0.0), Error);
}

TEST_CASE("bare classical tail leaves a jump at the switch") {
  KernelSpec s = spec_for(1);
  s.matched_tail = false;
  const QuantumKernel q(s);
  CHECK(q.tail().coeff == 0.0);
  CHECK(q(4.0 + 1e-9) == 0.25);
  CHECK(std::abs(q(4.0 - 1e-9) - 0.25) > 1e-4);
}
