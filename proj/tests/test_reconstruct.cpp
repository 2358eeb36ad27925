#include <cmath>
#include <numbers>

#include "doctest.h"
#include "phasemoments/error.hpp"
#include "phasemoments/reconstruct.hpp"

using namespace phasemoments;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix displaced20() {
  StateSpec s;
  s.kind = StateKind::displaced_fock;
  s.alpha = {-1.5, 0.0};
  s.fock_n = 2;
  s.n_max = 20;
  return build_state(s);
}

}  // namespace

TEST_CASE("Fourier synthesis of exact moments reproduces the phase distribution") {
  const auto rho = displaced20();
  const auto moments = exact_moment_estimates(rho, 20, 1e-3);
  const auto p = fourier_reconstruct(moments, 20, 256);
  REQUIRE(p.M() == 256);
  double worst = 0.0;
  for (int m = 0; m < 256; ++m) worst = std::max(worst, std::abs(p.values[m] - exact_phase_dist(rho, p.phi[m])));
  CHECK(worst < 1e-10);
  CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unregularized least squares agrees with Fourier synthesis") {
  const auto rho = displaced20();
  const auto moments = exact_moment_estimates(rho, 20, 1e-3);
  const auto f = fourier_reconstruct(moments, 20, 160);
  const auto ls = least_squares_reconstruct(moments, 20, 160, 0.0);
  double worst = 0.0;
  for (int m = 0; m < 160; ++m) worst = std::max(worst, std::abs(ls.values[m] - f.values[m]));
  CHECK(worst < 1e-8);
  CHECK(ls.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chi_squared(ls, moments, 20) < 1e-10);
}

TEST_CASE("regularization smooths monotonically") {
  const auto rho = displaced20();
  auto moments = exact_moment_estimates(rho, 10, 1e-2);
  // Deterministic perturbation standing in for noise.
  for (auto& m : moments) m.value += cplx(0.02 * std::sin(7.0 * m.k), 0.02 * std::cos(5.0 * m.k));
  double prev_tv = INFINITY;
  double prev_chi2 = -1.0;
  for (double lambda : {0.0, 1e-2, 1e-1, 1.0, 10.0, 100.0}) {
    const auto p = least_squares_reconstruct(moments, 10, 80, lambda);
    const double tv = total_variation(p);
    const double chi2 = chi_squared(p, moments, 10);
    CAPTURE(lambda);
    CHECK(tv < prev_tv);
    CHECK(chi2 >= prev_chi2);
    CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-12));
    prev_tv = tv;
    prev_chi2 = chi2;
  }
}

TEST_CASE("unnormalized least squares keeps the total close to one") {
  const auto rho = displaced20();
  const auto moments = exact_moment_estimates(rho, 10, 1e-3);
  const auto p = least_squares_reconstruct(moments, 10, 80, 1.0, false);
  CHECK_FALSE(p.normalized);
  CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("reconstruction argument checks") {
  const auto moments = exact_moment_estimates(displaced20(), 5, 1e-3);
  CHECK_THROWS_AS(fourier_reconstruct(moments, 5, 10), Error);
  CHECK_THROWS_AS(least_squares_reconstruct(moments, 5, 39, 0.0), Error);
  CHECK_THROWS_AS(least_squares_reconstruct(moments, 5, 40, -1.0), Error);
  try {
    fourier_reconstruct(moments, 7, 64);
    FAIL("expected missing moments");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("k = 6, 7") != std::string::npos);
  }
  auto zero_var = moments;
  zero_var[2].var_re = 0.0;
  CHECK_THROWS_AS(least_squares_reconstruct(zero_var, 5, 40, 0.0), Error);
  CHECK(parse_method("least_squares") == ReconstructionMethod::least_squares);
  CHECK_THROWS_AS(parse_method("maxent"), Error);
}

TEST_CASE("uniform distribution from vanishing moments") {
  std::vector<MomentEstimate> zero(4);
  for (int k = 1; k <= 4; ++k) {
    zero[k - 1].k = k;
    zero[k - 1].var_re = zero[k - 1].var_im = 1e-4;
  }
  const auto p = least_squares_reconstruct(zero, 4, 32, 0.5);
  for (double v : p.values) CHECK(v == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-12));
}
