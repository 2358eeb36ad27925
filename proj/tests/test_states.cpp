#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "phasemoments/error.hpp"
#include "phasemoments/quadrature.hpp"
#include "phasemoments/states.hpp"

using namespace phasemoments;

namespace {

constexpr double kPi = std::numbers::pi;

StateSpec squeezed(int n_max, double tol = 1e-6) {
  StateSpec s;
  s.kind = StateKind::squeezed_vacuum;
  s.xi = {-1.31, 0.0};
  s.n_max = n_max;
  s.leakage_tol = tol;
  return s;
}

StateSpec displaced(int n_max = 20) {
  StateSpec s;
  s.kind = StateKind::displaced_fock;
  s.alpha = {-1.5, 0.0};
  s.fock_n = 2;
  s.n_max = n_max;
  return s;
}

// Annihilation operator on dim levels.
Eigen::MatrixXcd lowering(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

double integrate_pdf(const DensityMatrix& rho, double theta) {
  const std::vector<double> bp{-15.0, 15.0};
  const auto rule = quad::composite_gauss_legendre(bp, 0.5, 20);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * quadrature_pdf(rho, rule.x[i], theta);
  return s;
}

}  // namespace

TEST_CASE("vacuum") {
  const auto rho = build_state(StateSpec{});
  CHECK(rho(0, 0) == cplx(1.0, 0.0));
  CHECK(rho.mean_photon_number() == 0.0);
  for (double x : {-1.0, 0.0, 2.0}) {
    CHECK(quadrature_pdf(rho, x, 0.7) == doctest::Approx(std::exp(-x * x) / std::sqrt(kPi)).epsilon(1e-14));
  }
}

TEST_CASE("squeezed vacuum photon number") {
  // sinh^2(1.31) = 2.9521316; the nominal value 3 is rounded.
  const auto rho = build_state(squeezed(100));
  CHECK(rho.mean_photon_number() == doctest::Approx(2.952126089783352).epsilon(1e-10));
  for (int n = 1; n <= 100; n += 2) CHECK(std::abs(rho(n, n)) == 0.0);
}

TEST_CASE("squeezed vacuum at n_max = 20 exceeds the default leakage tolerance") {
  try {
    build_state(squeezed(20));
    FAIL("expected truncation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncation);
  }
  const auto rho = build_state(squeezed(20, 0.02));
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.mean_photon_number() == doctest::Approx(2.6512990767678655).epsilon(1e-10));
}

TEST_CASE("displaced Fock photon number") {
  const auto rho = build_state(displaced(60));
  CHECK(rho.mean_photon_number() == doctest::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("exact moments match the mpmath oracle") {
  SUBCASE("squeezed vacuum") {
    const auto r20 = build_state(squeezed(20, 0.02));
    CHECK(exact_moment(r20, 2).real() == doctest::Approx(0.69303339049213147).epsilon(1e-12));
    CHECK(exact_moment(r20, 4).real() == doctest::Approx(0.53718342518147054).epsilon(1e-12));
    CHECK(exact_moment(r20, 8).real() == doctest::Approx(0.3439024118670353).epsilon(1e-12));
    const auto r100 = build_state(squeezed(100));
    CHECK(exact_moment(r100, 2).real() == doctest::Approx(0.69898605366533314).epsilon(1e-12));
    CHECK(exact_moment(r100, 8).real() == doctest::Approx(0.36367301612178606).epsilon(1e-12));
    for (int k = 1; k <= 9; k += 2) CHECK(std::abs(exact_moment(r100, k)) == 0.0);
    CHECK(std::abs(exact_moment(r100, 2).imag()) < 1e-15);
  }
  SUBCASE("displaced Fock") {
    const auto rho = build_state(displaced(60));
    CHECK(exact_moment(rho, 1).real() == doctest::Approx(-0.59754651878044846).epsilon(1e-11));
    CHECK(exact_moment(rho, 2).real() == doctest::Approx(0.099937577048545711).epsilon(1e-10));
    CHECK(exact_moment(rho, 3).real() == doctest::Approx(0.15120125081760482).epsilon(1e-10));
    CHECK(exact_moment(rho, 8).real() == doctest::Approx(0.11651595051077965).epsilon(1e-10));
  }
  SUBCASE("coherent and Fock") {
    StateSpec c;
    c.kind = StateKind::coherent;
    c.alpha = {1.0, 0.0};
    c.n_max = 40;
    CHECK(exact_moment(build_state(c), 1).real() == doctest::Approx(0.77319265637928599).epsilon(1e-13));
    StateSpec f;
    f.kind = StateKind::fock;
    f.fock_n = 2;
    CHECK(std::abs(exact_moment(build_state(f), 3)) == 0.0);
  }
}

TEST_CASE("moment conjugation rule") {
  StateSpec c;
  c.kind = StateKind::coherent;
  c.alpha = {0.4, 1.1};
  c.n_max = 40;
  const auto rho = build_state(c);
  CHECK(exact_moment(rho, 0) == cplx(1.0, 0.0));
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(exact_moment(rho, -k) - std::conj(exact_moment(rho, k))) < 1e-15);
}

TEST_CASE("amplitudes agree with the matrix exponential of the generators") {
  const int dim = 160;
  const Eigen::MatrixXcd a = lowering(dim);
  const Eigen::MatrixXcd ad = a.adjoint();
  SUBCASE("squeezing") {
    for (cplx xi : {cplx(-1.31, 0.0), cplx(0.4, 0.7)}) {
      // S(xi) = exp((conj(xi) a^2 - xi a^dag^2) / 2)
      const Eigen::MatrixXcd g = 0.5 * (std::conj(xi) * a * a - xi * ad * ad);
      const Eigen::VectorXcd ref = g.exp().col(0);
      StateSpec s;
      s.kind = StateKind::squeezed_vacuum;
      s.xi = xi;
      const auto c = state_amplitudes(s, 60);
      CHECK((c - ref.head(60)).norm() < 1e-10);
    }
  }
  SUBCASE("displacement") {
    for (int n : {0, 2, 5}) {
      const cplx alpha(-1.5, 0.3);
      const Eigen::MatrixXcd g = alpha * ad - std::conj(alpha) * a;
      const Eigen::VectorXcd ref = g.exp().col(n);
      StateSpec s;
      s.kind = StateKind::displaced_fock;
      s.alpha = alpha;
      s.fock_n = n;
      const auto c = state_amplitudes(s, 40);
      CHECK((c - ref.head(40)).norm() < 1e-10);
    }
  }
}

TEST_CASE("quadrature distributions are normalized and symmetric") {
  const auto rs = build_state(squeezed(100));
  const auto rd = build_state(displaced());
  for (const auto* rho : {&rs, &rd}) {
    for (double theta : {0.0, kPi / 3}) CHECK(integrate_pdf(*rho, theta) == doctest::Approx(1.0).epsilon(1e-8));
    for (double theta : {0.2, 1.9}) {
      for (double x : {-2.5, -0.3, 0.8, 3.1}) {
        CHECK(quadrature_pdf(*rho, x, theta + kPi) == doctest::Approx(quadrature_pdf(*rho, -x, theta)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("spectral quadrature density matches the direct sum") {
  const auto rho = build_state(displaced());
  const QuadratureDensity q(rho);
  for (double theta : {0.0, 0.9, 4.0}) {
    for (double x = -6.0; x <= 6.0; x += 0.61) {
      CHECK(q(x, theta) == doctest::Approx(quadrature_pdf(rho, x, theta)).epsilon(1e-10).scale(1e-6));
    }
  }
}

TEST_CASE("rotation shifts the phase") {
  const auto rho = build_state(displaced());
  const auto rot = rho.rotated(0.7);
  CHECK(std::abs(exact_moment(rot, 2) - std::polar(1.0, -1.4) * exact_moment(rho, 2)) < 1e-14);
  CHECK(quadrature_pdf(rot, 0.3, 0.2) == doctest::Approx(quadrature_pdf(rho, 0.3, 0.9)).epsilon(1e-12));
}

TEST_CASE("canonical phase distribution") {
  StateSpec f;
  f.kind = StateKind::fock;
  f.fock_n = 3;
  const auto fock = build_state(f);
  for (double phi : {0.0, 1.0, 5.0}) CHECK(exact_phase_dist(fock, phi) == doctest::Approx(1.0 / (2 * kPi)));
  const auto rho = build_state(squeezed(100));
  const int M = 512;
  double s = 0.0;
  for (int m = 0; m < M; ++m) s += exact_phase_dist(rho, 2 * kPi * m / M);
  CHECK(s * 2 * kPi / M == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("density matrix invariants are enforced") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = cplx(0.1, 0.0);
  CHECK_THROWS_AS(DensityMatrix{m}, Error);  // not Hermitian
  m(1, 0) = cplx(0.1, 0.0);
  CHECK_NOTHROW(DensityMatrix{m});
  m(0, 0) = 0.6;
  CHECK_THROWS_AS(DensityMatrix{m}, Error);  // trace
  m(0, 0) = 0.5;
  m(0, 1) = m(1, 0) = 0.8;
  CHECK_THROWS_AS(DensityMatrix{m}, Error);  // negative eigenvalue
}

TEST_CASE("state specs are validated") {
  StateSpec s;
  s.n_max = -1;
  CHECK_THROWS_AS(build_state(s), Error);
  s = StateSpec{};
  s.leakage_tol = 0.0;
  CHECK_THROWS_AS(build_state(s), Error);
  CHECK(parse_state_kind("displaced_fock") == StateKind::displaced_fock);
  CHECK_THROWS_AS(parse_state_kind("cat"), Error);
}
