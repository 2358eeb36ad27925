#include "phasemoments/states.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "phasemoments/error.hpp"
#include "phasemoments/specfun.hpp"

namespace phasemoments {

namespace {

constexpr double kPi = std::numbers::pi;

cplx polar_from_log(double log_mag, double phase) { return std::polar(std::exp(log_mag), phase); }

int displaced_padding(cplx alpha, int n) {
  const double a = std::abs(alpha);
  return n + static_cast<int>(std::ceil(a * a + 12.0 * a)) + 60;
}

}  // namespace

const char* state_kind_name(StateKind kind) {
  switch (kind) {
    case StateKind::vacuum: return "vacuum";
    case StateKind::fock: return "fock";
    case StateKind::coherent: return "coherent";
    case StateKind::squeezed_vacuum: return "squeezed_vacuum";
    case StateKind::displaced_fock: return "displaced_fock";
  }
  return "unknown";
}

StateKind parse_state_kind(const std::string& name) {
  for (auto kind : {StateKind::vacuum, StateKind::fock, StateKind::coherent,
                    StateKind::squeezed_vacuum, StateKind::displaced_fock}) {
    if (name == state_kind_name(kind)) return kind;
  }
  fail(ErrorCode::invalid_argument,
       "unknown state kind '" + name +
           "' (expected vacuum, fock, coherent, squeezed_vacuum or displaced_fock)");
}

void StateSpec::validate() const {
  require(n_max >= 0, ErrorCode::invalid_argument, "n_max must be nonnegative");
  require(n_max <= 2000, ErrorCode::invalid_argument, "n_max above 2000 is not supported");
  require(fock_n >= 0, ErrorCode::invalid_argument, "fock_n must be nonnegative");
  require(leakage_tol > 0.0 && leakage_tol < 1.0, ErrorCode::invalid_argument,
          "leakage tolerance must lie in (0, 1)");
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()) && std::isfinite(xi.real()) &&
              std::isfinite(xi.imag()),
          ErrorCode::invalid_argument, "state parameters must be finite");
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  require(rho_.rows() >= 1 && rho_.rows() == rho_.cols(), ErrorCode::invalid_argument,
          "density matrix must be square and nonempty");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  require(herm <= 1e-10, ErrorCode::invalid_argument, "density matrix is not Hermitian");
  require(std::abs(trace() - 1.0) <= 1e-8, ErrorCode::invalid_argument,
          "density matrix trace differs from 1");
  // Symmetrize so that later arithmetic sees an exactly Hermitian matrix.
  rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -1e-10, ErrorCode::invalid_argument,
          "density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::from_pure(const Eigen::VectorXcd& amplitudes) {
  const double norm2 = amplitudes.squaredNorm();
  require(norm2 > 0.0, ErrorCode::invalid_argument, "state vector is zero");
  const Eigen::VectorXcd c = amplitudes / std::sqrt(norm2);
  return DensityMatrix(c * c.adjoint());
}

double DensityMatrix::trace() const { return rho_.trace().real(); }

double DensityMatrix::mean_photon_number() const {
  double s = 0.0;
  for (int n = 0; n <= n_max(); ++n) s += n * rho_(n, n).real();
  return s;
}

DensityMatrix DensityMatrix::rotated(double phi0) const {
  Eigen::MatrixXcd r = rho_;
  for (int m = 0; m <= n_max(); ++m) {
    for (int n = 0; n <= n_max(); ++n) r(m, n) *= std::polar(1.0, (n - m) * phi0);
  }
  return DensityMatrix(r);
}

std::string DensityMatrix::to_text() const {
  std::ostringstream os;
  char buf[64];
  os << "# density matrix, n_max = " << n_max() << ", rows of (re im) pairs\n";
  for (int m = 0; m <= n_max(); ++m) {
    for (int n = 0; n <= n_max(); ++n) {
      std::snprintf(buf, sizeof buf, "%s%.15g %.15g", n ? "  " : "", rho_(m, n).real(),
                    rho_(m, n).imag());
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

Eigen::MatrixXcd displacement_matrix(cplx alpha, int dim) {
  require(dim >= 1, ErrorCode::invalid_argument, "dimension must be positive");
  // H = i (alpha a^dag - conj(alpha) a) is Hermitian and D = exp(-i H).
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx I(0.0, 1.0);
  for (int n = 0; n + 1 < dim; ++n) {
    h(n + 1, n) = I * alpha * std::sqrt(n + 1.0);
    h(n, n + 1) = std::conj(h(n + 1, n));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([&](double l) { return std::exp(-I * l); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::VectorXcd state_amplitudes(const StateSpec& spec, int dim) {
  spec.validate();
  require(dim >= 1, ErrorCode::invalid_argument, "dimension must be positive");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim);
  switch (spec.kind) {
    case StateKind::vacuum:
      c(0) = 1.0;
      break;
    case StateKind::fock:
      if (spec.fock_n < dim) c(spec.fock_n) = 1.0;
      break;
    case StateKind::coherent: {
      const double a = std::abs(spec.alpha);
      if (a == 0.0) {
        c(0) = 1.0;
        break;
      }
      const double arg = std::arg(spec.alpha);
      for (int n = 0; n < dim; ++n) {
        c(n) = polar_from_log(-0.5 * a * a + n * std::log(a) - 0.5 * specfun::log_factorial(n), n * arg);
      }
      break;
    }
    case StateKind::squeezed_vacuum: {
      // S(xi)|0> = cosh(r)^{-1/2} sum_m (-e^{i theta} tanh r)^m sqrt((2m)!)/(2^m m!) |2m>
      const double r = std::abs(spec.xi);
      if (r == 0.0) {
        c(0) = 1.0;
        break;
      }
      const double theta = std::arg(spec.xi);
      const double log_t = std::log(std::tanh(r));
      for (int m = 0; 2 * m < dim; ++m) {
        const double log_mag = m * log_t + 0.5 * specfun::log_factorial(2 * m) -
                               m * std::log(2.0) - specfun::log_factorial(m) -
                               0.5 * std::log(std::cosh(r));
        c(2 * m) = polar_from_log(log_mag, m * (theta + kPi));
      }
      break;
    }
    case StateKind::displaced_fock: {
      const int pad = std::max(dim, displaced_padding(spec.alpha, spec.fock_n) + dim / 4);
      const Eigen::MatrixXcd d = displacement_matrix(spec.alpha, pad);
      c = d.col(spec.fock_n).head(dim);
      break;
    }
  }
  return c;
}

DensityMatrix build_state(const StateSpec& spec) {
  spec.validate();
  const int dim = spec.n_max + 1;
  int probe = dim + 200;
  if (spec.kind == StateKind::displaced_fock) probe = dim;
  const Eigen::VectorXcd full = state_amplitudes(spec, probe);
  const Eigen::VectorXcd kept = full.head(dim);
  // Every generator is normalized analytically (or unitary), so the
  // untruncated norm is 1 and the leakage is the missing weight.
  const double leakage = std::max(0.0, 1.0 - kept.squaredNorm());
  if (leakage > spec.leakage_tol) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%s state leaks %.3g of its norm above n_max = %d (tolerance %.3g); raise n_max",
                  state_kind_name(spec.kind), leakage, spec.n_max, spec.leakage_tol);
    fail(ErrorCode::truncation, buf);
  }
  return DensityMatrix::from_pure(kept);
}

double quadrature_pdf(const DensityMatrix& rho, double x, double theta) {
  const int n_max = rho.n_max();
  std::vector<double> psi(n_max + 1);
  specfun::hermite_fn_table(n_max, x, psi);
  Eigen::VectorXcd v(n_max + 1);
  for (int n = 0; n <= n_max; ++n) v(n) = psi[n] * std::polar(1.0, n * theta);
  const double p = v.dot(rho.matrix() * v).real();
  return std::max(p, 0.0);
}

cplx exact_moment(const DensityMatrix& rho, int k) {
  if (k == 0) return 1.0;
  const int ak = std::abs(k);
  cplx s = 0.0;
  for (int n = 0; n + ak <= rho.n_max(); ++n) s += rho(n + ak, n);
  return k > 0 ? s : std::conj(s);
}

double exact_phase_dist(const DensityMatrix& rho, double phi) {
  const int n_max = rho.n_max();
  Eigen::VectorXcd w(n_max + 1);
  for (int n = 0; n <= n_max; ++n) w(n) = std::polar(1.0, n * phi);
  return w.dot(rho.matrix() * w).real() / (2.0 * kPi);
}

QuadratureDensity::QuadratureDensity(const DensityMatrix& rho, double eigen_cutoff)
    : n_max_(rho.n_max()) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
  for (int j = 0; j <= n_max_; ++j) {
    const double lambda = es.eigenvalues()(j);
    if (lambda <= eigen_cutoff) continue;
    weights_.push_back(lambda);
    vectors_.push_back(es.eigenvectors().col(j).conjugate());
  }
}

double QuadratureDensity::operator()(double x, double theta) const {
  thread_local std::vector<double> psi;
  psi.resize(n_max_ + 1);
  specfun::hermite_fn_table(n_max_, x, psi);
  thread_local std::vector<cplx> v;
  v.resize(n_max_ + 1);
  for (int n = 0; n <= n_max_; ++n) v[n] = psi[n] * std::polar(1.0, n * theta);
  double p = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    cplx a = 0.0;
    for (int n = 0; n <= n_max_; ++n) a += vectors_[j](n) * v[n];
    p += weights_[j] * std::norm(a);
  }
  return p;
}

}  // namespace phasemoments
