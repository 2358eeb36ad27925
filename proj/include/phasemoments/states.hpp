#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace phasemoments {

using cplx = std::complex<double>;

enum class StateKind { vacuum, fock, coherent, squeezed_vacuum, displaced_fock };

const char* state_kind_name(StateKind kind);
StateKind parse_state_kind(const std::string& name);

struct StateSpec {
  StateKind kind = StateKind::vacuum;
  cplx alpha{0.0, 0.0};  // displacement for coherent and displaced_fock
  cplx xi{0.0, 0.0};     // squeeze parameter r e^{i theta}
  int fock_n = 0;
  int n_max = 20;
  // Largest norm allowed above n_max before truncation.
  double leakage_tol = 1e-6;

  void validate() const;
};

// Hermitian, unit-trace, positive semidefinite matrix in the Fock basis 0..n_max.
class DensityMatrix {
 public:
  // Validates the invariants; throws ErrorCode::invalid_argument otherwise.
  explicit DensityMatrix(Eigen::MatrixXcd rho);
  static DensityMatrix from_pure(const Eigen::VectorXcd& amplitudes);

  int n_max() const { return static_cast<int>(rho_.rows()) - 1; }
  cplx operator()(int m, int n) const { return rho_(m, n); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }

  double trace() const;
  double mean_photon_number() const;
  // rho_{mn} e^{i(n - m) phi0}
  DensityMatrix rotated(double phi0) const;
  // Plain text, one row per line with "re im" pairs.
  std::string to_text() const;

 private:
  Eigen::MatrixXcd rho_;
};

// Fock amplitudes before truncation checks, over 0..dim-1.
Eigen::VectorXcd state_amplitudes(const StateSpec& spec, int dim);

DensityMatrix build_state(const StateSpec& spec);

// Displacement operator D(alpha) = exp(alpha a^dag - conj(alpha) a) on a
// Fock space of the given dimension, via the Hermitian eigenproblem of
// i(alpha a^dag - conj(alpha) a). Columns far below dim are accurate.
Eigen::MatrixXcd displacement_matrix(cplx alpha, int dim);

// Quadrature density p(x, theta), clamped at 0.
double quadrature_pdf(const DensityMatrix& rho, double x, double theta);

// Psi_k = sum_n rho_{n+k,n}; Psi_0 = 1; Psi_{-k} = conj(Psi_k).
cplx exact_moment(const DensityMatrix& rho, int k);

// Canonical phase distribution (2 pi)^{-1} sum rho_{mn} e^{i(n-m) phi}; not clamped.
double exact_phase_dist(const DensityMatrix& rho, double phi);

// Spectral form of rho for repeated quadrature-density evaluation:
// p(x, theta) = sum_j lambda_j |sum_n conj(u_jn) psi_n(x) e^{i n theta}|^2.
class QuadratureDensity {
 public:
  explicit QuadratureDensity(const DensityMatrix& rho, double eigen_cutoff = 1e-14);
  double operator()(double x, double theta) const;
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<double> weights_;
  std::vector<Eigen::VectorXcd> vectors_;  // conj(u_j)
};

}  // namespace phasemoments
