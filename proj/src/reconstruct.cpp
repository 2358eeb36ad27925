#include "phasemoments/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "phasemoments/error.hpp"

namespace phasemoments {

namespace {

constexpr double kPi = std::numbers::pi;

// Moments indexed by k, checking that 1..K are all present.
std::vector<const MomentEstimate*> select_moments(std::span<const MomentEstimate> moments, int K) {
  require(K >= 1, ErrorCode::invalid_argument, "K must be >= 1");
  std::map<int, const MomentEstimate*> by_k;
  for (const auto& m : moments) by_k[m.k] = &m;
  std::vector<const MomentEstimate*> out(K);
  std::string missing;
  for (int k = 1; k <= K; ++k) {
    const auto it = by_k.find(k);
    if (it == by_k.end()) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(k);
    } else {
      out[k - 1] = it->second;
    }
  }
  require(missing.empty(), ErrorCode::invalid_argument, "moments missing for k = " + missing);
  return out;
}

std::vector<double> phase_grid(int M) {
  std::vector<double> phi(M);
  for (int m = 0; m < M; ++m) phi[m] = 2.0 * kPi * m / M;
  return phi;
}

}  // namespace

const char* method_name(ReconstructionMethod method) {
  return method == ReconstructionMethod::fourier ? "fourier" : "least_squares";
}

ReconstructionMethod parse_method(const std::string& name) {
  if (name == "fourier") return ReconstructionMethod::fourier;
  if (name == "least_squares") return ReconstructionMethod::least_squares;
  fail(ErrorCode::invalid_argument,
       "unknown reconstruction method '" + name + "' (expected fourier or least_squares)");
}

double PhaseDistribution::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return 2.0 * kPi / M() * s;
}

PhaseDistribution fourier_reconstruct(std::span<const MomentEstimate> moments, int K, int M) {
  const auto mom = select_moments(moments, K);
  require(M > 2 * K, ErrorCode::invalid_argument, "Fourier synthesis needs M > 2K");
  PhaseDistribution p;
  p.phi = phase_grid(M);
  p.values.resize(M);
  p.method = ReconstructionMethod::fourier;
  p.K = K;
  p.normalized = true;
  for (int m = 0; m < M; ++m) {
    double s = 1.0;
    for (int k = 1; k <= K; ++k) {
      const double a = k * p.phi[m];
      s += 2.0 * (mom[k - 1]->value.real() * std::cos(a) + mom[k - 1]->value.imag() * std::sin(a));
    }
    p.values[m] = s / (2.0 * kPi);
  }
  return p;
}

PhaseDistribution least_squares_reconstruct(std::span<const MomentEstimate> moments, int K, int M,
                                            double reg_lambda, bool normalize) {
  const auto mom = select_moments(moments, K);
  require(M >= 8 * K, ErrorCode::invalid_argument, "least-squares inversion needs M >= 8K");
  require(reg_lambda >= 0.0 && std::isfinite(reg_lambda), ErrorCode::invalid_argument,
          "reg_lambda must be a nonnegative number");
  double min_sigma = INFINITY;
  for (const auto* m : mom) {
    require(m->var_re > 0.0 && m->var_im > 0.0 && std::isfinite(m->var_re) && std::isfinite(m->var_im),
            ErrorCode::invalid_argument,
            "least squares needs finite positive variances (k = " + std::to_string(m->k) + ")");
    min_sigma = std::min({min_sigma, m->sigma_re(), m->sigma_im()});
  }

  PhaseDistribution p;
  p.phi = phase_grid(M);
  p.method = ReconstructionMethod::least_squares;
  p.K = K;
  p.reg_lambda = reg_lambda;
  p.normalized = normalize;

  // Weighted design: rows (2 pi / M) cos(k phi_m) / sigma_re and sin rows.
  const int data_rows = 2 * K + (normalize ? 0 : 1);
  Eigen::MatrixXd A(data_rows, M);
  Eigen::VectorXd b(data_rows);
  const double h = 2.0 * kPi / M;
  for (int k = 1; k <= K; ++k) {
    const double wr = 1.0 / mom[k - 1]->sigma_re();
    const double wi = 1.0 / mom[k - 1]->sigma_im();
    for (int m = 0; m < M; ++m) {
      A(2 * k - 2, m) = h * std::cos(k * p.phi[m]) * wr;
      A(2 * k - 1, m) = h * std::sin(k * p.phi[m]) * wi;
    }
    b(2 * k - 2) = mom[k - 1]->value.real() * wr;
    b(2 * k - 1) = mom[k - 1]->value.imag() * wi;
  }
  if (!normalize) {
    // Psi_0 = 1 enters as a datum with the smallest supplied sigma.
    A.row(2 * K).setConstant(h / min_sigma);
    b(2 * K) = 1.0 / min_sigma;
  }
  // Periodic second differences.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
  for (int m = 0; m < M; ++m) {
    D(m, (m + M - 1) % M) += 1.0;
    D(m, m) -= 2.0;
    D(m, (m + 1) % M) += 1.0;
  }
  const double s = std::sqrt(reg_lambda);

  Eigen::VectorXd P;
  if (normalize) {
    // P = uniform + Z y with Z an orthonormal basis of the zero-sum subspace.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(M);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd Z = Q.rightCols(M - 1);
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(M, 1.0 / (2.0 * kPi));
    Eigen::MatrixXd S(data_rows + M, M - 1);
    Eigen::VectorXd r(data_rows + M);
    S.topRows(data_rows) = A * Z;
    S.bottomRows(M) = s * (D * Z);
    r.head(data_rows) = b - A * u;
    r.tail(M) = -s * (D * u);
    // Minimum-norm solution: at reg_lambda = 0 the system is rank deficient
    // and this picks the band-limited (Fourier) distribution.
    const Eigen::VectorXd y = S.completeOrthogonalDecomposition().solve(r);
    P = u + Z * y;
  } else {
    Eigen::MatrixXd S(data_rows + M, M);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(data_rows + M);
    S.topRows(data_rows) = A;
    S.bottomRows(M) = s * D;
    r.head(data_rows) = b;
    P = S.completeOrthogonalDecomposition().solve(r);
  }
  p.values.assign(P.data(), P.data() + M);
  return p;
}

double chi_squared(const PhaseDistribution& p, std::span<const MomentEstimate> moments, int K) {
  const auto mom = select_moments(moments, K);
  const int M = p.M();
  double chi2 = 0.0;
  for (int k = 1; k <= K; ++k) {
    double re = 0.0;
    double im = 0.0;
    for (int m = 0; m < M; ++m) {
      re += std::cos(k * p.phi[m]) * p.values[m];
      im += std::sin(k * p.phi[m]) * p.values[m];
    }
    re *= 2.0 * kPi / M;
    im *= 2.0 * kPi / M;
    const double dr = re - mom[k - 1]->value.real();
    const double di = im - mom[k - 1]->value.imag();
    chi2 += dr * dr / mom[k - 1]->var_re + di * di / mom[k - 1]->var_im;
  }
  return chi2;
}

double total_variation(const PhaseDistribution& p) {
  const int M = p.M();
  double tv = 0.0;
  for (int m = 0; m < M; ++m) tv += std::abs(p.values[(m + 1) % M] - p.values[m]);
  return tv;
}

std::vector<MomentEstimate> exact_moment_estimates(const DensityMatrix& rho, int K, double sigma) {
  std::vector<MomentEstimate> out;
  for (int k = 1; k <= K; ++k) {
    MomentEstimate e;
    e.k = k;
    e.value = exact_moment(rho, k);
    e.var_re = e.var_im = sigma * sigma;
    out.push_back(e);
  }
  return out;
}

}  // namespace phasemoments
