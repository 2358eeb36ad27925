#pragma once

#include <span>
#include <string>
#include <vector>

#include "phasemoments/estimator.hpp"

namespace phasemoments {

enum class ReconstructionMethod { fourier, least_squares };

const char* method_name(ReconstructionMethod method);
ReconstructionMethod parse_method(const std::string& name);

struct PhaseDistribution {
  std::vector<double> phi;  // 2 pi m / M
  std::vector<double> values;
  ReconstructionMethod method = ReconstructionMethod::fourier;
  int K = 0;
  double reg_lambda = 0.0;
  bool normalized = false;

  int M() const { return static_cast<int>(values.size()); }
  // (2 pi / M) sum of values
  double total() const;
};

PhaseDistribution fourier_reconstruct(std::span<const MomentEstimate> moments, int K, int M);

PhaseDistribution least_squares_reconstruct(std::span<const MomentEstimate> moments, int K, int M,
                                            double reg_lambda, bool normalize = true);

// Weighted misfit sum_k [(Re fit - Re Psi_k)^2 / var_re + (Im fit - Im Psi_k)^2 / var_im],
// where the fitted moments are (2 pi / M) sum_m e^{i k phi_m} P_m.
double chi_squared(const PhaseDistribution& p, std::span<const MomentEstimate> moments, int K);

// sum_m |P_{m+1} - P_m| on the periodic grid.
double total_variation(const PhaseDistribution& p);

// Exact moments wrapped as estimates with the given standard deviation, for
// tests and noise-free reconstructions.
std::vector<MomentEstimate> exact_moment_estimates(const DensityMatrix& rho, int K, double sigma);

}  // namespace phasemoments
