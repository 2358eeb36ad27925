#pragma once

#include <complex>
#include <span>
#include <vector>

#include "phasemoments/kernels.hpp"
#include "phasemoments/simulator.hpp"
#include "phasemoments/states.hpp"

namespace phasemoments {

struct MomentEstimate {
  int k = 1;
  cplx value{0.0, 0.0};
  double var_re = 0.0;
  double var_im = 0.0;
  int n_phases = 0;
  bool compensated = false;
  double eta_assumed = 1.0;
  // Some phase had a single event, so its kernel variance is unknown and
  // the variances above are infinite.
  bool single_event_phase = false;

  double sigma_re() const;
  double sigma_im() const;
};

MomentEstimate estimate_moment(const MeasurementSet& ms, int k, const KernelTable& table);

// tables[i] must be the kernel for k = i + 1, i < k_max. One pass over the
// records; results equal the per-k calls bit for bit.
std::vector<MomentEstimate> estimate_all(const MeasurementSet& ms, int k_max,
                                         std::span<const KernelTable> tables);

// Gauss-Legendre nodes with tabulated kernel and oscillator eigenfunctions,
// for many matrix elements of one kernel.
class KernelOverlap {
 public:
  KernelOverlap(const KernelTable& table, int n_max);

  // 2 pi integral of K psi_m psi_n
  double q(int m, int n) const;
  // integral of f(x) psi_m psi_n for an arbitrary weight sampled on nodes()
  double overlap(std::span<const double> f, int m, int n) const;
  std::span<const double> nodes() const { return x_; }
  int n_max() const { return n_max_; }

 private:
  int n_max_;
  std::vector<double> x_;
  std::vector<double> w_;
  std::vector<double> kernel_;
  std::vector<double> psi_;  // psi_[i * (n_max + 1) + n]
};

double q_matrix_element(int k, int m, int n, const KernelTable& table);

struct AliasingBias {
  cplx exact{0.0, 0.0};
  cplx approx{0.0, 0.0};
};

AliasingBias aliasing_bias(const DensityMatrix& rho, int k, int n_phases, const KernelTable& table);

// Expected estimate at N phases with exact p(x, theta): (2 pi/N) sum_l e^{ik theta_l}
// integral of K p dx.
cplx discretized_moment(const DensityMatrix& rho, int k, int n_phases, const KernelTable& table);

// Bias of the uncompensated moment from smearing at efficiency eta; g must be tabulated for the same k and eta.
cplx smear_bias(const DensityMatrix& rho, int k, double eta, const SmearErrorTable& g);

}  // namespace phasemoments
