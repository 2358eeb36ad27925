#pragma once

#include <complex>
#include <span>
#include <vector>

namespace phasemoments {

struct KernelSpec {
  int k = 1;
  double eta = 1.0;
  int l0 = 40;
  double x0 = 4.0;
  int f_truncation = 1000;
  // Adds a decaying correction to the classical tail so the kernel is
  // continuous at the switch (and smooth for even k). Off gives the bare
  // classical formula beyond x0.
  bool matched_tail = true;

  void validate() const;
};

inline constexpr int kMaxSeriesOrder = 250;

// Classical limit of the kernel. Even k uses additive constant 0 and throws
// ErrorCode::domain at x = 0.
double classical_kernel(int k, double x);

// Expansion coefficient C_l^(k) eta^{-(l + k/2)} of the Hermite series.
double series_coeff(int k, int l, double eta);

// Omega^(k)(z) from its power series. Throws ErrorCode::convergence when the
// series cannot be summed to double accuracy at this z.
double omega(int k, double z, int max_terms = 400);

// S_n(k) = sum_{l>=0} binom(n+l-1, l) / sqrt((l+1)...(l+k)), n >= 1,
// k >= 2n + 1. Explicit terms below `truncation`, Euler-Maclaurin remainder
// above it.
double f_series_sum(int n, int k, int truncation = 1000);

// Polynomial part F_k(x; eta) of the kernel; 0 for k <= 2.
double poly_F(int k, double x, double eta, int f_truncation = 1000);

// Evaluation rule for |x| >= switch point:
//   classical_kernel(k, x) + sign * coeff * |sqrt(eta) x|^{-power}
// where sign is sign(x) for odd k and 1 for even k.
struct TailRule {
  int k = 1;
  double sqrt_eta = 1.0;
  double x_switch = 4.0;  // in the data variable, x0 / sqrt(eta)
  double shift = 0.0;     // subtracted from the series inside the switch
  double coeff = 0.0;
  int power = 3;

  double operator()(double x) const;
};

// Series/classical hybrid kernel K_k(x; eta) for data smeared at efficiency eta.
// Inside the switch the kernel is the Hermite series plus F_k, evaluated at
// sqrt(eta) x; outside it is the TailRule.
class QuantumKernel {
 public:
  explicit QuantumKernel(const KernelSpec& spec);

  double operator()(double x) const;
  // Series plus F_k before the tail shift, at data coordinate x.
  double series_value(double x) const;
  // d/dx of series_value.
  double series_derivative(double x) const;

  const KernelSpec& spec() const { return spec_; }
  const TailRule& tail() const { return tail_; }
  double switch_point() const { return tail_.x_switch; }
  // Magnitude of the last series term at the switch point relative to the
  // series value there; a cheap check that l0 is large enough.
  double truncation_estimate() const { return truncation_estimate_; }

 private:
  double series_u(double u, double* derivative) const;

  KernelSpec spec_;
  std::vector<double> scaled_coeffs_;  // C_l H_n(u) = scaled_coeffs_[l] * e^{u^2/2} psi_n(u)
  std::vector<double> f_terms_;        // F_k(u) = sum_n f_terms_[n] H_{k-2n}(u)
  TailRule tail_;
  double truncation_estimate_ = 0.0;
};

// One-off evaluation with default l0, x0 and F truncation.
double quantum_kernel(int k, double x, double eta);

// Closed integral forms used as cross-checks of the series.
double integral_kernel_k1(double x);
double integral_kernel_k2(double x);

// integral over [0, 2 pi) of e^{ik phi} classical_kernel(k, r cos phi); equals 1
// for every r > 0.
std::complex<double> classical_identity(int k, double r);

class KernelTable {
 public:
  KernelTable(const KernelSpec& spec, double grid_step, std::vector<double> values,
              const TailRule& tail);

  double operator()(double x) const;

  const KernelSpec& spec() const { return spec_; }
  const TailRule& tail() const { return tail_; }
  double grid_step() const { return grid_step_; }
  double node_spacing() const { return h_; }
  double switch_point() const { return tail_.x_switch; }
  int size() const { return static_cast<int>(values_.size()); }
  double node(int i) const { return (i - half_) * h_; }
  std::span<const double> values() const { return values_; }

 private:
  KernelSpec spec_;
  double grid_step_;
  int half_;
  double h_;
  std::vector<double> values_;
  TailRule tail_;
};

// Nodes are x_i = (i - n) h with n = ceil(x_switch / grid_step) and
// h = x_switch / n, so 0 and both switch points are nodes.
KernelTable build_kernel_table(const KernelSpec& spec, double grid_step = 0.005);

// Gaussian convolution of a tabulated kernel, sigma^2 = (1 - eta) / (2 eta).
double smeared_kernel(const KernelTable& table, double x, double eta);

// g_k(x; eta) = smeared_kernel - kernel.
double smear_error_kernel(const KernelTable& table, double x, double eta);
// Same, with a default uncompensated table for k.
double smear_error_kernel(int k, double x, double eta);

// g_k tabulated on a uniform grid over [-half_width, half_width]; evaluated
// directly outside that range.
class SmearErrorTable {
 public:
  SmearErrorTable(const KernelTable& kernel, double eta, double half_width, double step = 0.01);

  double operator()(double x) const;
  double eta() const { return eta_; }
  int k() const { return kernel_.spec().k; }

 private:
  KernelTable kernel_;
  double eta_;
  double half_width_;
  int half_;
  double h_;
  std::vector<double> values_;
};

}  // namespace phasemoments
