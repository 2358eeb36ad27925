#pragma once

#include <span>

namespace phasemoments::specfun {

// Largest Hermite order accepted by default. The F_k tail sums reach
// orders around 2l + k with l up to 10^3.
inline constexpr int kDefaultMaxHermiteOrder = 2100;

// Physicists' Hermite polynomial H_n(x). Throws ErrorCode::domain when the
// value leaves the double range instead of returning infinity.
double hermite_poly(int n, double x, int max_order = kDefaultMaxHermiteOrder);

// Oscillator eigenfunction psi_n(x) = (2^n n! sqrt(pi))^{-1/2} e^{-x^2/2} H_n(x),
// from the normalized recurrence. The recurrence carries a separate exponent,
// so deep in the forbidden region it underflows only at the very end.
double hermite_fn(int n, double x, int max_order = kDefaultMaxHermiteOrder);

// Fills out[0..n] with psi_0(x) .. psi_n(x); out.size() must be at least n + 1.
void hermite_fn_table(int n, double x, std::span<double> out);

// Fills out[0..n] with e^{x^2/2} psi_j(x), i.e. the normalized polynomial
// part of psi_j. Used by the kernel series where the Gaussian factor cancels.
void scaled_hermite_fn_table(int n, double x, std::span<double> out);

// Confluent hypergeometric function Phi(a, b, y) = 1F1(a; b; y) for y <= 0.
// Intended for a > 0 and b in {1/2, 3/2}; other b > 0 work but are untested.
double kummer_phi(double a, double b, double y);

namespace detail {
// Kummer-transformed power series e^{y} Phi(b - a, b, -y).
double kummer_series(double a, double b, double y);
// Large-argument expansion Gamma(b)/Gamma(b - a) t^{-a} sum_s (a)_s (a-b+1)_s/(s! t^s),
// truncated at its smallest term. Returns false if the expansion is not usable
// (Gamma(b - a) infinite or smallest relative term above `accept`).
bool kummer_asymptotic(double a, double b, double t, double accept, double* value);
// Argument |y| where kummer_phi hands over to the asymptotic branch.
double kummer_switch_point(double a, double b);
}  // namespace detail

// Modified Bessel function I_0(t) for t >= 0.
double bessel_i0(double t);
// e^{-t} I_0(t), finite for every t >= 0.
double bessel_i0_scaled(double t);

// Thread-safe log-gamma for positive arguments.
double log_gamma(double x);
double log_factorial(int n);

}  // namespace phasemoments::specfun
