#include "phasemoments/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "phasemoments/error.hpp"

namespace phasemoments::specfun {

namespace {

constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

void check_order(int n, int max_order) {
  require(n >= 0, ErrorCode::invalid_argument, "Hermite order must be nonnegative");
  require(n <= max_order, ErrorCode::invalid_argument,
          "Hermite order " + std::to_string(n) + " exceeds the limit " +
              std::to_string(max_order));
}

// Runs the normalized recurrence for m_j = psi_j(x) e^{-log_scale_j}. The
// callback sees (j, mantissa, log_scale) for every order up to n.
template <class Visit>
void psi_recurrence(int n, double x, double start_log_scale, Visit&& visit) {
  const double m0 = std::pow(std::numbers::pi, -0.25);
  double prev = 0.0;
  double cur = m0;
  double log_scale = start_log_scale;
  visit(0, cur, log_scale);
  for (int j = 0; j < n; ++j) {
    const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      log_scale += kLogRescale;
    }
    visit(j + 1, cur, log_scale);
  }
}

double combine(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  const double mag = std::log(std::abs(mantissa)) + log_scale;
  const double v = std::exp(mag);
  return mantissa < 0 ? -v : v;
}

template <class T>
struct SeriesResult {
  T sum;
  double log_scale;
  double max_ratio;  // largest |term| / |final sum|, a cancellation measure
};

template <class T>
SeriesResult<T> transformed_series(double a, double b, double t) {
  using std::abs;
  const T c = T(b) - T(a);
  const T tt = T(t);
  T term = 1;
  T sum = 1;
  T max_term = 1;
  double log_scale = 0.0;
  const int max_terms = static_cast<int>(t + 60.0 * std::sqrt(t + 1.0)) + 500;
  const T eps = std::numeric_limits<T>::epsilon();
  bool converged = false;
  for (int j = 0; j < max_terms; ++j) {
    term *= (c + j) / (T(b) + j) * tt / T(j + 1);
    sum += term;
    if (abs(term) > max_term) max_term = abs(term);
    if (term == 0) {
      converged = true;
      break;
    }
    if (j > t + a && abs(term) < eps * abs(sum) / 16) {
      converged = true;
      break;
    }
    if (abs(sum) > T(1e280)) {
      sum /= T(1e280);
      term /= T(1e280);
      max_term /= T(1e280);
      log_scale += std::log(1e280);
    }
  }
  require(converged, ErrorCode::convergence,
          "Kummer series did not converge within " + std::to_string(max_terms) + " terms");
  const double ratio = sum == 0 ? INFINITY : static_cast<double>(max_term / abs(sum));
  return {sum, log_scale, ratio};
}

template <class T>
double finish(const SeriesResult<T>& r, double t) {
  using std::abs;
  using std::log;
  if (r.sum == 0) return 0.0;
  const double mag = static_cast<double>(log(abs(r.sum))) + r.log_scale - t;
  const double v = std::exp(mag);
  return r.sum < 0 ? -v : v;
}

}  // namespace

double hermite_poly(int n, double x, int max_order) {
  check_order(n, max_order);
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int j = 1; j < n; ++j) {
    const double next = 2.0 * x * cur - 2.0 * j * prev;
    prev = cur;
    cur = next;
    require(std::isfinite(cur), ErrorCode::domain,
            "H_" + std::to_string(n) + "(" + std::to_string(x) + ") overflows double precision");
  }
  return cur;
}

double hermite_fn(int n, double x, int max_order) {
  check_order(n, max_order);
  double mantissa = 0.0;
  double log_scale = 0.0;
  psi_recurrence(n, x, -0.5 * x * x, [&](int j, double m, double s) {
    if (j == n) {
      mantissa = m;
      log_scale = s;
    }
  });
  return combine(mantissa, log_scale);
}

void hermite_fn_table(int n, double x, std::span<double> out) {
  check_order(n, kDefaultMaxHermiteOrder);
  require(out.size() >= static_cast<std::size_t>(n) + 1, ErrorCode::invalid_argument,
          "output span too small for Hermite table");
  psi_recurrence(n, x, -0.5 * x * x, [&](int j, double m, double s) { out[j] = combine(m, s); });
}

void scaled_hermite_fn_table(int n, double x, std::span<double> out) {
  check_order(n, kDefaultMaxHermiteOrder);
  require(out.size() >= static_cast<std::size_t>(n) + 1, ErrorCode::invalid_argument,
          "output span too small for Hermite table");
  psi_recurrence(n, x, 0.0, [&](int j, double m, double s) { out[j] = combine(m, s); });
}

namespace detail {

double kummer_series(double a, double b, double y) {
  const double t = -y;
  if (t == 0.0) return 1.0;
  const auto r = transformed_series<double>(a, b, t);
  if (r.max_ratio < 1e4) return finish(r, t);
  // Early alternating terms cancel; redo the sum with enough guard digits.
  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_bin_float_100;
  if (r.max_ratio < 1e30) return finish(transformed_series<cpp_bin_float_50>(a, b, t), t);
  const auto r100 = transformed_series<cpp_bin_float_100>(a, b, t);
  require(r100.max_ratio < 1e80, ErrorCode::convergence,
          "Kummer series loses all significant digits at this argument");
  return finish(r100, t);
}

bool kummer_asymptotic(double a, double b, double t, double accept, double* value) {
  const double c = b - a;
  if (c <= 0 && c == std::floor(c)) return false;
  int sign_c = 1;
  const double lg = boost::math::lgamma(b) - boost::math::lgamma(c, &sign_c) - a * std::log(t);
  double term = 1.0;
  double sum = 1.0;
  for (int s = 0; s < 1000; ++s) {
    const double next = term * (a + s) * (a - b + 1 + s) / ((s + 1) * t);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (term == 0.0) break;
  }
  if (std::abs(term) > accept * std::abs(sum)) return false;
  *value = sign_c * std::exp(lg) * sum;
  return true;
}

double kummer_switch_point(double a, double b) {
  double v = 0.0;
  for (double t = 30.0; t < 5000.0; t += 0.5) {
    if (kummer_asymptotic(a, b, t, 1e-15, &v)) return t;
  }
  return INFINITY;
}

}  // namespace detail

double kummer_phi(double a, double b, double y) {
  require(y <= 0.0, ErrorCode::invalid_argument, "kummer_phi requires y <= 0");
  require(b > 0.0, ErrorCode::invalid_argument, "kummer_phi requires b > 0");
  require(a > 0.0, ErrorCode::invalid_argument, "kummer_phi requires a > 0");
  if (y == 0.0) return 1.0;
  const double t = -y;
  double v = 0.0;
  if (t >= 30.0 && detail::kummer_asymptotic(a, b, t, 1e-15, &v)) return v;
  return detail::kummer_series(a, b, y);
}

double bessel_i0_scaled(double t) {
  require(t >= 0.0, ErrorCode::invalid_argument, "bessel_i0 requires t >= 0");
  if (t <= 15.0) {
    const double q = 0.25 * t * t;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < 200; ++j) {
      term *= q / (double(j) * j);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-t);
  }
  // e^{-t} I_0(t) ~ (2 pi t)^{-1/2} sum_j ((2j-1)!!)^2 / (j! (8t)^j)
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < 200; ++j) {
    const double next = term * (2.0 * j - 1) * (2.0 * j - 1) / (8.0 * j * t);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * t);
}

double bessel_i0(double t) {
  const double s = bessel_i0_scaled(t);
  require(t < 700.0, ErrorCode::domain, "I_0(t) overflows for t >= 700; use bessel_i0_scaled");
  return s * std::exp(t);
}

double log_gamma(double x) {
  require(x > 0.0, ErrorCode::invalid_argument, "log_gamma requires x > 0");
  return boost::math::lgamma(x);
}

double log_factorial(int n) {
  require(n >= 0, ErrorCode::invalid_argument, "log_factorial requires n >= 0");
  return boost::math::lgamma(n + 1.0);
}

}  // namespace phasemoments::specfun
