#include "phasemoments/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "phasemoments/error.hpp"
#include "phasemoments/quadrature.hpp"
#include "phasemoments/specfun.hpp"

namespace phasemoments {

namespace {

using mp_float = boost::multiprecision::cpp_bin_float_100;
constexpr double kPi = std::numbers::pi;

void check_k(int k) { require(k >= 1, ErrorCode::invalid_argument, "kernel order k must be >= 1"); }

void check_eta(double eta) {
  require(eta > 0.5 && eta <= 1.0, ErrorCode::domain,
          "loss compensation needs 1/2 < eta <= 1 (got eta = " + std::to_string(eta) + ")");
}

// Forward differences Delta^l f(0) of f(n) = prod_j (n + j)^{-1/2}, returned
// as (log|value|, sign). The alternating binomial sum cancels about
// l log10(2) digits, hence the 100-digit arithmetic.
std::vector<std::pair<double, int>> forward_differences(int k, int l_max) {
  std::vector<mp_float> f(l_max + 1);
  for (int n = 0; n <= l_max; ++n) {
    mp_float p = 1;
    for (int j = 1; j <= k; ++j) p *= n + j;
    f[n] = 1 / sqrt(p);
  }
  std::vector<std::pair<double, int>> out(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    mp_float sum = 0;
    mp_float binom = 1;
    for (int n = 0; n <= l; ++n) {
      const mp_float term = binom * f[n];
      if ((l - n) % 2 == 0) sum += term; else sum -= term;
      binom = binom * (l - n) / (n + 1);
    }
    if (sum == 0) {
      out[l] = {-INFINITY, 0};
    } else {
      out[l] = {static_cast<double>(log(abs(sum))), sum < 0 ? -1 : 1};
    }
  }
  return out;
}

// log C_l^(k)(eta) without the forward difference.
double log_coeff_prefactor(int k, int l, double eta) {
  return specfun::log_factorial(l + k) - (l + 0.5 * k) * std::log(2.0) -
         specfun::log_factorial(2 * l + k) - (l + 0.5 * k) * std::log(eta);
}

// binom(n + l - 1, l) / sqrt((l + 1)...(l + k)) for integer n >= 1. The
// binomial is written as prod_{i<n} (l + i) / (n - 1)! so it stays accurate
// for the huge l reached by the remainder integral.
double f_term(int n, int k, double l) {
  double log_t = -specfun::log_factorial(n - 1);
  for (int i = 1; i < n; ++i) log_t += std::log(l + i);
  for (int j = 1; j <= k; ++j) log_t -= 0.5 * std::log(l + j);
  return std::exp(log_t);
}

double f_term_derivative(int n, int k, double l) {
  double d = 0.0;
  for (int i = 1; i < n; ++i) d += 1.0 / (l + i);
  for (int j = 1; j <= k; ++j) d -= 0.5 / (l + j);
  return f_term(n, k, l) * d;
}

// Coefficients of F_k(u; eta) = sum_n terms[n] H_{k-2n}(u).
std::vector<double> f_polynomial_terms(int k, double eta, int truncation) {
  const int n_max = (k - 1) / 2;
  std::vector<double> terms(n_max + 1, 0.0);
  const double pref = 1.0 / (2.0 * kPi * std::pow(2.0 * eta, 0.5 * k));
  for (int n = 1; n <= n_max; ++n) {
    const double ratio = std::exp(specfun::log_factorial(k - n) - specfun::log_factorial(k - 2 * n));
    terms[n] = pref * std::pow(-2.0 * eta, n) * ratio * f_series_sum(n, k, truncation);
  }
  return terms;
}

// The polynomial part and its derivative at u.
double eval_f_poly(int k, const std::vector<double>& terms, double u, double* derivative) {
  double v = 0.0;
  double d = 0.0;
  for (std::size_t n = 1; n < terms.size(); ++n) {
    const int order = k - 2 * static_cast<int>(n);
    v += terms[n] * specfun::hermite_poly(order, u);
    if (order > 0) d += terms[n] * 2.0 * order * specfun::hermite_poly(order - 1, u);
  }
  if (derivative) *derivative = d;
  return v;
}

}  // namespace

void KernelSpec::validate() const {
  check_k(k);
  check_eta(eta);
  require(l0 >= 0 && l0 <= kMaxSeriesOrder, ErrorCode::invalid_argument,
          "series order l0 must lie in [0, " + std::to_string(kMaxSeriesOrder) + "]");
  require(x0 > 0.0 && std::isfinite(x0), ErrorCode::invalid_argument, "switch point x0 must be positive");
  require(f_truncation >= 1, ErrorCode::invalid_argument, "F truncation must be positive");
}

double classical_kernel(int k, double x) {
  check_k(k);
  if (k % 2 == 1) {
    const int m = (k - 1) / 2;
    const double sgn = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
    return 0.25 * (m % 2 == 0 ? 1.0 : -1.0) * k * sgn;
  }
  require(x != 0.0, ErrorCode::domain, "even-k classical kernel is singular at x = 0");
  const int m = k / 2;
  return (m % 2 == 1 ? 1.0 : -1.0) * m * std::log(std::abs(x)) / kPi;
}

double series_coeff(int k, int l, double eta) {
  check_k(k);
  check_eta(eta);
  require(l >= 0 && l <= kMaxSeriesOrder, ErrorCode::invalid_argument, "series index out of range");
  const auto diffs = forward_differences(k, l);
  const auto [log_d, sgn] = diffs[l];
  if (sgn == 0) return 0.0;
  return sgn * std::exp(log_d + log_coeff_prefactor(k, l, eta));
}

double omega(int k, double z, int max_terms) {
  check_k(k);
  require(z >= 0.0, ErrorCode::invalid_argument, "omega requires z >= 0");
  // Coefficients of prod_j (1 - (j/k) y)^{-1/2} in y = k x; each factor has
  // coefficients binom(2i, i)/4^i (j/k)^i <= 1, so nothing overflows.
  std::vector<double> c(max_terms, 0.0);
  c[0] = 1.0;
  std::vector<double> factor(max_terms);
  for (int j = 1; j <= k; ++j) {
    const double r = double(j) / k;
    factor[0] = 1.0;
    for (int i = 1; i < max_terms; ++i) factor[i] = factor[i - 1] * (2.0 * i - 1) / (2.0 * i) * r;
    std::vector<double> next(max_terms, 0.0);
    for (int a = 0; a < max_terms; ++a) {
      if (c[a] == 0.0) continue;
      for (int b = 0; a + b < max_terms; ++b) next[a + b] += c[a] * factor[b];
    }
    c.swap(next);
  }
  const double log_pref = std::log(2.0) + 0.5 * k * std::log(kPi);
  const double kz = k * z;
  double sum = 0.0;
  double max_term = 0.0;
  bool converged = false;
  for (int m = 0; m < max_terms; ++m) {
    if (c[m] == 0.0) continue;
    double log_mag = log_pref + std::log(c[m]) - specfun::log_gamma(0.5 * k + m);
    if (m > 0) log_mag += (kz > 0 ? m * std::log(kz) : -INFINITY);
    const double term = (m % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag);
    sum += term;
    max_term = std::max(max_term, std::abs(term));
    if (m > 2 * kz && std::abs(term) < 1e-17 * std::max(std::abs(sum), 1e-300)) {
      converged = true;
      break;
    }
    if (kz == 0.0) {
      converged = true;
      break;
    }
  }
  require(converged, ErrorCode::convergence,
          "omega power series did not converge at z = " + std::to_string(z) +
              "; use the integral form");
  require(max_term < 1e8 * std::abs(sum), ErrorCode::convergence,
          "omega power series loses more than 8 digits at z = " + std::to_string(z) +
              "; use the integral form");
  return sum;
}

double f_series_sum(int n, int k, int truncation) {
  require(n >= 1 && k >= 2 * n + 1, ErrorCode::invalid_argument,
          "F sum needs n >= 1 and k >= 2n + 1 to converge");
  require(truncation >= 1, ErrorCode::invalid_argument, "F truncation must be positive");
  double partial = 0.0;
  for (int l = 0; l < truncation; ++l) partial += f_term(n, k, l);
  // Euler-Maclaurin remainder. With l = L / v^2 the tail integral becomes a
  // smooth integral over (0, 1].
  const double L = truncation;
  const double integral = quad::integrate(
      [&](double v) { return f_term(n, k, L / (v * v)) * 2.0 * L / (v * v * v); }, 0.0, 1.0,
      1e-13, "F-sum remainder");
  return partial + integral + 0.5 * f_term(n, k, L) - f_term_derivative(n, k, L) / 12.0;
}

double poly_F(int k, double x, double eta, int f_truncation) {
  check_k(k);
  check_eta(eta);
  const auto terms = f_polynomial_terms(k, eta, f_truncation);
  return eval_f_poly(k, terms, x, nullptr);
}

double TailRule::operator()(double x) const {
  double v = classical_kernel(k, x);
  if (coeff != 0.0) {
    const double corr = coeff * std::pow(sqrt_eta * std::abs(x), -power);
    v += (k % 2 == 1) ? (x < 0 ? -corr : corr) : corr;
  }
  return v;
}

QuantumKernel::QuantumKernel(const KernelSpec& spec) : spec_(spec) {
  spec_.validate();
  const int k = spec_.k;
  const int l0 = spec_.l0;
  const auto diffs = forward_differences(k, l0);
  scaled_coeffs_.resize(l0 + 1);
  for (int l = 0; l <= l0; ++l) {
    const auto [log_d, sgn] = diffs[l];
    if (sgn == 0) {
      scaled_coeffs_[l] = 0.0;
      continue;
    }
    const int n = 2 * l + k;
    const double log_norm =
        0.5 * (n * std::log(2.0) + specfun::log_factorial(n) + 0.5 * std::log(kPi));
    scaled_coeffs_[l] = sgn * std::exp(log_d + log_coeff_prefactor(k, l, spec_.eta) + log_norm);
  }
  f_terms_ = f_polynomial_terms(k, spec_.eta, spec_.f_truncation);

  tail_.k = k;
  tail_.sqrt_eta = std::sqrt(spec_.eta);
  tail_.x_switch = spec_.x0 / tail_.sqrt_eta;
  const double xs = tail_.x_switch;
  const double s0 = series_value(xs);
  const double cl = classical_kernel(k, xs);
  if (k % 2 == 1) {
    tail_.power = k + 2;
    tail_.shift = 0.0;
    tail_.coeff = spec_.matched_tail ? (s0 - cl) * std::pow(spec_.x0, tail_.power) : 0.0;
  } else {
    tail_.power = 2;
    if (spec_.matched_tail) {
      // Match value and slope in u = sqrt(eta) x; dK/du = (dK/dx) / sqrt(eta).
      const double du_series = series_derivative(xs) / tail_.sqrt_eta;
      const double du_classical = (k / 2 % 2 == 1 ? 1.0 : -1.0) * (k / 2) / (kPi * spec_.x0);
      tail_.coeff = (du_classical - du_series) * std::pow(spec_.x0, 3) / 2.0;
    }
    tail_.shift = s0 - tail_(xs);
  }

  double d = 0.0;
  std::vector<double> phi(2 * l0 + k + 1);
  specfun::scaled_hermite_fn_table(2 * l0 + k, spec_.x0, phi);
  const double last = scaled_coeffs_[l0] * phi[2 * l0 + k] / (2.0 * kPi);
  truncation_estimate_ = std::abs(last) / std::max(std::abs(series_u(spec_.x0, &d)), 1e-300);
}

double QuantumKernel::series_u(double u, double* derivative) const {
  const int k = spec_.k;
  const int l0 = spec_.l0;
  const int n_top = 2 * l0 + k;
  thread_local std::vector<double> phi;
  phi.resize(n_top + 1);
  specfun::scaled_hermite_fn_table(n_top, u, phi);
  double v = 0.0;
  double d = 0.0;
  for (int l = 0; l <= l0; ++l) {
    const int n = 2 * l + k;
    v += scaled_coeffs_[l] * phi[n];
    d += scaled_coeffs_[l] * std::sqrt(2.0 * n) * phi[n - 1];
  }
  double fd = 0.0;
  const double fv = eval_f_poly(k, f_terms_, u, &fd);
  if (derivative) *derivative = d / (2.0 * kPi) + fd;
  return v / (2.0 * kPi) + fv;
}

double QuantumKernel::series_value(double x) const {
  const double ax = std::abs(x);
  const double v = series_u(tail_.sqrt_eta * ax, nullptr);
  return (spec_.k % 2 == 1 && x < 0) ? -v : v;
}

double QuantumKernel::series_derivative(double x) const {
  double d = 0.0;
  series_u(tail_.sqrt_eta * std::abs(x), &d);
  d *= tail_.sqrt_eta;
  // Odd kernels have even derivatives and vice versa.
  return (spec_.k % 2 == 0 && x < 0) ? -d : d;
}

double QuantumKernel::operator()(double x) const {
  if (std::abs(x) >= tail_.x_switch) return tail_(x);
  return series_value(x) - tail_.shift;
}

double quantum_kernel(int k, double x, double eta) {
  KernelSpec spec;
  spec.k = k;
  spec.eta = eta;
  return QuantumKernel(spec)(x);
}

std::complex<double> classical_identity(int k, double r) {
  check_k(k);
  require(r > 0.0, ErrorCode::invalid_argument, "classical identity needs r > 0");
  // Panels [a, a + pi] with a = -pi/2, pi/2 end where cos phi vanishes: odd
  // kernels jump there and even ones have a log singularity, both of which
  // tanh-sinh absorbs at the endpoints. On the panel cos(a + t) = sgn sin t,
  // and sin t is taken from the complement near t = pi to keep it exact.
  boost::math::quadrature::tanh_sinh<double> ts;
  double re = 0.0;
  double im = 0.0;
  for (const double a : {-kPi / 2, kPi / 2}) {
    const double sgn = a < 0 ? 1.0 : -1.0;
    auto kern = [&](double t, double tc) {
      const double s = t < kPi / 2 ? std::sin(t) : std::sin(tc);
      return s > 0.0 ? classical_kernel(k, r * sgn * s) : 0.0;
    };
    re += ts.integrate([&](double t, double tc) { return std::cos(k * (a + t)) * kern(t, tc); }, 0.0, kPi);
    im += ts.integrate([&](double t, double tc) { return std::sin(k * (a + t)) * kern(t, tc); }, 0.0, kPi);
  }
  return {re, im};
}

double integral_kernel_k1(double x) {
  if (x == 0.0) return 0.0;
  const double x2 = x * x;
  // t = u^2 turns dt / sqrt(t) into 2 du.
  auto f = [x2](double u) {
    const double t = u * u;
    if (t > 300.0) return 0.0;
    const double c = std::cosh(t);
    return 2.0 * specfun::kummer_phi(2.0, 1.5, -x2 * std::tanh(t)) / (c * c);
  };
  const double edge = std::min(1.0, 2.0 / std::abs(x));
  const double value = quad::integrate(f, 0.0, edge, 1e-12, "K1 integral") +
                       quad::integrate(f, edge, 1.0, 1e-12, "K1 integral") +
                       quad::integrate(f, 1.0, 6.0, 1e-12, "K1 integral");
  return std::pow(kPi, -1.5) * x * value;
}

double integral_kernel_k2(double x) {
  const double x2 = x * x;
  // I0(t)/sinh(t) = 2 e^{-t} I0(t) / (1 - e^{-2t}). For small t the bracket
  // e^{-2t} - Phi / cosh^2 t is regrouped as (e^{-2t} - 1) + (1 - Phi) + Phi tanh^2 t
  // so that its O(t) size is resolved.
  auto f = [x2](double t) {
    const double th = std::tanh(t);
    const double phi = specfun::kummer_phi(2.0, 0.5, -x2 * th);
    double bracket;
    if (t < 1.0) {
      bracket = std::expm1(-2.0 * t) + (1.0 - phi) + phi * th * th;
    } else {
      const double sech = 1.0 / std::cosh(t);
      bracket = std::exp(-2.0 * t) - phi * sech * sech;
    }
    return specfun::bessel_i0_scaled(t) * 2.0 / (-std::expm1(-2.0 * t)) * bracket;
  };
  std::vector<double> cuts{0.0};
  if (x2 > 1.0) {
    cuts.push_back(1.0 / x2);
    cuts.push_back(std::min(10.0 / x2, 1.0));
  }
  cuts.push_back(1.0);
  cuts.push_back(8.0);
  cuts.push_back(60.0);
  double value = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) value += quad::integrate(f, cuts[i], cuts[i + 1], 1e-12, "K2 integral");
  }
  return value / (2.0 * kPi);
}

KernelTable::KernelTable(const KernelSpec& spec, double grid_step, std::vector<double> values,
                         const TailRule& tail)
    : spec_(spec), grid_step_(grid_step), values_(std::move(values)), tail_(tail) {
  spec_.validate();
  require(grid_step > 0.0, ErrorCode::invalid_argument, "grid step must be positive");
  half_ = static_cast<int>(std::ceil(tail_.x_switch / grid_step - 1e-9));
  half_ = std::max(half_, 1);
  h_ = tail_.x_switch / half_;
  require(values_.size() == static_cast<std::size_t>(2 * half_ + 1), ErrorCode::invalid_argument,
          "kernel table has " + std::to_string(values_.size()) + " values, expected " +
              std::to_string(2 * half_ + 1));
}

double KernelTable::operator()(double x) const {
  if (std::abs(x) >= tail_.x_switch) return tail_(x);
  const double s = x / h_ + half_;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, 2 * half_ - 1);
  const double t = s - i;
  if (t < 1e-12) return values_[i];
  if (t > 1.0 - 1e-12) return values_[i + 1];
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

KernelTable build_kernel_table(const KernelSpec& spec, double grid_step) {
  require(grid_step > 0.0 && std::isfinite(grid_step), ErrorCode::invalid_argument,
          "grid step must be positive");
  const QuantumKernel kernel(spec);
  const double xs = kernel.switch_point();
  const int half = std::max(1, static_cast<int>(std::ceil(xs / grid_step - 1e-9)));
  const double h = xs / half;
  std::vector<double> values(2 * half + 1);
  const bool odd = spec.k % 2 == 1;
  for (int j = 0; j <= half; ++j) {
    double v;
    if (j == 0 && odd) {
      v = 0.0;
    } else if (j == half) {
      v = kernel.tail()(xs);
    } else {
      v = kernel.series_value(j * h) - kernel.tail().shift;
    }
    values[half + j] = v;
    values[half - j] = odd ? -v : v;
  }
  return KernelTable(spec, grid_step, std::move(values), kernel.tail());
}

double smeared_kernel(const KernelTable& table, double x, double eta) {
  require(eta > 0.0 && eta <= 1.0, ErrorCode::invalid_argument, "smearing needs 0 < eta <= 1");
  if (eta == 1.0) return table(x);
  const double sigma = std::sqrt((1.0 - eta) / (2.0 * eta));
  const double lo = x - 12.0 * sigma;
  const double hi = x + 12.0 * sigma;
  const double xs = table.switch_point();
  std::vector<double> cuts{lo};
  // Align panels with table nodes so every panel sees a linear function.
  const double h = table.node_spacing();
  const double a = std::max(lo, -xs);
  const double b = std::min(hi, xs);
  if (a < b) {
    const int first = static_cast<int>(std::ceil(a / h));
    const int last = static_cast<int>(std::floor(b / h));
    if (a < first * h) cuts.push_back(a);
    for (int i = first; i <= last; ++i) {
      if (i * h > cuts.back()) cuts.push_back(i * h);
    }
    if (b > cuts.back()) cuts.push_back(b);
  }
  if (hi > cuts.back()) cuts.push_back(hi);
  const auto rule = quad::composite_gauss_legendre(cuts, 0.05, 4);
  const double norm = 1.0 / (std::sqrt(2.0 * kPi) * sigma);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double y = rule.x[i];
    const double z = (y - x) / sigma;
    sum += rule.w[i] * table(y) * std::exp(-0.5 * z * z);
  }
  return sum * norm;
}

double smear_error_kernel(const KernelTable& table, double x, double eta) {
  if (eta == 1.0) return 0.0;
  return smeared_kernel(table, x, eta) - table(x);
}

double smear_error_kernel(int k, double x, double eta) {
  KernelSpec spec;
  spec.k = k;
  return smear_error_kernel(build_kernel_table(spec), x, eta);
}

SmearErrorTable::SmearErrorTable(const KernelTable& kernel, double eta, double half_width, double step)
    : kernel_(kernel), eta_(eta), half_width_(half_width) {
  require(eta > 0.0 && eta <= 1.0, ErrorCode::invalid_argument, "smearing needs 0 < eta <= 1");
  require(half_width > 0.0 && step > 0.0, ErrorCode::invalid_argument, "invalid smear table grid");
  half_ = std::max(1, static_cast<int>(std::ceil(half_width / step)));
  h_ = half_width / half_;
  values_.assign(2 * half_ + 1, 0.0);
  if (eta == 1.0) return;
  const bool odd = kernel.spec().k % 2 == 1;
  for (int j = 0; j <= half_; ++j) {
    const double x = j * h_;
    double v = 0.0;
    if (!(odd && j == 0)) v = smear_error_kernel(kernel_, x, eta);
    values_[half_ + j] = v;
    values_[half_ - j] = odd ? -v : v;
  }
}

double SmearErrorTable::operator()(double x) const {
  if (eta_ == 1.0) return 0.0;
  if (std::abs(x) >= half_width_) return smear_error_kernel(kernel_, x, eta_);
  const double s = x / h_ + half_;
  int i = std::clamp(static_cast<int>(std::floor(s)), 0, 2 * half_ - 1);
  const double t = s - i;
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

}  // namespace phasemoments
