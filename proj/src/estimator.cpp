#include "phasemoments/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "phasemoments/error.hpp"
#include "phasemoments/quadrature.hpp"
#include "phasemoments/specfun.hpp"

namespace phasemoments {

namespace {

constexpr double kPi = std::numbers::pi;

void check_table(const MeasurementSet& ms, int k, const KernelTable& table) {
  require(k >= 1, ErrorCode::invalid_argument, "moment order must be >= 1");
  require(table.spec().k == k, ErrorCode::configuration,
          "kernel table is for k = " + std::to_string(table.spec().k) + ", estimate asks for k = " +
              std::to_string(k));
  const double eta = table.spec().eta;
  if (eta < 1.0) {
    require(std::abs(eta - ms.plan.eta) <= 1e-12, ErrorCode::configuration,
            "compensated kernel assumes eta = " + std::to_string(eta) + " but the data has eta = " +
                std::to_string(ms.plan.eta));
  }
}

// Welford accumulator of kernel values at one phase.
struct Running {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
};

// Gauss-Legendre rule covering the support of psi_n, n <= n_max, with
// breakpoints at the kernel switch points.
quad::Rule overlap_rule(double x_switch, int n_max) {
  const double L = std::max(std::sqrt(2.0 * n_max + 1.0) + 9.0, x_switch + 1.0);
  const std::vector<double> cuts{-L, -x_switch, 0.0, x_switch, L};
  return quad::composite_gauss_legendre(cuts, 0.25, 20);
}

MomentEstimate finish(const MeasurementSet& ms, int k, const KernelTable& table,
                      const std::vector<Running>& acc) {
  const int N = ms.plan.n_phases;
  MomentEstimate e;
  e.k = k;
  e.n_phases = N;
  e.compensated = table.spec().eta < 1.0;
  e.eta_assumed = table.spec().eta;
  cplx sum = 0.0;
  double vr = 0.0;
  double vi = 0.0;
  for (int l = 0; l < N; ++l) {
    const double th = k * ms.plan.theta(l);
    const double c = std::cos(th);
    const double s = std::sin(th);
    sum += cplx(c, s) * acc[l].mean;
    if (acc[l].n < 2) {
      e.single_event_phase = true;
      continue;
    }
    const double sample_var = acc[l].m2 / (acc[l].n - 1);
    vr += c * c * sample_var / acc[l].n;
    vi += s * s * sample_var / acc[l].n;
  }
  const double pref = 2.0 * kPi / N;
  e.value = pref * sum;
  if (e.single_event_phase) {
    e.var_re = e.var_im = std::numeric_limits<double>::infinity();
  } else {
    e.var_re = pref * pref * vr;
    e.var_im = pref * pref * vi;
  }
  return e;
}

}  // namespace

double MomentEstimate::sigma_re() const { return std::sqrt(var_re); }
double MomentEstimate::sigma_im() const { return std::sqrt(var_im); }

MomentEstimate estimate_moment(const MeasurementSet& ms, int k, const KernelTable& table) {
  ms.validate();
  check_table(ms, k, table);
  std::vector<Running> acc(ms.plan.n_phases);
  for (int l = 0; l < ms.plan.n_phases; ++l) {
    for (double x : ms.records[l]) acc[l].add(table(x));
  }
  return finish(ms, k, table, acc);
}

std::vector<MomentEstimate> estimate_all(const MeasurementSet& ms, int k_max,
                                         std::span<const KernelTable> tables) {
  ms.validate();
  require(k_max >= 1, ErrorCode::invalid_argument, "k_max must be >= 1");
  require(k_max < ms.plan.n_phases, ErrorCode::invalid_argument,
          "k_max = " + std::to_string(k_max) + " needs more than " + std::to_string(k_max) +
              " phases; the data has " + std::to_string(ms.plan.n_phases));
  require(tables.size() >= static_cast<std::size_t>(k_max), ErrorCode::configuration,
          "one kernel table per order k = 1..k_max is required");
  for (int k = 1; k <= k_max; ++k) check_table(ms, k, tables[k - 1]);
  const int N = ms.plan.n_phases;
  std::vector<std::vector<Running>> acc(k_max, std::vector<Running>(N));
  for (int l = 0; l < N; ++l) {
    for (double x : ms.records[l]) {
      for (int k = 1; k <= k_max; ++k) acc[k - 1][l].add(tables[k - 1](x));
    }
  }
  std::vector<MomentEstimate> out;
  out.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) out.push_back(finish(ms, k, tables[k - 1], acc[k - 1]));
  return out;
}

KernelOverlap::KernelOverlap(const KernelTable& table, int n_max) : n_max_(n_max) {
  require(n_max >= 0 && n_max <= specfun::kDefaultMaxHermiteOrder, ErrorCode::invalid_argument,
          "overlap order out of range");
  auto rule = overlap_rule(table.switch_point(), n_max);
  x_ = std::move(rule.x);
  w_ = std::move(rule.w);
  kernel_.resize(x_.size());
  psi_.resize(x_.size() * (n_max + 1));
  for (std::size_t i = 0; i < x_.size(); ++i) {
    kernel_[i] = table(x_[i]);
    specfun::hermite_fn_table(n_max, x_[i],
                              std::span<double>(psi_.data() + i * (n_max + 1), n_max + 1));
  }
}

double KernelOverlap::overlap(std::span<const double> f, int m, int n) const {
  require(m >= 0 && n >= 0 && m <= n_max_ && n <= n_max_, ErrorCode::invalid_argument,
          "overlap index out of range");
  require(f.size() == x_.size(), ErrorCode::invalid_argument, "weight must be sampled on the nodes");
  const std::size_t stride = n_max_ + 1;
  double s = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) s += w_[i] * f[i] * psi_[i * stride + m] * psi_[i * stride + n];
  return s;
}

double KernelOverlap::q(int m, int n) const { return 2.0 * kPi * overlap(kernel_, m, n); }

double q_matrix_element(int k, int m, int n, const KernelTable& table) {
  require(table.spec().k == k, ErrorCode::configuration, "kernel table order does not match k");
  return KernelOverlap(table, std::max(m, n)).q(m, n);
}

AliasingBias aliasing_bias(const DensityMatrix& rho, int k, int n_phases, const KernelTable& table) {
  require(k >= 1 && n_phases > k, ErrorCode::invalid_argument, "aliasing bias needs N > k >= 1");
  require(table.spec().k == k, ErrorCode::configuration, "kernel table order does not match k");
  const int nm = rho.n_max();
  const int N = n_phases;
  AliasingBias out;
  if (nm >= N - k) {
    const KernelOverlap ov(table, nm);
    for (int s = 1; k + s * N <= nm || s * N - k <= nm; ++s) {
      for (int n = 0; n + k + s * N <= nm; ++n) {
        out.exact += rho(n + k + s * N, n) * ov.q(n + k + s * N, n);
      }
      for (int n = 0; n + s * N - k <= nm; ++n) {
        out.exact += rho(n, n + s * N - k) * ov.q(n, n + s * N - k);
      }
    }
  }
  // Classical limit Q_{n+j,n} ~ (-1)^{(j-k)/2} k/j, so the conjugate terms
  // pick up (-1)^k relative to the printed approximation.
  const double kk = k;
  const double odd = k % 2 == 0 ? 1.0 : -1.0;
  if (N % 2 == 1) {
    for (int s = 1; 2 * N * s - k <= nm; ++s) {
      const double sign = s % 2 == 0 ? 1.0 : -1.0;
      out.approx += sign * (kk / (2.0 * s * N + k) * exact_moment(rho, k + 2 * N * s) +
                            odd * kk / (2.0 * s * N - k) * exact_moment(rho, k - 2 * N * s));
    }
  } else {
    for (int s = 1; N * s - k <= nm; ++s) {
      const double sign = (N * s / 2) % 2 == 0 ? 1.0 : -1.0;
      out.approx += sign * (kk / (double(s) * N + k) * exact_moment(rho, k + N * s) +
                            odd * kk / (double(s) * N - k) * exact_moment(rho, k - N * s));
    }
  }
  return out;
}

cplx discretized_moment(const DensityMatrix& rho, int k, int n_phases, const KernelTable& table) {
  require(n_phases >= 1, ErrorCode::invalid_argument, "number of phases must be positive");
  require(table.spec().k == k, ErrorCode::configuration, "kernel table order does not match k");
  const QuadratureDensity density(rho);
  const auto rule = overlap_rule(table.switch_point(), rho.n_max());
  std::vector<double> kv(rule.x.size());
  for (std::size_t i = 0; i < kv.size(); ++i) kv[i] = table(rule.x[i]);
  cplx sum = 0.0;
  for (int l = 0; l < n_phases; ++l) {
    const double th = 2.0 * kPi * l / n_phases;
    double integral = 0.0;
    for (std::size_t i = 0; i < kv.size(); ++i) integral += rule.w[i] * kv[i] * density(rule.x[i], th);
    sum += std::polar(1.0, k * th) * integral;
  }
  return 2.0 * kPi / n_phases * sum;
}

cplx smear_bias(const DensityMatrix& rho, int k, double eta, const SmearErrorTable& g) {
  require(eta > 0.0 && eta <= 1.0, ErrorCode::invalid_argument, "efficiency must lie in (0, 1]");
  if (eta == 1.0) return 0.0;
  require(g.k() == k && std::abs(g.eta() - eta) <= 1e-12, ErrorCode::configuration,
          "smearing-error table does not match (k, eta)");
  const int nm = rho.n_max();
  if (k > nm) return 0.0;
  const auto rule = overlap_rule(KernelSpec{}.x0, nm);
  std::vector<double> gv(rule.x.size());
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = g(rule.x[i]);
  std::vector<double> psi(nm + 1);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    specfun::hermite_fn_table(nm, rule.x[i], psi);
    cplx s = 0.0;
    for (int n = 0; n + k <= nm; ++n) s += rho(n + k, n) * psi[n + k] * psi[n];
    sum += rule.w[i] * gv[i] * s;
  }
  return 2.0 * kPi * sum;
}

}  // namespace phasemoments
