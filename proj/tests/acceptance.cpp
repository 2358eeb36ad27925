// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "phasemoments/estimator.hpp"
#include "phasemoments/kernels.hpp"
#include "phasemoments/pipeline.hpp"
#include "phasemoments/reconstruct.hpp"
#include "phasemoments/simulator.hpp"
#include "phasemoments/states.hpp"

using namespace phasemoments;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("AC%-2d %s  %s [%.1f s]\n      %s\n", id, o.pass ? "PASS" : "FAIL", title, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

KernelSpec spec_for(int k, double eta = 1.0) {
  KernelSpec s;
  s.k = k;
  s.eta = eta;
  return s;
}

std::vector<KernelTable> tables_for(int k_max, double eta = 1.0) {
  std::vector<KernelTable> t;
  for (int k = 1; k <= k_max; ++k) t.push_back(build_kernel_table(spec_for(k, eta)));
  return t;
}

StateSpec fig4_state(int n_max, double tol) {
  StateSpec s;
  s.kind = StateKind::squeezed_vacuum;
  s.xi = {-1.31, 0.0};
  s.n_max = n_max;
  s.leakage_tol = tol;
  return s;
}

StateSpec fig5_state() {
  StateSpec s;
  s.kind = StateKind::displaced_fock;
  s.alpha = {-1.5, 0.0};
  s.fock_n = 2;
  s.n_max = 20;
  return s;
}

// Largest |estimate - exact| / sigma over the real and imaginary parts.
struct Pulls {
  double worst = 0.0;
  std::string where;
};

Pulls pulls(const std::vector<MomentEstimate>& est, const DensityMatrix& rho, int k_max) {
  Pulls p;
  for (int k = 1; k <= k_max; ++k) {
    const auto& e = est[k - 1];
    const cplx ex = exact_moment(rho, k);
    const double zr = std::abs(e.value.real() - ex.real()) / e.sigma_re();
    const double zi = std::abs(e.value.imag() - ex.imag()) / e.sigma_im();
    if (zr > p.worst) p = {zr, fmt("Re k=%d", k)};
    if (zi > p.worst) p = {zi, fmt("Im k=%d", k)};
  }
  return p;
}

std::vector<MomentEstimate> g_fig4_moments;  // kept for the regularization sweep

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);

  report(1, "quantum identity suite, k = 1..5, n = 0..30", [] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string at;
    int n_checks = 0;
    for (const auto& c : verify_identities()) {
      if (c.suite != "quantum") continue;
      ++n_checks;
      if (c.residual > worst) {
        worst = c.residual;
        at = fmt("k=%d n=%d", c.k, static_cast<int>(c.param));
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{worst < 1e-3 && secs < 120.0 && n_checks == 155,
                   fmt("%d checks, max |2pi int K psi psi - 1| = %.2e at %s (< 1e-3), %.1f s (< 120 s)", n_checks,
                       worst, at.c_str(), secs)};
  });

  report(2, "classical identity suite, k = 1..5, r in {0.5, 1, 2, 5, 10}", [] {
    double worst = 0.0;
    for (int k = 1; k <= 5; ++k) {
      for (double r : {0.5, 1.0, 2.0, 5.0, 10.0}) worst = std::max(worst, std::abs(classical_identity(k, r) - 1.0));
    }
    return Outcome{worst < 1e-6, fmt("max residual %.2e (< 1e-6)", worst)};
  });

  report(3, "asymptotics of K_1 and K_2", [] {
    const QuantumKernel k1(spec_for(1));
    const QuantumKernel k2(spec_for(2));
    double w1 = 0.0, w2 = 0.0;
    for (double x = 4.0; x <= 400.0; x *= 1.01) w1 = std::max(w1, std::abs(k1(x) - 0.25));
    for (double x = 8.0; x <= 400.0; x *= 1.01) w2 = std::max(w2, std::abs(k2(2 * x) - k2(x) - std::log(2.0) / kPi));
    return Outcome{w1 < 1e-2 && w2 < 1e-2,
                   fmt("max |K1 - 1/4| = %.2e for x in [4, 400]; max |K2(2x) - K2(x) - ln2/pi| = %.2e for x in [8, 400]",
                       w1, w2)};
  });

  report(4, "series kernels against the closed integral forms on [0, 4]", [] {
    const QuantumKernel k1(spec_for(1));
    const QuantumKernel k2(spec_for(2));
    double w1 = 0.0;
    std::vector<double> d2;
    for (int i = 0; i <= 160; ++i) {
      const double x = 0.025 * i;
      w1 = std::max(w1, std::abs(k1(x) - integral_kernel_k1(x)));
      if (x > 0.0) d2.push_back(k2(x) - integral_kernel_k2(x));
    }
    // One additive constant, fitted as the mean offset.
    double c = 0.0;
    for (double d : d2) c += d;
    c /= d2.size();
    double w2 = 0.0;
    for (double d : d2) w2 = std::max(w2, std::abs(d - c));
    return Outcome{w1 < 1e-4 && w2 < 1e-4,
                   fmt("k=1 max diff %.2e; k=2 max diff %.2e after constant %.6f (both < 1e-4)", w1, w2, c)};
  });

  report(5, "squeezed vacuum xi = -1.31, N = 120, 1e4 events, eta = 1", [] {
    const auto t0 = std::chrono::steady_clock::now();
    // n_max = 20 loses 1.2% of the norm and 10% of <n>; n_max = 100 is used.
    const auto r20 = build_state(fig4_state(20, 0.02));
    const auto spec = fig4_state(100, 1e-6);
    const auto plan = ExperimentPlan::uniform(spec, 120, 10000, 1.0, 1);
    const auto ms = run_experiment(plan);
    const auto rho = build_state(spec);
    const double nbar = rho.mean_photon_number();
    const double nominal = std::pow(std::sinh(1.31), 2);
    g_fig4_moments = estimate_all(ms, 20, tables_for(20));
    double worst = 0.0;
    std::string at;
    for (int k = 1; k <= 8; ++k) {
      const auto& e = g_fig4_moments[k - 1];
      // Odd moments and imaginary parts vanish for this state.
      const double target = k % 2 ? 0.0 : exact_moment(rho, k).real();
      const double zr = std::abs(e.value.real() - target) / e.sigma_re();
      const double zi = std::abs(e.value.imag()) / e.sigma_im();
      if (zr > worst) worst = zr, at = fmt("Re k=%d", k);
      if (zi > worst) worst = zi, at = fmt("Im k=%d", k);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool nbar_ok = std::abs(nbar - nominal) < 0.01 * nominal;
    return Outcome{worst < 4.0 && nbar_ok && secs < 300.0,
                   fmt("worst pull %.2f sigma (%s, < 4); <n> = %.6f at n_max=100 vs sinh^2(1.31) = %.6f "
                       "(nominal 3, -1.6%%); n_max=20 would give <n> = %.4f; %.1f s",
                       worst, at.c_str(), nbar, nominal, r20.mean_photon_number(), secs)};
  });

  report(6, "displaced Fock alpha = -1.5, n = 2, same plan", [] {
    const auto spec = fig5_state();
    const auto rho = build_state(spec);
    const auto ms = run_experiment(ExperimentPlan::uniform(spec, 120, 10000, 1.0, 2));
    const auto est = estimate_all(ms, 8, tables_for(8));
    const auto p = pulls(est, rho, 8);
    const double nbar = rho.mean_photon_number();
    return Outcome{p.worst < 4.0 && std::abs(nbar - 4.25) < 1e-6,
                   fmt("worst pull %.2f sigma (%s, < 4); <n> = %.9f after truncation at n_max=20", p.worst,
                       p.where.c_str(), nbar)};
  });

  report(7, "efficiency compensation at eta = 0.8", [] {
    const auto spec = fig5_state();
    const auto rho = build_state(spec);
    const auto ms = run_experiment(ExperimentPlan::uniform(spec, 120, 10000, 0.8, 3));
    const auto comp = estimate_all(ms, 2, tables_for(2, 0.8));
    const auto p = pulls(comp, rho, 2);
    const auto raw = estimate_moment(ms, 1, build_kernel_table(spec_for(1)));
    const double exact1 = std::abs(exact_moment(rho, 1));
    const double shortfall = exact1 - std::abs(raw.value);
    // Error propagation for |Psi_1| with Psi_1 essentially real.
    const double sigma = std::hypot(raw.sigma_re() * raw.value.real(), raw.sigma_im() * raw.value.imag()) /
                         std::abs(raw.value);
    return Outcome{p.worst < 4.0 && shortfall > 4.0 * sigma,
                   fmt("compensated worst pull %.2f sigma (%s, < 4); uncompensated |Psi_1| = %.4f vs %.4f, "
                       "short by %.1f sigma (> 4)",
                       p.worst, p.where.c_str(), std::abs(raw.value), exact1, shortfall / sigma)};
  });

  report(8, "aliasing bias, squeezed vacuum n_max = 20, k = 2", [] {
    const auto rho = build_state(fig4_state(20, 0.02));
    const auto t = build_kernel_table(spec_for(2));
    const cplx exact = exact_moment(rho, 2);
    const auto b12 = aliasing_bias(rho, 2, 12, t);
    const cplx brute12 = discretized_moment(rho, 2, 12, t) - exact;
    const auto b120 = aliasing_bias(rho, 2, 120, t);
    const cplx brute120 = discretized_moment(rho, 2, 120, t) - exact;
    const double d12 = std::abs(b12.exact - brute12);
    return Outcome{d12 < 1e-4 && std::abs(brute120) < 1e-4 && std::abs(b120.exact) < 1e-4,
                   fmt("N=12: series bias %.6e vs quadrature %.6e, diff %.2e (< 1e-4); "
                       "N=120: series %.2e, quadrature %.2e (< 1e-4)",
                       b12.exact.real(), brute12.real(), d12, std::abs(b120.exact), std::abs(brute120))};
  });

  report(9, "variance calibration over 50 replications, N = 24, 500 events", [] {
    const auto plan = ExperimentPlan::uniform(fig4_state(100, 1e-6), 24, 500, 1.0, 1);
    const Simulator sim(plan);
    const auto t1 = build_kernel_table(spec_for(1));
    const int reps = 50;
    std::vector<double> values;
    double predicted = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto e = estimate_moment(sim.run(1000 + r), 1, t1);
      values.push_back(e.value.real());
      predicted += e.var_re / reps;
    }
    double mean = 0.0;
    for (double v : values) mean += v / reps;
    double empirical = 0.0;
    for (double v : values) empirical += (v - mean) * (v - mean) / (reps - 1);
    const double ratio = empirical / predicted;
    return Outcome{ratio < 1.5 && ratio > 1.0 / 1.5,
                   fmt("empirical var %.3e, mean predicted %.3e, ratio %.3f (within factor 1.5)", empirical,
                       predicted, ratio)};
  });

  report(10, "phase distribution reconstruction", [] {
    const auto rho = build_state(fig5_state());
    const auto exact = exact_moment_estimates(rho, 20, 1.0);
    const auto f256 = fourier_reconstruct(exact, 20, 256);
    double wf = 0.0;
    for (int m = 0; m < 256; ++m) wf = std::max(wf, std::abs(f256.values[m] - exact_phase_dist(rho, f256.phi[m])));
    const auto f160 = fourier_reconstruct(exact, 20, 160);
    const auto ls = least_squares_reconstruct(exact, 20, 160, 0.0);
    double wl = 0.0;
    for (int m = 0; m < 160; ++m) wl = std::max(wl, std::abs(ls.values[m] - f160.values[m]));
    bool monotone = !g_fig4_moments.empty();
    std::string tvs;
    double prev = INFINITY;
    for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}) {
      if (g_fig4_moments.empty()) break;
      const double tv = total_variation(least_squares_reconstruct(g_fig4_moments, 20, 160, lambda));
      monotone = monotone && tv < prev;
      prev = tv;
      tvs += fmt(" %.5g", tv);
    }
    return Outcome{wf < 1e-10 && wl < 1e-8 && monotone,
                   fmt("Fourier vs exact %.2e (< 1e-10); least squares vs Fourier %.2e (< 1e-8); "
                       "TV over lambda = 1e-4..1e2:%s (%s)",
                       wf, wl, tvs.c_str(), monotone ? "decreasing" : "NOT decreasing")};
  });

  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
