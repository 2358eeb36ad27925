#include "phasemoments/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "phasemoments/error.hpp"

namespace phasemoments {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The work items
// must be independent; the first exception is rethrown.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ExperimentPlan ExperimentPlan::uniform(const StateSpec& state, int n_phases, int events_per_phase,
                                       double eta, std::uint64_t seed) {
  ExperimentPlan plan;
  plan.state = state;
  plan.n_phases = n_phases;
  plan.events.assign(std::max(n_phases, 0), events_per_phase);
  plan.eta = eta;
  plan.seed = seed;
  plan.validate();
  return plan;
}

double ExperimentPlan::theta(int l) const { return 2.0 * std::numbers::pi * l / n_phases; }

long long ExperimentPlan::total_events() const {
  long long s = 0;
  for (int n : events) s += n;
  return s;
}

void ExperimentPlan::validate() const {
  state.validate();
  require(n_phases >= 1, ErrorCode::invalid_argument, "number of phases must be positive");
  require(events.size() == static_cast<std::size_t>(n_phases), ErrorCode::invalid_argument,
          "events array has " + std::to_string(events.size()) + " entries for " +
              std::to_string(n_phases) + " phases");
  for (int l = 0; l < n_phases; ++l) {
    require(events[l] >= 1, ErrorCode::invalid_argument,
            "phase " + std::to_string(l) + " has no events");
  }
  require(eta > 0.0 && eta <= 1.0, ErrorCode::invalid_argument, "efficiency must lie in (0, 1]");
}

void MeasurementSet::validate() const {
  plan.validate();
  require(records.size() == static_cast<std::size_t>(plan.n_phases), ErrorCode::invalid_argument,
          "record set has " + std::to_string(records.size()) + " phases, plan has " +
              std::to_string(plan.n_phases));
  for (int l = 0; l < plan.n_phases; ++l) {
    require(records[l].size() == static_cast<std::size_t>(plan.events[l]),
            ErrorCode::invalid_argument,
            "phase " + std::to_string(l) + " holds " + std::to_string(records[l].size()) +
                " records, plan expects " + std::to_string(plan.events[l]));
  }
}

QuadratureSampler::QuadratureSampler(const QuadratureDensity& density, double theta,
                                     double grid_step) {
  require(grid_step > 0.0, ErrorCode::invalid_argument, "sampler grid step must be positive");
  x_lim_ = std::sqrt(2.0 * density.n_max() + 1.0) + 5.0;
  const int cells = static_cast<int>(std::ceil(2.0 * x_lim_ / grid_step));
  h_ = 2.0 * x_lim_ / cells;
  cdf_.resize(cells + 1);
  double prev = density(-x_lim_, theta);
  cdf_[0] = 0.0;
  for (int i = 1; i <= cells; ++i) {
    const double p = density(-x_lim_ + i * h_, theta);
    cdf_[i] = cdf_[i - 1] + 0.5 * h_ * (prev + p);
    prev = p;
  }
  const double total = cdf_.back();
  if (std::abs(1.0 - total) > 1e-9) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "quadrature distribution has mass %.3g outside [-%.4g, %.4g]; grid too small",
                  1.0 - total, x_lim_, x_lim_);
    fail(ErrorCode::truncation, buf);
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

double QuadratureSampler::operator()(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return -x_lim_;
  if (it == cdf_.end()) return x_lim_;
  const auto i = static_cast<int>(it - cdf_.begin()) - 1;
  const double span = cdf_[i + 1] - cdf_[i];
  const double t = span > 0.0 ? (u - cdf_[i]) / span : 0.0;
  return -x_lim_ + (i + t) * h_;
}

double QuadratureSampler::cdf(double x) const {
  if (x <= -x_lim_) return 0.0;
  if (x >= x_lim_) return 1.0;
  const double s = (x + x_lim_) / h_;
  const int i = std::min(static_cast<int>(s), static_cast<int>(cdf_.size()) - 2);
  const double t = s - i;
  return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
}

std::vector<double> sample_quadrature(const DensityMatrix& rho, double theta, int count,
                                      RandomStream& rng) {
  require(count >= 1, ErrorCode::invalid_argument, "sample count must be positive");
  const QuadratureDensity density(rho);
  const QuadratureSampler sampler(density, theta);
  std::vector<double> out(count);
  for (double& x : out) x = sampler(rng.uniform_open());
  return out;
}

Simulator::Simulator(const ExperimentPlan& plan, int threads)
    : plan_(plan), rho_(build_state(plan.state)), threads_(threads) {
  plan_.validate();
  if (threads_ <= 0) threads_ = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const QuadratureDensity density(rho_);
  std::vector<std::unique_ptr<QuadratureSampler>> built(plan_.n_phases);
  parallel_for(plan_.n_phases, threads_, [&](int l) {
    built[l] = std::make_unique<QuadratureSampler>(density, plan_.theta(l));
  });
  samplers_.reserve(plan_.n_phases);
  for (auto& s : built) samplers_.push_back(std::move(*s));
}

MeasurementSet Simulator::run(std::uint64_t seed) const {
  std::vector<std::uint64_t> streams(plan_.n_phases);
  for (int l = 0; l < plan_.n_phases; ++l) streams[l] = derive_stream_seed(seed, l);
  MeasurementSet ms = run_with_streams(streams);
  ms.plan.seed = seed;
  return ms;
}

MeasurementSet Simulator::run_with_streams(const std::vector<std::uint64_t>& stream_seeds) const {
  require(stream_seeds.size() == static_cast<std::size_t>(plan_.n_phases),
          ErrorCode::invalid_argument, "one stream seed per phase is required");
  MeasurementSet ms;
  ms.plan = plan_;
  ms.records.resize(plan_.n_phases);
  const double sigma = std::sqrt((1.0 - plan_.eta) / (2.0 * plan_.eta));
  parallel_for(plan_.n_phases, threads_, [&](int l) {
    RandomStream rng(stream_seeds[l]);
    auto& rec = ms.records[l];
    rec.resize(plan_.events[l]);
    for (double& x : rec) {
      x = samplers_[l](rng.uniform_open());
      if (sigma > 0.0) x += sigma * rng.normal();
    }
  });
  return ms;
}

MeasurementSet run_experiment(const ExperimentPlan& plan) { return Simulator(plan).run(); }

}  // namespace phasemoments
