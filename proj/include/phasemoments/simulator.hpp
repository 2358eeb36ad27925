#pragma once

#include <cstdint>
#include <vector>

#include "phasemoments/rng.hpp"
#include "phasemoments/states.hpp"

namespace phasemoments {

struct ExperimentPlan {
  StateSpec state;
  int n_phases = 1;
  std::vector<int> events;  // n(theta_l), one entry per phase
  double eta = 1.0;
  std::uint64_t seed = 0;

  static ExperimentPlan uniform(const StateSpec& state, int n_phases, int events_per_phase,
                                double eta, std::uint64_t seed);
  double theta(int l) const;
  long long total_events() const;
  void validate() const;
};

struct MeasurementSet {
  ExperimentPlan plan;
  std::vector<std::vector<double>> records;  // records[l][r] = x_r(theta_l)

  void validate() const;
};

// Inverse-CDF sampler for p(x, theta) tabulated on a uniform grid over
// [-x_lim, x_lim], x_lim = sqrt(2 n_max + 1) + 5.
class QuadratureSampler {
 public:
  QuadratureSampler(const QuadratureDensity& density, double theta, double grid_step = 1e-3);

  // Maps u in (0, 1) to a sample by linear interpolation of the CDF.
  double operator()(double u) const;
  double cdf(double x) const;
  double x_limit() const { return x_lim_; }

 private:
  double x_lim_;
  double h_;
  std::vector<double> cdf_;
};

std::vector<double> sample_quadrature(const DensityMatrix& rho, double theta, int count,
                                      RandomStream& rng);

// Holds the state and the per-phase samplers of a plan so that repeated runs
// (replications with different seeds) skip the tabulation.
class Simulator {
 public:
  explicit Simulator(const ExperimentPlan& plan, int threads = 0);

  MeasurementSet run() const { return run(plan_.seed); }
  MeasurementSet run(std::uint64_t seed) const;
  // Explicit per-phase stream seeds instead of ones derived from the master seed.
  MeasurementSet run_with_streams(const std::vector<std::uint64_t>& stream_seeds) const;

  const ExperimentPlan& plan() const { return plan_; }
  const DensityMatrix& state() const { return rho_; }

 private:
  ExperimentPlan plan_;
  DensityMatrix rho_;
  std::vector<QuadratureSampler> samplers_;
  int threads_;
};

MeasurementSet run_experiment(const ExperimentPlan& plan);

}  // namespace phasemoments
