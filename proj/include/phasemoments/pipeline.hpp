#pragma once

#include <span>
#include <string>
#include <vector>

#include "phasemoments/config.hpp"
#include "phasemoments/estimator.hpp"
#include "phasemoments/kernels.hpp"
#include "phasemoments/reconstruct.hpp"
#include "phasemoments/simulator.hpp"

namespace phasemoments {

// Stages of a run. Each one takes only the config and the previous stage's
// artifact, so chaining them through files gives the same result as
// run_pipeline.
MeasurementSet simulate_stage(const RunConfig& cfg);

// Kernel tables for k = 1..k_max at data efficiency eta (used only when
// compensation is on).
std::vector<KernelTable> kernel_tables(const RunConfig& cfg, double eta);

// Efficiency comes from the records, everything else from cfg.
std::vector<MomentEstimate> estimate_stage(const RunConfig& cfg, const MeasurementSet& ms);

PhaseDistribution reconstruct_stage(const RunConfig& cfg, std::span<const MomentEstimate> moments);

struct PipelineArtifacts {
  std::string records;
  std::string moments;
  std::string distribution;
};

// File names inside cfg.output_dir.
std::string artifact_path(const RunConfig& cfg, const std::string& name);
inline constexpr const char* kRecordsFile = "records.txt";
inline constexpr const char* kMomentsFile = "moments.txt";
inline constexpr const char* kDistributionFile = "distribution.txt";

// Runs every stage, writing each artifact and reading it back before the
// next stage.
PipelineArtifacts run_pipeline(const RunConfig& cfg);

struct IdentityCheck {
  std::string suite;  // "quantum" or "classical"
  int k = 0;
  double param = 0.0;  // n for the quantum suite, r for the classical one
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual < tolerance; }
};

// Quantum suite: |2 pi integral K_k psi_{n+k} psi_n dx - 1| for k = 1..5,
// n = 0..30 at eta = 1 with the given kernel settings (tolerance 1e-3).
// Classical suite: |integral e^{ik phi} K_k^cl(r cos phi) dphi - 1| for
// k = 1..5, r in {0.5, 1, 2, 5, 10} (tolerance 1e-6).
std::vector<IdentityCheck> verify_identities(const KernelSpec& base = {}, double grid_step = 0.005);

}  // namespace phasemoments
