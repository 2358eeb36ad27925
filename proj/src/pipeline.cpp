#include "phasemoments/pipeline.hpp"

#include <cmath>
#include <filesystem>

#include "phasemoments/error.hpp"
#include "phasemoments/textio.hpp"

namespace phasemoments {

MeasurementSet simulate_stage(const RunConfig& cfg) {
  cfg.validate();
  return Simulator(cfg.plan()).run();
}

std::vector<KernelTable> kernel_tables(const RunConfig& cfg, double eta) {
  RunConfig c = cfg;
  c.eta = eta;
  std::vector<KernelTable> tables;
  tables.reserve(cfg.k_max);
  for (int k = 1; k <= cfg.k_max; ++k) tables.push_back(build_kernel_table(c.kernel_spec(k), cfg.grid_step));
  return tables;
}

std::vector<MomentEstimate> estimate_stage(const RunConfig& cfg, const MeasurementSet& ms) {
  require(cfg.k_max < ms.plan.n_phases, ErrorCode::configuration,
          "k_max = " + std::to_string(cfg.k_max) + " needs more than " + std::to_string(ms.plan.n_phases) +
              " phases in the records");
  if (cfg.compensate && ms.plan.eta < 1.0) {
    require(ms.plan.eta > 0.5, ErrorCode::configuration,
            "records were taken at eta <= 1/2, which cannot be compensated");
  }
  const auto tables = kernel_tables(cfg, ms.plan.eta);
  return estimate_all(ms, cfg.k_max, tables);
}

PhaseDistribution reconstruct_stage(const RunConfig& cfg, std::span<const MomentEstimate> moments) {
  if (cfg.method == ReconstructionMethod::fourier) return fourier_reconstruct(moments, cfg.recon_K, cfg.recon_M);
  return least_squares_reconstruct(moments, cfg.recon_K, cfg.recon_M, cfg.reg_lambda, cfg.normalize_effective());
}

std::string artifact_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

PipelineArtifacts run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  require(!ec, ErrorCode::io, "cannot create output directory " + cfg.output_dir + ": " + ec.message());
  const auto hash = cfg.hash();
  PipelineArtifacts out{artifact_path(cfg, kRecordsFile), artifact_path(cfg, kMomentsFile),
                        artifact_path(cfg, kDistributionFile)};
  save_records(simulate_stage(cfg), out.records, hash);
  save_moments(estimate_stage(cfg, load_records(out.records)), out.moments, hash);
  const auto moments = load_moments(out.moments);
  save_distribution(reconstruct_stage(cfg, moments), out.distribution, hash);
  return out;
}

std::vector<IdentityCheck> verify_identities(const KernelSpec& base, double grid_step) {
  std::vector<IdentityCheck> checks;
  constexpr int kOrders = 5;
  constexpr int kLevels = 30;
  for (int k = 1; k <= kOrders; ++k) {
    KernelSpec spec = base;
    spec.k = k;
    spec.eta = 1.0;
    const KernelOverlap ov(build_kernel_table(spec, grid_step), kLevels + k);
    for (int n = 0; n <= kLevels; ++n) {
      checks.push_back({"quantum", k, static_cast<double>(n), std::abs(ov.q(n + k, n) - 1.0), 1e-3});
    }
  }
  for (int k = 1; k <= kOrders; ++k) {
    for (double r : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      checks.push_back({"classical", k, r, std::abs(classical_identity(k, r) - 1.0), 1e-6});
    }
  }
  return checks;
}

}  // namespace phasemoments
