#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phasemoments/kernels.hpp"
#include "phasemoments/reconstruct.hpp"
#include "phasemoments/simulator.hpp"
#include "phasemoments/states.hpp"

namespace phasemoments {

// Environment variable that overrides output_dir from a config file.
inline constexpr const char* kOutputDirEnv = "PHASEMOMENTS_OUTPUT_DIR";

// Flat key = value run manifest with dotted sections.
struct RunConfig {
  StateSpec state;
  int n_phases = 120;
  int events_per_phase = 10000;
  std::vector<int> events;  // optional per-phase counts; overrides events_per_phase
  double eta = 1.0;
  std::uint64_t seed = 1;

  KernelSpec kernel;  // kernel.k is ignored; orders come from k_max
  double grid_step = 0.005;
  bool compensate = true;

  int k_max = 20;

  ReconstructionMethod method = ReconstructionMethod::fourier;
  int recon_K = 20;
  int recon_M = 256;
  double reg_lambda = 0.0;
  std::optional<bool> normalize;  // default depends on the method

  std::string output_dir = "phasemoments_out";

  // Parses "key = value" lines; '#' starts a comment. Unknown keys,
  // duplicates and malformed values are errors carrying the line number.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  // Canonical text: every key in keys() order, doubles in round-trip form.
  std::string to_text() const;
  // 64-bit FNV-1a of to_text() without output_dir, so relocating a run
  // keeps its provenance hash.
  std::uint64_t hash() const;

  void validate() const;
  // Replaces output_dir with the value of kOutputDirEnv when it is set.
  void apply_environment();

  bool normalize_effective() const;
  ExperimentPlan plan() const;
  // Kernel for moment order k; compensated at the data efficiency when
  // compensate is on and eta < 1.
  KernelSpec kernel_spec(int k) const;
};

std::string format_double(double v);
std::string format_hash(std::uint64_t h);
std::uint64_t fnv1a64(const std::string& text);

}  // namespace phasemoments
