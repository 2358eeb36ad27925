#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phasemoments/estimator.hpp"
#include "phasemoments/kernels.hpp"
#include "phasemoments/reconstruct.hpp"
#include "phasemoments/simulator.hpp"

namespace phasemoments {

// Every file starts with "# phasemoments <kind> v1" followed by "# key = value"
// header lines; loaders reject a different kind with ErrorCode::schema.
inline constexpr const char* kKernelTableKind = "kernel-table";
inline constexpr const char* kRecordsKind = "records";
inline constexpr const char* kMomentsKind = "moments";
inline constexpr const char* kDistributionKind = "distribution";

struct TextFile {
  std::string kind;
  std::map<std::string, std::string> header;
  std::vector<std::pair<int, std::string>> rows;  // (line number, content)
};

TextFile read_text_file(const std::string& path, const char* expected_kind);

void save_kernel_table(const KernelTable& table, const std::string& path,
                       std::optional<std::uint64_t> config_hash = std::nullopt);
KernelTable load_kernel_table(const std::string& path);

// Rows "l, theta_l, x" with 15 significant digits.
void save_records(const MeasurementSet& ms, const std::string& path,
                  std::optional<std::uint64_t> config_hash = std::nullopt);
MeasurementSet load_records(const std::string& path);

void save_moments(const std::vector<MomentEstimate>& moments, const std::string& path,
                  std::optional<std::uint64_t> config_hash = std::nullopt);
std::vector<MomentEstimate> load_moments(const std::string& path);

void save_distribution(const PhaseDistribution& p, const std::string& path,
                       std::optional<std::uint64_t> config_hash = std::nullopt);
PhaseDistribution load_distribution(const std::string& path);

}  // namespace phasemoments
