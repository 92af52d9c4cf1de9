#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nxbench/cross_validation.hpp"
#include "nxbench/experiments.hpp"

namespace nxbench {

/// `class,support,precision,recall,f1`, one row per class and a final
/// `macro` row whose support is the total.
std::string class_report_csv(const ExperimentReport& report);
std::string class_report_csv(const AggregateReport& report);

/// Square matrix with the class list as header row and first column.
std::string confusion_csv(const ConfusionMatrix& matrix);

std::string binary_summary_csv(const BinaryExperimentResult& result);
std::string binary_family_csv(const BinaryExperimentResult& result);
std::string gamma_sweep_csv(const GammaSweepResult& result);
std::string ood_distribution_csv(const OodResult& result);
std::string ood_summary_csv(const OodResult& result);

struct Manifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t catalog_checksum = 0;
  std::filesystem::path config_path;
  std::vector<std::pair<std::string, std::uint64_t>> job_seeds;
  std::vector<std::string> files;
  std::vector<std::string> flags;

  std::string str() const;
};

inline constexpr const char* kManifestName = "manifest.txt";

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace nxbench
