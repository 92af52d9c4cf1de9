#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nxbench/domain.hpp"
#include "nxbench/generators.hpp"

namespace nxtest {

namespace fs = std::filesystem;

/// Fresh directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("nxbench-" + tag + "-" + std::to_string(std::random_device{}()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::vector<nxbench::Sample> benign(std::size_t n, std::uint64_t seed = 11) {
  return nxbench::synthesize_benign(seed, static_cast<std::int64_t>(n));
}

}  // namespace nxtest
