#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <vector>

#include "nxbench/domain.hpp"

namespace nxbench {

enum class FeedFormat { plain_lines, csv_labeled };

struct FeedResult {
  std::vector<Sample> samples;
  std::int64_t malformed = 0;
  std::int64_t duplicates = 0;
};

/// Reads a feed. plain_lines: one domain per line, '#' comments; every
/// sample gets `default_label`. csv_labeled: header `label,domain`.
/// Malformed lines are counted and skipped; more than half malformed
/// raises FeedRejectedError. Duplicates are dropped per label only.
FeedResult ingest_feed(const std::filesystem::path& path, FeedFormat format,
                       const ClassLabel& default_label = ClassLabel::benign());

/// Removes every domain present in known_agds; order preserved.
std::vector<Sample> sanitize_benign(const std::vector<Sample>& benign,
                                    const std::set<DomainName>& known_agds);

}  // namespace nxbench
