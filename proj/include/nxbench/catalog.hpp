#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nxbench {

enum class Archetype { arith_hash, dictionary, fixed_list, hex_counter, date_seeded };

std::string to_string(Archetype a);
Archetype archetype_from_string(std::string_view s);

/// Recipe for a synthetic family. Two specs with the same seed and archetype
/// but different `variant` share the fraction `shared_fraction` of their
/// index-aligned draws, which is how confusable family pairs are modelled.
struct GeneratorSpec {
  Archetype archetype = Archetype::arith_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> tld_pool{"com"};
  std::pair<int, int> length_range{8, 16};
  /// Inventory for fixed_list, vocabulary for dictionary (empty = built-in).
  std::vector<std::string> words;
  std::uint64_t variant = 0;
  double shared_fraction = 0.0;

  /// Throws ArgumentError when the spec can never produce a valid domain.
  void validate() const;
};

enum class Group { well, weak };

inline constexpr std::int64_t kDefaultSupportThreshold = 10000;

struct FamilyEntry {
  std::string id;
  std::optional<GeneratorSpec> generator;
  std::optional<std::filesystem::path> feed;
  std::int64_t support = 1;
  Group group = Group::weak;
};

/// Registry of malicious families in insertion order. Group membership is
/// recomputed whenever the threshold changes: well iff support > threshold.
class FamilyCatalog {
 public:
  explicit FamilyCatalog(std::int64_t threshold = kDefaultSupportThreshold)
      : threshold_(threshold) {}

  void add(FamilyEntry entry);
  void set_threshold(std::int64_t threshold);

  std::int64_t threshold() const noexcept { return threshold_; }
  const std::vector<FamilyEntry>& entries() const noexcept { return entries_; }
  const FamilyEntry& at(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::vector<std::string> ids(std::optional<Group> group = std::nullopt) const;
  std::int64_t total_support() const;
  /// FNV-1a over the canonical serialization.
  std::uint64_t checksum() const;

 private:
  std::int64_t threshold_;
  std::vector<FamilyEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

struct Partition {
  std::set<std::string> well;
  std::set<std::string> weak;
};

/// well = {support > threshold}, weak = the rest. Throws on empty catalog.
Partition partition_by_support(const FamilyCatalog& catalog,
                               std::int64_t threshold = kDefaultSupportThreshold);

/// Sectioned key=value catalog file, one section per family.
FamilyCatalog load_catalog(const std::filesystem::path& path,
                           std::int64_t threshold = kDefaultSupportThreshold);
void save_catalog(const FamilyCatalog& catalog, const std::filesystem::path& path);
std::string serialize_catalog(const FamilyCatalog& catalog);

/// The 91-family supports used for arithmetic checks against the reference
/// set sizes (46 families above 10,000 and 45 below). Counts only; the
/// generator specs are filled with placeholders.
FamilyCatalog full_scale_catalog();

}  // namespace nxbench
