#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nxbench {

inline constexpr std::size_t kMinDomainLength = 4;
inline constexpr std::size_t kMaxDomainLength = 253;
inline constexpr std::size_t kMaxLabelLength = 63;

/// A validated, lowercase ASCII domain name. Construction goes through
/// parse()/try_parse(), so every instance satisfies the invariants:
/// characters in [a-z0-9-._], 4..253 chars, no empty label, labels <= 63.
class DomainName {
 public:
  /// Lowercases and validates; throws ArgumentError on violation.
  static DomainName parse(std::string_view text);
  static std::optional<DomainName> try_parse(std::string_view text) noexcept;

  /// Reason a string is not a valid domain, or empty if it is.
  static std::string validation_error(std::string_view lowercase_text);

  const std::string& text() const noexcept { return text_; }
  std::vector<std::string_view> labels() const;
  std::size_t size() const noexcept { return text_.size(); }

  friend bool operator==(const DomainName&, const DomainName&) = default;
  friend auto operator<=>(const DomainName&, const DomainName&) = default;

 private:
  explicit DomainName(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

/// benign, or family(id).
class ClassLabel {
 public:
  enum class Kind { benign, family };

  static ClassLabel benign() { return ClassLabel(Kind::benign, {}); }
  static ClassLabel family(std::string id);
  /// "benign" maps to the benign label, anything else to a family.
  static ClassLabel from_name(std::string_view name);

  Kind kind() const noexcept { return kind_; }
  bool is_benign() const noexcept { return kind_ == Kind::benign; }
  const std::optional<std::string>& family_id() const noexcept { return family_id_; }
  /// "benign" or the family id.
  std::string name() const;

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;

 private:
  ClassLabel(Kind kind, std::optional<std::string> id)
      : kind_(kind), family_id_(std::move(id)) {}
  Kind kind_;
  std::optional<std::string> family_id_;
};

inline constexpr std::string_view kBenignName = "benign";

enum class Origin { synthetic, ingested };

struct Sample {
  DomainName domain;
  ClassLabel label;
  Origin origin = Origin::synthetic;

  friend bool operator==(const Sample&, const Sample&) = default;
};

}  // namespace nxbench
