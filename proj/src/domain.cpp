#include "nxbench/domain.hpp"

#include <algorithm>

#include "nxbench/error.hpp"

namespace nxbench {

namespace {

bool allowed_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  });
  return out;
}

}  // namespace

std::string DomainName::validation_error(std::string_view text) {
  if (text.size() < kMinDomainLength) return "shorter than 4 characters";
  if (text.size() > kMaxDomainLength) return "longer than 253 characters";
  if (text.front() == '.' || text.back() == '.') return "leading or trailing dot";
  std::size_t label_len = 0;
  for (char c : text) {
    if (!allowed_char(c)) return "character outside [a-z0-9-._]";
    if (c == '.') {
      if (label_len == 0) return "empty label";
      label_len = 0;
    } else if (++label_len > kMaxLabelLength) {
      return "label longer than 63 characters";
    }
  }
  return {};
}

DomainName DomainName::parse(std::string_view text) {
  std::string lower = to_lower_ascii(text);
  if (auto err = validation_error(lower); !err.empty()) {
    throw ArgumentError("invalid domain '" + std::string(text) + "': " + err);
  }
  return DomainName(std::move(lower));
}

std::optional<DomainName> DomainName::try_parse(std::string_view text) noexcept {
  try {
    std::string lower = to_lower_ascii(text);
    if (!validation_error(lower).empty()) return std::nullopt;
    return DomainName(std::move(lower));
  } catch (...) {
    return std::nullopt;
  }
}

std::vector<std::string_view> DomainName::labels() const {
  std::vector<std::string_view> out;
  std::string_view rest = text_;
  for (;;) {
    const auto dot = rest.find('.');
    out.push_back(rest.substr(0, dot));
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  return out;
}

ClassLabel ClassLabel::family(std::string id) {
  if (id.empty()) throw ArgumentError("family id must not be empty");
  if (id == kBenignName) throw ArgumentError("'benign' is reserved for the benign class");
  return ClassLabel(Kind::family, std::move(id));
}

ClassLabel ClassLabel::from_name(std::string_view name) {
  if (name == kBenignName) return benign();
  return family(std::string(name));
}

std::string ClassLabel::name() const {
  return is_benign() ? std::string(kBenignName) : *family_id_;
}

}  // namespace nxbench
