#include "nxbench/feeds.hpp"

#include <fstream>
#include <map>
#include <unordered_set>

#include "nxbench/error.hpp"

namespace nxbench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

FeedResult ingest_feed(const std::filesystem::path& path, FeedFormat format,
                       const ClassLabel& default_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read feed " + path.string());

  FeedResult result;
  std::map<std::string, std::unordered_set<std::string>> seen_per_label;
  std::int64_t data_lines = 0;
  bool header_pending = format == FeedFormat::csv_labeled;
  std::string line;
  while (std::getline(in, line)) {
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      if (view == "label,domain") continue;
    }
    ++data_lines;

    std::optional<ClassLabel> label;
    std::string_view domain_text = view;
    if (format == FeedFormat::csv_labeled) {
      const auto comma = view.find(',');
      if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
        ++result.malformed;
        continue;
      }
      const auto name = trim(view.substr(0, comma));
      domain_text = trim(view.substr(comma + 1));
      if (name.empty()) {
        ++result.malformed;
        continue;
      }
      label = ClassLabel::from_name(name);
    } else {
      label = default_label;
    }

    auto domain = DomainName::try_parse(domain_text);
    if (!domain) {
      ++result.malformed;
      continue;
    }
    if (!seen_per_label[label->name()].insert(domain->text()).second) {
      ++result.duplicates;
      continue;
    }
    result.samples.push_back(Sample{std::move(*domain), std::move(*label), Origin::ingested});
  }
  if (in.bad()) throw IoError("read error in feed " + path.string());
  if (data_lines > 0 && 2 * result.malformed > data_lines) {
    throw FeedRejectedError("feed " + path.string() + " rejected: " +
                            std::to_string(result.malformed) + " of " +
                            std::to_string(data_lines) + " lines malformed");
  }
  return result;
}

std::vector<Sample> sanitize_benign(const std::vector<Sample>& benign,
                                    const std::set<DomainName>& known_agds) {
  std::vector<Sample> out;
  out.reserve(benign.size());
  for (const auto& s : benign)
    if (!known_agds.count(s.domain)) out.push_back(s);
  return out;
}

}  // namespace nxbench
