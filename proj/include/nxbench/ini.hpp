#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nxbench {

/// Ordered sectioned key=value document (catalog and run config files).
/// Parsing is delegated to boost::property_tree's INI reader.
class IniDocument {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(const std::string& key) const;
  };

  static IniDocument parse(const std::string& text);
  static IniDocument read(const std::filesystem::path& path);

  const std::vector<Section>& sections() const noexcept { return sections_; }
  const Section* find(const std::string& name) const;
  Section& add_section(std::string name);

  std::string str() const;

 private:
  std::vector<Section> sections_;
};

std::vector<std::string> split_list(const std::string& value, char sep = ',');
std::string join_list(const std::vector<std::string>& items, char sep = ',');

}  // namespace nxbench
