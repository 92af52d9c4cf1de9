#include "nxbench/reports.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "nxbench/error.hpp"
#include "nxbench/text.hpp"

namespace nxbench {

namespace {

constexpr int kDigits = 6;

std::string num(double v) { return format_fixed(v, kDigits); }

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::string class_rows(const std::vector<std::string>& classes, const std::vector<ClassScores>& scores,
                       double macro_p, double macro_r, double macro_f1) {
  std::ostringstream os;
  os << "class,support,precision,recall,f1\n";
  std::int64_t total = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& s = scores[c];
    total += s.support;
    os << classes[c] << ',' << s.support << ',' << num(s.precision) << ',' << num(s.recall) << ','
       << num(s.f1) << '\n';
  }
  os << "macro," << total << ',' << num(macro_p) << ',' << num(macro_r) << ',' << num(macro_f1) << '\n';
  return os.str();
}

}  // namespace

std::string class_report_csv(const ExperimentReport& report) {
  return class_rows(report.confusion.classes, report.scores.per_class, report.scores.macro_precision,
                    report.scores.macro_recall, report.scores.macro_f1);
}

std::string class_report_csv(const AggregateReport& report) {
  return class_rows(report.classes, report.per_class, report.macro_precision, report.macro_recall,
                    report.macro_f1);
}

std::string confusion_csv(const ConfusionMatrix& matrix) {
  std::ostringstream os;
  os << "true\\predicted";
  for (const auto& c : matrix.classes) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < matrix.classes.size(); ++i) {
    os << matrix.classes[i];
    for (std::size_t j = 0; j < matrix.classes.size(); ++j)
      os << ',' << matrix.counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    os << '\n';
  }
  return os.str();
}

std::string binary_summary_csv(const BinaryExperimentResult& result) {
  std::ostringstream os;
  os << "model,training,benign_recall_balanced_test,malicious_recall_balanced_test,"
        "benign_recall_imbalanced_test,malicious_recall_imbalanced_test,passes_balanced_test,"
        "passes_imbalanced_test\n";
  for (const auto& s : result.summary) {
    os << s.model << ',' << s.training << ',' << num(s.benign_recall_balanced_test) << ','
       << num(s.malicious_recall_balanced_test) << ',' << num(s.benign_recall_imbalanced_test) << ','
       << num(s.malicious_recall_imbalanced_test) << ',' << s.passes_balanced_test << ','
       << s.passes_imbalanced_test << '\n';
  }
  return os.str();
}

std::string binary_family_csv(const BinaryExperimentResult& result) {
  std::vector<std::string> models;
  for (const auto& s : result.summary)
    if (std::find(models.begin(), models.end(), s.model) == models.end()) models.push_back(s.model);
  std::ostringstream os;
  os << "family,support,test_samples";
  for (const auto& m : models) os << ',' << m << "_balanced," << m << "_imbalanced," << m << "_improved";
  os << '\n';
  for (const auto& f : result.families) {
    os << f.family << ',' << f.support << ',' << f.test_samples;
    for (const auto& m : models) {
      auto b = f.balanced.find(m);
      auto i = f.imbalanced.find(m);
      os << ',' << (b == f.balanced.end() ? "" : num(b->second)) << ','
         << (i == f.imbalanced.end() ? "" : num(i->second)) << ',' << (f.improved(m) ? 1 : 0);
    }
    os << '\n';
  }
  return os.str();
}

std::string gamma_sweep_csv(const GammaSweepResult& result) {
  std::ostringstream os;
  os << "gamma,macro_f1,macro_precision,macro_recall,best\n";
  for (const auto& r : result.rows) {
    os << format_fixed(r.gamma, 1) << ',' << num(r.macro_f1) << ',' << num(r.macro_precision) << ','
       << num(r.macro_recall) << ',' << (r.best ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string ood_distribution_csv(const OodResult& result) {
  std::ostringstream os;
  os << "family";
  for (const auto& c : result.train_classes) os << ',' << c;
  os << '\n';
  for (const auto& [family, dist] : result.distribution) {
    os << family;
    for (const auto& c : result.train_classes) {
      auto it = dist.find(c);
      os << ',' << num(it == dist.end() ? 0.0 : it->second);
    }
    os << '\n';
  }
  return os.str();
}

std::string ood_summary_csv(const OodResult& result) {
  std::ostringstream os;
  os << "models,benign_fraction_excluded,benign_fraction_included\n";
  os << result.models << ',' << num(result.benign_fraction_excluded) << ','
     << num(result.benign_fraction_included) << '\n';
  return os.str();
}

std::string Manifest::str() const {
  std::ostringstream os;
  os << "[run]\n";
  os << "command = " << command << '\n';
  os << "config = " << config_path.generic_string() << '\n';
  os << "config_hash = " << hex64(config_hash) << '\n';
  os << "master_seed = " << master_seed << '\n';
  os << "catalog_checksum = " << hex64(catalog_checksum) << '\n';
  os << "\n[files]\n";
  for (const auto& f : files) os << f << '\n';
  os << "\n[jobs]\n";
  for (const auto& [name, seed] : job_seeds) os << name << " = " << hex64(seed) << '\n';
  if (!flags.empty()) {
    os << "\n[flags]\n";
    for (const auto& f : flags) os << f << '\n';
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace nxbench
