#include "nxbench/metrics.hpp"

#include <map>

#include "nxbench/error.hpp"

namespace nxbench {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes != classes) throw ArgumentError("cannot add confusion matrices over different classes");
  counts += other.counts;
  return *this;
}

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted,
                          const std::vector<std::string>& classes) {
  if (true_labels.size() != predicted.size()) throw ArgumentError("label vectors differ in length");
  const auto K = static_cast<Eigen::Index>(classes.size());
  ConfusionMatrix m{classes, CountMatrix::Zero(K, K)};
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i], p = predicted[i];
    if (t < 0 || t >= K || p < 0 || p >= K) throw ArgumentError("label outside the class list");
    ++m.counts(t, p);
  }
  return m;
}

ConfusionMatrix confusion(std::span<const std::string> true_labels,
                          std::span<const std::string> predicted,
                          const std::vector<std::string>& classes) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = static_cast<int>(i);
  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw ArgumentError("label '" + name + "' outside the class list");
    return it->second;
  };
  std::vector<int> t, p;
  for (const auto& s : true_labels) t.push_back(lookup(s));
  for (const auto& s : predicted) p.push_back(lookup(s));
  return confusion(std::span<const int>(t), std::span<const int>(p), classes);
}

PrfScores prf_scores(const ConfusionMatrix& matrix) {
  const auto& C = matrix.counts;
  PrfScores out;
  out.per_class.resize(static_cast<std::size_t>(C.rows()));
  for (Eigen::Index k = 0; k < C.rows(); ++k) {
    auto& s = out.per_class[static_cast<std::size_t>(k)];
    const std::int64_t tp = C(k, k);
    const std::int64_t row = C.row(k).sum();
    const std::int64_t col = C.col(k).sum();
    s.support = row;
    s.recall_undefined = row == 0;
    s.precision_undefined = col == 0;
    s.absent = row == 0 && col == 0;
    s.recall = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    s.precision = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    if (s.absent) continue;
    out.macro_precision += s.precision;
    out.macro_recall += s.recall;
    out.macro_f1 += s.f1;
    ++out.classes_in_macro;
  }
  if (out.classes_in_macro > 0) {
    out.macro_precision /= out.classes_in_macro;
    out.macro_recall /= out.classes_in_macro;
    out.macro_f1 /= out.classes_in_macro;
  }
  return out;
}

}  // namespace nxbench
