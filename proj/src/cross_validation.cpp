#include "nxbench/cross_validation.hpp"

#include "nxbench/error.hpp"
#include "nxbench/parallel.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

std::vector<std::size_t> FoldPlan::test_indices(int rep, int fold) const {
  std::vector<std::size_t> out;
  const auto& f = fold_of.at(static_cast<std::size_t>(rep));
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int rep, int fold) const {
  std::vector<std::size_t> out;
  const auto& f = fold_of.at(static_cast<std::size_t>(rep));
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != fold) out.push_back(i);
  return out;
}

FoldPlan make_folds(std::span<const int> labels, int num_classes, int repetitions, int folds,
                    std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("folds must be >= 2");
  if (repetitions < 1) throw ArgumentError("repetitions must be >= 1");
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) throw ArgumentError("label index out of range");
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  FoldPlan plan;
  plan.repetitions = repetitions;
  plan.folds = folds;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto m = members[c].size();
    if (m > 0 && m < static_cast<std::size_t>(folds)) {
      plan.flags.push_back("class " + std::to_string(c) + " has " + std::to_string(m) +
                           " samples, fewer than " + std::to_string(folds) + " folds");
    }
  }
  const auto base = derive_key(seed, "cv-folds");
  for (int r = 0; r < repetitions; ++r) {
    std::vector<int> fold_of(labels.size(), -1);
    for (std::size_t c = 0; c < members.size(); ++c) {
      auto idx = members[c];
      CounterRng rng(mix64(mix64(base, static_cast<std::uint64_t>(r)), c));
      shuffle(idx, rng);
      const auto m = idx.size();
      for (int f = 0; f < folds; ++f) {
        const auto lo = static_cast<std::size_t>(f) * m / static_cast<std::size_t>(folds);
        const auto hi = static_cast<std::size_t>(f + 1) * m / static_cast<std::size_t>(folds);
        for (auto p = lo; p < hi; ++p) fold_of[idx[p]] = f;
      }
    }
    plan.fold_of.push_back(std::move(fold_of));
  }
  return plan;
}

ExperimentReport make_report(const std::vector<std::string>& classes, std::span<const int> truth,
                             std::span<const int> predicted, RunMetadata meta) {
  ExperimentReport r;
  r.confusion = confusion(truth, predicted, classes);
  r.scores = prf_scores(r.confusion);
  r.meta = std::move(meta);
  return r;
}

std::uint64_t fold_seed(std::uint64_t master_seed, int rep, int fold) {
  return mix64(mix64(derive_key(master_seed, "cv-model"), static_cast<std::uint64_t>(rep)),
               static_cast<std::uint64_t>(fold));
}

std::vector<ExperimentReport> cross_validate(const LabeledDataset& data, const FoldPlan& plan,
                                             const Trainer& trainer, std::uint64_t master_seed,
                                             RunMetadata meta, int jobs) {
  const auto runs = static_cast<std::size_t>(plan.repetitions * plan.folds);
  std::vector<ExperimentReport> reports(runs);
  parallel_for(runs, jobs, [&](std::size_t job) {
    const int rep = static_cast<int>(job) / plan.folds;
    const int fold = static_cast<int>(job) % plan.folds;
    std::vector<Sample> train, test;
    std::vector<int> train_y, test_y;
    for (auto i : plan.train_indices(rep, fold)) {
      train.push_back(data.samples[i]);
      train_y.push_back(data.labels[i]);
    }
    for (auto i : plan.test_indices(rep, fold)) {
      test.push_back(data.samples[i]);
      test_y.push_back(data.labels[i]);
    }
    const auto seed = fold_seed(master_seed, rep, fold);
    const auto predicted = trainer(train, train_y, test, seed);
    RunMetadata m = meta;
    m.seed = seed;
    m.repetition = rep;
    m.fold = fold;
    reports[job] = make_report(data.classes, test_y, predicted, std::move(m));
    reports[job].flags = plan.flags;
  });
  return reports;
}

AggregateReport aggregate(std::span<const ExperimentReport> reports) {
  if (reports.empty()) throw ArgumentError("no reports to aggregate");
  AggregateReport a;
  a.classes = reports.front().confusion.classes;
  const auto k = a.classes.size();
  a.per_class.assign(k, ClassScores{});
  std::vector<int> scored(k, 0);
  a.confusion = reports.front().confusion;
  a.confusion.counts.setZero();
  for (const auto& r : reports) {
    a.macro_precision += r.scores.macro_precision;
    a.macro_recall += r.scores.macro_recall;
    a.macro_f1 += r.scores.macro_f1;
    a.confusion += r.confusion;
    for (std::size_t c = 0; c < k; ++c) {
      const auto& s = r.scores.per_class[c];
      a.per_class[c].support += s.support;
      if (s.absent) continue;
      ++scored[c];
      a.per_class[c].precision += s.precision;
      a.per_class[c].recall += s.recall;
      a.per_class[c].f1 += s.f1;
    }
  }
  a.runs = static_cast<int>(reports.size());
  a.macro_precision /= a.runs;
  a.macro_recall /= a.runs;
  a.macro_f1 /= a.runs;
  for (std::size_t c = 0; c < k; ++c) {
    if (scored[c] == 0) {
      a.per_class[c].absent = true;
      continue;
    }
    a.per_class[c].precision /= scored[c];
    a.per_class[c].recall /= scored[c];
    a.per_class[c].f1 /= scored[c];
  }
  return a;
}

}  // namespace nxbench
