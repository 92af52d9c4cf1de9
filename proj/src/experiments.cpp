#include "nxbench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nxbench/error.hpp"
#include "nxbench/parallel.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

namespace {

const std::vector<std::string>& binary_classes() {
  static const std::vector<std::string> classes{std::string(kBenignName), "malicious"};
  return classes;
}

std::vector<int> binary_labels(std::span<const Sample> samples) {
  std::vector<int> y;
  y.reserve(samples.size());
  for (const auto& s : samples) y.push_back(s.label.is_benign() ? 0 : 1);
  return y;
}

struct PassScore {
  double benign_recall = 0.0;
  double malicious_recall = 0.0;
  std::map<std::string, double> family_recall;  // only families with test samples
};

PassScore score_pass(std::span<const Sample> test, std::span<const int> predicted) {
  std::int64_t benign = 0, benign_hit = 0, mal = 0, mal_hit = 0;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> fam;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test[i].label.is_benign()) {
      ++benign;
      benign_hit += predicted[i] == 0;
    } else {
      ++mal;
      mal_hit += predicted[i] == 1;
      auto& f = fam[test[i].label.name()];
      ++f.first;
      f.second += predicted[i] == 1;
    }
  }
  PassScore s;
  s.benign_recall = benign ? static_cast<double>(benign_hit) / static_cast<double>(benign) : 0.0;
  s.malicious_recall = mal ? static_cast<double>(mal_hit) / static_cast<double>(mal) : 0.0;
  for (const auto& [id, c] : fam) s.family_recall[id] = static_cast<double>(c.second) / static_cast<double>(c.first);
  return s;
}

double mean_family_recall(const PassScore& s) {
  if (s.family_recall.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [id, r] : s.family_recall) sum += r;
  return sum / static_cast<double>(s.family_recall.size());
}

std::uint64_t binary_model_seed(std::uint64_t master, const std::string& model, int regime, int rep) {
  return mix64(mix64(mix64(derive_key(master, "binary-model"), fnv1a(model)), static_cast<std::uint64_t>(regime)),
               static_cast<std::uint64_t>(rep));
}

}  // namespace

bool FamilyRecall::improved(const std::string& model) const {
  auto b = balanced.find(model);
  auto i = imbalanced.find(model);
  if (b == balanced.end() || i == imbalanced.end()) return false;
  return i->second - b->second > 0.01;
}

BinaryExperimentResult run_binary_experiment(const FamilyCatalog& catalog, const FamilyPools& pools,
                                             std::span<const Sample> benign_pool,
                                             const BinaryExperimentConfig& config) {
  if (config.models.empty()) throw ArgumentError("no models configured");
  if (config.balanced.reps != config.imbalanced.reps) throw ArgumentError("balanced and imbalanced reps differ");
  const auto bal = build_binary_balanced(catalog, pools, benign_pool, config.balanced);
  const auto imb = build_binary_imbalanced(catalog, pools, benign_pool, config.imbalanced);
  const int reps = config.imbalanced.reps;

  std::vector<std::vector<Sample>> imb_tests;
  for (const auto& p : imb) imb_tests.push_back(p.test);
  const std::vector<const std::vector<SplitPair>*> regimes{&bal, &imb};
  std::vector<std::vector<EligiblePass>> eligible;
  for (const auto* r : regimes) eligible.push_back(eligible_imbalanced_passes(*r, imb_tests));

  BinaryExperimentResult result;
  for (const auto& p : imb) result.flags.insert(result.flags.end(), p.flags.begin(), p.flags.end());
  std::sort(result.flags.begin(), result.flags.end());
  result.flags.erase(std::unique(result.flags.begin(), result.flags.end()), result.flags.end());

  // job = (model, regime, rep); slots hold every pass that model takes part in.
  const auto n_jobs = config.models.size() * 2 * static_cast<std::size_t>(reps);
  std::vector<std::vector<PassScore>> bal_scores(n_jobs), imb_scores(n_jobs);
  std::vector<std::uint64_t> seeds(n_jobs);
  for (std::size_t job = 0; job < n_jobs; ++job) {
    const auto m = job / (2 * static_cast<std::size_t>(reps));
    const int regime = static_cast<int>(job / static_cast<std::size_t>(reps) % 2);
    const int rep = static_cast<int>(job % static_cast<std::size_t>(reps));
    seeds[job] = binary_model_seed(config.imbalanced.master_seed, config.models[m].id(), regime, rep);
    result.job_seeds.emplace_back(config.models[m].id() + (regime == 0 ? "/balanced/" : "/imbalanced/") +
                                      std::to_string(rep),
                                  seeds[job]);
  }

  parallel_for(n_jobs, config.jobs, [&](std::size_t job) {
    const auto m = job / (2 * static_cast<std::size_t>(reps));
    const int regime = static_cast<int>(job / static_cast<std::size_t>(reps) % 2);
    const int rep = static_cast<int>(job % static_cast<std::size_t>(reps));
    const auto& pair = (*regimes[static_cast<std::size_t>(regime)])[static_cast<std::size_t>(rep)];
    auto spec = config.models[m];
    spec.forest.jobs = 1;
    const auto y = binary_labels(pair.train);
    const auto model = train_model(spec, Task::binary, pair.train, y, binary_classes(), seeds[job]);
    for (const auto& t : bal) {
      const auto pred = classify_samples(model, t.test);
      bal_scores[job].push_back(score_pass(t.test, pred));
    }
    for (const auto& e : eligible[static_cast<std::size_t>(regime)]) {
      if (e.model != static_cast<std::size_t>(rep)) continue;
      const auto& test = imb_tests[e.test];
      const auto pred = classify_samples(model, test);
      imb_scores[job].push_back(score_pass(test, pred));
    }
  });

  std::vector<std::string> weak_ids;
  for (const auto& e : catalog.entries()) {
    if (e.group != Group::weak) continue;
    FamilyRecall row;
    row.family = e.id;
    row.support = static_cast<std::int64_t>(pools.at(e.id).size());
    row.test_samples = weak_test_count(row.support, config.imbalanced.test_frac);
    result.families.push_back(row);
  }

  for (std::size_t m = 0; m < config.models.size(); ++m) {
    const auto id = config.models[m].id();
    for (int regime = 0; regime < 2; ++regime) {
      RegimeSummary s;
      s.model = id;
      s.training = regime == 0 ? "balanced" : "imbalanced";
      std::map<std::string, std::pair<double, int>> fam;
      for (int rep = 0; rep < reps; ++rep) {
        const auto job = (m * 2 + static_cast<std::size_t>(regime)) * static_cast<std::size_t>(reps) +
                         static_cast<std::size_t>(rep);
        for (const auto& p : bal_scores[job]) {
          s.benign_recall_balanced_test += p.benign_recall;
          s.malicious_recall_balanced_test += p.malicious_recall;
          ++s.passes_balanced_test;
        }
        for (const auto& p : imb_scores[job]) {
          s.benign_recall_imbalanced_test += p.benign_recall;
          s.malicious_recall_imbalanced_test += mean_family_recall(p);
          ++s.passes_imbalanced_test;
          for (const auto& [f, r] : p.family_recall) {
            fam[f].first += r;
            ++fam[f].second;
          }
        }
      }
      if (s.passes_balanced_test > 0) {
        s.benign_recall_balanced_test /= s.passes_balanced_test;
        s.malicious_recall_balanced_test /= s.passes_balanced_test;
      }
      if (s.passes_imbalanced_test > 0) {
        s.benign_recall_imbalanced_test /= s.passes_imbalanced_test;
        s.malicious_recall_imbalanced_test /= s.passes_imbalanced_test;
      }
      result.summary.push_back(s);
      for (auto& row : result.families) {
        auto it = fam.find(row.family);
        if (it == fam.end()) continue;
        auto& target = regime == 0 ? row.balanced : row.imbalanced;
        target[id] = it->second.first / it->second.second;
      }
    }
  }
  return result;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

GammaSweepResult run_gamma_sweep(const LabeledDataset& data, std::span<const double> gammas,
                                 const ClassifierSpec& base, int reps, int folds,
                                 std::uint64_t master_seed, int jobs) {
  if (gammas.empty()) throw ArgumentError("empty gamma grid");
  GammaSweepResult out;
  out.folds = make_folds(data.labels, data.num_classes(), reps, folds, master_seed);
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw ArgumentError("gamma must lie in [0, 1]");
    auto spec = base;
    spec.gamma = g;
    spec.forest.jobs = 1;
    const auto trainer = make_trainer(spec, Task::multiclass, data.classes);
    RunMetadata meta;
    meta.gamma = g;
    meta.model_id = spec.id();
    const auto reports = cross_validate(data, out.folds, trainer, master_seed, meta, jobs);
    auto agg = aggregate(reports);
    out.rows.push_back({g, agg.macro_f1, agg.macro_precision, agg.macro_recall, false});
    out.aggregates.push_back(std::move(agg));
  }
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].macro_f1 > out.rows[out.best_index].macro_f1) out.best_index = i;
  out.rows[out.best_index].best = true;
  return out;
}

OodResult run_ood_experiment(const LabeledDataset& data, const FamilyCatalog& catalog, int reps,
                             const ClassifierSpec& spec, std::uint64_t master_seed, int jobs,
                             bool compare_included) {
  if (reps < 1) throw ArgumentError("reps must be >= 1");
  constexpr int kFolds = 5;
  std::vector<bool> weak_class(data.classes.size(), false);
  OodResult out;
  std::vector<int> remap(data.classes.size(), -1);
  for (std::size_t c = 0; c < data.classes.size(); ++c) {
    const auto& name = data.classes[c];
    weak_class[c] = name != kBenignName && catalog.contains(name) && catalog.at(name).group == Group::weak;
    if (!weak_class[c]) {
      remap[c] = static_cast<int>(out.train_classes.size());
      out.train_classes.push_back(name);
    }
  }
  if (std::none_of(weak_class.begin(), weak_class.end(), [](bool b) { return b; })) {
    throw BuildError("dataset holds no weak-family samples");
  }
  const int cv_reps = (reps + kFolds - 1) / kFolds;
  const auto plan = make_folds(data.labels, data.num_classes(), cv_reps, kFolds, master_seed);

  std::vector<std::size_t> weak_idx;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (weak_class[static_cast<std::size_t>(data.labels[i])]) weak_idx.push_back(i);
  std::vector<Sample> weak_samples;
  for (auto i : weak_idx) weak_samples.push_back(data.samples[i]);

  struct Slot {
    std::vector<int> excluded_pred;
    double included_fraction = 0.0;
    bool included_scored = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(reps));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    seeds[static_cast<std::size_t>(r)] = mix64(derive_key(master_seed, "ood-model"), static_cast<std::uint64_t>(r));
    out.job_seeds.emplace_back("ood/" + std::to_string(r), seeds[static_cast<std::size_t>(r)]);
  }
  auto local = spec;
  local.forest.jobs = 1;
  parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
    const int cv_rep = static_cast<int>(r) / kFolds;
    const int fold = static_cast<int>(r) % kFolds;
    const auto train_idx = plan.train_indices(cv_rep, fold);
    std::vector<Sample> train;
    std::vector<int> y;
    for (auto i : train_idx) {
      const auto c = static_cast<std::size_t>(data.labels[i]);
      if (weak_class[c]) continue;
      train.push_back(data.samples[i]);
      y.push_back(remap[c]);
    }
    const auto model = train_model(local, Task::multiclass, train, y, out.train_classes, seeds[r]);
    slots[r].excluded_pred = classify_samples(model, weak_samples);
    if (!compare_included) return;
    std::vector<Sample> full;
    std::vector<int> full_y;
    for (auto i : train_idx) {
      full.push_back(data.samples[i]);
      full_y.push_back(data.labels[i]);
    }
    std::vector<Sample> held;
    for (auto i : plan.test_indices(cv_rep, fold))
      if (weak_class[static_cast<std::size_t>(data.labels[i])]) held.push_back(data.samples[i]);
    if (held.empty()) return;
    const auto with_weak = train_model(local, Task::multiclass, full, full_y, data.classes, seeds[r]);
    const auto pred = classify_samples(with_weak, held);
    const auto benign_hits = std::count(pred.begin(), pred.end(), 0);
    slots[r].included_fraction = static_cast<double>(benign_hits) / static_cast<double>(held.size());
    slots[r].included_scored = true;
  });

  out.models = reps;
  std::map<std::string, std::int64_t> family_size;
  for (const auto& s : weak_samples) ++family_size[s.label.name()];
  int included_runs = 0;
  for (const auto& slot : slots) {
    std::int64_t benign_hits = 0;
    for (std::size_t i = 0; i < weak_samples.size(); ++i) {
      const auto& fam = weak_samples[i].label.name();
      const auto& pred = out.train_classes[static_cast<std::size_t>(slot.excluded_pred[i])];
      out.distribution[fam][pred] += 1.0 / static_cast<double>(family_size[fam]) / reps;
      benign_hits += slot.excluded_pred[i] == 0;
    }
    out.benign_fraction_excluded += static_cast<double>(benign_hits) / static_cast<double>(weak_samples.size()) / reps;
    if (slot.included_scored) {
      out.benign_fraction_included += slot.included_fraction;
      ++included_runs;
    }
  }
  if (included_runs > 0) out.benign_fraction_included /= included_runs;
  return out;
}

}  // namespace nxbench
