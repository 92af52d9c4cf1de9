#include "nxbench/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nxbench/error.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

namespace {

const std::vector<Sample>& pool_of(const FamilyPools& pools, const std::string& id) {
  auto it = pools.find(id);
  if (it == pools.end()) throw BuildError("no samples available for family '" + id + "'");
  return it->second;
}

/// `count` distinct samples from `pool`, order fixed by key.
std::vector<Sample> draw(const std::vector<Sample>& pool, std::int64_t count, std::uint64_t key) {
  CounterRng rng(key);
  const auto idx = permutation(pool.size(), rng);
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(pool[idx[static_cast<std::size_t>(i)]]);
  return out;
}

/// Disjoint benign blocks for train and test of one repetition. The
/// permutation depends only on (seed, repetition), so balanced and
/// imbalanced sets of the same repetition share their benign draws.
std::pair<std::vector<Sample>, std::vector<Sample>> benign_blocks(std::span<const Sample> pool,
                                                                  std::int64_t n_train,
                                                                  std::int64_t n_test,
                                                                  std::uint64_t seed, int rep) {
  const auto need = n_train + n_test;
  if (static_cast<std::int64_t>(pool.size()) < need) {
    throw BuildError("benign pool holds " + std::to_string(pool.size()) + " samples, " +
                     std::to_string(need) + " needed (shortfall " +
                     std::to_string(need - static_cast<std::int64_t>(pool.size())) + ")");
  }
  CounterRng rng(mix64(derive_key(seed, "benign-draw"), static_cast<std::uint64_t>(rep)));
  const auto idx = permutation(pool.size(), rng);
  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (std::int64_t i = 0; i < n_train; ++i) out.first.push_back(pool[idx[static_cast<std::size_t>(i)]]);
  // Test benign comes from the far end so it never overlaps a training
  // prefix of any length.
  for (std::int64_t i = 0; i < n_test; ++i) {
    out.second.push_back(pool[idx[pool.size() - 1 - static_cast<std::size_t>(i)]]);
  }
  return out;
}

std::uint64_t family_key(std::uint64_t seed, std::string_view tag, int rep, const std::string& id) {
  return mix64(mix64(derive_key(seed, tag), static_cast<std::uint64_t>(rep)), fnv1a(id));
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::b_balanced:
      return "b_balanced";
    case Scenario::b_imbalanced:
      return "b_imbalanced";
    case Scenario::m_balanced:
      return "m_balanced";
    case Scenario::m_imbalanced:
      return "m_imbalanced";
  }
  return "unknown";
}

Scenario scenario_from_string(std::string_view s) {
  std::string norm(s);
  std::replace(norm.begin(), norm.end(), '-', '_');
  for (auto sc : {Scenario::b_balanced, Scenario::b_imbalanced, Scenario::m_balanced, Scenario::m_imbalanced})
    if (to_string(sc) == norm) return sc;
  throw ArgumentError("unknown scenario '" + std::string(s) + "'");
}

void ScenarioPlan::validate() const {
  if (repetitions < 1) throw ArgumentError("repetitions must be >= 1");
  if (per_family_quota < 1) throw ArgumentError("quota must be >= 1");
  const bool binary = scenario == Scenario::b_balanced || scenario == Scenario::b_imbalanced;
  if (binary && benign_ratio != 0.5) throw ArgumentError("binary scenarios use a 0.5 benign ratio");
}

std::int64_t weak_test_count(std::int64_t n, double test_frac) {
  if (n <= 0) return 0;
  // The epsilon absorbs representation error such as 0.2 * 210 = 41.99..
  return static_cast<std::int64_t>(std::floor(test_frac * static_cast<double>(n) + 1e-9));
}

BinarySizes plan_binary_imbalanced(const FamilyCatalog& catalog, std::int64_t quota, double test_frac) {
  BinarySizes s;
  for (const auto& e : catalog.entries()) {
    if (e.group == Group::well) {
      s.train_malicious += quota;
    } else {
      const auto t = weak_test_count(e.support, test_frac);
      s.test_malicious += t;
      s.train_malicious += e.support - t;
    }
  }
  return s;
}

BinarySizes plan_binary_balanced(const FamilyCatalog& catalog, std::int64_t quota,
                                 std::int64_t test_per_family) {
  BinarySizes s;
  for (const auto& e : catalog.entries()) {
    if (e.group != Group::well) continue;
    if (e.support < quota + test_per_family) {
      throw BuildError("family '" + e.id + "' has " + std::to_string(e.support) +
                       " samples, balanced sets need " + std::to_string(quota + test_per_family));
    }
    s.train_malicious += quota;
    s.test_malicious += test_per_family;
  }
  return s;
}

std::vector<SplitPair> build_binary_imbalanced(const FamilyCatalog& catalog, const FamilyPools& pools,
                                               std::span<const Sample> benign_pool,
                                               const BinaryImbalancedParams& params) {
  if (params.reps < 1) throw ArgumentError("reps must be >= 1");
  if (!(params.test_frac > 0.0 && params.test_frac < 1.0)) throw ArgumentError("test_frac must lie in (0,1)");
  std::vector<SplitPair> out;
  for (int rep = 0; rep < params.reps; ++rep) {
    SplitPair pair;
    pair.repetition = rep;
    for (const auto& e : catalog.entries()) {
      const auto& pool = pool_of(pools, e.id);
      if (e.group == Group::well) {
        if (static_cast<std::int64_t>(pool.size()) < params.quota) {
          throw BuildError("well family '" + e.id + "' has " + std::to_string(pool.size()) +
                           " samples, quota is " + std::to_string(params.quota));
        }
        auto drawn = draw(pool, params.quota, family_key(params.master_seed, "bi-well", rep, e.id));
        pair.train.insert(pair.train.end(), drawn.begin(), drawn.end());
        continue;
      }
      const auto n = static_cast<std::int64_t>(pool.size());
      const auto n_test = weak_test_count(n, params.test_frac);
      if (n_test == 0) pair.flags.push_back("family '" + e.id + "' has no test samples (support " + std::to_string(n) + ")");
      auto shuffled = draw(pool, n, family_key(params.master_seed, "bi-weak", rep, e.id));
      pair.test.insert(pair.test.end(), shuffled.begin(), shuffled.begin() + n_test);
      pair.train.insert(pair.train.end(), shuffled.begin() + n_test, shuffled.end());
    }
    const auto n_train = static_cast<std::int64_t>(pair.train.size());
    const auto n_test = static_cast<std::int64_t>(pair.test.size());
    auto [btrain, btest] = benign_blocks(benign_pool, n_train, n_test, params.master_seed, rep);
    pair.train.insert(pair.train.end(), btrain.begin(), btrain.end());
    pair.test.insert(pair.test.end(), btest.begin(), btest.end());
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<SplitPair> build_binary_balanced(const FamilyCatalog& catalog, const FamilyPools& pools,
                                             std::span<const Sample> benign_pool,
                                             const BinaryBalancedParams& params) {
  if (params.reps < 1) throw ArgumentError("reps must be >= 1");
  if (params.quota < 1 || params.test_per_family < 0) throw ArgumentError("invalid balanced quotas");
  std::vector<SplitPair> out;
  for (int rep = 0; rep < params.reps; ++rep) {
    SplitPair pair;
    pair.repetition = rep;
    for (const auto& e : catalog.entries()) {
      if (e.group != Group::well) continue;
      const auto& pool = pool_of(pools, e.id);
      const auto need = params.quota + params.test_per_family;
      if (static_cast<std::int64_t>(pool.size()) < need) {
        throw BuildError("family '" + e.id + "' has " + std::to_string(pool.size()) +
                         " samples, quota plus test needs " + std::to_string(need));
      }
      auto drawn = draw(pool, need, family_key(params.master_seed, "bb-well", rep, e.id));
      pair.train.insert(pair.train.end(), drawn.begin(), drawn.begin() + params.quota);
      pair.test.insert(pair.test.end(), drawn.begin() + params.quota, drawn.end());
    }
    const auto n_train = static_cast<std::int64_t>(pair.train.size());
    const auto n_test = static_cast<std::int64_t>(pair.test.size());
    auto [btrain, btest] = benign_blocks(benign_pool, n_train, n_test, params.master_seed, rep);
    pair.train.insert(pair.train.end(), btrain.begin(), btrain.end());
    pair.test.insert(pair.test.end(), btest.begin(), btest.end());
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<EligiblePass> eligible_imbalanced_passes(std::span<const SplitPair> trained_on,
                                                     std::span<const std::vector<Sample>> test_sets) {
  auto malicious_keys = [](const std::vector<Sample>& samples) {
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& s : samples)
      if (!s.label.is_benign()) keys.emplace(s.label.name(), s.domain.text());
    return keys;
  };
  std::vector<std::set<std::pair<std::string, std::string>>> test_keys;
  for (const auto& t : test_sets) test_keys.push_back(malicious_keys(t));
  std::vector<EligiblePass> out;
  for (std::size_t m = 0; m < trained_on.size(); ++m) {
    const auto train_keys = malicious_keys(trained_on[m].train);
    for (std::size_t t = 0; t < test_keys.size(); ++t) {
      const bool disjoint = std::none_of(test_keys[t].begin(), test_keys[t].end(),
                                         [&](const auto& k) { return train_keys.count(k) != 0; });
      if (disjoint) out.push_back({m, t});
    }
  }
  return out;
}

std::vector<std::int64_t> LabeledDataset::class_counts() const {
  std::vector<std::int64_t> counts(classes.size(), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

MulticlassSizes plan_multiclass(const FamilyCatalog& catalog, Scenario scenario, std::int64_t quota) {
  if (scenario != Scenario::m_balanced && scenario != Scenario::m_imbalanced) {
    throw BuildError("scenario " + to_string(scenario) + " is not a multiclass scenario");
  }
  MulticlassSizes s{quota, 1};
  for (const auto& e : catalog.entries()) {
    if (e.group == Group::well) {
      s.samples += quota;
      ++s.classes;
    } else if (scenario == Scenario::m_imbalanced) {
      s.samples += e.support;
      ++s.classes;
    }
  }
  return s;
}

LabeledDataset build_multiclass(const FamilyCatalog& catalog, const FamilyPools& pools,
                                std::span<const Sample> benign_pool, Scenario scenario,
                                std::int64_t quota, std::uint64_t master_seed) {
  if (scenario != Scenario::m_balanced && scenario != Scenario::m_imbalanced) {
    throw BuildError("scenario " + to_string(scenario) + " is not a multiclass scenario");
  }
  if (quota < 1) throw ArgumentError("quota must be >= 1");
  std::vector<Sample> samples;
  std::vector<std::string> classes{std::string(kBenignName)};
  if (static_cast<std::int64_t>(benign_pool.size()) < quota) {
    throw BuildError("benign pool holds " + std::to_string(benign_pool.size()) + " samples, " +
                     std::to_string(quota) + " needed (shortfall " +
                     std::to_string(quota - static_cast<std::int64_t>(benign_pool.size())) + ")");
  }
  {
    CounterRng rng(derive_key(master_seed, "mc-benign"));
    const auto idx = permutation(benign_pool.size(), rng);
    for (std::int64_t i = 0; i < quota; ++i) samples.push_back(benign_pool[idx[static_cast<std::size_t>(i)]]);
  }
  for (const auto& e : catalog.entries()) {
    if (e.group != Group::well) continue;
    const auto& pool = pool_of(pools, e.id);
    if (static_cast<std::int64_t>(pool.size()) < quota) {
      throw BuildError("well family '" + e.id + "' has " + std::to_string(pool.size()) +
                       " samples, quota is " + std::to_string(quota));
    }
    auto drawn = draw(pool, quota, family_key(master_seed, "mc-well", 0, e.id));
    samples.insert(samples.end(), drawn.begin(), drawn.end());
    classes.push_back(e.id);
  }
  if (scenario == Scenario::m_imbalanced) {
    for (const auto& e : catalog.entries()) {
      if (e.group != Group::weak) continue;
      const auto& pool = pool_of(pools, e.id);
      samples.insert(samples.end(), pool.begin(), pool.end());
      classes.push_back(e.id);
    }
  }
  return label_samples(std::move(samples), std::move(classes));
}

LabeledDataset label_samples(std::vector<Sample> samples, std::vector<std::string> classes) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = static_cast<int>(i);
  LabeledDataset ds;
  ds.labels.reserve(samples.size());
  for (const auto& s : samples) {
    auto it = index.find(s.label.name());
    if (it == index.end()) throw BuildError("sample label '" + s.label.name() + "' not in class list");
    ds.labels.push_back(it->second);
  }
  ds.samples = std::move(samples);
  ds.classes = std::move(classes);
  return ds;
}

LabeledDataset binary_dataset(std::span<const Sample> samples) {
  LabeledDataset ds;
  ds.classes = {std::string(kBenignName), "malicious"};
  ds.samples.assign(samples.begin(), samples.end());
  ds.labels.reserve(samples.size());
  for (const auto& s : samples) ds.labels.push_back(s.label.is_benign() ? 0 : 1);
  return ds;
}

}  // namespace nxbench
