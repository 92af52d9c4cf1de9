#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "nxbench/catalog.hpp"
#include "nxbench/cross_validation.hpp"
#include "nxbench/datasets.hpp"
#include "nxbench/error.hpp"
#include "nxbench/experiments.hpp"
#include "nxbench/features.hpp"
#include "nxbench/generators.hpp"
#include "nxbench/metrics.hpp"
#include "nxbench/reports.hpp"
#include "nxbench/rng.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace nxbench;

namespace {

struct Toy {
  FamilyCatalog catalog;
  FamilyPools pools;
  std::vector<Sample> benign;
};

/// Generated families with the given supports; threshold decides the groups.
Toy toy(const std::vector<std::pair<std::string, std::int64_t>>& families, std::int64_t threshold,
        std::size_t benign = 2000) {
  Toy t{FamilyCatalog(threshold), {}, nxtest::benign(benign, 5)};
  std::uint64_t seed = 100;
  for (const auto& [id, n] : families) {
    GeneratorSpec g;
    g.seed = ++seed;
    g.length_range = {10, 14};
    t.catalog.add(FamilyEntry{id, g, std::nullopt, n});
    t.pools[id] = generate_family(g, n, id);
  }
  return t;
}

std::size_t count_benign(const std::vector<Sample>& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](const Sample& x) { return x.label.is_benign(); }));
}

std::size_t count_family(const std::vector<Sample>& s, const std::string& id) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](const Sample& x) { return x.label.name() == id; }));
}

std::vector<std::string> names(int K) {
  std::vector<std::string> v{"benign"};
  for (int c = 1; c < K; ++c) v.push_back("c" + std::to_string(c));
  return v;
}

ClassifierSpec tiny_forest() {
  ClassifierSpec s;
  s.kind = ModelKind::forest;
  s.forest.n_trees = 5;
  s.forest.max_depth = 10;
  return s;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("confusion counts") {
    const std::vector<std::string> cls{"a", "b"};
    const std::vector<std::string> t{"a", "a", "b"}, y{"a", "b", "b"};
    const auto m = confusion(std::span<const std::string>(t), std::span<const std::string>(y), cls);
    CHECK(m.counts(0, 0) == 1);
    CHECK(m.counts(0, 1) == 1);
    CHECK(m.counts(1, 0) == 0);
    CHECK(m.counts(1, 1) == 1);
    CHECK(m.total() == 3);

    const std::vector<int> none;
    CHECK(confusion(none, none, cls).counts.sum() == 0);

    const std::vector<int> same{0, 1, 1, 0, 1};
    const auto d = confusion(same, same, cls);
    CHECK(d.counts(0, 1) + d.counts(1, 0) == 0);
    const auto s = prf_scores(d);
    CHECK(s.macro_f1 == 1.0);

    const std::vector<int> bad{0, 2};
    CHECK_THROWS_AS(confusion(bad, bad, cls), ArgumentError);
  }

  TEST_CASE("hand example") {
    ConfusionMatrix m{{"x", "y"}, CountMatrix(2, 2)};
    m.counts << 8, 2, 4, 6;
    const auto s = prf_scores(m);
    CHECK(s.per_class[0].recall == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(s.per_class[1].recall == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s.per_class[0].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.per_class[1].precision == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::abs(s.macro_f1 - 0.69697) < 1e-5);
  }

  TEST_CASE("zero denominators") {
    ConfusionMatrix m{{"a", "b", "c"}, CountMatrix::Zero(3, 3)};
    m.counts(0, 0) = 3;
    m.counts(1, 0) = 2;
    const auto s = prf_scores(m);
    CHECK(s.per_class[1].precision_undefined);
    CHECK(s.per_class[1].precision == 0.0);
    CHECK(s.per_class[2].absent);
    CHECK(s.classes_in_macro == 2);
  }

  TEST_CASE("agrees with a brute-force oracle") {
    CounterRng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
      const int K = 2 + static_cast<int>(rng.below(8));
      const auto n = static_cast<std::size_t>(rng.below(60));
      std::vector<int> t(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        // Restricting draws to a random prefix leaves some classes absent.
        t[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
        y[i] = rng.uniform() < 0.6 ? t[i] : static_cast<int>(rng.below(static_cast<std::uint64_t>(K - 1)));
      }
      const auto m = confusion(t, y, names(K));
      CHECK(m.total() == static_cast<std::int64_t>(n));
      const auto s = prf_scores(m);
      const auto o = nxtest::prf_oracle(t, y, K);
      for (int c = 0; c < K; ++c) {
        CHECK(std::abs(s.per_class[c].precision - o.precision[c]) < 1e-12);
        CHECK(std::abs(s.per_class[c].recall - o.recall[c]) < 1e-12);
        CHECK(std::abs(s.per_class[c].f1 - o.f1[c]) < 1e-12);
        CHECK(s.per_class[c].absent == !o.present[c]);
      }
      CHECK(std::abs(s.macro_f1 - o.macro_f1) < 1e-12);
    }
  }
}

TEST_SUITE("binary sets") {
  TEST_CASE("imbalanced toy") {
    auto t = toy({{"w1", 150}, {"w2", 150}, {"weak", 10}}, 100);
    BinaryImbalancedParams p;
    p.quota = 100;
    p.reps = 3;
    p.master_seed = 4;
    const auto sets = build_binary_imbalanced(t.catalog, t.pools, t.benign, p);
    REQUIRE(sets.size() == 3);
    for (const auto& s : sets) {
      CHECK(s.train.size() == 416);
      CHECK(s.test.size() == 4);
      CHECK(count_benign(s.train) == 208);
      CHECK(count_benign(s.test) == 2);
      CHECK(count_family(s.test, "w1") + count_family(s.test, "w2") == 0);
      CHECK(count_family(s.train, "weak") == 8);
      std::set<std::string> train_weak;
      for (const auto& x : s.train) if (x.label.name() == "weak") train_weak.insert(x.domain.text());
      for (const auto& x : s.test) if (x.label.name() == "weak") CHECK(train_weak.count(x.domain.text()) == 0);
    }
    const auto plan = plan_binary_imbalanced(t.catalog, 100);
    CHECK(plan.train_malicious == 208);
    CHECK(plan.test_malicious == 2);
  }

  TEST_CASE("a weak family of one sample is train-only and flagged") {
    CHECK(weak_test_count(1, 0.2) == 0);
    CHECK(weak_test_count(10, 0.2) == 2);
    CHECK(weak_test_count(210, 0.2) == 42);
    auto t = toy({{"w1", 150}, {"weak", 1}}, 100);
    BinaryImbalancedParams p;
    p.quota = 100;
    p.reps = 1;
    const auto sets = build_binary_imbalanced(t.catalog, t.pools, t.benign, p);
    CHECK(count_family(sets[0].train, "weak") == 1);
    CHECK(count_family(sets[0].test, "weak") == 0);
    REQUIRE(sets[0].flags.size() == 1);
    CHECK(sets[0].flags[0].find("weak") != std::string::npos);
  }

  TEST_CASE("benign shortfall names the numbers") {
    auto t = toy({{"w1", 150}, {"w2", 150}}, 100, 50);
    BinaryImbalancedParams p;
    p.quota = 100;
    p.reps = 1;
    try {
      build_binary_imbalanced(t.catalog, t.pools, t.benign, p);
      FAIL("expected BuildError");
    } catch (const BuildError& e) {
      CHECK(std::string(e.what()).find("50") != std::string::npos);
    }
  }

  TEST_CASE("balanced toy") {
    auto t = toy({{"w1", 150}, {"w2", 150}, {"weak", 10}}, 100);
    BinaryBalancedParams p;
    p.quota = 100;
    p.test_per_family = 10;
    p.reps = 1;
    const auto sets = build_binary_balanced(t.catalog, t.pools, t.benign, p);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].train.size() == 400);
    CHECK(sets[0].test.size() == 40);
    CHECK(count_benign(sets[0].test) == 20);
    CHECK(count_family(sets[0].train, "weak") + count_family(sets[0].test, "weak") == 0);
    p.quota = 145;
    CHECK_THROWS_AS(build_binary_balanced(t.catalog, t.pools, t.benign, p), BuildError);
  }

  TEST_CASE("eligible passes") {
    auto t = toy({{"w1", 150}, {"w2", 150}, {"weak", 40}}, 100);
    BinaryImbalancedParams ip;
    ip.quota = 100;
    ip.reps = 4;
    BinaryBalancedParams bp;
    bp.quota = 100;
    bp.test_per_family = 10;
    bp.reps = 4;
    const auto imb = build_binary_imbalanced(t.catalog, t.pools, t.benign, ip);
    const auto bal = build_binary_balanced(t.catalog, t.pools, t.benign, bp);
    std::vector<std::vector<Sample>> tests;
    for (const auto& s : imb) tests.push_back(s.test);

    const auto own = eligible_imbalanced_passes(imb, tests);
    CHECK(own.size() == 4);
    for (int r = 0; r < 4; ++r) CHECK(std::find(own.begin(), own.end(), EligiblePass{std::size_t(r), std::size_t(r)}) != own.end());
    for (const auto& e : own) {
      std::set<std::string> train;
      for (const auto& x : imb[e.model].train) if (!x.label.is_benign()) train.insert(x.domain.text());
      for (const auto& x : tests[e.test]) if (!x.label.is_benign()) CHECK(train.count(x.domain.text()) == 0);
    }
    CHECK(eligible_imbalanced_passes(bal, tests).size() == 16);

    std::vector<std::vector<Sample>> same{imb[0].train};
    CHECK(eligible_imbalanced_passes(std::span<const SplitPair>(imb.data(), 1), same).empty());
  }

  TEST_CASE("full-scale arithmetic") {
    const auto cat = full_scale_catalog();
    CHECK(cat.ids(Group::well).size() == 46);
    CHECK(cat.ids(Group::weak).size() == 45);
    const auto mb = plan_multiclass(cat, Scenario::m_balanced);
    const auto mi = plan_multiclass(cat, Scenario::m_imbalanced);
    CHECK(mb.samples == 470000);
    CHECK(mb.classes == 47);
    CHECK(mi.samples == 548544);
    CHECK(mi.classes == 92);
    const auto bi = plan_binary_imbalanced(cat);
    CHECK(std::abs(double(bi.train_total()) - 1045648.0) / 1045648.0 < 1e-3);
    CHECK(std::abs(double(bi.test_total()) - 31440.0) / 31440.0 < 1e-3);
    CHECK(plan_binary_balanced(cat).train_malicious == 46 * 11366);
    CHECK_THROWS_AS(plan_multiclass(cat, Scenario::b_balanced), BuildError);
  }
}

TEST_SUITE("multiclass sets") {
  TEST_CASE("toy imbalanced") {
    auto t = toy({{"w1", 60}, {"w2", 60}, {"w3", 60}, {"k1", 7}, {"k2", 9}}, 50);
    const auto d = build_multiclass(t.catalog, t.pools, t.benign, Scenario::m_imbalanced, 50, 3);
    CHECK(d.size() == 216);
    CHECK(d.num_classes() == 6);
    CHECK(d.classes.front() == "benign");
    const auto counts = d.class_counts();
    CHECK(counts[0] == 50);
    const auto b = build_multiclass(t.catalog, t.pools, t.benign, Scenario::m_balanced, 50, 3);
    CHECK(b.size() == 200);
    CHECK(b.num_classes() == 4);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.classes[static_cast<std::size_t>(d.labels[i])] == d.samples[i].label.name());
  }
}

TEST_SUITE("cross validation") {
  TEST_CASE("even class splits evenly") {
    const std::vector<int> labels(10, 0);
    const auto plan = make_folds(labels, 1, 1, 5, 9);
    for (int f = 0; f < 5; ++f) CHECK(plan.test_indices(0, f).size() == 2);
  }

  TEST_CASE("singleton class lands in exactly one test fold and is flagged") {
    std::vector<int> labels(20, 0);
    labels.push_back(1);
    const auto plan = make_folds(labels, 2, 5, 5, 9);
    CHECK(!plan.flags.empty());
    for (int r = 0; r < 5; ++r) {
      int seen = 0;
      for (int f = 0; f < 5; ++f) {
        const auto test = plan.test_indices(r, f);
        seen += std::count(test.begin(), test.end(), std::size_t(20));
        const auto train = plan.train_indices(r, f);
        if (std::count(test.begin(), test.end(), std::size_t(20)) == 0)
          CHECK(std::count(train.begin(), train.end(), std::size_t(20)) == 1);
      }
      CHECK(seen == 1);
    }
  }

  TEST_CASE("random datasets: folds partition every class") {
    CounterRng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const int K = 1 + static_cast<int>(rng.below(20));
      const auto n = 1 + static_cast<std::size_t>(rng.below(5000));
      std::vector<int> labels(n);
      for (auto& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      const auto plan = make_folds(labels, K, 5, 5, rng());
      std::vector<std::size_t> per_class(static_cast<std::size_t>(K));
      for (int l : labels) ++per_class[static_cast<std::size_t>(l)];
      for (int r = 0; r < 5; ++r) {
        std::vector<std::set<std::size_t>> seen(static_cast<std::size_t>(K));
        for (int f = 0; f < 5; ++f) {
          const auto test = plan.test_indices(r, f);
          const auto train = plan.train_indices(r, f);
          CHECK(test.size() + train.size() == n);
          std::set<std::size_t> test_set(test.begin(), test.end());
          for (auto i : train) CHECK(test_set.count(i) == 0);
          std::vector<std::size_t> fold_count(static_cast<std::size_t>(K));
          for (auto i : test) {
            const auto c = static_cast<std::size_t>(labels[i]);
            CHECK(seen[c].insert(i).second);
            ++fold_count[c];
          }
          for (std::size_t c = 0; c < per_class.size(); ++c) {
            const double share = double(per_class[c]) / 5.0;
            CHECK(std::abs(double(fold_count[c]) - share) < 1.0);
          }
        }
        for (std::size_t c = 0; c < per_class.size(); ++c) CHECK(seen[c].size() == per_class[c]);
      }
    }
  }

  TEST_CASE("5x5 yields 25 ordered reports") {
    auto t = toy({{"w1", 60}, {"w2", 60}}, 50);
    const auto d = build_multiclass(t.catalog, t.pools, t.benign, Scenario::m_balanced, 50, 1);
    const auto plan = make_folds(d.labels, d.num_classes(), 5, 5, 2);
    Trainer always_benign = [](std::span<const Sample>, std::span<const int>, std::span<const Sample> test,
                               std::uint64_t) { return std::vector<int>(test.size(), 0); };
    const auto reports = cross_validate(d, plan, always_benign, 7, {}, 2);
    REQUIRE(reports.size() == 25);
    for (int i = 0; i < 25; ++i) {
      CHECK(reports[static_cast<std::size_t>(i)].meta.repetition == i / 5);
      CHECK(reports[static_cast<std::size_t>(i)].meta.fold == i % 5);
      CHECK(reports[static_cast<std::size_t>(i)].meta.seed == fold_seed(7, i / 5, i % 5));
      CHECK(reports[static_cast<std::size_t>(i)].confusion.total() == 30);
    }
    const auto agg = aggregate(reports);
    CHECK(agg.runs == 25);
    CHECK(agg.confusion.total() == 750);
    CHECK(agg.per_class[0].recall == 1.0);
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("gamma grid") {
    const auto g = default_gamma_grid();
    REQUIRE(g.size() == 11);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(0.1 * double(i)));
  }

  TEST_CASE("sweep has one row per gamma and one best row") {
    auto t = toy({{"w1", 200}, {"w2", 200}, {"k1", 15}, {"k2", 25}}, 150, 400);
    const auto d = build_multiclass(t.catalog, t.pools, t.benign, Scenario::m_imbalanced, 150, 1);
    auto spec = tiny_forest();
    spec.forest.use_class_weights = true;
    const auto grid = default_gamma_grid();
    const auto r = run_gamma_sweep(d, grid, spec, 1, 5, 3, 2);
    REQUIRE(r.rows.size() == 11);
    CHECK(std::count_if(r.rows.begin(), r.rows.end(), [](const GammaRow& x) { return x.best; }) == 1);
    CHECK(r.rows[r.best_index].best);
    for (const auto& row : r.rows) CHECK(row.macro_f1 <= r.rows[r.best_index].macro_f1);
    const auto csv = gamma_sweep_csv(r);
    CHECK(csv.rfind("gamma,macro_f1,macro_precision,macro_recall,best\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
  }

  TEST_CASE("gamma zero equals an unweighted run") {
    auto t = toy({{"w1", 200}, {"k1", 20}}, 150, 300);
    const auto d = build_multiclass(t.catalog, t.pools, t.benign, Scenario::m_imbalanced, 150, 1);
    ClassifierSpec spec;
    spec.kind = ModelKind::neural;
    spec.neural.hidden = {8};
    spec.neural.epochs = 3;
    spec.neural.batch_size = 16;
    const auto plan = make_folds(d.labels, d.num_classes(), 1, 5, 4);
    const auto weighted = cross_validate(d, plan, make_trainer(spec, Task::multiclass, d.classes), 6);
    const int K = d.num_classes();
    Trainer unweighted = [&](std::span<const Sample> train, std::span<const int> y, std::span<const Sample> test,
                             std::uint64_t seed) {
      std::vector<Sample> benign;
      for (const auto& s : train) if (s.label.is_benign()) benign.push_back(s);
      const auto ref = fit_reference(benign);
      auto p = spec.neural;
      p.seed = seed;
      NeuralModel m = train_neural(neural_matrix(train, ref), y, K, Eigen::VectorXd::Ones(K), p);
      const Eigen::MatrixXd P = m.predict_proba(neural_matrix(test, ref));
      std::vector<int> out;
      for (Eigen::Index i = 0; i < P.rows(); ++i) out.push_back(static_cast<int>(argmax(P.row(i))));
      return out;
    };
    const auto plain = cross_validate(d, plan, unweighted, 6);
    REQUIRE(weighted.size() == plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i) CHECK(weighted[i].confusion.counts == plain[i].confusion.counts);
  }

  TEST_CASE("out-of-distribution models never name a weak class") {
    auto t = toy({{"w1", 200}, {"w2", 200}, {"k1", 15}, {"k2", 25}}, 150, 400);
    const auto d = build_multiclass(t.catalog, t.pools, t.benign, Scenario::m_imbalanced, 150, 1);
    const auto r = run_ood_experiment(d, t.catalog, 3, tiny_forest(), 8, 2);
    CHECK(r.models == 3);
    CHECK(std::find(r.train_classes.begin(), r.train_classes.end(), "k1") == r.train_classes.end());
    REQUIRE(r.distribution.size() == 2);
    for (const auto& [family, dist] : r.distribution) {
      double total = 0;
      for (const auto& [cls, frac] : dist) {
        CHECK(cls != "k1");
        CHECK(cls != "k2");
        total += frac;
      }
      CHECK(total == doctest::Approx(1.0));
    }
    CHECK(r.benign_fraction_excluded >= 0.0);
    CHECK(r.benign_fraction_excluded <= 1.0);
    CHECK(ood_summary_csv(r).rfind("models,benign_fraction_excluded,benign_fraction_included\n", 0) == 0);
  }
}

TEST_SUITE("reports") {
  TEST_CASE("class report and confusion layout") {
    const std::vector<int> t{0, 0, 1, 1}, y{0, 1, 1, 1};
    const auto r = make_report({"benign", "fam"}, t, y, {});
    const auto csv = class_report_csv(r);
    CHECK(csv.rfind("class,support,precision,recall,f1\nbenign,2,1.000000,0.500000,0.666667\n", 0) == 0);
    CHECK(csv.find("\nmacro,4,") != std::string::npos);
    CHECK(confusion_csv(r.confusion) == "true\\predicted,benign,fam\nbenign,1,1\nfam,0,2\n");
  }
}
