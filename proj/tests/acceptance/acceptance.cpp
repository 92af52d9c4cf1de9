// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "nxbench/class_weights.hpp"
#include "nxbench/cli.hpp"
#include "nxbench/cross_validation.hpp"
#include "nxbench/datasets.hpp"
#include "nxbench/experiments.hpp"
#include "nxbench/metrics.hpp"
#include "nxbench/neural.hpp"
#include "nxbench/reports.hpp"
#include "nxbench/rng.hpp"
#include "nxbench/run_config.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace nxbench;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kWeightRelTol = 1e-12;
constexpr double kMetricTol = 1e-12;
constexpr double kHandMacroF1 = 0.69697;
constexpr double kHandTol = 1e-5;
constexpr double kGradRelTol = 1e-4;
constexpr double kSizeRelTol = 1e-3;
constexpr double kFixedListBalancedMax = 0.05;
constexpr double kFixedListImbalancedMin = 0.95;
constexpr double kStabilityMax = 0.01;
constexpr double kWeakGainMin = 0.10;
constexpr double kOodBenignMin = 0.05;
constexpr const char* kFixedListFamily = "listword";

struct Outcome {
  bool pass = false;
  std::string detail;
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

fs::path config_dir() { return fs::path(NXBENCH_CONFIG_DIR); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nxbench");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

using Table = std::vector<std::map<std::string, std::string>>;

Table read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  Table t;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    t.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------

Outcome class_weight_formula() {
  CounterRng rng(derive_key(1, "acceptance-weights"));
  double worst = 0.0;
  bool ones = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::map<std::string, std::int64_t> counts;
    const int K = 2 + static_cast<int>(rng.below(30));
    for (int c = 0; c < K; ++c) counts["c" + std::to_string(c)] = 1 + rng.between(0, 2000000);
    const double gamma = trial % 10 == 0 ? 0.0 : rng.uniform();
    const auto table = class_weights(counts, gamma);
    const auto oracle = nxtest::weights_oracle(counts, gamma);
    for (const auto& [c, exact] : oracle) {
      const double w = table.weight(c);
      const double rel = static_cast<double>(abs((nxtest::Big(w) - exact) / exact));
      worst = std::max(worst, rel);
      if (gamma == 0.0 && w != 1.0) ones = false;
    }
  }
  return {worst < kWeightRelTol && ones, "max rel err " + fmt(worst) + (ones ? ", gamma 0 all ones" : ", gamma 0 not ones")};
}

Outcome set_builder_arithmetic() {
  const auto cat = full_scale_catalog();
  const auto mb = plan_multiclass(cat, Scenario::m_balanced);
  const auto mi = plan_multiclass(cat, Scenario::m_imbalanced);
  const auto bi = plan_binary_imbalanced(cat);
  const double train_rel = std::abs(double(bi.train_total()) - 1045648.0) / 1045648.0;
  const double test_rel = std::abs(double(bi.test_total()) - 31440.0) / 31440.0;
  const bool ok = mb.samples == 470000 && mb.classes == 47 && mi.samples == 548544 && mi.classes == 92 &&
                  train_rel < kSizeRelTol && test_rel < kSizeRelTol;
  return {ok, "M-Balanced " + std::to_string(mb.samples) + "/" + std::to_string(mb.classes) + ", M-Imbalanced " +
                  std::to_string(mi.samples) + "/" + std::to_string(mi.classes) + ", B-Imbalanced train " +
                  std::to_string(bi.train_total()) + " (" + fmt(train_rel) + ") test " +
                  std::to_string(bi.test_total()) + " (" + fmt(test_rel) + ")"};
}

Outcome cv_protocol() {
  CounterRng rng(derive_key(3, "acceptance-cv"));
  int datasets = 0;
  long violations = 0;
  for (int trial = 0; trial < 40; ++trial, ++datasets) {
    const int K = 1 + static_cast<int>(rng.below(20));
    const auto n = 1 + static_cast<std::size_t>(rng.below(5000));
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    const auto plan = make_folds(labels, K, 5, 5, rng());
    std::vector<std::size_t> m(static_cast<std::size_t>(K));
    for (int l : labels) ++m[static_cast<std::size_t>(l)];
    for (int r = 0; r < 5; ++r) {
      std::vector<std::set<std::size_t>> covered(static_cast<std::size_t>(K));
      for (int f = 0; f < 5; ++f) {
        const auto test = plan.test_indices(r, f);
        const auto train = plan.train_indices(r, f);
        std::set<std::size_t> t(test.begin(), test.end());
        if (t.size() != test.size() || test.size() + train.size() != n) ++violations;
        for (auto i : train) violations += t.count(i);
        std::vector<std::size_t> per(static_cast<std::size_t>(K));
        for (auto i : test) {
          const auto c = static_cast<std::size_t>(labels[i]);
          if (!covered[c].insert(i).second) ++violations;
          ++per[c];
        }
        for (std::size_t c = 0; c < m.size(); ++c)
          if (per[c] != m[c] / 5 && per[c] != (m[c] + 4) / 5) ++violations;
      }
      for (std::size_t c = 0; c < m.size(); ++c)
        if (covered[c].size() != m[c]) ++violations;
    }
  }
  return {violations == 0, std::to_string(datasets) + " datasets, " + std::to_string(violations) + " violations"};
}

Outcome metric_oracle() {
  CounterRng rng(derive_key(4, "acceptance-metrics"));
  double worst = 0.0;
  long count_errors = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 2 + static_cast<int>(rng.below(10));
    const auto n = static_cast<std::size_t>(rng.below(200));
    std::vector<int> t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      y[i] = rng.uniform() < 0.5 ? t[i] : static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    }
    std::vector<std::string> cls;
    for (int c = 0; c < K; ++c) cls.push_back("c" + std::to_string(c));
    const auto m = confusion(t, y, cls);
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        long brute = 0;
        for (std::size_t i = 0; i < n; ++i) brute += t[i] == a && y[i] == b;
        count_errors += brute != m.counts(a, b);
      }
    const auto s = prf_scores(m);
    const auto o = nxtest::prf_oracle(t, y, K);
    for (int c = 0; c < K; ++c) {
      const auto& pc = s.per_class[static_cast<std::size_t>(c)];
      worst = std::max({worst, std::abs(pc.precision - o.precision[c]), std::abs(pc.recall - o.recall[c]),
                        std::abs(pc.f1 - o.f1[c])});
    }
    worst = std::max(worst, std::abs(s.macro_f1 - o.macro_f1));
  }
  ConfusionMatrix hand{{"a", "b"}, CountMatrix(2, 2)};
  hand.counts << 8, 2, 4, 6;
  const double f1 = prf_scores(hand).macro_f1;
  const bool ok = worst < kMetricTol && count_errors == 0 && std::abs(f1 - kHandMacroF1) < kHandTol;
  return {ok, "max abs err " + fmt(worst) + ", count mismatches " + std::to_string(count_errors) +
                  ", hand macro-f1 " + fmt(f1)};
}

Outcome gradient_check() {
  Mlp<double> net({9, 7, 5, 4}, 12);
  CounterRng rng(derive_key(5, "acceptance-grad"));
  // The output layer starts at zero; randomize everything so no gradient is trivially zero.
  for (auto& W : net.weights()) W = W.unaryExpr([&](double) { return rng.uniform() - 0.5; });
  for (auto& b : net.biases()) b = b.unaryExpr([&](double) { return 0.2 * (rng.uniform() - 0.5); });
  Eigen::MatrixXd X(5, 9);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = 2.0 * rng.uniform() - 1.0;
  const std::vector<int> y{0, 3, 1, 2, 3};
  Eigen::VectorXd w(5);
  w << 1.0, 2.0, 0.5, 1.5, 3.0;
  Mlp<double>::Gradient g;
  net.loss_and_gradient(X, y, w, &g);
  double worst = 0.0;
  const double h = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const auto l = rng.below(net.weights().size());
    auto& W = net.weights()[l];
    const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(W.rows())));
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(W.cols())));
    const double saved = W(i, j);
    W(i, j) = saved + h;
    const double up = net.loss_and_gradient(X, y, w, nullptr);
    W(i, j) = saved - h;
    const double down = net.loss_and_gradient(X, y, w, nullptr);
    W(i, j) = saved;
    const double numeric = (up - down) / (2 * h);
    const double analytic = g.weights[l](i, j);
    worst = std::max(worst, std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-8}));
  }
  return {worst < kGradRelTol, "max rel err " + fmt(worst)};
}

// Binary runs are shared by the replication and determinism checks.
struct BinaryRuns {
  nxtest::TempDir dir{"acceptance"};
  int first = -1, second = -1;
};

Outcome binary_replication(BinaryRuns& runs) {
  const auto cfg = (config_dir() / "binary" / "binary.ini").string();
  runs.first = cli({"experiment", "binary", "--config", cfg, "--out", (runs.dir / "run1").string(), "--jobs",
                    std::to_string(jobs())});
  if (runs.first != 0) return {false, "experiment binary exited " + std::to_string(runs.first)};
  const auto summary = read_csv(runs.dir / "run1" / "binary_summary.csv");
  const auto families = read_csv(runs.dir / "run1" / "binary_families.csv");

  bool ok = true;
  std::ostringstream detail;
  for (const std::string model : {"forest", "neural"}) {
    const std::map<std::string, std::string>* bal = nullptr;
    const std::map<std::string, std::string>* imb = nullptr;
    for (const auto& r : summary) {
      if (r.at("model") != model) continue;
      (r.at("training") == "balanced" ? bal : imb) = &r;
    }
    if (!bal || !imb) return {false, "summary lacks rows for " + model};
    auto num = [](const std::map<std::string, std::string>& r, const std::string& k) { return std::stod(r.at(k)); };

    double fl_bal = -1, fl_imb = -1;
    for (const auto& f : families)
      if (f.at("family") == kFixedListFamily) {
        fl_bal = std::stod(f.at(model + "_balanced"));
        fl_imb = std::stod(f.at(model + "_imbalanced"));
      }
    const bool a = fl_bal >= 0 && fl_bal < kFixedListBalancedMax && fl_imb >= kFixedListImbalancedMin;
    const double benign_diff =
        std::abs(num(*bal, "benign_recall_balanced_test") - num(*imb, "benign_recall_balanced_test"));
    const double well_diff =
        std::abs(num(*bal, "malicious_recall_balanced_test") - num(*imb, "malicious_recall_balanced_test"));
    const bool b = benign_diff <= kStabilityMax && well_diff <= kStabilityMax;
    const double weak_bal = num(*bal, "malicious_recall_imbalanced_test");
    const double weak_imb = num(*imb, "malicious_recall_imbalanced_test");
    const bool c = weak_imb - weak_bal >= kWeakGainMin;
    ok = ok && a && b && c;
    detail << model << ": (a) " << kFixedListFamily << ' ' << fmt(fl_bal) << "->" << fmt(fl_imb) << (a ? "" : " FAIL")
           << " (b) benign " << fmt(benign_diff) << " well " << fmt(well_diff) << (b ? "" : " FAIL") << " (c) weak "
           << fmt(weak_bal) << "->" << fmt(weak_imb) << (c ? "" : " FAIL") << "; ";
  }
  return {ok, detail.str()};
}

Outcome gamma_sweep() {
  const auto c = load_run_config(config_dir() / "gamma" / "gamma.ini");
  const auto corpus = materialize_corpus(c, jobs());
  const auto ds = build_multiclass(corpus.catalog, corpus.pools, corpus.benign, c.multiclass_scenario,
                                   c.multiclass_quota, c.master_seed);
  const auto r = run_gamma_sweep(ds, c.gammas, c.spec_for(c.multiclass_model), c.cv_reps, c.cv_folds,
                                 c.master_seed, jobs());
  double base = -1, best_inner = -1, best_gamma = -1;
  for (const auto& row : r.rows) {
    if (row.gamma == 0.0) base = row.macro_f1;
    if (row.gamma > 0.05 && row.gamma < 0.95 && row.macro_f1 > best_inner) {
      best_inner = row.macro_f1;
      best_gamma = row.gamma;
    }
  }
  const long flagged = std::count_if(r.rows.begin(), r.rows.end(), [](const GammaRow& x) { return x.best; });
  const bool ok = base >= 0 && best_inner > base && flagged == 1;
  return {ok, std::to_string(ds.num_classes()) + " classes; gamma 0 f1 " + fmt(base) + ", best inner gamma " +
                  fmt(best_gamma) + " f1 " + fmt(best_inner) + ", reported best gamma " +
                  fmt(r.rows[r.best_index].gamma)};
}

Outcome ood_replication() {
  const auto c = load_run_config(config_dir() / "ood" / "ood.ini");
  const auto corpus = materialize_corpus(c, jobs());
  const auto ds = build_multiclass(corpus.catalog, corpus.pools, corpus.benign, c.multiclass_scenario,
                                   c.multiclass_quota, c.master_seed);
  const auto r = run_ood_experiment(ds, corpus.catalog, c.ood_reps, c.spec_for(c.ood_model, c.gamma),
                                    c.master_seed, jobs());
  const bool ok = r.benign_fraction_excluded > kOodBenignMin && r.benign_fraction_included < r.benign_fraction_excluded;
  return {ok, std::to_string(r.models) + " models; benign fraction excluded " + fmt(r.benign_fraction_excluded) +
                  ", included " + fmt(r.benign_fraction_included)};
}

Outcome determinism(BinaryRuns& runs) {
  if (runs.first != 0) return {false, "first binary run did not finish"};
  const auto cfg = (config_dir() / "binary" / "binary.ini").string();
  // A different job count must not matter.
  const int other_jobs = jobs() == 1 ? 2 : 1;
  runs.second = cli({"experiment", "binary", "--config", cfg, "--out", (runs.dir / "run2").string(), "--jobs",
                     std::to_string(other_jobs)});
  if (runs.second != 0) return {false, "second run exited " + std::to_string(runs.second)};
  int compared = 0;
  for (const std::string name : {"binary_summary.csv", "binary_families.csv"}) {
    if (read_text(runs.dir / "run1" / name) != read_text(runs.dir / "run2" / name)) return {false, name + " differs"};
    ++compared;
  }
  return {true, std::to_string(compared) + " CSVs byte-identical (jobs " + std::to_string(jobs()) + " vs " +
                    std::to_string(other_jobs) + ")"};
}

}  // namespace

int main() {
  BinaryRuns runs;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 class-weight formula", class_weight_formula},
      {"2 set-builder arithmetic", set_builder_arithmetic},
      {"3 cross-validation protocol", cv_protocol},
      {"4 metric oracle", metric_oracle},
      {"5 gradient check", gradient_check},
      {"6 binary replication", [&] { return binary_replication(runs); }},
      {"7 gamma sweep", gamma_sweep},
      {"8 out-of-distribution", ood_replication},
      {"9 determinism", [&] { return determinism(runs); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
