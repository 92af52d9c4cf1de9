#include "nxbench/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nxbench/error.hpp"
#include "nxbench/experiments.hpp"
#include "nxbench/features.hpp"
#include "nxbench/reports.hpp"
#include "nxbench/run_config.hpp"
#include "nxbench/text.hpp"

namespace nxbench {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out;
  bool force = false;
  std::string which;
  std::string scenario;
  std::string model_kind;
  std::string model_file;
  std::string input;
  std::string dir;
};

/// Files go to a sibling ".partial" directory that is renamed into place
/// only after the manifest is written; a failed run leaves nothing behind.
class OutputDir {
 public:
  OutputDir(const fs::path& target, bool force) : target_(target) {
    if (target_.empty()) throw UsageError("--out is required");
    if (fs::exists(target_) && !force) {
      throw UsageError("output " + target_.string() + " exists; pass --force to replace it");
    }
    partial_ = target_;
    partial_ += ".partial";
    fs::remove_all(partial_);
    fs::create_directories(partial_);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (committed_) return;
    std::error_code ec;
    fs::remove_all(partial_, ec);
  }

  void write(const std::string& name, const std::string& text) {
    const auto path = partial_ / name;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_text(path, text);
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }
  fs::path path(const std::string& name) const { return partial_ / name; }

  void commit(Manifest manifest) {
    manifest.files = files_;
    write_text(partial_ / kManifestName, manifest.str());
    if (fs::exists(target_)) fs::remove_all(target_);
    fs::rename(partial_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path partial_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

RunConfig config_from(const Options& opt) {
  if (opt.config.empty()) throw UsageError("--config is required");
  auto c = load_run_config(opt.config);
  if (opt.seed) c.set_seed(*opt.seed);
  return c;
}

Manifest manifest_for(const std::string& command, const RunConfig& c, const Corpus& corpus) {
  Manifest m;
  m.command = command;
  m.config_path = c.config_path;
  m.config_hash = c.config_hash;
  m.master_seed = c.master_seed;
  m.catalog_checksum = corpus.catalog.checksum();
  return m;
}

std::string samples_csv(std::span<const Sample> samples) {
  std::ostringstream os;
  os << "domain,label\n";
  for (const auto& s : samples) os << s.domain.text() << ',' << s.label.name() << '\n';
  return os.str();
}

std::string support_table(const FamilyCatalog& catalog) {
  std::ostringstream os;
  os << "family,support,group\n";
  int well = 0, weak = 0;
  for (const auto& e : catalog.entries()) {
    os << e.id << ',' << e.support << ',' << (e.group == Group::well ? "well" : "weak") << '\n';
    (e.group == Group::well ? well : weak) += 1;
  }
  os << "# well " << well << ", weak " << weak << ", threshold " << catalog.threshold() << '\n';
  return os.str();
}

Scenario scenario_arg(const std::string& s) {
  try {
    return scenario_from_string(s);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

int cmd_corpus(const Options& opt) {
  const auto c = config_from(opt);
  const auto corpus = materialize_corpus(c, opt.jobs);
  OutputDir out(opt.out, opt.force);
  FamilyCatalog written(c.threshold);
  for (auto e : corpus.catalog.entries()) {
    const auto file = "families/" + e.id + ".txt";
    std::ostringstream os;
    for (const auto& s : corpus.pools.at(e.id)) os << s.domain.text() << '\n';
    out.write(file, os.str());
    e.generator.reset();
    e.feed = file;
    written.add(std::move(e));
  }
  std::ostringstream benign;
  for (const auto& s : corpus.benign) benign << s.domain.text() << '\n';
  out.write("benign.txt", benign.str());
  out.write("catalog.ini", serialize_catalog(written));
  const auto table = support_table(corpus.catalog);
  out.write("supports.csv", table);
  out.commit(manifest_for("corpus", c, corpus));
  std::cout << table;
  return 0;
}

int cmd_dataset(const Options& opt) {
  const auto c = config_from(opt);
  const auto scenario = scenario_arg(opt.scenario);
  const auto corpus = materialize_corpus(c, opt.jobs);
  OutputDir out(opt.out, opt.force);
  Manifest m = manifest_for("dataset " + to_string(scenario), c, corpus);
  if (scenario == Scenario::b_imbalanced || scenario == Scenario::b_balanced) {
    const auto pairs = scenario == Scenario::b_imbalanced
                           ? build_binary_imbalanced(corpus.catalog, corpus.pools, corpus.benign, c.imbalanced)
                           : build_binary_balanced(corpus.catalog, corpus.pools, corpus.benign, c.balanced);
    for (const auto& p : pairs) {
      const auto r = std::to_string(p.repetition);
      out.write("rep" + r + "_train.csv", samples_csv(p.train));
      out.write("rep" + r + "_test.csv", samples_csv(p.test));
      m.flags.insert(m.flags.end(), p.flags.begin(), p.flags.end());
    }
  } else {
    const auto ds = build_multiclass(corpus.catalog, corpus.pools, corpus.benign, scenario, c.multiclass_quota,
                                     c.master_seed);
    out.write("dataset.csv", samples_csv(ds.samples));
    std::cout << "samples " << ds.size() << ", classes " << ds.num_classes() << '\n';
  }
  out.commit(std::move(m));
  return 0;
}

int cmd_train(const Options& opt) {
  const auto c = config_from(opt);
  const auto scenario = scenario_arg(opt.scenario);
  ModelKind kind;
  try {
    kind = model_kind_from_string(opt.model_kind);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto corpus = materialize_corpus(c, opt.jobs);
  auto spec = c.spec_for(kind, c.gamma);
  spec.forest.jobs = opt.jobs;
  Model model;
  if (scenario == Scenario::b_imbalanced || scenario == Scenario::b_balanced) {
    auto imb = c.imbalanced;
    auto bal = c.balanced;
    imb.reps = bal.reps = 1;
    const auto pairs = scenario == Scenario::b_imbalanced
                           ? build_binary_imbalanced(corpus.catalog, corpus.pools, corpus.benign, imb)
                           : build_binary_balanced(corpus.catalog, corpus.pools, corpus.benign, bal);
    const auto ds = binary_dataset(pairs.front().train);
    model = train_model(spec, Task::binary, ds.samples, ds.labels, ds.classes, c.master_seed);
  } else {
    const auto ds = build_multiclass(corpus.catalog, corpus.pools, corpus.benign, scenario, c.multiclass_quota,
                                     c.master_seed);
    model = train_model(spec, Task::multiclass, ds.samples, ds.labels, ds.classes, c.master_seed);
  }
  OutputDir out(opt.out, opt.force);
  out.write("model.nxm", serialize_model(model));
  auto m = manifest_for("train " + to_string(scenario) + " " + to_string(kind), c, corpus);
  m.job_seeds.emplace_back("model", c.master_seed);
  out.commit(std::move(m));
  return 0;
}

int cmd_experiment(const Options& opt) {
  const auto c = config_from(opt);
  const auto corpus = materialize_corpus(c, opt.jobs);
  std::string which = opt.which;
  std::replace(which.begin(), which.end(), '_', '-');
  OutputDir out(opt.out, opt.force);
  Manifest m = manifest_for("experiment " + which, c, corpus);
  if (which == "binary") {
    BinaryExperimentConfig bc;
    bc.imbalanced = c.imbalanced;
    bc.balanced = c.balanced;
    for (auto k : c.binary_models) bc.models.push_back(c.spec_for(k));
    bc.jobs = opt.jobs;
    const auto r = run_binary_experiment(corpus.catalog, corpus.pools, corpus.benign, bc);
    out.write("binary_summary.csv", binary_summary_csv(r));
    out.write("binary_families.csv", binary_family_csv(r));
    m.job_seeds = r.job_seeds;
    m.flags = r.flags;
    std::cout << binary_summary_csv(r);
  } else {
    const auto ds = build_multiclass(corpus.catalog, corpus.pools, corpus.benign, c.multiclass_scenario,
                                     c.multiclass_quota, c.master_seed);
    if (which == "multiclass") {
      const auto spec = c.spec_for(c.multiclass_model, c.gamma);
      const auto plan = make_folds(ds.labels, ds.num_classes(), c.cv_reps, c.cv_folds, c.master_seed);
      RunMetadata meta;
      meta.gamma = c.gamma;
      meta.model_id = spec.id();
      const auto reports = cross_validate(ds, plan, make_trainer(spec, Task::multiclass, ds.classes),
                                          c.master_seed, meta, opt.jobs);
      const auto agg = aggregate(reports);
      out.write("class_report.csv", class_report_csv(agg));
      out.write("confusion.csv", confusion_csv(agg.confusion));
      std::ostringstream runs;
      runs << "repetition,fold,seed,macro_precision,macro_recall,macro_f1\n";
      for (const auto& r : reports) {
        runs << r.meta.repetition << ',' << r.meta.fold << ',' << r.meta.seed << ','
             << format_fixed(r.scores.macro_precision, 6) << ',' << format_fixed(r.scores.macro_recall, 6) << ','
             << format_fixed(r.scores.macro_f1, 6) << '\n';
        m.job_seeds.emplace_back("cv/" + std::to_string(r.meta.repetition) + "/" + std::to_string(r.meta.fold),
                                 r.meta.seed);
      }
      out.write("runs.csv", runs.str());
      m.flags = plan.flags;
      std::cout << "macro f1 " << format_fixed(agg.macro_f1, 6) << '\n';
    } else if (which == "gamma-sweep") {
      const auto spec = c.spec_for(c.multiclass_model);
      const auto r = run_gamma_sweep(ds, c.gammas, spec, c.cv_reps, c.cv_folds, c.master_seed, opt.jobs);
      out.write("gamma_sweep.csv", gamma_sweep_csv(r));
      out.write("best_class_report.csv", class_report_csv(r.aggregates[r.best_index]));
      out.write("best_confusion.csv", confusion_csv(r.aggregates[r.best_index].confusion));
      for (int rep = 0; rep < c.cv_reps; ++rep)
        for (int f = 0; f < c.cv_folds; ++f)
          m.job_seeds.emplace_back("cv/" + std::to_string(rep) + "/" + std::to_string(f),
                                   fold_seed(c.master_seed, rep, f));
      m.flags = r.folds.flags;
      std::cout << gamma_sweep_csv(r);
    } else if (which == "ood") {
      const auto r = run_ood_experiment(ds, corpus.catalog, c.ood_reps, c.spec_for(c.ood_model, c.gamma),
                                        c.master_seed, opt.jobs);
      out.write("ood_distribution.csv", ood_distribution_csv(r));
      out.write("ood_summary.csv", ood_summary_csv(r));
      m.job_seeds = r.job_seeds;
      std::cout << ood_summary_csv(r);
    } else {
      throw UsageError("unknown experiment '" + opt.which + "'");
    }
  }
  out.commit(std::move(m));
  return 0;
}

int cmd_classify(const Options& opt) {
  if (opt.model_file.empty() || opt.input.empty()) throw UsageError("classify needs --model and --input");
  Model model;
  try {
    model = load_model(opt.model_file);
  } catch (const LoadError& e) {
    throw LoadError(std::string("refusing to classify: ") + e.what());
  }
  std::ifstream in(opt.input);
  if (!in) throw IoError("cannot read " + opt.input);
  std::vector<std::string> lines;
  std::vector<DomainName> valid;
  std::vector<int> slot;  // index into valid, -1 for invalid rows
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
    if (auto d = DomainName::try_parse(line)) {
      slot.push_back(static_cast<int>(valid.size()));
      valid.push_back(*d);
    } else {
      slot.push_back(-1);
    }
  }
  std::vector<Prediction> preds;
  if (!valid.empty()) preds = predict(model, model.inputs_for(valid));
  std::ostringstream os;
  os << "domain,predicted_class,probability\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (slot[i] < 0) {
      os << lines[i] << ",invalid,\n";
      continue;
    }
    const auto& p = preds[static_cast<std::size_t>(slot[i])];
    os << lines[i] << ',' << model.classes[static_cast<std::size_t>(p.label)] << ','
       << format_fixed(p.probabilities(p.label), 6) << '\n';
  }
  if (opt.out.empty()) {
    std::cout << os.str();
    return 0;
  }
  if (fs::exists(opt.out) && !opt.force) throw UsageError("output " + opt.out + " exists; pass --force to replace it");
  const fs::path tmp = opt.out + ".partial";
  write_text(tmp, os.str());
  fs::rename(tmp, opt.out);
  return 0;
}

int cmd_report(const Options& opt) {
  if (opt.dir.empty()) throw UsageError("report needs --dir");
  const fs::path dir(opt.dir);
  if (!fs::exists(dir / kManifestName)) throw UsageError(dir.string() + " has no manifest; the run did not finish");
  const auto manifest = read_text(dir / kManifestName);
  std::cout << manifest;
  bool in_files = false;
  std::istringstream ms(manifest);
  for (std::string line; std::getline(ms, line);) {
    if (line.rfind('[', 0) == 0) {
      in_files = line == "[files]";
      continue;
    }
    if (!in_files || line.empty() || line.size() < 4 || line.substr(line.size() - 4) != ".csv") continue;
    std::cout << "\n== " << line << '\n' << read_text(dir / line);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"nxbench: class-imbalance workbench for NXDomain classifiers"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* sub, bool needs_config, bool needs_out) {
    auto* c = sub->add_option("--config", opt.config, "experiment config file");
    if (needs_config) c->required();
    sub->add_option("--seed", opt.seed, "master seed, overrides the config");
    sub->add_option("--jobs", opt.jobs, "parallel jobs")->check(CLI::PositiveNumber);
    auto* o = sub->add_option("--out", opt.out, "output directory");
    if (needs_out) o->required();
    sub->add_flag("--force", opt.force, "replace existing output");
  };

  auto* corpus = app.add_subcommand("corpus", "generate families and the benign pool");
  common(corpus, true, true);
  auto* dataset = app.add_subcommand("dataset", "build a scenario's sample sets");
  common(dataset, true, true);
  dataset->add_option("--scenario", opt.scenario, "b_balanced|b_imbalanced|m_balanced|m_imbalanced")->required();
  auto* train = app.add_subcommand("train", "train one model and save it");
  common(train, true, true);
  train->add_option("--scenario", opt.scenario, "training scenario")->required();
  train->add_option("--model", opt.model_kind, "forest|margin|neural")->required();
  auto* experiment = app.add_subcommand("experiment", "run an experiment program");
  common(experiment, true, true);
  experiment->add_option("which", opt.which, "binary|multiclass|gamma-sweep|ood")
      ->required()
      ->check(CLI::IsMember({"binary", "multiclass", "gamma-sweep", "gamma_sweep", "ood"}));
  auto* classify = app.add_subcommand("classify", "label domains with a saved model");
  classify->add_option("--model", opt.model_file, "model file")->required();
  classify->add_option("--input", opt.input, "plain domain list")->required();
  classify->add_option("--out", opt.out, "output CSV (default stdout)");
  classify->add_flag("--force", opt.force, "replace existing output");
  auto* report = app.add_subcommand("report", "print a finished run's manifest and CSVs");
  report->add_option("--dir", opt.dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (corpus->parsed()) return cmd_corpus(opt);
    if (dataset->parsed()) return cmd_dataset(opt);
    if (train->parsed()) return cmd_train(opt);
    if (experiment->parsed()) return cmd_experiment(opt);
    if (classify->parsed()) return cmd_classify(opt);
    if (report->parsed()) return cmd_report(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace nxbench
