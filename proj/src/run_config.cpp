#include "nxbench/run_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nxbench/error.hpp"
#include "nxbench/feeds.hpp"
#include "nxbench/generators.hpp"
#include "nxbench/ini.hpp"
#include "nxbench/parallel.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError("bad value for '" + key + "': '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("bad boolean for '" + key + "': '" + value + "'");
}

ModelKind parse_kind(const std::string& value) {
  try {
    return model_kind_from_string(value);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

/// Reads the keys a section may hold and rejects anything else, so typos
/// fail loudly instead of silently keeping a default.
class SectionReader {
 public:
  SectionReader(const IniDocument& doc, const std::string& name) : name_(name) {
    if (const auto* s = doc.find(name)) {
      for (const auto& [k, v] : s->entries) values_[k] = v;
    }
  }
  ~SectionReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw UsageError("unknown key '" + k + "' in [" + name_ + "]");
  }

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }
  template <typename T>
  void number(const std::string& key, T& target) {
    if (const auto* v = raw(key)) target = parse_number<T>(name_ + "." + key, *v);
  }
  void boolean(const std::string& key, bool& target) {
    if (const auto* v = raw(key)) target = parse_bool(name_ + "." + key, *v);
  }
  void kind(const std::string& key, ModelKind& target) {
    if (const auto* v = raw(key)) target = parse_kind(*v);
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

ClassifierSpec RunConfig::spec_for(ModelKind kind, double g) const {
  ClassifierSpec spec;
  spec.kind = kind;
  spec.forest = forest;
  spec.margin = margin;
  spec.neural = neural;
  spec.gamma = g;
  return spec;
}

void RunConfig::set_seed(std::uint64_t seed) {
  master_seed = seed;
  imbalanced.master_seed = seed;
  balanced.master_seed = seed;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  IniDocument doc;
  try {
    doc = IniDocument::parse(text);
  } catch (const Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> known{"run", "binary", "multiclass", "ood", "forest", "margin", "neural"};
  for (const auto& s : doc.sections())
    if (!known.count(s.name)) throw UsageError("unknown config section [" + s.name + "]");

  RunConfig c;
  c.config_hash = fnv1a(text);
  {
    SectionReader r(doc, "run");
    const auto* cat = r.raw("catalog");
    if (!cat) throw UsageError("config needs run.catalog");
    c.catalog_path = resolve(base_dir, *cat);
    r.number("threshold", c.threshold);
    r.number("seed", c.master_seed);
    r.number("benign", c.benign_count);
    if (const auto* f = r.raw("benign_feed")) c.benign_feed = resolve(base_dir, *f);
  }
  {
    SectionReader r(doc, "binary");
    r.number("quota", c.imbalanced.quota);
    r.number("test_frac", c.imbalanced.test_frac);
    r.number("reps", c.imbalanced.reps);
    r.number("balanced_quota", c.balanced.quota);
    r.number("balanced_test", c.balanced.test_per_family);
    if (const auto* m = r.raw("models")) {
      c.binary_models.clear();
      for (const auto& k : split_list(*m)) c.binary_models.push_back(parse_kind(k));
      if (c.binary_models.empty()) throw UsageError("binary.models is empty");
    }
    c.balanced.reps = c.imbalanced.reps;
  }
  {
    SectionReader r(doc, "multiclass");
    if (const auto* s = r.raw("scenario")) {
      try {
        c.multiclass_scenario = scenario_from_string(*s);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    r.number("quota", c.multiclass_quota);
    r.number("reps", c.cv_reps);
    r.number("folds", c.cv_folds);
    r.kind("model", c.multiclass_model);
    r.number("gamma", c.gamma);
    if (const auto* g = r.raw("gammas")) {
      for (const auto& v : split_list(*g)) c.gammas.push_back(parse_number<double>("multiclass.gammas", v));
    }
  }
  {
    SectionReader r(doc, "ood");
    r.number("reps", c.ood_reps);
    r.kind("model", c.ood_model);
  }
  {
    SectionReader r(doc, "forest");
    r.number("trees", c.forest.n_trees);
    r.number("max_depth", c.forest.max_depth);
    r.number("min_samples_split", c.forest.min_samples_split);
    int fps = 0;
    r.number("features_per_split", fps);
    if (fps > 0) c.forest.features_per_split = fps;
    r.boolean("class_weights", c.forest.use_class_weights);
  }
  {
    SectionReader r(doc, "margin");
    r.number("C", c.margin.C);
    r.number("epochs", c.margin.epochs);
    r.number("steps_per_epoch", c.margin.steps_per_epoch);
    r.boolean("class_weights", c.margin.use_class_weights);
  }
  {
    SectionReader r(doc, "neural");
    if (const auto* h = r.raw("hidden")) {
      c.neural.hidden.clear();
      for (const auto& v : split_list(*h)) c.neural.hidden.push_back(parse_number<int>("neural.hidden", v));
    }
    r.number("learning_rate", c.neural.learning_rate);
    r.number("batch_size", c.neural.batch_size);
    r.number("epochs", c.neural.epochs);
  }
  if (c.gammas.empty()) {
    for (int i = 0; i <= 10; ++i) c.gammas.push_back(i / 10.0);
  }
  for (double g : c.gammas)
    if (!(g >= 0.0 && g <= 1.0)) throw UsageError("gamma values must lie in [0, 1]");
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw UsageError("gamma must lie in [0, 1]");
  if (c.imbalanced.reps < 1 || c.cv_reps < 1 || c.ood_reps < 1) throw UsageError("reps must be >= 1");
  if (c.cv_folds < 2) throw UsageError("folds must be >= 2");
  if (c.imbalanced.quota < 1 || c.balanced.quota < 1 || c.multiclass_quota < 1) throw UsageError("quotas must be >= 1");
  if (c.benign_count < 1) throw UsageError("run.benign must be >= 1");
  if (!std::filesystem::exists(c.catalog_path)) throw UsageError("catalog not found: " + c.catalog_path.string());
  if (c.benign_feed && !std::filesystem::exists(*c.benign_feed)) {
    throw UsageError("benign feed not found: " + c.benign_feed->string());
  }
  c.set_seed(c.master_seed);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  auto c = parse_run_config(os.str(), path.parent_path());
  c.config_path = path;
  return c;
}

Corpus materialize_corpus(const RunConfig& config, int jobs) {
  FamilyCatalog loaded;
  try {
    loaded = load_catalog(config.catalog_path, config.threshold);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  const auto& entries = loaded.entries();
  std::vector<std::vector<Sample>> generated(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const auto& e = entries[i];
    if (e.feed) {
      generated[i] = ingest_feed(*e.feed, FeedFormat::plain_lines, ClassLabel::family(e.id)).samples;
    } else {
      generated[i] = generate_family(*e.generator, e.support, e.id);
    }
  });
  Corpus corpus{FamilyCatalog(config.threshold), {}, {}};
  std::set<DomainName> malicious;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto e = entries[i];
    e.support = static_cast<std::int64_t>(generated[i].size());
    if (e.support < 1) throw BuildError("family '" + e.id + "' produced no samples");
    for (const auto& s : generated[i]) malicious.insert(s.domain);
    corpus.pools[e.id] = std::move(generated[i]);
    corpus.catalog.add(std::move(e));
  }
  std::vector<Sample> benign;
  if (config.benign_feed) {
    benign = ingest_feed(*config.benign_feed, FeedFormat::plain_lines).samples;
  } else {
    benign = synthesize_benign(derive_key(config.master_seed, "benign-pool"), config.benign_count);
  }
  corpus.benign = sanitize_benign(benign, malicious);
  return corpus;
}

}  // namespace nxbench
