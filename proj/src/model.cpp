#include "nxbench/model.hpp"

#include <fstream>
#include <sstream>

#include "nxbench/error.hpp"
#include "nxbench/linalg.hpp"
#include "nxbench/rng.hpp"
#include "nxbench/text.hpp"

namespace nxbench {

namespace {

constexpr std::string_view kMagic = "nxbench-model";

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

class Writer {
 public:
  void line(const std::string& text) { out_ << text << '\n'; }

  template <typename Derived>
  void numbers(const std::string& key, const Eigen::DenseBase<Derived>& m) {
    out_ << key << ' ' << m.size();
    // Column-major order, matching Eigen's default storage.
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) out_ << ' ' << format_hex(m(i, j));
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw LoadError("model file truncated");
    return w;
  }

  void expect(std::string_view keyword) {
    const auto w = word();
    if (w != keyword) throw LoadError("expected '" + std::string(keyword) + "', found '" + w + "'");
  }

  long long integer() {
    const auto w = word();
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(w, &pos);
      if (pos != w.size()) throw LoadError("malformed integer '" + w + "'");
      return v;
    } catch (const std::logic_error&) {
      throw LoadError("malformed integer '" + w + "'");
    }
  }

  std::uint64_t unsigned_integer() {
    const auto w = word();
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(w, &pos);
      if (pos != w.size()) throw LoadError("malformed integer '" + w + "'");
      return v;
    } catch (const std::logic_error&) {
      throw LoadError("malformed integer '" + w + "'");
    }
  }

  double real() { return parse_hex_double(word()); }

  Eigen::MatrixXd matrix(std::string_view key, Eigen::Index rows, Eigen::Index cols) {
    expect(key);
    if (integer() != rows * cols) throw LoadError("size mismatch in '" + std::string(key) + "'");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = real();
    return m;
  }

  Eigen::VectorXd vector(std::string_view key, Eigen::Index size) { return matrix(key, size, 1); }

 private:
  std::istringstream in_;
};

void write_standardizer(Writer& w, const Standardizer<double>& s) {
  w.numbers("mean", s.mean);
  w.numbers("inv_scale", s.inv_scale);
}

Standardizer<double> read_standardizer(Reader& r, Eigen::Index d) {
  Standardizer<double> s;
  s.mean = r.vector("mean", d);
  s.inv_scale = r.vector("inv_scale", d);
  return s;
}

void write_forest(Writer& w, const ForestModel& f) {
  w.line("forest " + std::to_string(f.n_features) + " " + std::to_string(f.n_classes) + " " +
         std::to_string(f.trees.size()) + " " + std::to_string(f.params.max_depth) + " " +
         std::to_string(f.params.seed));
  for (const auto& t : f.trees) {
    w.line("tree " + std::to_string(t.nodes.size()) + " " + std::to_string(t.leaf_probabilities.cols()));
    for (const auto& n : t.nodes) {
      w.line("node " + std::to_string(n.feature) + " " + format_hex(n.threshold) + " " +
             std::to_string(n.left) + " " + std::to_string(n.right) + " " + std::to_string(n.leaf));
    }
    w.numbers("leaves", t.leaf_probabilities);
  }
}

ForestModel read_forest(Reader& r, int K) {
  ForestModel f;
  f.n_features = static_cast<int>(r.integer());
  f.n_classes = static_cast<int>(r.integer());
  if (f.n_classes != K) throw LoadError("forest class count disagrees with class list");
  const auto n_trees = r.integer();
  f.params.n_trees = static_cast<int>(n_trees);
  f.params.max_depth = static_cast<int>(r.integer());
  f.params.seed = r.unsigned_integer();
  if (n_trees < 0) throw LoadError("negative tree count");
  for (long long t = 0; t < n_trees; ++t) {
    r.expect("tree");
    const auto n_nodes = r.integer();
    const auto n_leaves = r.integer();
    if (n_nodes < 1 || n_leaves < 1) throw LoadError("empty tree");
    DecisionTree tree;
    for (long long i = 0; i < n_nodes; ++i) {
      r.expect("node");
      TreeNode n;
      n.feature = static_cast<int>(r.integer());
      n.threshold = r.real();
      n.left = static_cast<int>(r.integer());
      n.right = static_cast<int>(r.integer());
      n.leaf = static_cast<int>(r.integer());
      const bool leaf_ok = n.feature < 0 && n.leaf >= 0 && n.leaf < n_leaves;
      const bool split_ok = n.feature >= 0 && n.feature < f.n_features && n.left > i &&
                            n.left < n_nodes && n.right > i && n.right < n_nodes;
      if (!leaf_ok && !split_ok) throw LoadError("inconsistent tree node");
      tree.nodes.push_back(n);
    }
    tree.leaf_probabilities = r.matrix("leaves", K, static_cast<Eigen::Index>(n_leaves));
    f.trees.push_back(std::move(tree));
  }
  return f;
}

void write_margin(Writer& w, const MarginModel& m) {
  w.line("margin " + std::to_string(m.weights.cols()) + " " + std::to_string(m.weights.rows()) + " " +
         format_hex(m.params.C) + " " + std::to_string(m.params.epochs) + " " +
         std::to_string(m.params.seed) + " " + std::to_string(m.params.steps_per_epoch) + " " +
         (m.params.use_class_weights ? "1" : "0"));
  write_standardizer(w, m.standardizer);
  w.numbers("weights", m.weights);
  w.numbers("bias", m.bias);
}

MarginModel read_margin(Reader& r, int K) {
  MarginModel m;
  const auto d = r.integer();
  if (r.integer() != K) throw LoadError("margin class count disagrees with class list");
  m.params.C = r.real();
  m.params.epochs = static_cast<int>(r.integer());
  m.params.seed = r.unsigned_integer();
  m.params.steps_per_epoch = static_cast<int>(r.integer());
  m.params.use_class_weights = r.integer() != 0;
  m.standardizer = read_standardizer(r, d);
  m.weights = r.matrix("weights", K, d);
  m.bias = r.vector("bias", K);
  return m;
}

void write_neural(Writer& w, const NeuralModel& m) {
  const auto& sizes = m.net.layer_sizes();
  std::string head = "neural " + std::to_string(sizes.size());
  for (int s : sizes) head += " " + std::to_string(s);
  head += " " + format_hex(m.params.learning_rate) + " " + std::to_string(m.params.batch_size) +
          " " + std::to_string(m.params.epochs) + " " + std::to_string(m.params.seed) + " " +
          format_hex(m.gamma);
  w.line(head);
  write_standardizer(w, m.standardizer);
  w.numbers("class_weights", m.class_weights);
  for (std::size_t l = 0; l < m.net.weights().size(); ++l) {
    w.numbers("W", m.net.weights()[l]);
    w.numbers("b", m.net.biases()[l]);
  }
}

NeuralModel read_neural(Reader& r, int K) {
  NeuralModel m;
  const auto n_sizes = r.integer();
  if (n_sizes < 2 || n_sizes > 16) throw LoadError("implausible layer count");
  std::vector<int> sizes;
  for (long long i = 0; i < n_sizes; ++i) {
    const auto s = r.integer();
    if (s < 1 || s > 100000) throw LoadError("implausible layer size");
    sizes.push_back(static_cast<int>(s));
  }
  if (sizes.back() != K) throw LoadError("neural output width disagrees with class list");
  m.params.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
  m.params.learning_rate = r.real();
  m.params.batch_size = static_cast<int>(r.integer());
  m.params.epochs = static_cast<int>(r.integer());
  m.params.seed = r.unsigned_integer();
  m.gamma = r.real();
  m.standardizer = read_standardizer(r, sizes.front());
  m.class_weights = r.vector("class_weights", K);
  m.net = Mlp<double>(sizes, 0);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    m.net.weights()[l] = r.matrix("W", sizes[l + 1], sizes[l]);
    m.net.biases()[l] = r.vector("b", sizes[l + 1]);
  }
  return m;
}

}  // namespace

std::string to_string(Task t) { return t == Task::binary ? "binary" : "multiclass"; }

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::forest:
      return "forest";
    case ModelKind::margin:
      return "margin";
    case ModelKind::neural:
      return "neural";
  }
  return "unknown";
}

Task task_from_string(std::string_view s) {
  if (s == "binary") return Task::binary;
  if (s == "multiclass") return Task::multiclass;
  throw ArgumentError("unknown task '" + std::string(s) + "'");
}

ModelKind model_kind_from_string(std::string_view s) {
  if (s == "forest") return ModelKind::forest;
  if (s == "margin") return ModelKind::margin;
  if (s == "neural") return ModelKind::neural;
  throw ArgumentError("unknown model kind '" + std::string(s) + "'");
}

int input_dim(ModelKind kind) { return kind == ModelKind::neural ? kNeuralInputDim : kFeatureCount; }

ModelKind Model::kind() const { return static_cast<ModelKind>(impl.index()); }

Eigen::MatrixXd Model::inputs_for(std::span<const DomainName> domains) const {
  return kind() == ModelKind::neural ? neural_matrix(domains, reference)
                                     : feature_matrix(domains, reference);
}

Eigen::MatrixXd Model::inputs_for(std::span<const Sample> samples) const {
  return kind() == ModelKind::neural ? neural_matrix(samples, reference)
                                     : feature_matrix(samples, reference);
}

Eigen::MatrixXd predict_proba(const Model& model, const Eigen::MatrixXd& inputs) {
  const int expected = std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ForestModel>) return m.n_features;
        else if constexpr (std::is_same_v<T, MarginModel>) return static_cast<int>(m.standardizer.dim());
        else return m.net.input_dim();
      },
      model.impl);
  if (inputs.cols() != expected) {
    throw ArgumentError("input has " + std::to_string(inputs.cols()) + " columns, model expects " +
                        std::to_string(expected));
  }
  return std::visit([&](const auto& m) { return m.predict_proba(inputs); }, model.impl);
}

std::vector<Prediction> predict(const Model& model, const Eigen::MatrixXd& inputs) {
  const Eigen::MatrixXd P = predict_proba(model, inputs);
  std::vector<Prediction> out(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.probabilities = P.row(i).transpose();
    p.label = static_cast<int>(argmax(p.probabilities));
  }
  return out;
}

std::vector<int> predict_labels(const Model& model, const Eigen::MatrixXd& inputs) {
  const Eigen::MatrixXd P = predict_proba(model, inputs);
  std::vector<int> out(static_cast<std::size_t>(P.rows()));
  for (Eigen::Index i = 0; i < P.rows(); ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(argmax(P.row(i)));
  return out;
}

std::string serialize_model(const Model& model) {
  Writer w;
  w.line(std::string(kMagic) + " " + std::to_string(kModelFormatVersion));
  w.line("kind " + to_string(model.kind()));
  w.line("task " + to_string(model.task));
  w.line("registry " + hex64(feature_registry_checksum()));
  std::string classes = "classes " + std::to_string(model.classes.size());
  for (const auto& c : model.classes) {
    if (c.empty() || c.find_first_of(" \t\n\r") != std::string::npos) {
      throw ArgumentError("class name '" + c + "' cannot be serialized");
    }
    classes += " " + c;
  }
  w.line(classes);
  w.numbers("charfreq", model.reference.char_freq());
  std::string ranks = "ranks " + std::to_string(model.reference.rank_table().size());
  for (int r : model.reference.rank_table()) ranks += " " + std::to_string(r);
  w.line(ranks);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ForestModel>) write_forest(w, m);
        else if constexpr (std::is_same_v<T, MarginModel>) write_margin(w, m);
        else write_neural(w, m);
      },
      model.impl);
  w.line("end");
  std::string body = w.str();
  body += "checksum " + hex64(fnv1a(body)) + "\n";
  return body;
}

Model deserialize_model(const std::string& text, std::optional<Task> expected_task) {
  const std::string header = std::string(kMagic) + " ";
  if (text.rfind(header, 0) != 0) throw LoadError("not a model file (bad header)");
  const auto eol = text.find('\n');
  if (eol == std::string::npos) throw LoadError("model file truncated");
  if (text.substr(header.size(), eol - header.size()) != std::to_string(kModelFormatVersion)) {
    throw LoadError("unsupported model format version '" +
                    text.substr(header.size(), eol - header.size()) + "'");
  }
  const auto tag = text.rfind("checksum ");
  if (tag == std::string::npos || tag == 0 || text[tag - 1] != '\n') {
    throw LoadError("model file truncated (no checksum)");
  }
  std::string stored = text.substr(tag + 9);
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r')) stored.pop_back();
  if (stored != hex64(fnv1a(std::string_view(text).substr(0, tag)))) {
    throw LoadError("model file checksum mismatch");
  }

  Reader r(text.substr(eol + 1, tag - eol - 1));
  Model model;
  r.expect("kind");
  const ModelKind kind = [&] {
    try {
      return model_kind_from_string(r.word());
    } catch (const ArgumentError& e) {
      throw LoadError(e.what());
    }
  }();
  r.expect("task");
  try {
    model.task = task_from_string(r.word());
  } catch (const ArgumentError& e) {
    throw LoadError(e.what());
  }
  if (expected_task && *expected_task != model.task) {
    throw TaskMismatchError("model was trained for the " + to_string(model.task) +
                            " task, " + to_string(*expected_task) + " requested");
  }
  r.expect("registry");
  if (r.word() != hex64(feature_registry_checksum())) {
    throw LoadError("feature registry checksum mismatch");
  }
  r.expect("classes");
  const auto K = r.integer();
  if (K < 2 || K > 100000) throw LoadError("implausible class count");
  for (long long i = 0; i < K; ++i) model.classes.push_back(r.word());
  CharDistribution freq = r.vector("charfreq", kAlphabetSize);
  r.expect("ranks");
  if (r.integer() != kAlphabetSize * kAlphabetSize) throw LoadError("rank table size mismatch");
  std::vector<int> ranks(kAlphabetSize * kAlphabetSize);
  for (auto& v : ranks) v = static_cast<int>(r.integer());
  model.reference = reference_from_parts(freq, std::move(ranks));

  r.expect(to_string(kind));
  switch (kind) {
    case ModelKind::forest:
      model.impl = read_forest(r, static_cast<int>(K));
      break;
    case ModelKind::margin:
      model.impl = read_margin(r, static_cast<int>(K));
      break;
    case ModelKind::neural:
      model.impl = read_neural(r, static_cast<int>(K));
      break;
  }
  r.expect("end");
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto text = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path, std::optional<Task> expected_task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str(), expected_task);
}

}  // namespace nxbench
