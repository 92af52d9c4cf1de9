#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nxbench/domain.hpp"
#include "nxbench/features.hpp"
#include "nxbench/forest.hpp"
#include "nxbench/margin.hpp"
#include "nxbench/neural.hpp"

namespace nxbench {

enum class Task { binary, multiclass };
enum class ModelKind { forest, margin, neural };

std::string to_string(Task t);
std::string to_string(ModelKind k);
Task task_from_string(std::string_view s);
ModelKind model_kind_from_string(std::string_view s);

/// Input width a model kind consumes (21 features or 533 neural inputs).
int input_dim(ModelKind kind);

/// A trained classifier together with everything needed to apply it to raw
/// domain names: task, class list and the benign reference its features
/// were computed against.
struct Model {
  Task task = Task::binary;
  std::vector<std::string> classes;
  BenignReference reference;
  std::variant<ForestModel, MarginModel, NeuralModel> impl;

  ModelKind kind() const;
  int num_classes() const { return static_cast<int>(classes.size()); }
  /// Feature rows for raw domains in the layout this model expects.
  Eigen::MatrixXd inputs_for(std::span<const DomainName> domains) const;
  Eigen::MatrixXd inputs_for(std::span<const Sample> samples) const;
};

struct Prediction {
  int label = 0;
  Eigen::VectorXd probabilities;
};

/// Class probabilities for each input row (n x K). Throws ArgumentError
/// when the column count does not match the model.
Eigen::MatrixXd predict_proba(const Model& model, const Eigen::MatrixXd& inputs);

/// Argmax per row, ties to the lowest class index.
std::vector<Prediction> predict(const Model& model, const Eigen::MatrixXd& inputs);
std::vector<int> predict_labels(const Model& model, const Eigen::MatrixXd& inputs);

inline constexpr int kModelFormatVersion = 1;

/// Portable text serialization; doubles are written as hexadecimal floats
/// so predictions survive a round trip bit for bit.
std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& text,
                        std::optional<Task> expected_task = std::nullopt);

void save_model(const Model& model, const std::filesystem::path& path);
/// Throws LoadError on version mismatch or corruption, TaskMismatchError
/// when expected_task is given and differs.
Model load_model(const std::filesystem::path& path,
                 std::optional<Task> expected_task = std::nullopt);

}  // namespace nxbench
