#ifndef EDIREF_BASELINES_HPP
#define EDIREF_BASELINES_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ediref/labels.hpp"
#include "ediref/matrix.hpp"

namespace ediref {

enum class BaselineKind {
  kLogisticRegression,
  kNearestNeighbors,
  kRandomForest,
};

std::string_view to_string(BaselineKind kind);

struct BaselineOptions {
  // logistic regression
  int lr_iterations = 500;
  double lr_learning_rate = 0.5;
  // k-NN
  int knn_k = 5;
  // random forest
  int forest_trees = 25;
  int forest_max_depth = 6;
  int forest_min_leaf = 2;
};

// Feature-based classifiers fitted on frozen-encoder features. All are
// deterministic for a fixed seed.
class FeatureBaseline {
 public:
  virtual ~FeatureBaseline() = default;
  virtual BaselineKind kind() const = 0;
  virtual std::vector<Emotion> predict(const Matrix& features) const = 0;
};

// Throws ConfigError when the training data holds fewer than two distinct
// labels (a degenerate fit).
std::unique_ptr<FeatureBaseline> fit_baseline(BaselineKind kind,
                                              const Matrix& features,
                                              const std::vector<Emotion>& labels,
                                              std::uint64_t seed,
                                              const BaselineOptions& options = {});

std::vector<Emotion> predict_baseline(const FeatureBaseline& model,
                                      const Matrix& features);

}  // namespace ediref

#endif  // EDIREF_BASELINES_HPP
