#include "ediref/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "ediref/errors.hpp"
#include "ediref/rng.hpp"

namespace ediref {

namespace {

void check_training_data(const Matrix& features, const std::vector<Emotion>& labels) {
  if (features.rows == 0 || features.rows != static_cast<int>(labels.size())) {
    throw ConfigError("baseline training data is empty or inconsistent");
  }
  std::set<Emotion> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw ConfigError("degenerate fit: training data holds a single class");
  }
}

class LogisticRegressionBaseline : public FeatureBaseline {
 public:
  LogisticRegressionBaseline(const Matrix& features, const std::vector<Emotion>& labels,
                             const BaselineOptions& opt)
      : w_(features.cols, kEmotionCount), b_(1, kEmotionCount) {
    // Full-batch multinomial logistic regression; zero init keeps the fit
    // deterministic without any seed dependence.
    const int n = features.rows;
    Matrix grad_w(w_.rows, w_.cols), grad_b(1, kEmotionCount);
    for (int it = 0; it < opt.lr_iterations; ++it) {
      std::fill(grad_w.data.begin(), grad_w.data.end(), 0.0);
      std::fill(grad_b.data.begin(), grad_b.data.end(), 0.0);
      for (int r = 0; r < n; ++r) {
        std::array<double, kEmotionCount> p = row_probs(features, r);
        p[emotion_index(labels[r])] -= 1.0;
        for (int c = 0; c < kEmotionCount; ++c) {
          grad_b.at(0, c) += p[c];
          for (int f = 0; f < features.cols; ++f) {
            grad_w.at(f, c) += features.at(r, f) * p[c];
          }
        }
      }
      const double step = opt.lr_learning_rate / n;
      for (std::size_t i = 0; i < w_.data.size(); ++i) w_.data[i] -= step * grad_w.data[i];
      for (std::size_t i = 0; i < b_.data.size(); ++i) b_.data[i] -= step * grad_b.data[i];
    }
  }

  BaselineKind kind() const override { return BaselineKind::kLogisticRegression; }

  std::vector<Emotion> predict(const Matrix& features) const override {
    std::vector<Emotion> out;
    out.reserve(features.rows);
    for (int r = 0; r < features.rows; ++r) {
      const auto p = row_probs(features, r);
      out.push_back(emotion_from_index(static_cast<int>(
          std::max_element(p.begin(), p.end()) - p.begin())));
    }
    return out;
  }

 private:
  std::array<double, kEmotionCount> row_probs(const Matrix& x, int r) const {
    std::array<double, kEmotionCount> z{};
    for (int c = 0; c < kEmotionCount; ++c) {
      double s = b_.at(0, c);
      for (int f = 0; f < x.cols; ++f) s += x.at(r, f) * w_.at(f, c);
      z[c] = s;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
  }

  Matrix w_, b_;
};

class NearestNeighborBaseline : public FeatureBaseline {
 public:
  NearestNeighborBaseline(const Matrix& features, const std::vector<Emotion>& labels, int k)
      : train_(features), labels_(labels), k_(std::max(1, k)) {}

  BaselineKind kind() const override { return BaselineKind::kNearestNeighbors; }

  std::vector<Emotion> predict(const Matrix& features) const override {
    std::vector<Emotion> out;
    out.reserve(features.rows);
    std::vector<std::pair<double, int>> dist(train_.rows);
    for (int r = 0; r < features.rows; ++r) {
      for (int t = 0; t < train_.rows; ++t) {
        double d = 0.0;
        for (int f = 0; f < features.cols; ++f) {
          const double diff = features.at(r, f) - train_.at(t, f);
          d += diff * diff;
        }
        dist[t] = {d, t};
      }
      // distance ties break by training index, vote ties by label index
      std::sort(dist.begin(), dist.end());
      std::array<int, kEmotionCount> votes{};
      const int k = std::min<int>(k_, train_.rows);
      for (int i = 0; i < k; ++i) ++votes[emotion_index(labels_[dist[i].second])];
      int best = 0;
      for (int c = 1; c < kEmotionCount; ++c) {
        if (votes[c] > votes[best]) best = c;
      }
      out.push_back(emotion_from_index(best));
    }
    return out;
  }

 private:
  Matrix train_;
  std::vector<Emotion> labels_;
  int k_;
};

struct TreeNode {
  int feature = -1;       // -1 for leaves
  double threshold = 0.0;
  int left = -1, right = -1;
  int label = 0;
};

class RandomForestBaseline : public FeatureBaseline {
 public:
  RandomForestBaseline(const Matrix& features, const std::vector<Emotion>& labels,
                       std::uint64_t seed, const BaselineOptions& opt)
      : opt_(opt) {
    Rng rng(mix_seed(seed, 0xF04E57ull));
    trees_.resize(opt.forest_trees);
    for (auto& tree : trees_) {
      std::vector<int> sample(features.rows);
      for (int& idx : sample) idx = static_cast<int>(rng.below(features.rows));
      grow(tree, features, labels, sample, 0, rng);
    }
  }

  BaselineKind kind() const override { return BaselineKind::kRandomForest; }

  std::vector<Emotion> predict(const Matrix& features) const override {
    std::vector<Emotion> out;
    out.reserve(features.rows);
    for (int r = 0; r < features.rows; ++r) {
      std::array<int, kEmotionCount> votes{};
      for (const auto& tree : trees_) {
        int node = 0;
        while (tree[node].feature >= 0) {
          node = features.at(r, tree[node].feature) <= tree[node].threshold
                     ? tree[node].left
                     : tree[node].right;
        }
        ++votes[tree[node].label];
      }
      int best = 0;
      for (int c = 1; c < kEmotionCount; ++c) {
        if (votes[c] > votes[best]) best = c;
      }
      out.push_back(emotion_from_index(best));
    }
    return out;
  }

 private:
  using Tree = std::vector<TreeNode>;

  static int majority(const std::vector<Emotion>& labels, const std::vector<int>& idx) {
    std::array<int, kEmotionCount> counts{};
    for (int i : idx) ++counts[emotion_index(labels[i])];
    int best = 0;
    for (int c = 1; c < kEmotionCount; ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    return best;
  }

  static double gini(const std::array<int, kEmotionCount>& counts, int total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (int c : counts) {
      const double p = static_cast<double>(c) / total;
      g -= p * p;
    }
    return g;
  }

  int grow(Tree& tree, const Matrix& x, const std::vector<Emotion>& y,
           const std::vector<int>& idx, int depth, Rng& rng) {
    const int node_id = static_cast<int>(tree.size());
    tree.push_back(TreeNode{});
    bool pure = true;
    for (std::size_t i = 1; i < idx.size(); ++i) {
      if (y[idx[i]] != y[idx[0]]) {
        pure = false;
        break;
      }
    }
    if (pure || depth >= opt_.forest_max_depth ||
        static_cast<int>(idx.size()) < 2 * opt_.forest_min_leaf) {
      tree[node_id].label = majority(y, idx);
      return node_id;
    }

    // sqrt(d) random feature candidates, best gini split among them
    const int n_feat = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(x.cols))));
    double best_score = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> sorted;
    for (int f = 0; f < n_feat; ++f) {
      const int feature = static_cast<int>(rng.below(x.cols));
      sorted.clear();
      for (int i : idx) sorted.emplace_back(x.at(i, feature), i);
      std::sort(sorted.begin(), sorted.end());
      std::array<int, kEmotionCount> left{}, right{};
      for (int i : idx) ++right[emotion_index(y[i])];
      int n_left = 0;
      const int n_total = static_cast<int>(idx.size());
      for (std::size_t s = 0; s + 1 < sorted.size(); ++s) {
        const int cls = emotion_index(y[sorted[s].second]);
        ++left[cls];
        --right[cls];
        ++n_left;
        if (sorted[s].first == sorted[s + 1].first) continue;
        if (n_left < opt_.forest_min_leaf || n_total - n_left < opt_.forest_min_leaf) continue;
        const double score = (n_left * gini(left, n_left) +
                              (n_total - n_left) * gini(right, n_total - n_left)) /
                             n_total;
        if (score < best_score) {
          best_score = score;
          best_feature = feature;
          best_threshold = 0.5 * (sorted[s].first + sorted[s + 1].first);
        }
      }
    }
    if (best_feature < 0) {
      tree[node_id].label = majority(y, idx);
      return node_id;
    }

    std::vector<int> left_idx, right_idx;
    for (int i : idx) {
      (x.at(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    tree[node_id].feature = best_feature;
    tree[node_id].threshold = best_threshold;
    const int left = grow(tree, x, y, left_idx, depth + 1, rng);
    const int right = grow(tree, x, y, right_idx, depth + 1, rng);
    tree[node_id].left = left;
    tree[node_id].right = right;
    return node_id;
  }

  BaselineOptions opt_;
  std::vector<Tree> trees_;
};

}  // namespace

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLogisticRegression: return "logistic-regression";
    case BaselineKind::kNearestNeighbors: return "nearest-neighbors";
    case BaselineKind::kRandomForest: return "random-forest";
  }
  return "unknown";
}

std::unique_ptr<FeatureBaseline> fit_baseline(BaselineKind kind, const Matrix& features,
                                              const std::vector<Emotion>& labels,
                                              std::uint64_t seed,
                                              const BaselineOptions& options) {
  check_training_data(features, labels);
  switch (kind) {
    case BaselineKind::kLogisticRegression:
      return std::make_unique<LogisticRegressionBaseline>(features, labels, options);
    case BaselineKind::kNearestNeighbors:
      return std::make_unique<NearestNeighborBaseline>(features, labels, options.knn_k);
    case BaselineKind::kRandomForest:
      return std::make_unique<RandomForestBaseline>(features, labels, seed, options);
  }
  throw ConfigError("unknown baseline kind");
}

std::vector<Emotion> predict_baseline(const FeatureBaseline& model,
                                      const Matrix& features) {
  return model.predict(features);
}

}  // namespace ediref
