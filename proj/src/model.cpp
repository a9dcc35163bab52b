#include "ediref/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ediref/errors.hpp"

namespace ediref {

MockEncoder::MockEncoder(int vocab_size, int hidden_dim, int blocks,
                         std::uint64_t seed)
    : vocab_(vocab_size), hidden_(hidden_dim), blocks_(blocks), seed_(seed) {
  if (vocab_ < 5 || hidden_ < 1 || blocks_ < 1) {
    throw ConfigError("mock encoder needs vocab >= 5, hidden >= 1, blocks >= 1");
  }
  embedding_.resize(static_cast<std::size_t>(vocab_) * hidden_);
  Rng rng(mix_seed(seed, 0xE0BEDull));
  for (double& v : embedding_) v = rng.normal() * 0.5;
  block_params_.resize(blocks_);
  for (auto& p : block_params_) {
    p.assign(static_cast<std::size_t>(2) * hidden_, 0.0);
    std::fill(p.begin(), p.begin() + hidden_, 1.0);  // identity scale
  }
}

std::string MockEncoder::identifier() const {
  return "mock:vocab=" + std::to_string(vocab_) + ",hidden=" + std::to_string(hidden_) +
         ",blocks=" + std::to_string(blocks_) + ",seed=" + std::to_string(seed_);
}

std::span<const double> MockEncoder::block_scale(int block) const {
  return {block_params_[block].data(), static_cast<std::size_t>(hidden_)};
}

std::span<const double> MockEncoder::block_shift(int block) const {
  return {block_params_[block].data() + hidden_, static_cast<std::size_t>(hidden_)};
}

Matrix MockEncoder::embed_cls(const TokenBatch& batch) const {
  // Masked mean of token embeddings; the pool stands in for attention so the
  // CLS position sees the whole sentence.
  Matrix cls(batch.rows, hidden_);
  for (int r = 0; r < batch.rows; ++r) {
    int live = 0;
    for (int c = 0; c < batch.cols; ++c) {
      if (!batch.live(r, c)) continue;
      ++live;
      const int tok = batch.id(r, c);
      for (int h = 0; h < hidden_; ++h) {
        cls.at(r, h) += embedding_[static_cast<std::size_t>(tok) * hidden_ + h];
      }
    }
    if (live > 0) {
      for (int h = 0; h < hidden_; ++h) cls.at(r, h) /= live;
    }
  }
  return cls;
}

HiddenStates MockEncoder::forward(const TokenBatch& batch) const {
  HiddenStates hs;
  hs.layers = blocks_ + 1;
  hs.batch = batch.rows;
  hs.seq = batch.cols;
  hs.hidden = hidden_;
  hs.data.assign(static_cast<std::size_t>(hs.layers) * hs.batch * hs.seq * hs.hidden, 0.0);

  const Matrix cls = embed_cls(batch);
  for (int b = 0; b < hs.batch; ++b) {
    for (int t = 0; t < hs.seq; ++t) {
      const int tok = batch.id(b, t);
      for (int h = 0; h < hidden_; ++h) {
        hs.at(0, b, t, h) = (t == 0) ? cls.at(b, h)
                                     : embedding_[static_cast<std::size_t>(tok) * hidden_ + h];
      }
    }
  }
  for (int l = 1; l <= blocks_; ++l) {
    const auto scale = block_scale(l - 1);
    const auto shift = block_shift(l - 1);
    for (int b = 0; b < hs.batch; ++b) {
      for (int t = 0; t < hs.seq; ++t) {
        for (int h = 0; h < hidden_; ++h) {
          hs.at(l, b, t, h) = scale[h] * hs.at(l - 1, b, t, h) + shift[h];
        }
      }
    }
  }
  return hs;
}

std::vector<ParamGroup> MockEncoder::param_groups() {
  std::vector<ParamGroup> groups;
  groups.push_back({"encoder.embedding", std::span<double>(embedding_)});
  for (int l = 0; l < blocks_; ++l) {
    groups.push_back({"encoder.block" + std::to_string(l + 1),
                      std::span<double>(block_params_[l])});
  }
  return groups;
}

Matrix MockEncoder::final_block_input_cls(const TokenBatch& batch) const {
  Matrix state = embed_cls(batch);
  for (int l = 0; l < blocks_ - 1; ++l) {
    const auto scale = block_scale(l);
    const auto shift = block_shift(l);
    for (int b = 0; b < state.rows; ++b) {
      for (int h = 0; h < hidden_; ++h) {
        state.at(b, h) = scale[h] * state.at(b, h) + shift[h];
      }
    }
  }
  return state;
}

Matrix MockEncoder::final_block_forward_cls(const Matrix& prev) const {
  if (prev.cols != hidden_) {
    throw ConfigError("final block input has wrong width");
  }
  Matrix out(prev.rows, hidden_);
  const auto scale = block_scale(blocks_ - 1);
  const auto shift = block_shift(blocks_ - 1);
  for (int b = 0; b < prev.rows; ++b) {
    for (int h = 0; h < hidden_; ++h) {
      out.at(b, h) = scale[h] * prev.at(b, h) + shift[h];
    }
  }
  return out;
}

void MockEncoder::final_block_backward_cls(const Matrix& prev,
                                           const Matrix& feature_grad,
                                           std::span<double> grad) const {
  if (grad.size() != static_cast<std::size_t>(2) * hidden_) {
    throw ConfigError("final block gradient buffer has wrong size");
  }
  for (int b = 0; b < prev.rows; ++b) {
    for (int h = 0; h < hidden_; ++h) {
      grad[h] += feature_grad.at(b, h) * prev.at(b, h);          // d/d scale
      grad[static_cast<std::size_t>(hidden_) + h] += feature_grad.at(b, h);  // d/d shift
    }
  }
}

Matrix extract_features(const TokenBatch& batch, const EncoderAdapter& encoder,
                        int layer) {
  const int last = encoder.layer_count();
  const int chosen = (layer < 0) ? last : layer;
  if (chosen < 0 || chosen > last) {
    throw ConfigError("feature layer " + std::to_string(layer) +
                      " out of range [0, " + std::to_string(last) + "]");
  }
  const HiddenStates hs = encoder.forward(batch);
  Matrix features(hs.batch, hs.hidden);
  for (int b = 0; b < hs.batch; ++b) {
    for (int h = 0; h < hs.hidden; ++h) {
      features.at(b, h) = hs.at(chosen, b, 0, h);
    }
  }
  return features;
}

void write_features_csv(const std::filesystem::path& path, const Matrix& features,
                        const std::vector<Emotion>* labels) {
  if (labels != nullptr && static_cast<int>(labels->size()) != features.rows) {
    throw DataError("feature/label row mismatch in CSV export");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write features CSV: " + path.string());
  for (int c = 0; c < features.cols; ++c) {
    out << (c ? "," : "") << "f" << c;
  }
  if (labels != nullptr) out << ",label";
  out << "\n";
  out.precision(17);
  for (int r = 0; r < features.rows; ++r) {
    for (int c = 0; c < features.cols; ++c) {
      out << (c ? "," : "") << features.at(r, c);
    }
    if (labels != nullptr) out << "," << to_string((*labels)[r]);
    out << "\n";
  }
}

ClassifierHead::ClassifierHead(int input_dim, int hidden, double dropout,
                               std::uint64_t seed)
    : input_dim_(input_dim),
      hidden_(hidden),
      dropout_(dropout),
      dropout_rng_(mix_seed(seed, 0xD409ull)) {
  if (input_dim < 1 || hidden < 1) {
    throw ConfigError("classifier head needs positive dimensions");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1)");
  }
  w1 = Matrix(input_dim, hidden);
  b1 = Matrix(1, hidden);
  w2 = Matrix(hidden, kEmotionCount);
  b2 = Matrix(1, kEmotionCount);
  Rng rng(mix_seed(seed, 0x4EAD));
  const double s1 = std::sqrt(2.0 / input_dim);
  for (double& v : w1.data) v = rng.normal() * s1;
  const double s2 = std::sqrt(2.0 / hidden);
  for (double& v : w2.data) v = rng.normal() * s2;
}

Matrix ClassifierHead::forward(const Matrix& features, bool training) {
  return forward_cached(features, training).probs;
}

ClassifierHead::ForwardCache ClassifierHead::forward_cached(const Matrix& features,
                                                            bool training) {
  if (features.cols != input_dim_) {
    throw ConfigError("feature dim " + std::to_string(features.cols) +
                      " does not match head input dim " + std::to_string(input_dim_));
  }
  ForwardCache cache;
  cache.input = features;
  Matrix h = matmul(features, w1);
  for (int r = 0; r < h.rows; ++r) {
    for (int c = 0; c < h.cols; ++c) {
      h.at(r, c) = std::max(0.0, h.at(r, c) + b1.at(0, c));
    }
  }
  cache.dropout_mask = Matrix(h.rows, h.cols);
  const bool drop = training && dropout_ > 0.0;
  const double keep = 1.0 - dropout_;
  for (int r = 0; r < h.rows; ++r) {
    for (int c = 0; c < h.cols; ++c) {
      const double m = drop ? (dropout_rng_.uniform() < dropout_ ? 0.0 : 1.0 / keep) : 1.0;
      cache.dropout_mask.at(r, c) = m;
      h.at(r, c) *= m;
    }
  }
  cache.hidden_act = h;
  Matrix logits = matmul(h, w2);
  cache.probs = Matrix(logits.rows, logits.cols);
  for (int r = 0; r < logits.rows; ++r) {
    double mx = -1e300;
    for (int c = 0; c < logits.cols; ++c) {
      logits.at(r, c) += b2.at(0, c);
      mx = std::max(mx, logits.at(r, c));
    }
    double z = 0.0;
    for (int c = 0; c < logits.cols; ++c) {
      cache.probs.at(r, c) = std::exp(logits.at(r, c) - mx);
      z += cache.probs.at(r, c);
    }
    for (int c = 0; c < logits.cols; ++c) cache.probs.at(r, c) /= z;
  }
  return cache;
}

Matrix ClassifierHead::backward(const ForwardCache& cache, const Matrix& logit_grad,
                                std::span<double> grad) const {
  if (grad.size() != param_count()) {
    throw ConfigError("head gradient buffer has wrong size");
  }
  const std::size_t n_w1 = w1.data.size();
  const std::size_t n_b1 = b1.data.size();
  const std::size_t n_w2 = w2.data.size();
  double* gw1 = grad.data();
  double* gb1 = gw1 + n_w1;
  double* gw2 = gb1 + n_b1;
  double* gb2 = gw2 + n_w2;

  // logits = hidden_act * w2 + b2
  for (int r = 0; r < logit_grad.rows; ++r) {
    for (int c = 0; c < logit_grad.cols; ++c) {
      const double g = logit_grad.at(r, c);
      gb2[c] += g;
      for (int k = 0; k < hidden_; ++k) {
        gw2[static_cast<std::size_t>(k) * kEmotionCount + c] += cache.hidden_act.at(r, k) * g;
      }
    }
  }
  // back through w2 into the hidden activations
  Matrix dh(cache.hidden_act.rows, hidden_);
  for (int r = 0; r < dh.rows; ++r) {
    for (int k = 0; k < hidden_; ++k) {
      double g = 0.0;
      for (int c = 0; c < kEmotionCount; ++c) {
        g += logit_grad.at(r, c) * w2.at(k, c);
      }
      dh.at(r, k) = g;
    }
  }
  // dropout then relu
  Matrix dx(cache.input.rows, input_dim_);
  for (int r = 0; r < dh.rows; ++r) {
    for (int k = 0; k < hidden_; ++k) {
      // hidden_act is relu output times dropout mask, so it is positive
      // exactly when both the relu gate and the mask pass.
      double g = dh.at(r, k) * cache.dropout_mask.at(r, k);
      if (cache.hidden_act.at(r, k) <= 0.0) g = 0.0;
      gb1[k] += g;
      for (int i = 0; i < input_dim_; ++i) {
        gw1[static_cast<std::size_t>(i) * hidden_ + k] += cache.input.at(r, i) * g;
      }
      for (int i = 0; i < input_dim_; ++i) {
        dx.at(r, i) += w1.at(i, k) * g;
      }
    }
  }
  return dx;
}

std::vector<ParamGroup> ClassifierHead::param_groups() {
  return {
      {"head.dense1.w", std::span<double>(w1.data)},
      {"head.dense1.b", std::span<double>(b1.data)},
      {"head.dense2.w", std::span<double>(w2.data)},
      {"head.dense2.b", std::span<double>(b2.data)},
  };
}

std::size_t ClassifierHead::param_count() const {
  return w1.data.size() + b1.data.size() + w2.data.size() + b2.data.size();
}

Matrix classify(const Matrix& features, ClassifierHead& head, bool training_mode) {
  return head.forward(features, training_mode);
}

std::vector<Emotion> predict_label(const Matrix& probs) {
  std::vector<Emotion> out;
  out.reserve(probs.rows);
  for (int r = 0; r < probs.rows; ++r) {
    double sum = 0.0;
    for (int c = 0; c < probs.cols; ++c) {
      const double p = probs.at(r, c);
      if (p < 0.0) throw DataError("probability row has a negative entry");
      sum += p;
    }
    if (probs.cols != kEmotionCount || std::abs(sum - 1.0) > 1e-6) {
      throw DataError("row " + std::to_string(r) + " is not a probability distribution");
    }
    int best = 0;
    for (int c = 1; c < probs.cols; ++c) {
      if (probs.at(r, c) > probs.at(r, best)) best = c;  // ties keep lower index
    }
    out.push_back(emotion_from_index(best));
  }
  return out;
}

}  // namespace ediref
