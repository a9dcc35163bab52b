#ifndef EDIREF_MODEL_HPP
#define EDIREF_MODEL_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ediref/labels.hpp"
#include "ediref/matrix.hpp"
#include "ediref/rng.hpp"
#include "ediref/textprep.hpp"

namespace ediref {

// Per-layer hidden states: layer 0 is the embedding output, layer
// layer_count() is the last encoder block. Each layer holds a dense
// (batch x seq x hidden) block.
struct HiddenStates {
  int layers = 0;  // stored layer count = encoder blocks + 1
  int batch = 0;
  int seq = 0;
  int hidden = 0;
  std::vector<double> data;

  double at(int layer, int b, int t, int h) const {
    return data[((static_cast<std::size_t>(layer) * batch + b) * seq + t) * hidden + h];
  }
  double& at(int layer, int b, int t, int h) {
    return data[((static_cast<std::size_t>(layer) * batch + b) * seq + t) * hidden + h];
  }
};

// Named contiguous slice of encoder parameters, used for checksums and for
// optimizer updates of the trainable groups.
struct ParamGroup {
  std::string name;
  std::span<double> values;
};

// Pretrained (or mock) encoder consumed as an opaque asset. The staged
// fine-tuning recipe only ever updates the final block, so the training
// surface is limited to the CLS path through that block.
class EncoderAdapter {
 public:
  virtual ~EncoderAdapter() = default;

  virtual int hidden_dim() const = 0;
  virtual int layer_count() const = 0;  // encoder blocks, excluding embedding
  virtual std::string identifier() const = 0;

  virtual HiddenStates forward(const TokenBatch& batch) const = 0;

  // Group 0 is the embedding, then one group per block in order.
  virtual std::vector<ParamGroup> param_groups() = 0;

  // CLS state feeding the final block (batch x hidden).
  virtual Matrix final_block_input_cls(const TokenBatch& batch) const = 0;
  // CLS output of the final block given its input state.
  virtual Matrix final_block_forward_cls(const Matrix& prev) const = 0;
  // Accumulates d(loss)/d(final block params) into grad, laid out exactly
  // like param_groups().back().values.
  virtual void final_block_backward_cls(const Matrix& prev,
                                        const Matrix& feature_grad,
                                        std::span<double> grad) const = 0;
};

// Deterministic test/CI encoder. Token embeddings are seeded pseudo-random
// vectors; the embedding layer pools the masked mean of a row's token
// embeddings into position 0, so the CLS state carries sentence content.
// Blocks are per-position diagonal affine maps initialized to the identity,
// which gives every block a real, trainable, checksummable parameter group.
class MockEncoder : public EncoderAdapter {
 public:
  MockEncoder(int vocab_size, int hidden_dim, int blocks, std::uint64_t seed);

  int hidden_dim() const override { return hidden_; }
  int layer_count() const override { return blocks_; }
  std::string identifier() const override;

  HiddenStates forward(const TokenBatch& batch) const override;
  std::vector<ParamGroup> param_groups() override;

  Matrix final_block_input_cls(const TokenBatch& batch) const override;
  Matrix final_block_forward_cls(const Matrix& prev) const override;
  void final_block_backward_cls(const Matrix& prev, const Matrix& feature_grad,
                                std::span<double> grad) const override;

 private:
  // Block parameters: scale then shift, each hidden_-long.
  std::span<const double> block_scale(int block) const;
  std::span<const double> block_shift(int block) const;
  Matrix embed_cls(const TokenBatch& batch) const;

  int vocab_;
  int hidden_;
  int blocks_;
  std::uint64_t seed_;
  std::vector<double> embedding_;          // vocab x hidden
  std::vector<std::vector<double>> block_params_;  // per block: [scale | shift]
};

// CLS feature rows: hidden state of sequence position 0 at the chosen layer.
// layer = -1 selects the last block. Throws ConfigError when out of range.
Matrix extract_features(const TokenBatch& batch, const EncoderAdapter& encoder,
                        int layer = -1);

void write_features_csv(const std::filesystem::path& path, const Matrix& features,
                        const std::vector<Emotion>* labels = nullptr);

// feature -> dense(hidden) -> relu -> dropout(rate, training only)
// -> dense(8) -> softmax.
class ClassifierHead {
 public:
  ClassifierHead(int input_dim, int hidden, double dropout, std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  double dropout() const { return dropout_; }

  struct ForwardCache {
    Matrix input;
    Matrix hidden_act;    // post-relu, post-dropout
    Matrix dropout_mask;  // scale applied per unit (0 or 1/keep)
    Matrix probs;
  };

  // Softmax rows; dropout is active only when training is true (inference is
  // deterministic). Throws ConfigError on a feature-dimension mismatch.
  Matrix forward(const Matrix& features, bool training);
  ForwardCache forward_cached(const Matrix& features, bool training);

  // d(loss)/d(logits) in, parameter gradients out (layout of param_groups());
  // returns d(loss)/d(features) for stage-2 backprop into the encoder.
  Matrix backward(const ForwardCache& cache, const Matrix& logit_grad,
                  std::span<double> grad) const;

  std::vector<ParamGroup> param_groups();
  std::size_t param_count() const;

  // Dropout determinism hook: training steps reseed per (seed, stage, epoch,
  // step) so identical runs draw identical masks.
  void reseed_dropout(std::uint64_t seed) { dropout_rng_ = Rng(seed); }

  Matrix w1, b1, w2, b2;  // w1: input x hidden, w2: hidden x 8

 private:
  int input_dim_;
  int hidden_;
  double dropout_;
  Rng dropout_rng_;
};

Matrix classify(const Matrix& features, ClassifierHead& head, bool training_mode);

// Per-row argmax over validated probability rows; ties break toward the
// lower label index. Throws DataError when a row does not sum to ~1.
std::vector<Emotion> predict_label(const Matrix& probs);

}  // namespace ediref

#endif  // EDIREF_MODEL_HPP
