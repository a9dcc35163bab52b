#ifndef EDIREF_TRAINING_HPP
#define EDIREF_TRAINING_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ediref/evalkit.hpp"
#include "ediref/labels.hpp"
#include "ediref/model.hpp"
#include "ediref/textprep.hpp"

namespace ediref {

// The two-stage fine-tuning recipe: k1 classifier-only epochs at lr_stage1
// under a linear warmup, then k2 epochs training the classifier plus the
// final encoder block at a constant, smaller lr_stage2.
struct StagedSchedule {
  int frozen_epochs = 4;      // k1
  int finetune_epochs = 3;    // k2
  double lr_stage1 = 5e-5;
  double lr_stage2 = 2e-5;
  long warmup_steps = 10000;  // stage 1 only, counted across epochs
  int batch_size = 64;
  std::uint64_t seed = 0;
  // "last" submits final-epoch weights; "best_validation" restores the epoch
  // with the highest validation F1.
  bool select_best_validation = false;

  void validate() const;  // throws ConfigError
};

// AdamW hyperparameters beyond the learning rate are fixed by configuration.
struct OptimizerSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct EpochRecord {
  int stage = 0;  // 1 or 2
  int epoch = 0;  // 1-based within the stage
  double mean_loss = 0.0;
  double train_f1 = 0.0;
  std::optional<double> validation_f1;
  double lr = 0.0;  // lr applied at the last step of the epoch
  std::map<std::string, std::uint64_t> checksums;  // per parameter group
};

struct TrainHistory {
  std::vector<EpochRecord> records;  // exactly k1 + k2 entries
  long clamp_warnings = 0;           // log-prob clamps seen in the loss
};

struct LabeledSet {
  TokenBatch tokens;
  std::vector<Emotion> labels;

  int size() const { return static_cast<int>(labels.size()); }
};

struct TrainData {
  LabeledSet train;
  std::optional<LabeledSet> validation;
};

struct TrainResult {
  TrainHistory history;
};

// Linear warmup: base_lr * min(1, step / warmup_steps), constant afterwards.
// warmup_steps == 0 means no warmup. step must be >= 0.
double lr_at_step(long step, double base_lr, long warmup_steps);

struct ClampStats {
  long count = 0;
};

// Mean over the batch of weight[gold_i] * (-log probs[i, gold_i]). A zero
// probability at the gold index is clamped at 1e-12 and counted.
double weighted_cross_entropy(const Matrix& probs, const std::vector<Emotion>& golds,
                              const std::array<double, kEmotionCount>& weights,
                              ClampStats* stats = nullptr);

// Runs the staged recipe, mutating head (both stages) and the encoder's
// final block (stage 2 only). Epoch checksums of every parameter group are
// recorded so freezing is provable from the history alone.
// Throws ConfigError on empty data, DivergenceError on NaN loss.
TrainResult train_staged(EncoderAdapter& encoder, ClassifierHead& head,
                         const TrainData& data, const StagedSchedule& schedule,
                         const std::array<double, kEmotionCount>& weights,
                         const OptimizerSettings& opt = {});

// Evaluation-mode predictions for a labeled set (dropout off).
std::vector<Emotion> predict_set(EncoderAdapter& encoder, ClassifierHead& head,
                                 const TokenBatch& tokens);

struct SweepCell {
  int frozen_epochs = 0;
  int finetune_epochs = 0;
  std::optional<double> train_f1;
  std::optional<double> validation_f1;
  std::optional<double> test_f1;
  bool best = false;
  std::string error;
};

struct EpochSweepResult {
  std::vector<SweepCell> cells;  // grid order
};

// Factories rebuild encoder and head from identical seeds so every cell
// starts from the same initialization.
using EncoderFactory = std::function<std::unique_ptr<EncoderAdapter>()>;
using HeadFactory = std::function<ClassifierHead()>;

EpochSweepResult epoch_sweep(const std::vector<std::pair<int, int>>& grid,
                             const StagedSchedule& base_schedule,
                             const TrainData& data,
                             const std::optional<LabeledSet>& test,
                             const EncoderFactory& make_encoder,
                             const HeadFactory& make_head,
                             const std::array<double, kEmotionCount>& weights,
                             const OptimizerSettings& opt = {});

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);
void write_history_json(const std::filesystem::path& path, const TrainHistory& history);
void write_epoch_sweep_csv(const std::filesystem::path& path,
                           const EpochSweepResult& result);

}  // namespace ediref

#endif  // EDIREF_TRAINING_HPP
