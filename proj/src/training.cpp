#include "ediref/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ediref/checksum.hpp"
#include "ediref/errors.hpp"
#include "ediref/rng.hpp"

namespace ediref {

namespace {

using nlohmann::json;

// AdamW with decoupled weight decay over a flat view of trainable params.
class AdamW {
 public:
  AdamW(std::vector<std::span<double>> params, OptimizerSettings settings)
      : params_(std::move(params)), settings_(settings) {
    std::size_t total = 0;
    for (const auto& p : params_) total += p.size();
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  }

  std::size_t size() const { return m_.size(); }

  void step(std::span<const double> grad, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(settings_.beta1, t_);
    const double bc2 = 1.0 - std::pow(settings_.beta2, t_);
    std::size_t off = 0;
    for (auto& span : params_) {
      for (double& p : span) {
        const double g = grad[off];
        m_[off] = settings_.beta1 * m_[off] + (1.0 - settings_.beta1) * g;
        v_[off] = settings_.beta2 * v_[off] + (1.0 - settings_.beta2) * g * g;
        const double mhat = m_[off] / bc1;
        const double vhat = v_[off] / bc2;
        p -= lr * (mhat / (std::sqrt(vhat) + settings_.eps) + settings_.weight_decay * p);
        ++off;
      }
    }
  }

 private:
  std::vector<std::span<double>> params_;
  OptimizerSettings settings_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

TokenBatch slice_batch(const TokenBatch& all, const std::vector<int>& order,
                       std::size_t begin, std::size_t end) {
  TokenBatch out;
  out.rows = static_cast<int>(end - begin);
  out.cols = all.cols;
  out.ids.resize(static_cast<std::size_t>(out.rows) * out.cols);
  out.mask.resize(static_cast<std::size_t>(out.rows) * out.cols);
  for (std::size_t i = begin; i < end; ++i) {
    const int src = order[i];
    std::copy_n(all.ids.begin() + static_cast<std::size_t>(src) * all.cols, all.cols,
                out.ids.begin() + (i - begin) * out.cols);
    std::copy_n(all.mask.begin() + static_cast<std::size_t>(src) * all.cols, all.cols,
                out.mask.begin() + (i - begin) * out.cols);
  }
  return out;
}

Matrix slice_rows(const Matrix& all, const std::vector<int>& order,
                  std::size_t begin, std::size_t end) {
  Matrix out(static_cast<int>(end - begin), all.cols);
  for (std::size_t i = begin; i < end; ++i) {
    for (int c = 0; c < all.cols; ++c) {
      out.at(static_cast<int>(i - begin), c) = all.at(order[i], c);
    }
  }
  return out;
}

// d(mean weighted CE)/d(logits) for softmax outputs.
Matrix ce_logit_grad(const Matrix& probs, const std::vector<Emotion>& golds,
                     const std::array<double, kEmotionCount>& weights) {
  Matrix grad(probs.rows, probs.cols);
  const double inv_n = 1.0 / probs.rows;
  for (int r = 0; r < probs.rows; ++r) {
    const int g = emotion_index(golds[r]);
    const double w = weights[g];
    for (int c = 0; c < probs.cols; ++c) {
      grad.at(r, c) = w * (probs.at(r, c) - (c == g ? 1.0 : 0.0)) * inv_n;
    }
  }
  return grad;
}

std::map<std::string, std::uint64_t> snapshot_checksums(EncoderAdapter& encoder,
                                                        ClassifierHead& head) {
  std::map<std::string, std::uint64_t> sums;
  for (const ParamGroup& g : encoder.param_groups()) {
    sums[g.name] = checksum({g.values.data(), g.values.size()});
  }
  for (const ParamGroup& g : head.param_groups()) {
    sums[g.name] = checksum({g.values.data(), g.values.size()});
  }
  return sums;
}

double macro_f1_of(EncoderAdapter& encoder, ClassifierHead& head,
                   const LabeledSet& set) {
  return macro_f1(predict_set(encoder, head, set.tokens), set.labels);
}

struct HeadSnapshot {
  Matrix w1, b1, w2, b2;
  std::vector<double> final_block;
};

HeadSnapshot snapshot(const ClassifierHead& head, EncoderAdapter& encoder) {
  HeadSnapshot s{head.w1, head.b1, head.w2, head.b2, {}};
  auto groups = encoder.param_groups();
  const auto& last = groups.back().values;
  s.final_block.assign(last.begin(), last.end());
  return s;
}

void restore(const HeadSnapshot& s, ClassifierHead& head, EncoderAdapter& encoder) {
  head.w1 = s.w1;
  head.b1 = s.b1;
  head.w2 = s.w2;
  head.b2 = s.b2;
  auto groups = encoder.param_groups();
  std::copy(s.final_block.begin(), s.final_block.end(), groups.back().values.begin());
}

}  // namespace

void StagedSchedule::validate() const {
  if (frozen_epochs < 0 || finetune_epochs < 0) {
    throw ConfigError("epoch counts must be non-negative");
  }
  if (lr_stage1 <= 0.0 || lr_stage2 <= 0.0) {
    throw ConfigError("learning rates must be positive");
  }
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be non-negative");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
}

double lr_at_step(long step, double base_lr, long warmup_steps) {
  if (step < 0) throw ConfigError("lr_at_step: step must be non-negative");
  if (warmup_steps <= 0 || step >= warmup_steps) return base_lr;
  return base_lr * (static_cast<double>(step) / static_cast<double>(warmup_steps));
}

double weighted_cross_entropy(const Matrix& probs, const std::vector<Emotion>& golds,
                              const std::array<double, kEmotionCount>& weights,
                              ClampStats* stats) {
  if (probs.rows != static_cast<int>(golds.size()) || probs.rows == 0) {
    throw DataError("loss inputs are empty or length-mismatched");
  }
  for (double w : weights) {
    if (w <= 0.0) throw ConfigError("class weights must be positive");
  }
  double total = 0.0;
  for (int r = 0; r < probs.rows; ++r) {
    double p = probs.at(r, emotion_index(golds[r]));
    if (p < 1e-12) {
      p = 1e-12;
      if (stats != nullptr) ++stats->count;
    }
    total += weights[emotion_index(golds[r])] * (-std::log(p));
  }
  return total / probs.rows;
}

std::vector<Emotion> predict_set(EncoderAdapter& encoder, ClassifierHead& head,
                                 const TokenBatch& tokens) {
  const Matrix features = extract_features(tokens, encoder);
  return predict_label(head.forward(features, /*training=*/false));
}

TrainResult train_staged(EncoderAdapter& encoder, ClassifierHead& head,
                         const TrainData& data, const StagedSchedule& schedule,
                         const std::array<double, kEmotionCount>& weights,
                         const OptimizerSettings& opt) {
  schedule.validate();
  if (data.train.size() == 0) throw ConfigError("training data is empty");
  if (data.train.tokens.rows != data.train.size()) {
    throw ConfigError("token batch and label list differ in length");
  }

  TrainResult result;
  ClampStats clamps;
  const int n = data.train.size();

  // Stage 1 keeps every encoder parameter frozen, so the CLS features are
  // constant and can be computed once.
  const Matrix frozen_features = extract_features(data.train.tokens, encoder);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::optional<HeadSnapshot> best_weights;
  double best_val = -1.0;

  const auto run_epoch_record = [&](int stage, int epoch, double mean_loss, double lr) {
    EpochRecord rec;
    rec.stage = stage;
    rec.epoch = epoch;
    rec.mean_loss = mean_loss;
    rec.train_f1 = macro_f1_of(encoder, head, data.train);
    if (data.validation && data.validation->size() > 0) {
      rec.validation_f1 = macro_f1_of(encoder, head, *data.validation);
    }
    rec.lr = lr;
    rec.checksums = snapshot_checksums(encoder, head);
    result.history.records.push_back(std::move(rec));
    if (schedule.select_best_validation && data.validation &&
        result.history.records.back().validation_f1 &&
        *result.history.records.back().validation_f1 > best_val) {
      best_val = *result.history.records.back().validation_f1;
      best_weights = snapshot(head, encoder);
    }
  };

  // ---- stage 1: classifier only, warmup over global stage-1 steps ----
  {
    std::vector<std::span<double>> trainable;
    for (const ParamGroup& g : head.param_groups()) trainable.push_back(g.values);
    AdamW optimizer(trainable, opt);
    std::vector<double> grad(optimizer.size());

    long step = 0;
    for (int epoch = 1; epoch <= schedule.frozen_epochs; ++epoch) {
      Rng shuffle_rng(mix_seed(schedule.seed, 1000003ULL * 1 + epoch));
      shuffle_rng.shuffle(order);
      double loss_sum = 0.0;
      double last_lr = 0.0;
      for (std::size_t begin = 0; begin < order.size();
           begin += static_cast<std::size_t>(schedule.batch_size)) {
        const std::size_t end =
            std::min(order.size(), begin + static_cast<std::size_t>(schedule.batch_size));
        const Matrix features = slice_rows(frozen_features, order, begin, end);
        std::vector<Emotion> golds;
        golds.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) golds.push_back(data.train.labels[order[i]]);

        head.reseed_dropout(mix_seed(schedule.seed, 7000003ULL + static_cast<std::uint64_t>(step)));
        const auto cache = head.forward_cached(features, /*training=*/true);
        const double loss = weighted_cross_entropy(cache.probs, golds, weights, &clamps);
        if (!std::isfinite(loss)) {
          throw DivergenceError("NaN loss at stage 1, epoch " + std::to_string(epoch) +
                                    ", step " + std::to_string(step),
                                1, epoch, step);
        }
        loss_sum += loss * static_cast<double>(end - begin);

        std::fill(grad.begin(), grad.end(), 0.0);
        head.backward(cache, ce_logit_grad(cache.probs, golds, weights), grad);
        last_lr = lr_at_step(step, schedule.lr_stage1, schedule.warmup_steps);
        optimizer.step(grad, last_lr);
        ++step;
      }
      run_epoch_record(1, epoch, loss_sum / n, last_lr);
    }
  }

  // ---- stage 2: classifier + final encoder block, constant lr ----
  if (schedule.finetune_epochs > 0) {
    auto encoder_groups = encoder.param_groups();
    std::span<double> final_block = encoder_groups.back().values;
    std::vector<std::span<double>> trainable;
    for (const ParamGroup& g : head.param_groups()) trainable.push_back(g.values);
    trainable.push_back(final_block);
    AdamW optimizer(trainable, opt);
    std::vector<double> grad(optimizer.size());
    const std::size_t head_params = head.param_count();

    // Everything below the final block stays frozen, so its input is fixed.
    const Matrix prev_cls = encoder.final_block_input_cls(data.train.tokens);

    long step = 0;
    for (int epoch = 1; epoch <= schedule.finetune_epochs; ++epoch) {
      Rng shuffle_rng(mix_seed(schedule.seed, 1000003ULL * 2 + epoch));
      shuffle_rng.shuffle(order);
      double loss_sum = 0.0;
      for (std::size_t begin = 0; begin < order.size();
           begin += static_cast<std::size_t>(schedule.batch_size)) {
        const std::size_t end =
            std::min(order.size(), begin + static_cast<std::size_t>(schedule.batch_size));
        const Matrix prev = slice_rows(prev_cls, order, begin, end);
        const Matrix features = encoder.final_block_forward_cls(prev);
        std::vector<Emotion> golds;
        golds.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) golds.push_back(data.train.labels[order[i]]);

        head.reseed_dropout(mix_seed(schedule.seed, 9000007ULL + static_cast<std::uint64_t>(step)));
        const auto cache = head.forward_cached(features, /*training=*/true);
        const double loss = weighted_cross_entropy(cache.probs, golds, weights, &clamps);
        if (!std::isfinite(loss)) {
          throw DivergenceError("NaN loss at stage 2, epoch " + std::to_string(epoch) +
                                    ", step " + std::to_string(step),
                                2, epoch, step);
        }
        loss_sum += loss * static_cast<double>(end - begin);

        std::fill(grad.begin(), grad.end(), 0.0);
        const Matrix feature_grad =
            head.backward(cache, ce_logit_grad(cache.probs, golds, weights),
                          std::span<double>(grad.data(), head_params));
        encoder.final_block_backward_cls(
            prev, feature_grad,
            std::span<double>(grad.data() + head_params, grad.size() - head_params));
        optimizer.step(grad, schedule.lr_stage2);
        ++step;
      }
      run_epoch_record(2, epoch, loss_sum / n, schedule.lr_stage2);
    }
  }

  if (schedule.select_best_validation && best_weights) {
    restore(*best_weights, head, encoder);
  }
  result.history.clamp_warnings = clamps.count;
  return result;
}

EpochSweepResult epoch_sweep(const std::vector<std::pair<int, int>>& grid,
                             const StagedSchedule& base_schedule,
                             const TrainData& data,
                             const std::optional<LabeledSet>& test,
                             const EncoderFactory& make_encoder,
                             const HeadFactory& make_head,
                             const std::array<double, kEmotionCount>& weights,
                             const OptimizerSettings& opt) {
  if (grid.empty()) throw ConfigError("epoch sweep needs a non-empty grid");
  EpochSweepResult result;
  for (const auto& [k1, k2] : grid) {
    SweepCell cell;
    cell.frozen_epochs = k1;
    cell.finetune_epochs = k2;
    try {
      StagedSchedule schedule = base_schedule;
      schedule.frozen_epochs = k1;
      schedule.finetune_epochs = k2;
      auto encoder = make_encoder();
      ClassifierHead head = make_head();
      train_staged(*encoder, head, data, schedule, weights, opt);
      cell.train_f1 = macro_f1_of(*encoder, head, data.train);
      if (data.validation && data.validation->size() > 0) {
        cell.validation_f1 = macro_f1_of(*encoder, head, *data.validation);
      }
      if (test && test->size() > 0) {
        cell.test_f1 = macro_f1_of(*encoder, head, *test);
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    result.cells.push_back(std::move(cell));
  }

  // Best by validation F1; ties prefer fewer total epochs, then grid order.
  int best = -1;
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const SweepCell& c = result.cells[i];
    if (!c.validation_f1) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const SweepCell& b = result.cells[best];
    const int c_total = c.frozen_epochs + c.finetune_epochs;
    const int b_total = b.frozen_epochs + b.finetune_epochs;
    if (*c.validation_f1 > *b.validation_f1 ||
        (*c.validation_f1 == *b.validation_f1 && c_total < b_total)) {
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) result.cells[best].best = true;
  return result;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write history CSV: " + path.string());
  out.precision(17);
  out << "stage,epoch,loss,train_f1,val_f1,lr\n";
  for (const EpochRecord& r : history.records) {
    out << r.stage << "," << r.epoch << "," << r.mean_loss << "," << r.train_f1 << ",";
    if (r.validation_f1) out << *r.validation_f1;
    out << "," << r.lr << "\n";
  }
}

void write_history_json(const std::filesystem::path& path, const TrainHistory& history) {
  json doc;
  doc["clamp_warnings"] = history.clamp_warnings;
  json records = json::array();
  for (const EpochRecord& r : history.records) {
    json rec;
    rec["stage"] = r.stage;
    rec["epoch"] = r.epoch;
    rec["loss"] = r.mean_loss;
    rec["train_f1"] = r.train_f1;
    if (r.validation_f1) {
      rec["val_f1"] = *r.validation_f1;
    } else {
      rec["val_f1"] = nullptr;
    }
    rec["lr"] = r.lr;
    json sums;
    for (const auto& [name, sum] : r.checksums) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(sum));
      sums[name] = buf;
    }
    rec["checksums"] = std::move(sums);
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write history JSON: " + path.string());
  out << doc.dump(2) << "\n";
}

void write_epoch_sweep_csv(const std::filesystem::path& path,
                           const EpochSweepResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write sweep CSV: " + path.string());
  out.precision(17);
  out << "frozen_epochs,finetune_epochs,train_f1,val_f1,test_f1,best,error\n";
  for (const SweepCell& c : result.cells) {
    out << c.frozen_epochs << "," << c.finetune_epochs << ",";
    if (c.train_f1) out << *c.train_f1;
    out << ",";
    if (c.validation_f1) out << *c.validation_f1;
    out << ",";
    if (c.test_f1) out << *c.test_f1;
    out << "," << (c.best ? 1 : 0) << "," << c.error << "\n";
  }
}

}  // namespace ediref
