#ifndef EDIREF_EVALKIT_HPP
#define EDIREF_EVALKIT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ediref/labels.hpp"

namespace ediref {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  // Zero-division convention: undefined precision/recall map to 0 and are
  // flagged so reports can surface them.
  bool undefined_precision = false;
  bool undefined_recall = false;
};

using ConfusionCounts = std::array<std::array<std::int64_t, kEmotionCount>, kEmotionCount>;
using ConfusionNormalized = std::array<std::array<double, kEmotionCount>, kEmotionCount>;

struct EvaluationReport {
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::int64_t samples = 0;
  std::array<ClassMetrics, kEmotionCount> per_class{};
  ConfusionCounts confusion_counts{};
  ConfusionNormalized confusion_normalized{};
  std::array<double, kEmotionCount> per_emotion_accuracy{};
};

// One-vs-rest precision/recall/F1/support per class. Throws DataError on
// empty or length-mismatched inputs.
std::array<ClassMetrics, kEmotionCount> per_class_prf(
    const std::vector<Emotion>& preds, const std::vector<Emotion>& golds);

// Unweighted mean over all 8 per-class F1 scores; absent classes count as 0.
double macro_f1(const std::vector<Emotion>& preds, const std::vector<Emotion>& golds);

// Support-weighted mean of per-class F1 scores.
double weighted_f1(const std::vector<Emotion>& preds, const std::vector<Emotion>& golds);

// Entry (i, j) counts gold-i predicted-j.
ConfusionCounts confusion_matrix(const std::vector<Emotion>& preds,
                                 const std::vector<Emotion>& golds);

// Row-normalized by support; zero-support rows stay all-zero.
ConfusionNormalized normalize_confusion(const ConfusionCounts& counts);

// Per-class recall, i.e. the diagonal of the normalized confusion matrix.
std::array<double, kEmotionCount> per_emotion_accuracy(
    const std::vector<Emotion>& preds, const std::vector<Emotion>& golds);

// Assembles every metric from a single confusion-count pass; fields equal
// the standalone operations bit-for-bit.
EvaluationReport build_report(const std::vector<Emotion>& preds,
                              const std::vector<Emotion>& golds);

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json_file(const std::filesystem::path& path);
void write_report_json(const std::filesystem::path& path, const EvaluationReport& report);
void write_report_per_class_csv(const std::filesystem::path& path,
                                const EvaluationReport& report);

}  // namespace ediref

#endif  // EDIREF_EVALKIT_HPP
