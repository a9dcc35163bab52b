#include "ediref/evalkit.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ediref/errors.hpp"

namespace ediref {

namespace {

using nlohmann::json;

void check_inputs(const std::vector<Emotion>& preds, const std::vector<Emotion>& golds) {
  if (preds.empty() || preds.size() != golds.size()) {
    throw DataError("predictions and golds must be equal-length and non-empty");
  }
}

std::array<ClassMetrics, kEmotionCount> metrics_from_counts(const ConfusionCounts& counts) {
  std::array<ClassMetrics, kEmotionCount> out{};
  for (int c = 0; c < kEmotionCount; ++c) {
    std::int64_t tp = counts[c][c];
    std::int64_t fp = 0, fn = 0;
    for (int o = 0; o < kEmotionCount; ++o) {
      if (o == c) continue;
      fp += counts[o][c];
      fn += counts[c][o];
    }
    ClassMetrics& m = out[c];
    m.support = tp + fn;
    if (tp + fp == 0) {
      m.undefined_precision = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
      m.undefined_recall = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
  }
  return out;
}

double macro_from(const std::array<ClassMetrics, kEmotionCount>& per_class) {
  double sum = 0.0;
  for (const ClassMetrics& m : per_class) sum += m.f1;
  return sum / kEmotionCount;
}

double weighted_from(const std::array<ClassMetrics, kEmotionCount>& per_class) {
  double sum = 0.0;
  std::int64_t total = 0;
  for (const ClassMetrics& m : per_class) {
    sum += static_cast<double>(m.support) * m.f1;
    total += m.support;
  }
  return total > 0 ? sum / static_cast<double>(total) : 0.0;
}

}  // namespace

std::array<ClassMetrics, kEmotionCount> per_class_prf(
    const std::vector<Emotion>& preds, const std::vector<Emotion>& golds) {
  return metrics_from_counts(confusion_matrix(preds, golds));
}

double macro_f1(const std::vector<Emotion>& preds, const std::vector<Emotion>& golds) {
  return macro_from(per_class_prf(preds, golds));
}

double weighted_f1(const std::vector<Emotion>& preds, const std::vector<Emotion>& golds) {
  return weighted_from(per_class_prf(preds, golds));
}

ConfusionCounts confusion_matrix(const std::vector<Emotion>& preds,
                                 const std::vector<Emotion>& golds) {
  check_inputs(preds, golds);
  ConfusionCounts counts{};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ++counts[emotion_index(golds[i])][emotion_index(preds[i])];
  }
  return counts;
}

ConfusionNormalized normalize_confusion(const ConfusionCounts& counts) {
  ConfusionNormalized out{};
  for (int i = 0; i < kEmotionCount; ++i) {
    std::int64_t support = 0;
    for (int j = 0; j < kEmotionCount; ++j) support += counts[i][j];
    if (support == 0) continue;
    for (int j = 0; j < kEmotionCount; ++j) {
      out[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(support);
    }
  }
  return out;
}

std::array<double, kEmotionCount> per_emotion_accuracy(
    const std::vector<Emotion>& preds, const std::vector<Emotion>& golds) {
  const ConfusionNormalized norm = normalize_confusion(confusion_matrix(preds, golds));
  std::array<double, kEmotionCount> out{};
  for (int c = 0; c < kEmotionCount; ++c) out[c] = norm[c][c];
  return out;
}

EvaluationReport build_report(const std::vector<Emotion>& preds,
                              const std::vector<Emotion>& golds) {
  EvaluationReport report;
  report.confusion_counts = confusion_matrix(preds, golds);
  report.confusion_normalized = normalize_confusion(report.confusion_counts);
  report.per_class = metrics_from_counts(report.confusion_counts);
  report.macro_f1 = macro_from(report.per_class);
  report.weighted_f1 = weighted_from(report.per_class);
  report.samples = static_cast<std::int64_t>(preds.size());
  std::int64_t correct = 0;
  for (int c = 0; c < kEmotionCount; ++c) {
    correct += report.confusion_counts[c][c];
    report.per_emotion_accuracy[c] = report.confusion_normalized[c][c];
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(report.samples);
  return report;
}

std::string report_to_json(const EvaluationReport& report) {
  json doc;
  doc["macro_f1"] = report.macro_f1;
  doc["weighted_f1"] = report.weighted_f1;
  doc["accuracy"] = report.accuracy;
  doc["samples"] = report.samples;
  json per_class = json::array();
  for (int c = 0; c < kEmotionCount; ++c) {
    const ClassMetrics& m = report.per_class[c];
    per_class.push_back({
        {"label", std::string(to_string(emotion_from_index(c)))},
        {"precision", m.precision},
        {"recall", m.recall},
        {"f1", m.f1},
        {"support", m.support},
        {"undefined_precision", m.undefined_precision},
        {"undefined_recall", m.undefined_recall},
    });
  }
  doc["per_class"] = std::move(per_class);
  doc["confusion_counts"] = report.confusion_counts;
  doc["confusion_normalized"] = report.confusion_normalized;
  doc["per_emotion_accuracy"] = report.per_emotion_accuracy;
  return doc.dump(2) + "\n";
}

EvaluationReport report_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed report JSON in " + path.string() + ": " + e.what(), e.byte);
  }
  EvaluationReport report;
  try {
    report.macro_f1 = doc.at("macro_f1").get<double>();
    report.weighted_f1 = doc.at("weighted_f1").get<double>();
    report.accuracy = doc.at("accuracy").get<double>();
    report.samples = doc.at("samples").get<std::int64_t>();
    const json& per_class = doc.at("per_class");
    for (int c = 0; c < kEmotionCount; ++c) {
      const json& m = per_class.at(c);
      report.per_class[c].precision = m.at("precision").get<double>();
      report.per_class[c].recall = m.at("recall").get<double>();
      report.per_class[c].f1 = m.at("f1").get<double>();
      report.per_class[c].support = m.at("support").get<std::int64_t>();
      report.per_class[c].undefined_precision = m.at("undefined_precision").get<bool>();
      report.per_class[c].undefined_recall = m.at("undefined_recall").get<bool>();
    }
    report.confusion_counts = doc.at("confusion_counts").get<ConfusionCounts>();
    report.confusion_normalized = doc.at("confusion_normalized").get<ConfusionNormalized>();
    report.per_emotion_accuracy =
        doc.at("per_emotion_accuracy").get<std::array<double, kEmotionCount>>();
  } catch (const json::exception& e) {
    throw DataError("report " + path.string() + " is missing fields: " + e.what());
  }
  return report;
}

void write_report_json(const std::filesystem::path& path, const EvaluationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << report_to_json(report);
}

void write_report_per_class_csv(const std::filesystem::path& path,
                                const EvaluationReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write per-class CSV: " + path.string());
  out.precision(17);
  out << "label,precision,recall,f1,support\n";
  for (int c = 0; c < kEmotionCount; ++c) {
    const ClassMetrics& m = report.per_class[c];
    out << to_string(emotion_from_index(c)) << "," << m.precision << "," << m.recall
        << "," << m.f1 << "," << m.support << "\n";
  }
}

}  // namespace ediref
