#ifndef EDIREF_CORPUS_HPP
#define EDIREF_CORPUS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ediref/labels.hpp"

namespace ediref {

// One speaker turn. Text is stored verbatim: no lemmatization, punctuation or
// stopword removal anywhere in the pipeline.
struct Utterance {
  int index = 0;  // 0-based position within the dialogue
  std::string speaker;
  std::string text;
  std::optional<Emotion> emotion;  // absent in unlabeled test data

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
  std::optional<std::vector<int>> triggers;  // 0/1 per utterance when present

  friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

struct DatasetSplit {
  std::vector<Dialogue> train;
  std::vector<Dialogue> validation;
  std::vector<Dialogue> test;
  std::uint64_t seed = 0;
  std::array<double, 3> fractions{};
};

// Emotion change between a speaker's consecutive own utterances within one
// dialogue. `at_index` is the utterance where the new emotion appears.
struct EmotionFlip {
  std::string dialogue_id;
  std::string speaker;
  Emotion from = Emotion::kNeutral;
  Emotion to = Emotion::kNeutral;
  int at_index = 0;

  friend bool operator==(const EmotionFlip&, const EmotionFlip&) = default;
};

// Reported in both units because dataset size tables are ambiguous about
// whether they count dialogues or utterances.
struct DatasetSummary {
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  std::size_t labeled_utterances = 0;
};

// File format: UTF-8 JSON array of dialogue objects with keys `episode`,
// `speakers`, `utterances` and optional `emotions`, `triggers`. All arrays in
// one dialogue must be equal-length. See docs/dataset_schema.json.
//
// Errors: ParseError (with byte offset) for malformed JSON, SchemaError
// (naming the dialogue) for structural violations, LabelError for strings
// outside the 8-label space. With expect_labels, missing `emotions` is a
// SchemaError.
std::vector<Dialogue> load_dataset(const std::filesystem::path& path,
                                   bool expect_labels);

// Canonical serialization; load(serialize(load(f))) round-trips exactly.
std::string serialize_dataset(const std::vector<Dialogue>& dialogues);
void save_dataset(const std::filesystem::path& path,
                  const std::vector<Dialogue>& dialogues);

DatasetSummary summarize(const std::vector<Dialogue>& dialogues);

// Deterministic dialogue-level split: one seeded shuffle, then cuts at floor
// boundaries with train taking the remainder. fractions must sum to 1 within
// 1e-9 and the input must be non-empty.
DatasetSplit split_dataset(const std::vector<Dialogue>& dialogues,
                           const std::array<double, 3>& fractions,
                           std::uint64_t seed);

// Counts per label over all utterances. Throws DataError on any unlabeled
// utterance.
std::array<std::int64_t, kEmotionCount> emotion_distribution(
    const std::vector<Dialogue>& dialogues);

// All emotion flips of one dialogue, ordered by at_index. Requires labels.
std::vector<EmotionFlip> extract_flips(const Dialogue& dialogue);

std::vector<EmotionFlip> extract_flips(const std::vector<Dialogue>& dialogues);

// Inverse-frequency class weights: w_i = total / (8 * max(count_i, 1)).
// The add-one floor gives absent classes a finite weight. Throws ConfigError
// when every count is zero.
std::array<double, kEmotionCount> class_weights(
    const std::array<std::int64_t, kEmotionCount>& counts);

}  // namespace ediref

#endif  // EDIREF_CORPUS_HPP
