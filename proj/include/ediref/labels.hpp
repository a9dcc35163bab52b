#ifndef EDIREF_LABELS_HPP
#define EDIREF_LABELS_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace ediref {

// The closed 8-emotion label space. Index order is canonical and must not
// change: it defines class indices in every vector, matrix and file format.
enum class Emotion : int {
  kNeutral = 0,
  kAnger = 1,
  kSurprise = 2,
  kFear = 3,
  kJoy = 4,
  kSadness = 5,
  kDisgust = 6,
  kContempt = 7,
};

inline constexpr int kEmotionCount = 8;

inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::kNeutral, Emotion::kAnger,   Emotion::kSurprise, Emotion::kFear,
    Emotion::kJoy,     Emotion::kSadness, Emotion::kDisgust,  Emotion::kContempt,
};

std::string_view to_string(Emotion e);

// Adjective form used in few-shot example clauses ("a sad sentence").
std::string_view emotion_adjective(Emotion e);

// Case-insensitive. Unknown strings yield nullopt, never a coerced label.
std::optional<Emotion> parse_emotion(std::string_view s);

// Same, but throws LabelError naming the bad string.
Emotion parse_emotion_or_throw(std::string_view s);

inline int emotion_index(Emotion e) { return static_cast<int>(e); }

// Throws LabelError when idx is outside [0, 8).
Emotion emotion_from_index(int idx);

}  // namespace ediref

#endif  // EDIREF_LABELS_HPP
