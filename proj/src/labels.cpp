#include "ediref/labels.hpp"

#include <algorithm>
#include <cctype>

#include "ediref/errors.hpp"

namespace ediref {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kNames = {
    "neutral", "anger", "surprise", "fear",
    "joy",     "sadness", "disgust", "contempt",
};

constexpr std::array<std::string_view, kEmotionCount> kAdjectives = {
    "neutral", "angry", "surprised", "fearful",
    "joyful",  "sad",   "disgusted", "contemptuous",
};

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view to_string(Emotion e) { return kNames[emotion_index(e)]; }

std::string_view emotion_adjective(Emotion e) {
  return kAdjectives[emotion_index(e)];
}

std::optional<Emotion> parse_emotion(std::string_view s) {
  const std::string lowered = lowercase(s);
  for (int i = 0; i < kEmotionCount; ++i) {
    if (lowered == kNames[i]) return emotion_from_index(i);
  }
  return std::nullopt;
}

Emotion parse_emotion_or_throw(std::string_view s) {
  if (auto e = parse_emotion(s)) return *e;
  throw LabelError("unknown emotion label: '" + std::string(s) + "'");
}

Emotion emotion_from_index(int idx) {
  if (idx < 0 || idx >= kEmotionCount) {
    throw LabelError("emotion index out of range: " + std::to_string(idx));
  }
  return static_cast<Emotion>(idx);
}

}  // namespace ediref
