#include "ediref/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ediref/errors.hpp"
#include "ediref/rng.hpp"

namespace ediref {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open dataset file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const json& require_array(const json& obj, const char* key,
                          const std::string& id) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw SchemaError("dialogue '" + id + "': missing or non-array '" + key + "'",
                      id);
  }
  return *it;
}

int parse_trigger(const json& v, const std::string& id) {
  if (v.is_number()) {
    const double x = v.get<double>();
    if (x == 0.0) return 0;
    if (x == 1.0) return 1;
  }
  throw SchemaError("dialogue '" + id + "': trigger values must be 0 or 1", id);
}

Dialogue parse_dialogue(const json& obj, bool expect_labels) {
  if (!obj.is_object()) {
    throw SchemaError("dialogue entries must be JSON objects", "<unknown>");
  }
  auto id_it = obj.find("episode");
  if (id_it == obj.end() || !id_it->is_string()) {
    throw SchemaError("dialogue is missing string key 'episode'", "<unknown>");
  }
  Dialogue d;
  d.id = id_it->get<std::string>();

  const json& speakers = require_array(obj, "speakers", d.id);
  const json& texts = require_array(obj, "utterances", d.id);
  if (speakers.size() != texts.size()) {
    throw SchemaError("dialogue '" + d.id + "': speakers (" +
                          std::to_string(speakers.size()) + ") and utterances (" +
                          std::to_string(texts.size()) + ") differ in length",
                      d.id);
  }

  const json* emotions = nullptr;
  if (auto it = obj.find("emotions"); it != obj.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != texts.size()) {
      throw SchemaError("dialogue '" + d.id + "': 'emotions' must be an array of length " +
                            std::to_string(texts.size()),
                        d.id);
    }
    emotions = &*it;
  } else if (expect_labels) {
    throw SchemaError("dialogue '" + d.id + "': labels expected but 'emotions' is absent",
                      d.id);
  }

  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!speakers[i].is_string() || speakers[i].get<std::string>().empty()) {
      throw SchemaError("dialogue '" + d.id + "': speaker " + std::to_string(i) +
                            " must be a non-empty string",
                        d.id);
    }
    if (!texts[i].is_string()) {
      throw SchemaError("dialogue '" + d.id + "': utterance " + std::to_string(i) +
                            " must be a string",
                        d.id);
    }
    Utterance u;
    u.index = static_cast<int>(i);
    u.speaker = speakers[i].get<std::string>();
    u.text = texts[i].get<std::string>();
    if (emotions != nullptr) {
      const json& e = (*emotions)[i];
      if (!e.is_string()) {
        throw SchemaError("dialogue '" + d.id + "': emotion " + std::to_string(i) +
                              " must be a string",
                          d.id);
      }
      u.emotion = parse_emotion_or_throw(e.get<std::string>());
    }
    d.utterances.push_back(std::move(u));
  }

  if (auto it = obj.find("triggers"); it != obj.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != texts.size()) {
      throw SchemaError("dialogue '" + d.id + "': 'triggers' must be an array of length " +
                            std::to_string(texts.size()),
                        d.id);
    }
    std::vector<int> triggers;
    triggers.reserve(it->size());
    for (const json& v : *it) triggers.push_back(parse_trigger(v, d.id));
    d.triggers = std::move(triggers);
  }
  return d;
}

}  // namespace

std::vector<Dialogue> load_dataset(const std::filesystem::path& path,
                                   bool expect_labels) {
  const std::string raw = read_file(path);
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON in " + path.string() + ": " + e.what(),
                     e.byte);
  }
  if (!doc.is_array()) {
    throw SchemaError("dataset file must be a top-level JSON array", "<root>");
  }
  std::vector<Dialogue> out;
  out.reserve(doc.size());
  for (const json& entry : doc) {
    out.push_back(parse_dialogue(entry, expect_labels));
  }
  return out;
}

std::string serialize_dataset(const std::vector<Dialogue>& dialogues) {
  json doc = json::array();
  for (const Dialogue& d : dialogues) {
    json obj;
    obj["episode"] = d.id;
    json speakers = json::array();
    json texts = json::array();
    bool any_label = false;
    for (const Utterance& u : d.utterances) {
      speakers.push_back(u.speaker);
      texts.push_back(u.text);
      any_label = any_label || u.emotion.has_value();
    }
    obj["speakers"] = std::move(speakers);
    obj["utterances"] = std::move(texts);
    if (any_label) {
      json emotions = json::array();
      for (const Utterance& u : d.utterances) {
        if (!u.emotion) {
          throw DataError("dialogue '" + d.id +
                          "' mixes labeled and unlabeled utterances");
        }
        emotions.push_back(std::string(to_string(*u.emotion)));
      }
      obj["emotions"] = std::move(emotions);
    }
    if (d.triggers) obj["triggers"] = *d.triggers;
    doc.push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

void save_dataset(const std::filesystem::path& path,
                  const std::vector<Dialogue>& dialogues) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  out << serialize_dataset(dialogues);
}

DatasetSummary summarize(const std::vector<Dialogue>& dialogues) {
  DatasetSummary s;
  s.dialogues = dialogues.size();
  for (const Dialogue& d : dialogues) {
    s.utterances += d.utterances.size();
    for (const Utterance& u : d.utterances) {
      if (u.emotion) ++s.labeled_utterances;
    }
  }
  return s;
}

DatasetSplit split_dataset(const std::vector<Dialogue>& dialogues,
                           const std::array<double, 3>& fractions,
                           std::uint64_t seed) {
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1, got " + std::to_string(sum));
  }
  for (double f : fractions) {
    if (f < 0.0) throw ConfigError("split fractions must be non-negative");
  }
  if (dialogues.empty()) {
    throw ConfigError("cannot split an empty dialogue list");
  }

  std::vector<std::size_t> order(dialogues.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n = dialogues.size();
  const auto n_val = static_cast<std::size_t>(std::floor(fractions[1] * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::floor(fractions[2] * static_cast<double>(n)));
  const std::size_t n_train = n - n_val - n_test;  // train absorbs the remainder

  DatasetSplit split;
  split.seed = seed;
  split.fractions = fractions;
  split.train.reserve(n_train);
  split.validation.reserve(n_val);
  split.test.reserve(n_test);
  for (std::size_t i = 0; i < n; ++i) {
    const Dialogue& d = dialogues[order[i]];
    if (i < n_train) {
      split.train.push_back(d);
    } else if (i < n_train + n_val) {
      split.validation.push_back(d);
    } else {
      split.test.push_back(d);
    }
  }
  return split;
}

std::array<std::int64_t, kEmotionCount> emotion_distribution(
    const std::vector<Dialogue>& dialogues) {
  std::array<std::int64_t, kEmotionCount> counts{};
  for (const Dialogue& d : dialogues) {
    for (const Utterance& u : d.utterances) {
      if (!u.emotion) {
        throw DataError("dialogue '" + d.id + "', utterance " +
                        std::to_string(u.index) + " has no emotion label");
      }
      ++counts[emotion_index(*u.emotion)];
    }
  }
  return counts;
}

std::vector<EmotionFlip> extract_flips(const Dialogue& dialogue) {
  // Per speaker, walk their own utterances in dialogue order and emit a flip
  // whenever the emotion changes between consecutive occurrences.
  std::vector<EmotionFlip> flips;
  std::vector<std::string> seen;
  for (const Utterance& u : dialogue.utterances) {
    if (!u.emotion) {
      throw DataError("dialogue '" + dialogue.id + "', utterance " +
                      std::to_string(u.index) + " has no emotion label");
    }
  }
  for (const Utterance& u : dialogue.utterances) {
    if (std::find(seen.begin(), seen.end(), u.speaker) != seen.end()) continue;
    seen.push_back(u.speaker);
    const Utterance* prev = nullptr;
    for (const Utterance& v : dialogue.utterances) {
      if (v.speaker != u.speaker) continue;
      if (prev != nullptr && *prev->emotion != *v.emotion) {
        flips.push_back(EmotionFlip{dialogue.id, v.speaker, *prev->emotion,
                                    *v.emotion, v.index});
      }
      prev = &v;
    }
  }
  std::sort(flips.begin(), flips.end(),
            [](const EmotionFlip& a, const EmotionFlip& b) {
              return a.at_index < b.at_index;
            });
  return flips;
}

std::vector<EmotionFlip> extract_flips(const std::vector<Dialogue>& dialogues) {
  std::vector<EmotionFlip> all;
  for (const Dialogue& d : dialogues) {
    auto flips = extract_flips(d);
    all.insert(all.end(), flips.begin(), flips.end());
  }
  return all;
}

std::array<double, kEmotionCount> class_weights(
    const std::array<std::int64_t, kEmotionCount>& counts) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw ConfigError("class counts must be non-negative");
    total += c;
  }
  if (total == 0) {
    throw ConfigError("class weights undefined: all counts are zero");
  }
  std::array<double, kEmotionCount> weights{};
  for (int i = 0; i < kEmotionCount; ++i) {
    const auto floor_count = static_cast<double>(std::max<std::int64_t>(counts[i], 1));
    weights[i] = static_cast<double>(total) / (kEmotionCount * floor_count);
  }
  return weights;
}

}  // namespace ediref
