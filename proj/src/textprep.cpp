#include "ediref/textprep.hpp"

#include <cctype>
#include <fstream>

#include "ediref/errors.hpp"
#include "ediref/rng.hpp"

namespace ediref {

std::vector<int> TokenizerAdapter::encode_with_specials(std::string_view text) const {
  std::vector<int> ids = encode(text);
  std::vector<int> out;
  out.reserve(ids.size() + 2);
  out.push_back(cls_id());
  out.insert(out.end(), ids.begin(), ids.end());
  out.push_back(sep_id());
  return out;
}

void TokenizerAdapter::validate() const {
  const int ids[4] = {cls_id(), sep_id(), pad_id(), unk_id()};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (ids[i] == ids[j]) {
        throw ConfigError("tokenizer special ids must be distinct");
      }
    }
  }
  if (vocab_size() <= 4) {
    throw ConfigError("tokenizer vocabulary too small");
  }
}

MockTokenizer::MockTokenizer(int vocab_size) : vocab_size_(vocab_size) {
  validate();
}

std::string MockTokenizer::identifier() const {
  return "mock:vocab=" + std::to_string(vocab_size_);
}

std::vector<int> MockTokenizer::encode(std::string_view text) const {
  std::vector<int> out;
  std::size_t start = 0;
  const auto flush = [&](std::size_t end) {
    if (end > start) {
      const std::uint64_t h = hash_bytes(text.data() + start, end - start);
      out.push_back(4 + static_cast<int>(h % static_cast<std::uint64_t>(vocab_size_ - 4)));
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      flush(i);
      start = i + 1;
    }
  }
  flush(text.size());
  return out;
}

void TruncationPolicy::validate() const {
  if (max_len < 3) {
    throw ConfigError("max_len must be at least 3, got " + std::to_string(max_len));
  }
}

std::int64_t TokenBatch::mask_sum(int r) const {
  std::int64_t s = 0;
  for (int c = 0; c < cols; ++c) s += live(r, c) ? 1 : 0;
  return s;
}

LengthHistogram token_length_histogram(const std::vector<std::string>& utterances,
                                       const TokenizerAdapter& tokenizer) {
  tokenizer.validate();
  LengthHistogram hist;
  for (const std::string& text : utterances) {
    const auto len = static_cast<int>(tokenizer.encode_with_specials(text).size());
    ++hist.bins[len];
    ++hist.total;
  }
  return hist;
}

void write_histogram_csv(const std::filesystem::path& path,
                         const LengthHistogram& hist) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write histogram CSV: " + path.string());
  out << "length,count\n";
  for (const auto& [len, count] : hist.bins) {
    out << len << "," << count << "\n";
  }
}

TokenBatch encode_batch(const std::vector<std::string>& texts,
                        const TokenizerAdapter& tokenizer,
                        const TruncationPolicy& policy) {
  tokenizer.validate();
  policy.validate();
  TokenBatch batch;
  batch.rows = static_cast<int>(texts.size());
  batch.cols = policy.max_len;
  batch.ids.assign(static_cast<std::size_t>(batch.rows) * batch.cols, tokenizer.pad_id());
  batch.mask.assign(static_cast<std::size_t>(batch.rows) * batch.cols, 0);
  for (int r = 0; r < batch.rows; ++r) {
    const std::vector<int> full = tokenizer.encode_with_specials(texts[r]);
    const auto keep = std::min<std::size_t>(full.size(), static_cast<std::size_t>(policy.max_len));
    for (std::size_t c = 0; c < keep; ++c) {
      batch.ids[static_cast<std::size_t>(r) * batch.cols + c] = full[c];
      batch.mask[static_cast<std::size_t>(r) * batch.cols + c] = 1;
    }
  }
  return batch;
}

LengthSweepResult sweep_max_length(const std::vector<int>& candidates,
                                   const std::function<double(int)>& evaluate) {
  if (candidates.empty()) {
    throw ConfigError("max-length sweep needs at least one candidate");
  }
  for (int len : candidates) {
    if (len < 3) {
      throw ConfigError("max-length candidates must be >= 3, got " + std::to_string(len));
    }
  }
  LengthSweepResult result;
  for (int len : candidates) {
    LengthSweepRow row;
    row.max_len = len;
    try {
      row.score = evaluate(len);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  std::optional<double> best_score;
  for (const LengthSweepRow& row : result.rows) {
    if (!row.score) continue;
    const bool better = !best_score || *row.score > *best_score ||
                        (*row.score == *best_score && row.max_len < *result.best_len);
    if (better) {
      best_score = *row.score;
      result.best_len = row.max_len;
    }
  }
  return result;
}

}  // namespace ediref
