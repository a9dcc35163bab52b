#ifndef EDIREF_TEXTPREP_HPP
#define EDIREF_TEXTPREP_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ediref {

// Abstract tokenizer. encode() returns content token ids only; the [CLS] and
// terminator ids are added by the batching policy so that sequence lengths
// are accounted for in one place.
class TokenizerAdapter {
 public:
  virtual ~TokenizerAdapter() = default;

  virtual int vocab_size() const = 0;
  virtual int cls_id() const = 0;
  virtual int sep_id() const = 0;
  virtual int pad_id() const = 0;
  virtual int unk_id() const = 0;
  virtual std::string identifier() const = 0;

  // Deterministic for fixed adapter state. No special tokens.
  virtual std::vector<int> encode(std::string_view text) const = 0;

  // [cls] + content + [sep]; empty text encodes to [cls, sep].
  std::vector<int> encode_with_specials(std::string_view text) const;

  // Checks the special-id distinctness invariant; throws ConfigError.
  void validate() const;
};

// Deterministic whitespace tokenizer with hashed ids. Lets the whole pipeline
// run without any pretrained asset; ids are stable across platforms.
class MockTokenizer : public TokenizerAdapter {
 public:
  explicit MockTokenizer(int vocab_size = 4096);

  int vocab_size() const override { return vocab_size_; }
  int cls_id() const override { return 2; }
  int sep_id() const override { return 3; }
  int pad_id() const override { return 0; }
  int unk_id() const override { return 1; }
  std::string identifier() const override;
  std::vector<int> encode(std::string_view text) const override;

 private:
  int vocab_size_;
};

// Fixed-length batch policy: trailing truncation, trailing padding.
// Truncation is a pure prefix cut, so the [CLS] position always survives.
struct TruncationPolicy {
  int max_len = 55;

  void validate() const;  // throws ConfigError when max_len < 3
};

struct LengthHistogram {
  std::map<int, std::int64_t> bins;  // token length -> count
  std::int64_t total = 0;
};

// Encoded batch, row-major (rows x max_len). mask is 1 on real tokens and 0
// on padding.
struct TokenBatch {
  int rows = 0;
  int cols = 0;
  std::vector<int> ids;
  std::vector<std::uint8_t> mask;

  int id(int r, int c) const { return ids[static_cast<std::size_t>(r) * cols + c]; }
  bool live(int r, int c) const { return mask[static_cast<std::size_t>(r) * cols + c] != 0; }
  std::int64_t mask_sum(int r) const;
};

// Pre-truncation lengths including special tokens, excluding padding.
LengthHistogram token_length_histogram(const std::vector<std::string>& utterances,
                                       const TokenizerAdapter& tokenizer);

void write_histogram_csv(const std::filesystem::path& path,
                         const LengthHistogram& hist);

TokenBatch encode_batch(const std::vector<std::string>& texts,
                        const TokenizerAdapter& tokenizer,
                        const TruncationPolicy& policy);

// One sweep row; score is absent when the evaluator failed on that length.
struct LengthSweepRow {
  int max_len = 0;
  std::optional<double> score;
  std::string error;
};

struct LengthSweepResult {
  std::vector<LengthSweepRow> rows;
  std::optional<int> best_len;  // argmax score, ties toward the smaller length
};

// Runs `evaluate` for each candidate under an otherwise identical
// configuration. Evaluator exceptions are recorded and the sweep continues.
LengthSweepResult sweep_max_length(const std::vector<int>& candidates,
                                   const std::function<double(int)>& evaluate);

}  // namespace ediref

#endif  // EDIREF_TEXTPREP_HPP
