#ifndef EDIREF_PROMPTLAB_HPP
#define EDIREF_PROMPTLAB_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ediref/labels.hpp"

namespace ediref {

enum class PromptMode { kZeroShot, kFewShot };

// "[INS]"/"[\INS]" is the literal form used by the prompt experiments;
// "[INST]"/"[/INST]" is the conventional instruction-token form. Both are
// supported and the choice is recorded in run artifacts.
enum class DelimiterStyle { kPaperLiteral, kInstructionTokens };

std::string_view to_string(PromptMode mode);
std::string_view to_string(DelimiterStyle style);
PromptMode prompt_mode_from_string(std::string_view s);
DelimiterStyle delimiter_style_from_string(std::string_view s);

// One exemplar sentence per emotion, all 8 present and non-empty.
struct ExemplarSet {
  std::array<std::string, kEmotionCount> sentences{};

  static ExemplarSet from_map(const std::map<std::string, std::string>& by_label);
  void validate() const;  // throws ConfigError on missing/empty entries
};

// Rendering is a pure function of (mode, delimiters, exemplars, sentence).
// Sentences pass through verbatim; there is no escaping.
struct PromptTemplate {
  PromptMode mode = PromptMode::kZeroShot;
  DelimiterStyle delimiters = DelimiterStyle::kPaperLiteral;

  std::string_view opening() const;
  std::string_view closing() const;

  std::string render(const std::string& sentence,
                     const ExemplarSet* exemplars = nullptr) const;
};

// Throws DataError on an empty sentence.
std::string render_zero_shot(const std::string& sentence,
                             DelimiterStyle style = DelimiterStyle::kPaperLiteral);

// One example clause per emotion in canonical label order, then the
// prediction request. Throws ConfigError on an incomplete exemplar set.
std::string render_few_shot(const ExemplarSet& exemplars, const std::string& sentence,
                            DelimiterStyle style = DelimiterStyle::kPaperLiteral);

struct ParsedAnswer {
  std::string raw;
  std::optional<Emotion> label;
  bool valid = false;
};

// One-word answer contract: lowercase and strip punctuation; accept the
// first word when it is a label, otherwise take the leftmost label
// substring. No match leaves the answer invalid (data, not an error).
ParsedAnswer parse_answer(const std::string& completion);

// Text-in/text-out completion endpoint. complete() must be safe for
// concurrent callers and never mutates the prompt.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const std::string& prompt) const = 0;  // throws EndpointError
  virtual std::string describe() const = 0;
};

// Deterministic test client backed by a function of the prompt.
class ScriptedCompletionClient : public CompletionClient {
 public:
  explicit ScriptedCompletionClient(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt) const override { return fn_(prompt); }
  std::string describe() const override { return "scripted"; }

 private:
  std::function<std::string(const std::string&)> fn_;
};

struct TranscriptItem {
  std::size_t index = 0;
  std::string sentence;
  std::string prompt;
  std::string completion;
  std::optional<Emotion> parsed;
  bool valid = false;
  std::string error;  // per-item endpoint failure, empty when none
};

void write_transcript_jsonl(const std::filesystem::path& path,
                            const std::vector<TranscriptItem>& items);
std::vector<TranscriptItem> read_transcript_jsonl(const std::filesystem::path& path);

// Answers from a saved transcript, keyed by exact prompt bytes. Lets a run
// be re-scored without network access.
class ReplayCompletionClient : public CompletionClient {
 public:
  explicit ReplayCompletionClient(const std::filesystem::path& transcript);
  std::string complete(const std::string& prompt) const override;
  std::string describe() const override;

 private:
  std::map<std::string, std::string> by_prompt_;
  std::string source_;
};

struct EndpointSettings {
  std::string url;  // http://host:port/path
  int timeout_ms = 30000;
  int max_tokens = 8;
  double temperature = 0.0;  // greedy by default
  int retries = 2;
  int retry_backoff_ms = 250;
  std::string auth_env = "EDIREF_API_TOKEN";
};

// POSTs {"prompt", "max_tokens", "temperature"} and expects
// {"completion": "..."}. A bearer token is attached when the configured
// environment variable is set. A fresh connection is used per request, so
// the client is stateless and thread-safe.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(EndpointSettings settings);
  std::string complete(const std::string& prompt) const override;
  std::string describe() const override;

 private:
  EndpointSettings settings_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

struct PromptRunOptions {
  int parallelism = 1;
  DelimiterStyle delimiters = DelimiterStyle::kPaperLiteral;
};

struct PromptRunResult {
  std::vector<Emotion> labels;  // one per input sentence
  std::vector<TranscriptItem> items;
  std::size_t invalid_count = 0;  // completions with no parseable label
  std::size_t error_count = 0;    // per-item endpoint failures
  double invalid_rate = 0.0;
};

// Renders, queries and parses one prompt per sentence. Unparseable
// completions map to neutral and are counted; per-item endpoint failures are
// recorded and the run continues, but it aborts once failures exceed half of
// all sentences. Exemplars are required exactly in few-shot mode.
PromptRunResult classify_via_prompt(const CompletionClient& client,
                                    const std::vector<std::string>& sentences,
                                    PromptMode mode,
                                    const ExemplarSet* exemplars = nullptr,
                                    const PromptRunOptions& options = {});

}  // namespace ediref

#endif  // EDIREF_PROMPTLAB_HPP
