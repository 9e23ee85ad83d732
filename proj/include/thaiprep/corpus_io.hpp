#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "thaiprep/token.hpp"

namespace thaiprep {

/// One forum thread as collected by the crawler.
struct RawThread {
  std::string id;
  std::string title;
  std::string body;
  std::map<std::string, std::string> meta;

  bool operator==(const RawThread&) const = default;
};

/// Normalizer stage names, in their default order.
inline constexpr std::array<std::string_view, 9> kDefaultStageOrder = {
    "fix_html",       "normalize_char_order", "remove_empty_brackets",
    "pad_slash_hash", "mark_laugh",           "mark_numbers",
    "mark_char_repetition", "mark_word_repetition", "collapse_whitespace",
};

/// Surface strings of the four rewrite tokens.
struct SpecialTokens {
  std::string crep = "[CREP]";
  std::string wrep = "[WREP]";
  std::string num = "[NUM]";
  std::string laugh = "[LAUGH]";

  std::vector<std::string> surfaces() const { return {crep, wrep, num, laugh}; }
  /// Throws InputError unless surfaces are non-empty, distinct and free of whitespace.
  void validate() const;
};

struct RewriteCaps {
  int crep = 5;
  int wrep = 5;
};

struct PipelineConfig {
  std::vector<std::string> lexicon_paths;
  std::string misspelling_map_path;
  std::size_t vocab_size = 80000;
  std::size_t min_body_chars = 100;
  std::string target_language = "th";
  SpecialTokens special_tokens;
  RewriteCaps rewrite_caps;
  std::vector<std::string> stage_order{kDefaultStageOrder.begin(), kDefaultStageOrder.end()};
  // Extra ECMAScript patterns, matched over code points, whose matches
  // mark_numbers also turns into [NUM].
  std::vector<std::string> number_patterns;

  // Language profiles for the language filter; the filter is skipped when empty.
  std::vector<std::string> profile_paths;
  // Prepend "title\n" to the body before normalization.
  bool concat_title = true;
  // Optional override of the built-in character cluster rule table.
  std::string tcc_rules_path;

  void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& config);
/// Reads a JSON config file; missing keys keep their defaults.
PipelineConfig load_config(const std::filesystem::path& path);

/// Text fed to the normalizer for a thread.
std::string thread_text(const RawThread& thread, bool concat_title);

enum class InputFormat { jsonl, tsv };

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

/// Lazy, single-pass reader. Malformed records are collected in errors()
/// and skipped; the reader keeps going.
///
/// JSONL records need string fields "id" and "body"; "title" and a "meta"
/// object are optional. TSV records are "id<TAB>title<TAB>body" with \t, \n
/// and \\ escapes.
class ThreadReader {
 public:
  ThreadReader(const std::filesystem::path& path, InputFormat format);

  std::optional<RawThread> next();

  const std::vector<RecordError>& errors() const { return errors_; }
  std::size_t lines_read() const { return line_; }

 private:
  std::optional<RawThread> parse_jsonl(const std::string& line);
  std::optional<RawThread> parse_tsv(const std::string& line);
  void fail(std::string message) { errors_.push_back({line_, std::move(message)}); }

  std::ifstream in_;
  InputFormat format_;
  std::size_t line_ = 0;
  std::vector<RecordError> errors_;
  std::unordered_set<std::string> seen_ids_;
};

inline ThreadReader read_threads(const std::filesystem::path& path, InputFormat format) {
  return ThreadReader(path, format);
}

/// Intermediate document between pipeline stages: {"id": ..., "text": ...}.
struct TextDocument {
  std::string id;
  std::string text;
};

class DocumentReader {
 public:
  explicit DocumentReader(const std::filesystem::path& path);
  std::optional<TextDocument> next();
  const std::vector<RecordError>& errors() const { return errors_; }

 private:
  std::ifstream in_;
  std::size_t line_ = 0;
  std::vector<RecordError> errors_;
};

/// Line-oriented JSONL writer shared by the thread/document/sidecar outputs.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const nlohmann::json& record);
  void close();
  std::size_t written() const { return written_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t written_ = 0;
};

nlohmann::json to_json(const RawThread& thread);

struct WriteSummary {
  std::size_t docs = 0;
  std::size_t tokens = 0;

  bool operator==(const WriteSummary&) const = default;
};

/// Writes one line per document with space-joined token surfaces.
class TokenWriter {
 public:
  explicit TokenWriter(const std::filesystem::path& path);
  void write(const TokenStream& stream);
  /// Flushes and closes; throws WriteError on failure.
  WriteSummary close();
  const WriteSummary& summary() const { return summary_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  WriteSummary summary_;
};

WriteSummary write_tokens(std::span<const TokenStream> streams, const std::filesystem::path& path);

/// Reads a token file back: one vector of surfaces per line.
std::vector<std::vector<std::string>> read_token_file(const std::filesystem::path& path);

struct CorpusSplit {
  std::size_t train = 0;  // informational; train receives the remainder
  std::size_t valid = 0;
  std::size_t test = 0;
  std::uint64_t seed = 0;
};

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
};

/// Deterministic partition ordered by a stable hash of (seed, id). The
/// `valid` and `test` sets get exactly their targets; train gets the rest.
/// Each output list keeps input order.
SplitResult split_corpus(std::span<const std::string> ids, const CorpusSplit& split);

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

}  // namespace thaiprep
