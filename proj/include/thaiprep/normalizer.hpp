#pragma once

#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "thaiprep/corpus_io.hpp"
#include "thaiprep/unicode.hpp"

namespace thaiprep {

enum class RewriteRule {
  fix_html,
  char_order,
  empty_brackets,
  pad_slash_hash,
  laugh,
  numbers,
  char_repetition,
  word_repetition,
  whitespace,
};

std::string_view to_string(RewriteRule rule);

/// Replace original[source_span] with `replacement`. Offsets are code points
/// into the text handed to the normalizer.
struct RewriteRecord {
  RewriteRule rule;
  Span source_span;
  std::string replacement;

  bool operator==(const RewriteRecord&) const = default;
};

struct NormalizedDocument {
  std::string text;
  std::vector<RewriteRecord> rewrites;  // sorted, non-overlapping
};

nlohmann::json to_json(const RewriteRecord& record);

/// Replays an audit trail. Throws std::invalid_argument when spans are out of
/// range, unsorted or overlapping.
std::string apply_rewrites(std::string_view original, std::span<const RewriteRecord> rewrites);

// Individual stages. Each one is applied until it stops changing the text, so
// every stage is idempotent on its own.

/// Decodes character references (repeatedly, so "&amp;lt;" becomes "<") and
/// turns <br>, <br/>, <br /> into newlines. Unknown references pass through.
std::string fix_html(std::string_view text);

/// Whitespace runs become one space, or one newline if the run had a line
/// break; leading and trailing whitespace is dropped.
std::string collapse_whitespace(std::string_view text);

/// Deletes "()", "[]", "{}" holding nothing but whitespace.
std::string remove_empty_brackets(std::string_view text);

/// One space on each side of '/' and '#'. A '/' between two digits is left
/// alone so dates survive for the number rule.
std::string pad_slash_hash(std::string_view text);

/// Canonical order for runs of Thai combining marks: below vowel, above
/// vowel, tone mark, then other signs; repeated marks collapse to one, and a
/// tone typed after SARA AM moves in front of it.
std::string normalize_char_order(std::string_view text);

/// Runs of four or more '5' (plus an optional '+') become " [LAUGH] ".
std::string mark_laugh(std::string_view text, const SpecialTokens& specials = {});

/// Digit strings (ASCII or Thai) joined by . , : - / become " [NUM] ".
/// Masked forms with x/X placeholders qualify when they look like a phone
/// number (>= 6 chars, >= 3 digits) or sit next to a currency marker. Digit
/// strings glued to Latin letters ("mp3") are left alone, as are the counts
/// that follow [CREP]/[WREP]. Matches of `extra_patterns` (ECMAScript, over
/// code points) are marked too, before the built-in rules.
std::string mark_numbers(std::string_view text, const SpecialTokens& specials = {},
                         std::span<const std::string> extra_patterns = {});

/// Compiles number patterns; throws std::invalid_argument naming the bad one.
std::vector<std::wregex> compile_number_patterns(std::span<const std::string> patterns);

/// A run of n >= 3 identical characters (not digits, spaces or combining
/// marks) becomes "c [CREP] min(n, cap)".
std::string mark_char_repetition(std::string_view text, const SpecialTokens& specials = {}, int cap = 5);

/// A unit of 3..30 non-space characters repeated k >= 3 times back to back
/// (one whitespace allowed between copies) becomes "u [WREP] min(k, cap)".
/// Leftmost start wins, then the shortest unit.
std::string mark_word_repetition(std::string_view text, const SpecialTokens& specials = {}, int cap = 5);

inline constexpr std::size_t kMinRepeatUnit = 3;
inline constexpr std::size_t kMaxRepeatUnit = 30;
inline constexpr std::size_t kCharRunThreshold = 3;
inline constexpr std::size_t kLaughRunThreshold = 4;

/// Runs the configured stage sequence, repeating the whole sequence until
/// the text stops changing, and keeps an audit trail against the input.
class Normalizer {
 public:
  struct Options {
    SpecialTokens specials;
    RewriteCaps caps;
    std::vector<std::string> stage_order{kDefaultStageOrder.begin(), kDefaultStageOrder.end()};
    std::vector<std::string> number_patterns;
  };

  Normalizer();
  explicit Normalizer(Options options);
  explicit Normalizer(const PipelineConfig& config);

  NormalizedDocument normalize(std::string_view text) const;
  /// Same text as normalize() without building the audit trail.
  std::string normalize_text(std::string_view text) const;

  const Options& options() const { return options_; }

  static constexpr int kMaxPasses = 8;

 private:
  Options options_;
  std::vector<int> stages_;
  std::vector<std::wregex> number_regexes_;
};

NormalizedDocument normalize_document(const RawThread& raw, const PipelineConfig& config);

}  // namespace thaiprep
