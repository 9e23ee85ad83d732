#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "thaiprep/corpus_io.hpp"

namespace thaiprep {

enum class FilterReason { ok, too_short, no_title, wrong_language };

std::string_view to_string(FilterReason reason);

struct FilterDecision {
  bool accepted = true;
  FilterReason reason = FilterReason::ok;
  std::string detail;

  static FilterDecision accept() { return {}; }
  static FilterDecision reject(FilterReason r, std::string detail) { return {false, r, std::move(detail)}; }
};

/// Accepts a thread iff it has a title (non-blank) and its body holds more
/// than `min_body_chars` code points, whitespace included.
FilterDecision length_filter(const RawThread& thread, std::size_t min_body_chars);

inline constexpr int kMaxNgramOrder = 3;

/// Character n-grams of orders 1..3 taken inside whitespace-delimited words,
/// Latin letters lowercased. N-grams never cross whitespace.
std::vector<std::u32string> extract_ngrams(std::string_view text);

/// Add-one smoothed character n-gram model of one language. Each order is
/// its own distribution: P(g) = (c(g) + 1) / (N_n + V_n + 1), where N_n is the
/// token count and V_n the number of distinct n-grams of that order. The
/// leftover 1 / (N_n + V_n + 1) is the unseen-n-gram probability.
class LanguageProfile {
 public:
  LanguageProfile() = default;
  LanguageProfile(std::string language, std::unordered_map<std::u32string, std::uint64_t> counts);
  LanguageProfile(std::string language, std::unordered_map<std::u32string, double> log_probs,
                  std::array<double, kMaxNgramOrder> smoothing_mass);

  const std::string& language() const { return language_; }
  const std::unordered_map<std::u32string, double>& log_probs() const { return log_probs_; }
  const std::array<double, kMaxNgramOrder>& smoothing_mass() const { return smoothing_; }

  /// Smoothed log probability; unseen n-grams get log(smoothing mass).
  double log_prob(std::u32string_view ngram) const;
  /// Maximum-likelihood estimate c(g)/N_n from training counts; 0 for profiles
  /// loaded from disk (counts are not persisted).
  double relative_frequency(std::u32string_view ngram) const;
  std::uint64_t count(std::u32string_view ngram) const;

  bool operator==(const LanguageProfile& other) const {
    return language_ == other.language_ && log_probs_ == other.log_probs_ && smoothing_ == other.smoothing_;
  }

 private:
  std::string language_;
  std::unordered_map<std::u32string, double> log_probs_;
  std::array<double, kMaxNgramOrder> smoothing_{};
  std::unordered_map<std::u32string, std::uint64_t> counts_;
  std::array<std::uint64_t, kMaxNgramOrder> totals_{};
};

struct LabeledText {
  std::string text;
  std::string language;
};

/// One profile per language, sorted by language code.
std::vector<LanguageProfile> train_profiles(std::span<const LabeledText> docs);

struct LanguageGuess {
  std::string language;
  double score = 0;  // mean per-n-gram log-likelihood
};

/// Argmax of the mean log-likelihood; ties go to the smaller language code.
/// Throws std::invalid_argument on empty profiles or whitespace-only text.
LanguageGuess detect_language(std::string_view text, std::span<const LanguageProfile> profiles);

/// Header lines "#language\t<code>" and "#smoothing\t<m1>\t<m2>\t<m3>", then
/// "<hex code points>\t<log-prob>" per n-gram, sorted.
void save_profile(const LanguageProfile& profile, const std::filesystem::path& path);
LanguageProfile load_profile(const std::filesystem::path& path);

/// Length filter followed by the language filter (skipped with no profiles).
class ThreadFilter {
 public:
  ThreadFilter(std::size_t min_body_chars, std::string target_language, std::vector<LanguageProfile> profiles);

  FilterDecision operator()(const RawThread& thread, bool concat_title = true) const;

 private:
  std::size_t min_body_chars_;
  std::string target_language_;
  std::vector<LanguageProfile> profiles_;
};

}  // namespace thaiprep
