#include "thaiprep/filters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "thaiprep/errors.hpp"

namespace thaiprep {

std::string_view to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::ok:
      return "ok";
    case FilterReason::too_short:
      return "too_short";
    case FilterReason::no_title:
      return "no_title";
    case FilterReason::wrong_language:
      return "wrong_language";
  }
  return "ok";
}

FilterDecision length_filter(const RawThread& thread, std::size_t min_body_chars) {
  const auto title = unicode::decode(thread.title);
  if (std::all_of(title.begin(), title.end(), unicode::is_space))
    return FilterDecision::reject(FilterReason::no_title, "thread has no title");
  const std::size_t n = unicode::length(thread.body);
  if (n <= min_body_chars)
    return FilterDecision::reject(FilterReason::too_short,
                                  "body has " + std::to_string(n) + " chars, need more than " +
                                      std::to_string(min_body_chars));
  return FilterDecision::accept();
}

std::vector<std::u32string> extract_ngrams(std::string_view text) {
  std::u32string s = unicode::decode(text);
  for (auto& c : s) c = unicode::to_lower_latin(c);
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && unicode::is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !unicode::is_space(s[j])) ++j;
    for (std::size_t a = i; a < j; ++a) {
      for (int n = 1; n <= kMaxNgramOrder && a + n <= j; ++n) out.emplace_back(s.substr(a, n));
    }
    i = j;
  }
  return out;
}

LanguageProfile::LanguageProfile(std::string language, std::unordered_map<std::u32string, std::uint64_t> counts)
    : language_(std::move(language)), counts_(std::move(counts)) {
  std::array<std::uint64_t, kMaxNgramOrder> distinct{};
  for (const auto& [gram, c] : counts_) {
    totals_[gram.size() - 1] += c;
    ++distinct[gram.size() - 1];
  }
  std::array<double, kMaxNgramOrder> denom{};
  for (int n = 0; n < kMaxNgramOrder; ++n) {
    denom[n] = static_cast<double>(totals_[n] + distinct[n] + 1);
    smoothing_[n] = 1.0 / denom[n];
  }
  log_probs_.reserve(counts_.size());
  for (const auto& [gram, c] : counts_)
    log_probs_.emplace(gram, std::log(static_cast<double>(c + 1) / denom[gram.size() - 1]));
}

LanguageProfile::LanguageProfile(std::string language, std::unordered_map<std::u32string, double> log_probs,
                                 std::array<double, kMaxNgramOrder> smoothing_mass)
    : language_(std::move(language)), log_probs_(std::move(log_probs)), smoothing_(smoothing_mass) {}

double LanguageProfile::log_prob(std::u32string_view ngram) const {
  if (auto it = log_probs_.find(std::u32string(ngram)); it != log_probs_.end()) return it->second;
  const std::size_t order = std::clamp<std::size_t>(ngram.size(), 1, kMaxNgramOrder);
  return std::log(smoothing_[order - 1]);
}

std::uint64_t LanguageProfile::count(std::u32string_view ngram) const {
  auto it = counts_.find(std::u32string(ngram));
  return it == counts_.end() ? 0 : it->second;
}

double LanguageProfile::relative_frequency(std::u32string_view ngram) const {
  if (ngram.empty() || ngram.size() > kMaxNgramOrder) return 0;
  const auto total = totals_[ngram.size() - 1];
  return total == 0 ? 0.0 : static_cast<double>(count(ngram)) / static_cast<double>(total);
}

std::vector<LanguageProfile> train_profiles(std::span<const LabeledText> docs) {
  if (docs.empty()) throw std::invalid_argument("cannot train language profiles on an empty set");
  std::map<std::string, std::unordered_map<std::u32string, std::uint64_t>> counts;
  for (const auto& doc : docs) {
    if (doc.language.empty()) throw std::invalid_argument("training document without a language label");
    auto& table = counts[doc.language];
    for (auto& g : extract_ngrams(doc.text)) ++table[g];
  }
  std::vector<LanguageProfile> out;
  for (auto& [lang, table] : counts) out.emplace_back(lang, std::move(table));
  return out;
}

LanguageGuess detect_language(std::string_view text, std::span<const LanguageProfile> profiles) {
  if (profiles.empty()) throw std::invalid_argument("no language profiles");
  const auto grams = extract_ngrams(text);
  if (grams.empty()) throw std::invalid_argument("cannot detect the language of empty text");

  std::vector<const LanguageProfile*> ordered;
  for (const auto& p : profiles) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const LanguageProfile* a, const LanguageProfile* b) { return a->language() < b->language(); });

  LanguageGuess best;
  bool first = true;
  for (const auto* p : ordered) {
    double sum = 0;
    for (const auto& g : grams) sum += p->log_prob(g);
    const double mean = sum / static_cast<double>(grams.size());
    if (first || mean > best.score) {
      best = {p->language(), mean};
      first = false;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

std::string hex_codepoints(std::u32string_view gram) {
  std::string out;
  char buf[16];
  for (std::size_t i = 0; i < gram.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(gram[i]));
    if (i) out.push_back(' ');
    out += buf;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw InputError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

void save_profile(const LanguageProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open profile file: " + path.string(), 0);
  out << "#language\t" << profile.language() << '\n';
  out << "#smoothing";
  for (double m : profile.smoothing_mass()) out << '\t' << format_double(m);
  out << '\n';
  std::map<std::u32string, double> sorted(profile.log_probs().begin(), profile.log_probs().end());
  std::size_t n = 0;
  for (const auto& [gram, lp] : sorted) {
    out << hex_codepoints(gram) << '\t' << format_double(lp) << '\n';
    if (!out) throw WriteError("write failed: " + path.string(), n);
    ++n;
  }
}

LanguageProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open profile file: " + path.string());
  std::string language;
  std::array<double, kMaxNgramOrder> smoothing{};
  bool have_smoothing = false;
  std::unordered_map<std::u32string, double> log_probs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields[0] == "#language" && fields.size() == 2) {
      language = fields[1];
      continue;
    }
    if (fields[0] == "#smoothing" && fields.size() == 1 + kMaxNgramOrder) {
      for (int n = 0; n < kMaxNgramOrder; ++n) smoothing[n] = parse_double(fields[n + 1], path, lineno);
      have_smoothing = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[0][0] == '#')
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": malformed profile line");
    std::u32string gram;
    std::size_t pos = 0;
    const std::string& hex = fields[0];
    while (pos < hex.size()) {
      auto sp = hex.find(' ', pos);
      if (sp == std::string::npos) sp = hex.size();
      unsigned long cp = 0;
      auto [ptr, ec] = std::from_chars(hex.data() + pos, hex.data() + sp, cp, 16);
      if (ec != std::errc{} || ptr != hex.data() + sp || cp > 0x10FFFF)
        throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad code point");
      gram.push_back(static_cast<char32_t>(cp));
      pos = sp + 1;
    }
    if (gram.empty() || gram.size() > kMaxNgramOrder)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": n-gram order out of range");
    const double lp = parse_double(fields[1], path, lineno);
    if (!(lp < 0.0) && lp != 0.0)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": log probability must be <= 0");
    log_probs[gram] = lp;
  }
  if (language.empty() || !have_smoothing) throw InputError(path.string() + ": missing profile header");
  for (double m : smoothing) {
    if (!(m > 0.0 && m <= 1.0)) throw InputError(path.string() + ": smoothing mass must be in (0, 1]");
  }
  return LanguageProfile(std::move(language), std::move(log_probs), smoothing);
}

ThreadFilter::ThreadFilter(std::size_t min_body_chars, std::string target_language,
                           std::vector<LanguageProfile> profiles)
    : min_body_chars_(min_body_chars), target_language_(std::move(target_language)), profiles_(std::move(profiles)) {}

FilterDecision ThreadFilter::operator()(const RawThread& thread, bool concat_title) const {
  auto d = length_filter(thread, min_body_chars_);
  if (!d.accepted || profiles_.empty()) return d;
  const auto text = thread_text(thread, concat_title);
  if (extract_ngrams(text).empty()) return FilterDecision::reject(FilterReason::wrong_language, "no detectable text");
  const auto guess = detect_language(text, profiles_);
  if (guess.language != target_language_)
    return FilterDecision::reject(FilterReason::wrong_language, "detected '" + guess.language + "'");
  return d;
}

}  // namespace thaiprep
