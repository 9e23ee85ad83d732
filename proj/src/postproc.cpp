#include "thaiprep/postproc.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "thaiprep/errors.hpp"
#include "thaiprep/normalizer.hpp"

namespace thaiprep {

namespace u = unicode;

namespace {

// Length of the emoji sequence starting at i, or 0.
std::size_t emoji_sequence(std::u32string_view t, std::size_t i) {
  const auto n = t.size();
  if (u::is_regional_indicator(t[i])) return i + 1 < n && u::is_regional_indicator(t[i + 1]) ? 2 : 1;

  auto element = [&](std::size_t k) -> std::size_t {
    if (k >= n) return 0;
    std::size_t j = k;
    if (u::is_emoji_base(t[j])) {
      ++j;
    } else if ((u::is_ascii_digit(t[j]) || t[j] == U'#' || t[j] == U'*') && j + 1 < n &&
               (t[j + 1] == 0x20E3 || (t[j + 1] == u::kVariationSelector16 && j + 2 < n && t[j + 2] == 0x20E3))) {
      ++j;  // keycap base
    } else {
      return 0;
    }
    while (j < n && (t[j] == u::kVariationSelector16 || t[j] == 0xFE0E || u::is_emoji_modifier(t[j]) ||
                     t[j] == 0x20E3 || (t[j] >= 0xE0020 && t[j] <= 0xE007F)))
      ++j;
    return j - k;
  };

  std::size_t len = element(i);
  if (len == 0) return 0;
  while (i + len < n && t[i + len] == u::kZeroWidthJoiner) {
    const auto next = element(i + len + 1);
    if (next == 0) break;
    len += 1 + next;
  }
  return len;
}

Span sub_span(const Token& tok, std::size_t surface_len, std::size_t from, std::size_t to) {
  // Offsets map one-to-one while the surface still matches its source span.
  if (surface_len == tok.span.size()) return {tok.span.begin + from, tok.span.begin + to};
  return {from == 0 ? tok.span.begin : tok.span.end, to == surface_len ? tok.span.end : tok.span.begin};
}

}  // namespace

TokenStream ungroup_emoji(const TokenStream& stream) {
  TokenStream out;
  out.separators.reserve(stream.separators.size());
  if (!stream.separators.empty()) out.separators.push_back(stream.separators[0]);
  for (std::size_t ti = 0; ti < stream.tokens.size(); ++ti) {
    const auto& tok = stream.tokens[ti];
    const auto t = u::decode(tok.surface);
    std::vector<std::pair<std::size_t, std::size_t>> pieces;  // [from, to)
    std::vector<bool> is_emoji;
    std::size_t plain_start = 0;
    for (std::size_t i = 0; i < t.size();) {
      const auto len = emoji_sequence(t, i);
      if (len == 0) {
        ++i;
        continue;
      }
      if (i > plain_start) {
        pieces.emplace_back(plain_start, i);
        is_emoji.push_back(false);
      }
      pieces.emplace_back(i, i + len);
      is_emoji.push_back(true);
      i += len;
      plain_start = i;
    }
    if (pieces.empty() || plain_start < t.size()) {
      pieces.emplace_back(plain_start, t.size());
      is_emoji.push_back(false);
    }
    if (pieces.size() == 1) {
      out.tokens.push_back(tok);
      if (is_emoji[0]) out.tokens.back().kind = TokenKind::emoji;
    } else {
      for (std::size_t p = 0; p < pieces.size(); ++p) {
        const auto [from, to] = pieces[p];
        out.tokens.push_back({u::encode(std::u32string_view(t).substr(from, to - from)),
                              is_emoji[p] ? TokenKind::emoji : tok.kind, sub_span(tok, t.size(), from, to)});
        if (p + 1 < pieces.size()) out.separators.emplace_back();
      }
    }
    if (ti + 1 < stream.separators.size()) out.separators.push_back(stream.separators[ti + 1]);
  }
  return out;
}

TokenStream lowercase_english(const TokenStream& stream) {
  TokenStream out = stream;
  for (auto& tok : out.tokens) {
    auto t = u::decode(tok.surface);
    if (t.empty() || !std::all_of(t.begin(), t.end(), u::is_latin_letter)) continue;
    for (auto& c : t) c = u::to_lower_latin(c);
    tok.surface = u::encode(t);
  }
  return out;
}

MisspellingMap::MisspellingMap(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {
  for (const auto& [wrong, right] : entries_) {
    if (wrong.empty() || right.empty()) throw std::invalid_argument("misspelling entries must not be empty");
    if (wrong == right) throw std::invalid_argument("misspelling entry maps '" + wrong + "' to itself");
    for (const auto* s : {&wrong, &right}) {
      const auto t = u::decode(*s);
      if (std::any_of(t.begin(), t.end(), u::is_space))
        throw std::invalid_argument("misspelling entry contains whitespace: '" + *s + "'");
    }
    if (entries_.count(right))
      throw std::invalid_argument("misspelling map has a chain: '" + wrong + "' -> '" + right + "' -> '" +
                                  entries_.at(right) + "'");
  }
}

MisspellingMap MisspellingMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open misspelling map: " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return path.string() + ":" + std::to_string(lineno) + ": "; };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw InputError(where() + "expected 'wrong<TAB>right'");
    auto wrong = normalize_char_order(line.substr(0, tab));
    auto right = normalize_char_order(line.substr(tab + 1));
    auto [it, inserted] = entries.emplace(wrong, right);
    if (!inserted && it->second != right) throw InputError(where() + "conflicting mapping for '" + wrong + "'");
  }
  try {
    return MisspellingMap(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

const std::string* MisspellingMap::find(const std::string& surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? nullptr : &it->second;
}

TokenStream correct_spelling(const TokenStream& stream, const MisspellingMap& map) {
  TokenStream out = stream;
  for (auto& tok : out.tokens) {
    if (const auto* right = map.find(tok.surface)) tok.surface = *right;
  }
  return out;
}

// ---------------------------------------------------------------------------

VocabTable::VocabTable(std::vector<Entry> ranked, std::size_t limit) : ranked_(std::move(ranked)), limit_(limit) {
  if (ranked_.size() > limit_) throw std::invalid_argument("vocabulary larger than its limit");
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    if (i > 0 && ranked_[i].count > ranked_[i - 1].count)
      throw std::invalid_argument("vocabulary counts must be non-increasing by rank");
    if (!members_.insert(ranked_[i].surface).second)
      throw std::invalid_argument("duplicate vocabulary entry '" + ranked_[i].surface + "'");
  }
}

void VocabTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open vocabulary file: " + path.string(), 0);
  std::size_t n = 0;
  for (const auto& e : ranked_) {
    out << e.surface << '\t' << e.count << '\n';
    if (!out) throw WriteError("write failed: " + path.string(), n);
    ++n;
  }
}

VocabTable VocabTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vocabulary file: " + path.string());
  std::vector<Entry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    std::uint64_t count = 0;
    if (tab == std::string::npos || tab == 0) throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad line");
    auto [ptr, ec] = std::from_chars(line.data() + tab + 1, line.data() + line.size(), count);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad count");
    entries.push_back({line.substr(0, tab), count});
  }
  const auto n = entries.size();
  try {
    return VocabTable(std::move(entries), std::max<std::size_t>(n, 1));
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void TokenCounter::add(const std::string& surface, std::uint64_t n) {
  auto [it, inserted] = index_.try_emplace(surface, order_.size());
  if (inserted) order_.push_back({surface, 0});
  order_[it->second].count += n;
}

void TokenCounter::add(const TokenStream& stream) {
  for (const auto& tok : stream.tokens) add(tok.surface);
}

void TokenCounter::add(std::span<const std::string> surfaces) {
  for (const auto& s : surfaces) add(s);
}

void TokenCounter::merge(const TokenCounter& other) {
  for (const auto& e : other.order_) add(e.surface, e.count);
}

VocabTable TokenCounter::top(std::size_t k) const {
  if (k < 1) throw std::invalid_argument("vocabulary size must be >= 1");
  std::vector<std::size_t> idx(order_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const std::size_t keep = std::min(k, idx.size());
  // First-occurrence index breaks count ties.
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (order_[a].count != order_[b].count) return order_[a].count > order_[b].count;
                      return a < b;
                    });
  std::vector<VocabTable::Entry> ranked;
  ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) ranked.push_back(order_[idx[i]]);
  return VocabTable(std::move(ranked), k);
}

VocabTable build_vocab(std::span<const TokenStream> streams, std::size_t k) {
  TokenCounter counter;
  for (const auto& s : streams) counter.add(s);
  return counter.top(k);
}

double oov_rate(std::span<const TokenStream> streams, const VocabTable& vocab) {
  if (vocab.empty()) throw std::invalid_argument("OOV rate needs a non-empty vocabulary");
  std::uint64_t total = 0;
  std::uint64_t missing = 0;
  for (const auto& s : streams) {
    for (const auto& tok : s.tokens) {
      ++total;
      if (!vocab.contains(tok.surface)) ++missing;
    }
  }
  if (total == 0) throw std::invalid_argument("OOV rate of an empty corpus is undefined");
  return static_cast<double>(missing) / static_cast<double>(total);
}

double oov_rate(std::span<const std::vector<std::string>> docs, const VocabTable& vocab) {
  if (vocab.empty()) throw std::invalid_argument("OOV rate needs a non-empty vocabulary");
  std::uint64_t total = 0;
  std::uint64_t missing = 0;
  for (const auto& d : docs) {
    for (const auto& s : d) {
      ++total;
      if (!vocab.contains(s)) ++missing;
    }
  }
  if (total == 0) throw std::invalid_argument("OOV rate of an empty corpus is undefined");
  return static_cast<double>(missing) / static_cast<double>(total);
}

}  // namespace thaiprep
