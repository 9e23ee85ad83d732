#include "thaiprep/normalizer.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <unordered_map>

namespace thaiprep {

namespace u = unicode;

std::string_view to_string(RewriteRule rule) {
  switch (rule) {
    case RewriteRule::fix_html:
      return "fix_html";
    case RewriteRule::char_order:
      return "normalize_char_order";
    case RewriteRule::empty_brackets:
      return "remove_empty_brackets";
    case RewriteRule::pad_slash_hash:
      return "pad_slash_hash";
    case RewriteRule::laugh:
      return "mark_laugh";
    case RewriteRule::numbers:
      return "mark_numbers";
    case RewriteRule::char_repetition:
      return "mark_char_repetition";
    case RewriteRule::word_repetition:
      return "mark_word_repetition";
    case RewriteRule::whitespace:
      return "collapse_whitespace";
  }
  return "unknown";
}

nlohmann::json to_json(const RewriteRecord& r) {
  return {{"rule", to_string(r.rule)},
          {"span", {r.source_span.begin, r.source_span.end}},
          {"replacement", r.replacement}};
}

std::string apply_rewrites(std::string_view original, std::span<const RewriteRecord> rewrites) {
  const auto src = u::decode(original);
  std::u32string out;
  std::size_t pos = 0;
  for (const auto& r : rewrites) {
    if (r.source_span.begin < pos || r.source_span.end < r.source_span.begin || r.source_span.end > src.size())
      throw std::invalid_argument("rewrite spans are out of range, unsorted or overlapping");
    out.append(src, pos, r.source_span.begin - pos);
    out += u::decode(r.replacement);
    pos = r.source_span.end;
  }
  out.append(src, pos);
  return u::encode(out);
}

namespace {

struct Edit {
  std::size_t begin;
  std::size_t end;
  std::u32string replacement;
};
using Edits = std::vector<Edit>;

struct Context {
  std::u32string crep, wrep, num, laugh;
  int crep_cap = 5;
  int wrep_cap = 5;
  const std::vector<std::wregex>* number_patterns = nullptr;

  Context(const SpecialTokens& s, const RewriteCaps& caps)
      : crep(u::decode(s.crep)),
        wrep(u::decode(s.wrep)),
        num(u::decode(s.num)),
        laugh(u::decode(s.laugh)),
        crep_cap(caps.crep),
        wrep_cap(caps.wrep) {}
};

std::u32string padded(const std::u32string& surface) { return U" " + surface + U" "; }

std::u32string to_u32(std::size_t n) {
  const auto s = std::to_string(n);
  return std::u32string(s.begin(), s.end());
}

// Characters that later stages must leave alone: every special-token surface,
// plus " <digits>" right after [CREP]/[WREP] (the emitted count). Recomputed
// from the text so a second run sees the same protection as the first.
class Protection {
 public:
  Protection(std::u32string_view t, const Context& ctx) : mask_(t.size() + 1, 0), prefix_(t.size() + 1, 0) {
    for (const std::u32string* s : {&ctx.crep, &ctx.wrep, &ctx.num, &ctx.laugh}) {
      const bool counted = s == &ctx.crep || s == &ctx.wrep;
      for (auto p = t.find(*s); p != std::u32string_view::npos; p = t.find(*s, p + 1)) {
        std::fill(mask_.begin() + p, mask_.begin() + p + s->size(), 1);
        std::size_t e = p + s->size();
        if (counted && e + 1 < t.size() && t[e] == U' ' && u::is_ascii_digit(t[e + 1])) {
          std::size_t k = e + 1;
          while (k < t.size() && u::is_ascii_digit(t[k])) ++k;
          std::fill(mask_.begin() + e, mask_.begin() + k, 1);
        }
      }
    }
    for (std::size_t i = 0; i < t.size(); ++i) prefix_[i + 1] = prefix_[i] + mask_[i];
  }

  bool operator[](std::size_t i) const { return mask_[i] != 0; }
  bool any(std::size_t begin, std::size_t end) const { return prefix_[end] != prefix_[begin]; }

 private:
  std::vector<unsigned char> mask_;
  std::vector<std::size_t> prefix_;
};

// --- fix_html ---------------------------------------------------------------

const std::unordered_map<std::u32string, char32_t>& named_entities() {
  static const std::unordered_map<std::u32string, char32_t> table = {
      {U"amp", U'&'},     {U"lt", U'<'},       {U"gt", U'>'},      {U"quot", U'"'},     {U"apos", U'\''},
      {U"nbsp", 0x00A0},  {U"copy", 0x00A9},   {U"reg", 0x00AE},   {U"trade", 0x2122},  {U"hellip", 0x2026},
      {U"mdash", 0x2014}, {U"ndash", 0x2013},  {U"lsquo", 0x2018}, {U"rsquo", 0x2019},  {U"ldquo", 0x201C},
      {U"rdquo", 0x201D}, {U"laquo", 0x00AB},  {U"raquo", 0x00BB}, {U"bull", 0x2022},   {U"middot", 0x00B7},
      {U"deg", 0x00B0},   {U"times", 0x00D7},  {U"divide", 0x00F7}, {U"euro", 0x20AC},  {U"pound", 0x00A3},
      {U"yen", 0x00A5},   {U"cent", 0x00A2},   {U"sect", 0x00A7},  {U"para", 0x00B6},   {U"plusmn", 0x00B1},
  };
  return table;
}

bool acceptable_reference(char32_t c) {
  if (c == 0 || c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) return false;
  if (c < 0x20 && c != U'\t' && c != U'\n' && c != U'\r') return false;
  return true;
}

// Parses "&...;" at i. Returns the decoded scalar and the end offset.
std::optional<std::pair<char32_t, std::size_t>> parse_reference(std::u32string_view t, std::size_t i) {
  std::size_t j = i + 1;
  if (j < t.size() && t[j] == U'#') {
    ++j;
    bool hex = false;
    if (j < t.size() && (t[j] == U'x' || t[j] == U'X')) {
      hex = true;
      ++j;
    }
    const std::size_t digits_start = j;
    std::uint64_t v = 0;
    while (j < t.size() && j - digits_start < 8) {
      const char32_t c = t[j];
      int d = -1;
      if (c >= U'0' && c <= U'9') d = static_cast<int>(c - U'0');
      else if (hex && c >= U'a' && c <= U'f') d = static_cast<int>(c - U'a' + 10);
      else if (hex && c >= U'A' && c <= U'F') d = static_cast<int>(c - U'A' + 10);
      if (d < 0) break;
      v = v * (hex ? 16 : 10) + static_cast<std::uint64_t>(d);
      ++j;
    }
    if (j == digits_start || j >= t.size() || t[j] != U';') return std::nullopt;
    if (!acceptable_reference(static_cast<char32_t>(v)) || v > 0x10FFFF) return std::nullopt;
    return std::make_pair(static_cast<char32_t>(v), j + 1);
  }
  const std::size_t name_start = j;
  while (j < t.size() && j - name_start < 10 && ((t[j] >= U'a' && t[j] <= U'z') || (t[j] >= U'A' && t[j] <= U'Z')))
    ++j;
  if (j == name_start || j >= t.size() || t[j] != U';') return std::nullopt;
  const auto& table = named_entities();
  auto it = table.find(std::u32string(t.substr(name_start, j - name_start)));
  if (it == table.end()) return std::nullopt;
  return std::make_pair(it->second, j + 1);
}

// Parses "<br>", "<br/>", "<br />" (any case, inner spaces allowed) at i.
std::optional<std::size_t> parse_br(std::u32string_view t, std::size_t i) {
  std::size_t j = i + 1;
  auto skip_spaces = [&] {
    while (j < t.size() && (t[j] == U' ' || t[j] == U'\t')) ++j;
  };
  skip_spaces();
  if (j + 1 >= t.size() || (t[j] != U'b' && t[j] != U'B') || (t[j + 1] != U'r' && t[j + 1] != U'R'))
    return std::nullopt;
  j += 2;
  skip_spaces();
  if (j < t.size() && t[j] == U'/') {
    ++j;
    skip_spaces();
  }
  if (j >= t.size() || t[j] != U'>') return std::nullopt;
  return j + 1;
}

Edits html_edits(std::u32string_view t, const Context&) {
  Edits edits;
  for (std::size_t i = 0; i < t.size();) {
    if (t[i] == U'&') {
      if (auto ref = parse_reference(t, i)) {
        edits.push_back({i, ref->second, std::u32string(1, ref->first)});
        i = ref->second;
        continue;
      }
    } else if (t[i] == U'<') {
      if (auto end = parse_br(t, i)) {
        edits.push_back({i, *end, U"\n"});
        i = *end;
        continue;
      }
    }
    ++i;
  }
  return edits;
}

// --- whitespace -------------------------------------------------------------

Edits whitespace_edits(std::u32string_view t, const Context&) {
  Edits edits;
  for (std::size_t i = 0; i < t.size();) {
    if (!u::is_space(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    bool newline = false;
    while (j < t.size() && u::is_space(t[j])) newline |= u::is_newline(t[j++]);
    std::u32string want;
    if (i != 0 && j != t.size()) want = newline ? U"\n" : U" ";
    if (t.substr(i, j - i) != want) edits.push_back({i, j, want});
    i = j;
  }
  return edits;
}

// --- brackets ---------------------------------------------------------------

Edits bracket_edits(std::u32string_view t, const Context&) {
  Edits edits;
  for (std::size_t i = 0; i < t.size(); ++i) {
    char32_t close = 0;
    switch (t[i]) {
      case U'(':
        close = U')';
        break;
      case U'[':
        close = U']';
        break;
      case U'{':
        close = U'}';
        break;
      default:
        continue;
    }
    std::size_t j = i + 1;
    while (j < t.size() && u::is_space(t[j])) ++j;
    if (j < t.size() && t[j] == close) {
      edits.push_back({i, j + 1, U""});
      i = j;
    }
  }
  return edits;
}

// --- pad '/' and '#' --------------------------------------------------------

Edits pad_edits(std::u32string_view t, const Context&) {
  Edits edits;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char32_t c = t[i];
    if (c != U'/' && c != U'#') continue;
    if (c == U'/' && i > 0 && i + 1 < t.size() && u::is_digit(t[i - 1]) && u::is_digit(t[i + 1])) continue;
    const bool before = i > 0 && !u::is_space(t[i - 1]);
    const bool after = i + 1 < t.size() && !u::is_space(t[i + 1]);
    if (!before && !after) continue;
    std::u32string rep;
    if (before) rep.push_back(U' ');
    rep.push_back(c);
    if (after) rep.push_back(U' ');
    edits.push_back({i, i + 1, std::move(rep)});
  }
  return edits;
}

// --- character order --------------------------------------------------------

int mark_rank(char32_t c) {
  if (c >= 0x0E38 && c <= 0x0E3A) return 1;                                  // below vowels, phinthu
  if (c == 0x0E31 || (c >= 0x0E34 && c <= 0x0E37) || c == 0x0E47) return 2;  // above vowels, maitaikhu
  if (c >= 0x0E48 && c <= 0x0E4B) return 3;                                  // tone marks
  return 4;                                                                  // thanthakhat, nikhahit, yamakkan
}

Edits char_order_edits(std::u32string_view t, const Context&) {
  Edits edits;
  const auto n = t.size();
  for (std::size_t i = 0; i < n;) {
    const bool starts_run = u::is_thai_combining(t[i]) ||
                            (t[i] == u::kSaraAm && i + 1 < n && u::is_thai_combining(t[i + 1]));
    if (!starts_run) {
      ++i;
      continue;
    }
    std::u32string marks;
    std::size_t j = i;
    while (j < n && u::is_thai_combining(t[j])) marks.push_back(t[j++]);
    bool am = false;
    if (j + 1 < n && t[j] == u::kSaraAm && u::is_thai_combining(t[j + 1])) {
      am = true;
      ++j;
      while (j < n && u::is_thai_combining(t[j])) marks.push_back(t[j++]);
    }
    std::stable_sort(marks.begin(), marks.end(), [](char32_t a, char32_t b) { return mark_rank(a) < mark_rank(b); });
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    if (am) marks.push_back(u::kSaraAm);
    if (t.substr(i, j - i) != marks) edits.push_back({i, j, std::move(marks)});
    i = j;
  }
  return edits;
}

// --- laugh ------------------------------------------------------------------

Edits laugh_edits(std::u32string_view t, const Context& ctx) {
  Edits edits;
  const Protection prot(t, ctx);
  for (std::size_t i = 0; i < t.size();) {
    if (t[i] != U'5') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && t[j] == U'5') ++j;
    std::size_t end = j;
    if (end < t.size() && t[end] == U'+') ++end;
    if (j - i >= kLaughRunThreshold && !prot.any(i, end)) edits.push_back({i, end, padded(ctx.laugh)});
    i = j;
  }
  return edits;
}

// --- numbers ----------------------------------------------------------------

bool is_number_char(char32_t c) { return u::is_digit(c) || c == U'x' || c == U'X'; }

bool is_number_separator(char32_t c) {
  return c == U'.' || c == U',' || c == U':' || c == U'-' || c == U'/';
}

bool is_currency_symbol(char32_t c) {
  return c == U'$' || c == 0x0E3F || c == 0x20AC || c == 0x00A3 || c == 0x00A5;
}

bool currency_adjacent(std::u32string_view t, std::size_t begin, std::size_t end) {
  std::size_t k = begin;
  if (k > 0 && t[k - 1] == U' ') --k;
  if (k > 0 && is_currency_symbol(t[k - 1])) return true;
  k = end;
  if (k < t.size() && t[k] == U' ') ++k;
  if (k < t.size() && is_currency_symbol(t[k])) return true;
  return t.substr(k, 3) == U"บาท";
}

Edits number_edits(std::u32string_view t, const Context& ctx) {
  Edits edits;
  const Protection prot(t, ctx);
  const auto n = t.size();

  // Configured patterns go first; the built-in scan skips what they took.
  std::vector<char> taken(n, 0);
  if (ctx.number_patterns && !ctx.number_patterns->empty()) {
    const std::wstring w(t.begin(), t.end());
    for (const auto& re : *ctx.number_patterns) {
      for (std::wsregex_iterator it(w.begin(), w.end(), re), end; it != end; ++it) {
        const auto b = static_cast<std::size_t>(it->position());
        const auto e = b + static_cast<std::size_t>(it->length());
        if (b == e || prot.any(b, e) || std::any_of(taken.begin() + b, taken.begin() + e, [](char c) { return c; }))
          continue;
        std::fill(taken.begin() + b, taken.begin() + e, 1);
        edits.push_back({b, e, padded(ctx.num)});
      }
    }
  }
  auto blocked = [&](std::size_t k) { return prot[k] || taken[k]; };

  for (std::size_t i = 0; i < n;) {
    if (blocked(i) || !is_number_char(t[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::size_t j = i;
    for (;;) {
      while (j < n && !blocked(j) && is_number_char(t[j])) ++j;
      if (j + 1 < n && is_number_separator(t[j]) && !blocked(j) && !blocked(j + 1) && is_number_char(t[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    i = j;

    std::size_t digits = 0;
    std::size_t masks = 0;
    for (std::size_t k = start; k < j; ++k) {
      if (u::is_digit(t[k])) ++digits;
      else if (t[k] == U'x' || t[k] == U'X') ++masks;
    }
    const bool glued = (start > 0 && u::is_latin_letter(t[start - 1])) || (j < n && u::is_latin_letter(t[j]));
    if (glued || digits == 0) continue;
    bool accept = masks == 0;
    if (!accept) accept = (digits >= 3 && j - start >= 6) || currency_adjacent(t, start, j);
    if (accept) edits.push_back({start, j, padded(ctx.num)});
  }
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
  return edits;
}

// --- repetitions ------------------------------------------------------------

std::u32string repetition_replacement(std::u32string_view unit, const std::u32string& surface, std::size_t count,
                                      bool space_after) {
  std::u32string rep(unit);
  rep += U" ";
  rep += surface;
  rep += U" ";
  rep += to_u32(count);
  if (space_after) rep += U" ";
  return rep;
}

Edits char_repetition_edits(std::u32string_view t, const Context& ctx) {
  Edits edits;
  const Protection prot(t, ctx);
  const auto n = t.size();
  for (std::size_t i = 0; i < n;) {
    const char32_t c = t[i];
    if (prot[i] || u::is_space(c) || u::is_digit(c) || u::is_combining(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && t[j] == c && !prot[j]) ++j;
    std::size_t end = j;
    // The last copy belongs to the following combining mark.
    if (end < n && u::is_combining(t[end])) --end;
    const std::size_t run = end - i;
    if (run >= kCharRunThreshold) {
      const auto count = std::min<std::size_t>(run, static_cast<std::size_t>(ctx.crep_cap));
      const bool space_after = end < n && !u::is_space(t[end]);
      edits.push_back({i, end, repetition_replacement(t.substr(i, 1), ctx.crep, count, space_after)});
    }
    i = j;
  }
  return edits;
}

Edits word_repetition_edits(std::u32string_view t, const Context& ctx) {
  Edits edits;
  const Protection prot(t, ctx);
  const auto n = t.size();
  // run[k]: length of the unprotected, space-free stretch starting at k.
  std::vector<std::size_t> run(n + 1, 0);
  for (std::size_t k = n; k-- > 0;) run[k] = prot[k] || u::is_space(t[k]) ? 0 : run[k + 1] + 1;

  for (std::size_t i = 0; i < n;) {
    if (run[i] == 0 || u::is_combining(t[i])) {
      ++i;
      continue;
    }
    const std::size_t room = std::min(run[i], kMaxRepeatUnit);  // longest valid unit starting at i

    bool replaced = false;
    for (std::size_t p = kMinRepeatUnit; p <= room; ++p) {
      const auto unit = t.substr(i, p);
      auto copy_at = [&](std::size_t pos) {
        return pos + p <= n && t[pos] == unit[0] && t.compare(pos, p, unit) == 0 && !prot.any(pos, pos + p);
      };
      std::size_t copies = 1;
      std::size_t end = i + p;
      std::size_t prev_end = i;
      for (;;) {
        if (copy_at(end)) {
          prev_end = end;
          end += p;
        } else if (end < n && copy_at(end + 1) && u::is_space(t[end])) {
          prev_end = end;
          end += 1 + p;
        } else {
          break;
        }
        ++copies;
      }
      if (copies < 3) continue;
      if (end < n && u::is_combining(t[end])) {
        --copies;
        end = prev_end;
      }
      if (copies < 3) continue;
      const auto count = std::min<std::size_t>(copies, static_cast<std::size_t>(ctx.wrep_cap));
      const bool space_after = end < n && !u::is_space(t[end]);
      edits.push_back({i, end, repetition_replacement(unit, ctx.wrep, count, space_after)});
      i = end;
      replaced = true;
      break;
    }
    if (!replaced) ++i;
  }
  return edits;
}

// --- stage table ------------------------------------------------------------

using StageFn = Edits (*)(std::u32string_view, const Context&);

struct StageInfo {
  std::string_view name;
  StageFn fn;
  RewriteRule rule;
};

constexpr std::array<StageInfo, 9> kStages = {{
    {"fix_html", html_edits, RewriteRule::fix_html},
    {"normalize_char_order", char_order_edits, RewriteRule::char_order},
    {"remove_empty_brackets", bracket_edits, RewriteRule::empty_brackets},
    {"pad_slash_hash", pad_edits, RewriteRule::pad_slash_hash},
    {"mark_laugh", laugh_edits, RewriteRule::laugh},
    {"mark_numbers", number_edits, RewriteRule::numbers},
    {"mark_char_repetition", char_repetition_edits, RewriteRule::char_repetition},
    {"mark_word_repetition", word_repetition_edits, RewriteRule::word_repetition},
    {"collapse_whitespace", whitespace_edits, RewriteRule::whitespace},
}};

constexpr int kMaxStageIterations = 16;

// Current text plus, per character, where it came from in the original
// (kInserted for characters produced by a rewrite).
class Tracker {
 public:
  static constexpr std::size_t kInserted = static_cast<std::size_t>(-1);

  Tracker(std::u32string text, bool track) : text_(std::move(text)), track_(track) {
    if (!track_) return;
    origin_.resize(text_.size());
    for (std::size_t i = 0; i < origin_.size(); ++i) origin_[i] = i;
    rule_.assign(text_.size(), RewriteRule::fix_html);
    deleted_by_.assign(text_.size(), RewriteRule::fix_html);
    original_size_ = text_.size();
  }

  const std::u32string& text() const { return text_; }

  void apply(const Edits& edits, RewriteRule rule) {
    std::u32string out;
    std::vector<std::size_t> origin;
    std::vector<RewriteRule> rules;
    out.reserve(text_.size() + 16);
    std::size_t pos = 0;
    auto keep = [&](std::size_t from, std::size_t to) {
      out.append(text_, from, to - from);
      if (!track_) return;
      origin.insert(origin.end(), origin_.begin() + from, origin_.begin() + to);
      rules.insert(rules.end(), rule_.begin() + from, rule_.begin() + to);
    };
    for (const auto& e : edits) {
      keep(pos, e.begin);
      // Shared prefix/suffix stays attributed to the original characters.
      std::size_t pre = 0;
      const std::size_t old_len = e.end - e.begin;
      while (pre < old_len && pre < e.replacement.size() && text_[e.begin + pre] == e.replacement[pre]) ++pre;
      std::size_t suf = 0;
      while (suf < old_len - pre && suf < e.replacement.size() - pre &&
             text_[e.end - 1 - suf] == e.replacement[e.replacement.size() - 1 - suf])
        ++suf;
      keep(e.begin, e.begin + pre);
      out.append(e.replacement, pre, e.replacement.size() - pre - suf);
      if (track_) {
        for (std::size_t k = e.begin + pre; k < e.end - suf; ++k) {
          if (origin_[k] != kInserted) deleted_by_[origin_[k]] = rule;
        }
        origin.insert(origin.end(), e.replacement.size() - pre - suf, kInserted);
        rules.insert(rules.end(), e.replacement.size() - pre - suf, rule);
      }
      keep(e.end - suf, e.end);
      pos = e.end;
    }
    keep(pos, text_.size());
    text_ = std::move(out);
    origin_ = std::move(origin);
    rule_ = std::move(rules);
  }

  std::vector<RewriteRecord> records() const {
    std::vector<RewriteRecord> out;
    std::size_t next_original = 0;
    std::u32string inserted;
    std::vector<RewriteRule> inserted_rules;
    auto flush = [&](std::size_t kept_origin) {
      if (kept_origin > next_original || !inserted.empty()) emit(next_original, kept_origin, inserted, inserted_rules, out);
      inserted.clear();
      inserted_rules.clear();
      next_original = kept_origin + 1;
    };
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (origin_[i] == kInserted) {
        inserted_rules.push_back(rule_[i]);
        inserted.push_back(text_[i]);
      } else {
        flush(origin_[i]);
      }
    }
    if (original_size_ > next_original || !inserted.empty())
      emit(next_original, original_size_, inserted, inserted_rules, out);
    return out;
  }

 private:
  // One record per rule when the deleted and inserted parts show the same
  // sequence of rules; otherwise a single record for the whole region.
  void emit(std::size_t begin, std::size_t end, const std::u32string& inserted,
            const std::vector<RewriteRule>& inserted_rules, std::vector<RewriteRecord>& out) const {
    struct Run {
      RewriteRule rule;
      std::size_t from, to;
    };
    auto runs = [](auto rule_at, std::size_t from, std::size_t to) {
      std::vector<Run> r;
      for (std::size_t i = from; i < to; ++i) {
        if (r.empty() || r.back().rule != rule_at(i)) r.push_back({rule_at(i), i, i});
        r.back().to = i + 1;
      }
      return r;
    };
    const auto del = runs([&](std::size_t i) { return deleted_by_[i]; }, begin, end);
    const auto ins = runs([&](std::size_t i) { return inserted_rules[i]; }, 0, inserted.size());
    bool paired = !del.empty() && del.size() == ins.size();
    for (std::size_t k = 0; paired && k < del.size(); ++k) paired = del[k].rule == ins[k].rule;
    if (!paired) {
      const RewriteRule r = !ins.empty() ? ins[0].rule : del[0].rule;
      out.push_back({r, {begin, end}, u::encode(inserted)});
      return;
    }
    for (std::size_t k = 0; k < del.size(); ++k) {
      out.push_back({del[k].rule,
                     {del[k].from, del[k].to},
                     u::encode(std::u32string_view(inserted).substr(ins[k].from, ins[k].to - ins[k].from))});
    }
  }

  std::u32string text_;
  bool track_;
  std::vector<std::size_t> origin_;
  std::vector<RewriteRule> rule_;
  std::vector<RewriteRule> deleted_by_;
  std::size_t original_size_ = 0;
};

void run_stage(Tracker& tracker, const StageInfo& stage, const Context& ctx) {
  for (int it = 0; it < kMaxStageIterations; ++it) {
    auto edits = stage.fn(tracker.text(), ctx);
    if (edits.empty()) return;
    tracker.apply(edits, stage.rule);
  }
}

std::string run_single(std::string_view text, int stage_index, const Context& ctx) {
  Tracker tracker(u::decode(text), false);
  run_stage(tracker, kStages[stage_index], ctx);
  return u::encode(tracker.text());
}

int stage_index(std::string_view name) {
  for (std::size_t i = 0; i < kStages.size(); ++i) {
    if (kStages[i].name == name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown normalizer stage: " + std::string(name));
}

const Context& default_context() {
  static const Context ctx{SpecialTokens{}, RewriteCaps{}};
  return ctx;
}

}  // namespace

std::string fix_html(std::string_view text) { return run_single(text, 0, default_context()); }
std::string normalize_char_order(std::string_view text) { return run_single(text, 1, default_context()); }
std::string remove_empty_brackets(std::string_view text) { return run_single(text, 2, default_context()); }
std::string pad_slash_hash(std::string_view text) { return run_single(text, 3, default_context()); }
std::string collapse_whitespace(std::string_view text) { return run_single(text, 8, default_context()); }

std::string mark_laugh(std::string_view text, const SpecialTokens& specials) {
  return run_single(text, 4, Context(specials, {}));
}

std::string mark_numbers(std::string_view text, const SpecialTokens& specials,
                         std::span<const std::string> extra_patterns) {
  const auto patterns = compile_number_patterns(extra_patterns);
  Context ctx(specials, {});
  ctx.number_patterns = &patterns;
  return run_single(text, 5, ctx);
}

std::vector<std::wregex> compile_number_patterns(std::span<const std::string> patterns) {
  std::vector<std::wregex> out;
  for (const auto& p : patterns) {
    const auto cps = u::decode(p);
    try {
      out.emplace_back(std::wstring(cps.begin(), cps.end()), std::regex_constants::ECMAScript);
    } catch (const std::regex_error& e) {
      throw std::invalid_argument("bad number pattern '" + p + "': " + e.what());
    }
  }
  return out;
}

std::string mark_char_repetition(std::string_view text, const SpecialTokens& specials, int cap) {
  if (cap < 2) throw std::invalid_argument("repetition cap must be >= 2");
  return run_single(text, 6, Context(specials, {cap, 5}));
}

std::string mark_word_repetition(std::string_view text, const SpecialTokens& specials, int cap) {
  if (cap < 2) throw std::invalid_argument("repetition cap must be >= 2");
  return run_single(text, 7, Context(specials, {5, cap}));
}

Normalizer::Normalizer() : Normalizer(Options{}) {}

Normalizer::Normalizer(Options options) : options_(std::move(options)) {
  options_.specials.validate();
  if (options_.caps.crep < 2 || options_.caps.wrep < 2) throw std::invalid_argument("repetition caps must be >= 2");
  for (const auto& name : options_.stage_order) stages_.push_back(stage_index(name));
  number_regexes_ = compile_number_patterns(options_.number_patterns);
}

Normalizer::Normalizer(const PipelineConfig& config)
    : Normalizer(Options{config.special_tokens, config.rewrite_caps, config.stage_order, config.number_patterns}) {}

namespace {

void run_passes(Tracker& tracker, const std::vector<int>& stages, const Context& ctx) {
  for (int pass = 0; pass < Normalizer::kMaxPasses; ++pass) {
    const std::u32string before = tracker.text();
    for (int s : stages) run_stage(tracker, kStages[s], ctx);
    if (tracker.text() == before) return;
  }
}

}  // namespace

NormalizedDocument Normalizer::normalize(std::string_view text) const {
  Context ctx(options_.specials, options_.caps);
  ctx.number_patterns = &number_regexes_;
  Tracker tracker(u::decode(text), true);
  run_passes(tracker, stages_, ctx);
  return {u::encode(tracker.text()), tracker.records()};
}

std::string Normalizer::normalize_text(std::string_view text) const {
  Context ctx(options_.specials, options_.caps);
  ctx.number_patterns = &number_regexes_;
  Tracker tracker(u::decode(text), false);
  run_passes(tracker, stages_, ctx);
  return u::encode(tracker.text());
}

NormalizedDocument normalize_document(const RawThread& raw, const PipelineConfig& config) {
  return Normalizer(config).normalize(thread_text(raw, config.concat_title));
}

}  // namespace thaiprep
