#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "thaiprep/errors.hpp"
#include "thaiprep/tokenizer.hpp"

namespace thaiprep {

namespace {

constexpr std::string_view kBuiltinRules =
#include "tcc_rules.inc"
    ;

char32_t parse_codepoint(std::string_view s, std::string_view source, std::size_t line) {
  if (s.size() < 3 || s.substr(0, 2) != "U+")
    throw InputError(std::string(source) + ":" + std::to_string(line) + ": expected U+XXXX, got '" + std::string(s) +
                     "'");
  unsigned long v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v > 0x10FFFF)
    throw InputError(std::string(source) + ":" + std::to_string(line) + ": bad code point '" + std::string(s) + "'");
  return static_cast<char32_t>(v);
}

}  // namespace

TccRules TccRules::parse(std::string_view text, std::string_view source) {
  TccRules rules;
  std::map<std::string, int> class_ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return std::string(source) + ":" + std::to_string(lineno) + ": "; };

  auto class_mask = [&](const std::string& name) -> std::uint64_t {
    if (name == "*") return 0;
    auto it = class_ids.find(name);
    if (it == class_ids.end()) throw InputError(where() + "unknown class '" + name + "'");
    return std::uint64_t{1} << it->second;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string keyword;
    if (!(words >> keyword)) continue;
    if (keyword == "class") {
      std::string name;
      if (!(words >> name) || name == "*") throw InputError(where() + "class needs a name");
      if (class_ids.count(name)) throw InputError(where() + "class '" + name + "' defined twice");
      if (class_ids.size() == 64) throw InputError(where() + "too many classes");
      const int id = static_cast<int>(class_ids.size());
      class_ids[name] = id;
      std::string range;
      bool any = false;
      while (words >> range) {
        const auto dash = range.find('-');
        const char32_t lo = parse_codepoint(std::string_view(range).substr(0, dash), source, lineno);
        const char32_t hi =
            dash == std::string::npos ? lo : parse_codepoint(std::string_view(range).substr(dash + 1), source, lineno);
        if (hi < lo) throw InputError(where() + "empty range " + range);
        rules.ranges_.push_back({lo, hi, std::uint64_t{1} << id});
        any = true;
      }
      if (!any) throw InputError(where() + "class '" + name + "' has no ranges");
    } else if (keyword == "bind" || keyword == "split") {
      std::string left, right, extra;
      if (!(words >> left >> right) || (words >> extra)) throw InputError(where() + keyword + " needs two classes");
      rules.rules_.push_back({class_mask(left), class_mask(right), keyword == "bind"});
    } else {
      throw InputError(where() + "unknown directive '" + keyword + "'");
    }
  }
  return rules;
}

TccRules TccRules::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open rule file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const TccRules& TccRules::builtin() {
  static const TccRules rules = parse(kBuiltinRules, "builtin");
  return rules;
}

std::uint64_t TccRules::classes_of(char32_t c) const {
  std::uint64_t mask = 0;
  for (const auto& r : ranges_) {
    if (c >= r.lo && c <= r.hi) mask |= r.classes;
  }
  return mask;
}

bool TccRules::binds(char32_t left, char32_t right) const {
  const auto lm = classes_of(left);
  const auto rm = classes_of(right);
  for (const auto& rule : rules_) {
    if ((rule.left == 0 || (lm & rule.left)) && (rule.right == 0 || (rm & rule.right))) return rule.bind;
  }
  return false;
}

std::vector<Span> cluster_spans(std::u32string_view text, const TccRules& rules) {
  std::vector<Span> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (!rules.binds(text[i - 1], text[i])) {
      out.push_back({start, i});
      start = i;
    }
  }
  out.push_back({start, text.size()});
  return out;
}

std::vector<CharacterCluster> cluster_tcc(std::string_view text, const TccRules& rules) {
  const auto t = unicode::decode(text);
  std::vector<CharacterCluster> out;
  for (const auto& s : cluster_spans(t, rules))
    out.push_back({unicode::encode(std::u32string_view(t).substr(s.begin, s.size())), s});
  return out;
}

}  // namespace thaiprep
