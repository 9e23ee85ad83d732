#include <algorithm>
#include <fstream>

#include "thaiprep/errors.hpp"
#include "thaiprep/normalizer.hpp"
#include "thaiprep/tokenizer.hpp"

namespace thaiprep {

LexiconTrie::LexiconTrie() : nodes_(1) {}

std::uint32_t LexiconTrie::child(std::uint32_t node, char32_t c) const {
  const auto& kids = nodes_[node].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), c, [](const auto& kv, char32_t key) { return kv.first < key; });
  return it != kids.end() && it->first == c ? it->second : kNone;
}

std::uint32_t LexiconTrie::find(std::u32string_view word) const {
  std::uint32_t node = 0;
  for (char32_t c : word) {
    node = child(node, c);
    if (node == kNone) return kNone;
  }
  return node;
}

bool LexiconTrie::insert(std::u32string_view word) {
  if (word.empty()) return false;
  std::uint32_t node = 0;
  for (char32_t c : word) {
    auto next = child(node, c);
    if (next == kNone) {
      next = static_cast<std::uint32_t>(nodes_.size());
      nodes_.emplace_back();
      auto& kids = nodes_[node].children;
      auto it =
          std::lower_bound(kids.begin(), kids.end(), c, [](const auto& kv, char32_t key) { return kv.first < key; });
      kids.insert(it, {c, next});
    }
    node = next;
  }
  if (nodes_[node].terminal) return false;
  nodes_[node].terminal = true;
  ++size_;
  max_length_ = std::max(max_length_, word.size());
  return true;
}

bool LexiconTrie::contains(std::u32string_view word) const {
  if (word.empty()) return false;
  const auto node = find(word);
  return node != kNone && nodes_[node].terminal;
}

bool LexiconTrie::has_prefix(std::u32string_view prefix) const { return find(prefix) != kNone; }

std::vector<std::string> LexiconTrie::entries() const {
  std::vector<std::string> out;
  std::u32string path;
  // Depth-first walk; children are sorted, so output is in code point order.
  auto walk = [&](auto&& self, std::uint32_t node) -> void {
    if (nodes_[node].terminal) out.push_back(unicode::encode(path));
    for (const auto& [c, next] : nodes_[node].children) {
      path.push_back(c);
      self(self, next);
      path.pop_back();
    }
  };
  walk(walk, 0);
  return out;
}

LexiconTrie load_lexicon(std::span<const std::string> paths, std::span<const std::string> special_surfaces,
                         std::vector<std::string>* warnings) {
  LexiconTrie trie;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open lexicon file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      auto entry = unicode::decode(line);
      while (!entry.empty() && unicode::is_space(entry.back())) entry.pop_back();
      std::size_t lead = 0;
      while (lead < entry.size() && unicode::is_space(entry[lead])) ++lead;
      entry.erase(0, lead);
      if (entry.empty()) {
        if (warnings) warnings->push_back(path + ":" + std::to_string(lineno) + ": empty line skipped");
        continue;
      }
      if (entry[0] == U'#') continue;
      trie.insert(normalize_char_order(unicode::encode(entry)));
    }
    if (in.bad()) throw InputError("read failure in lexicon file: " + path);
  }
  for (const auto& s : special_surfaces) trie.insert(std::string_view(s));
  return trie;
}

}  // namespace thaiprep
