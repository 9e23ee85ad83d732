#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "thaiprep/token.hpp"

namespace thaiprep {

/// Splits tokens so every emoji sequence stands alone with kind `emoji`.
/// Modifier, ZWJ, keycap and flag sequences stay whole.
TokenStream ungroup_emoji(const TokenStream& stream);

/// Lowercases tokens made only of Latin letters.
TokenStream lowercase_english(const TokenStream& stream);

/// Whole-token replacement table for common misspellings.
class MisspellingMap {
 public:
  MisspellingMap() = default;
  /// Throws std::invalid_argument on self-maps, conflicting keys, chains
  /// (a value that is also a key) or whitespace inside entries.
  explicit MisspellingMap(std::map<std::string, std::string> entries);

  /// TSV "wrong<TAB>right", '#' comments. Entries are char-order normalized.
  static MisspellingMap load(const std::filesystem::path& path);

  const std::string* find(const std::string& surface) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

TokenStream correct_spelling(const TokenStream& stream, const MisspellingMap& map);

/// Top-k token surfaces by count; equal counts keep first-occurrence order.
class VocabTable {
 public:
  struct Entry {
    std::string surface;
    std::uint64_t count = 0;

    bool operator==(const Entry&) const = default;
  };

  VocabTable() = default;
  VocabTable(std::vector<Entry> ranked, std::size_t limit);

  const std::vector<Entry>& entries() const { return ranked_; }
  bool contains(const std::string& surface) const { return members_.count(surface) != 0; }
  std::size_t size() const { return ranked_.size(); }
  bool empty() const { return ranked_.empty(); }
  std::size_t limit() const { return limit_; }

  /// Rank-ordered "surface<TAB>count" lines.
  void save(const std::filesystem::path& path) const;
  static VocabTable load(const std::filesystem::path& path);

 private:
  std::vector<Entry> ranked_;
  std::unordered_set<std::string> members_;
  std::size_t limit_ = 0;
};

/// Mergeable token counter; remembers the order in which surfaces first
/// appeared so ties rank deterministically.
class TokenCounter {
 public:
  void add(const std::string& surface, std::uint64_t n = 1);
  void add(const TokenStream& stream);
  void add(std::span<const std::string> surfaces);
  /// Appends `other`'s counts; its new surfaces rank after ours on ties.
  void merge(const TokenCounter& other);
  VocabTable top(std::size_t k) const;
  std::size_t distinct() const { return order_.size(); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<VocabTable::Entry> order_;
};

VocabTable build_vocab(std::span<const TokenStream> streams, std::size_t k);

/// Fraction of token occurrences whose surface is not in `vocab`. Throws
/// std::invalid_argument for an empty vocabulary or zero tokens.
double oov_rate(std::span<const TokenStream> streams, const VocabTable& vocab);
double oov_rate(std::span<const std::vector<std::string>> docs, const VocabTable& vocab);

}  // namespace thaiprep
