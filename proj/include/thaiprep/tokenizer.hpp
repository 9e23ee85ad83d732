#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thaiprep/corpus_io.hpp"
#include "thaiprep/token.hpp"

namespace thaiprep {

// --- Thai Character Clusters ------------------------------------------------

/// Ordered bind/split rules over character classes; see data/tcc_rules.txt
/// for the file format.
class TccRules {
 public:
  static TccRules parse(std::string_view text, std::string_view source = "<rules>");
  static TccRules load(const std::filesystem::path& path);
  /// The rule table compiled into the library (identical to data/tcc_rules.txt).
  static const TccRules& builtin();

  /// True when no cluster boundary may fall between `left` and `right`.
  bool binds(char32_t left, char32_t right) const;

  std::size_t rule_count() const { return rules_.size(); }

 private:
  struct Range {
    char32_t lo;
    char32_t hi;
    std::uint64_t classes;
  };
  struct Rule {
    std::uint64_t left;  // 0 means any
    std::uint64_t right;
    bool bind;
  };

  std::uint64_t classes_of(char32_t c) const;

  std::vector<Range> ranges_;
  std::vector<Rule> rules_;
};

struct CharacterCluster {
  std::string surface;
  Span span;

  bool operator==(const CharacterCluster&) const = default;
};

std::vector<CharacterCluster> cluster_tcc(std::string_view text, const TccRules& rules = TccRules::builtin());
/// Cluster spans over already-decoded text.
std::vector<Span> cluster_spans(std::u32string_view text, const TccRules& rules = TccRules::builtin());

// --- Lexicon ----------------------------------------------------------------

/// Character-keyed prefix tree of dictionary surfaces.
class LexiconTrie {
 public:
  LexiconTrie();

  /// Returns false for duplicates. Empty words are rejected.
  bool insert(std::u32string_view word);
  bool insert(std::string_view utf8) { return insert(unicode::decode(utf8)); }

  bool contains(std::u32string_view word) const;
  bool contains(std::string_view utf8) const { return contains(unicode::decode(utf8)); }
  bool has_prefix(std::u32string_view prefix) const;

  std::size_t size() const { return size_; }
  std::size_t max_length() const { return max_length_; }

  /// Calls fn(length) for every entry that is a prefix of `text`, shortest first.
  template <typename Fn>
  void for_each_prefix(std::u32string_view text, Fn&& fn) const {
    std::uint32_t node = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      node = child(node, text[i]);
      if (node == kNone) return;
      if (nodes_[node].terminal) fn(i + 1);
    }
  }

  /// All entries, sorted by code point.
  std::vector<std::string> entries() const;

 private:
  static constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

  struct Node {
    std::vector<std::pair<char32_t, std::uint32_t>> children;  // sorted by character
    bool terminal = false;
  };

  std::uint32_t child(std::uint32_t node, char32_t c) const;
  std::uint32_t find(std::u32string_view word) const;

  std::vector<Node> nodes_;
  std::size_t size_ = 0;
  std::size_t max_length_ = 0;
};

/// Union of the files' entries (char-order normalized, deduplicated) plus the
/// special-token surfaces. Lines starting with '#' are comments; blank lines
/// are skipped and reported through `warnings` when given.
LexiconTrie load_lexicon(std::span<const std::string> paths, std::span<const std::string> special_surfaces,
                         std::vector<std::string>* warnings = nullptr);

// --- Tokenizer --------------------------------------------------------------

struct TokenizeOptions {
  SpecialTokens specials;
  const TccRules* rules = nullptr;  // nullptr: built-in table
  // Merge runs of clusters no dictionary word can start into one token. When
  // off, any single cluster may stand as a token, which makes the token count
  // monotone in the lexicon.
  bool merge_unknown = true;
};

/// Minimum-token-count segmentation over cluster boundaries. Whitespace is a
/// hard boundary and is kept in the stream's separators. Pieces are
/// dictionary entries, single non-Thai clusters, or runs of Thai clusters at
/// which no dictionary entry starts. Ties go to the segmentation whose first
/// differing token is longer.
TokenStream tokenize(std::string_view text, const LexiconTrie& lexicon, const TokenizeOptions& options = {});

/// Rebuilds the text from separators and surfaces. Throws
/// std::invalid_argument when spans overlap, are unsorted or disagree with
/// the separator lengths.
std::string detokenize(const TokenStream& stream);

/// Total code point length the stream covers; validates it like detokenize.
std::size_t covered_length(const TokenStream& stream);

}  // namespace thaiprep
