#include <algorithm>
#include <limits>
#include <stdexcept>

#include "thaiprep/tokenizer.hpp"

namespace thaiprep {

namespace u = unicode;

namespace {

bool is_thai_cluster(std::u32string_view cluster) {
  return std::any_of(cluster.begin(), cluster.end(), u::is_thai);
}

TokenKind classify_non_dictionary(std::u32string_view surface) {
  if (std::all_of(surface.begin(), surface.end(), u::is_latin_letter)) return TokenKind::english;
  if (u::is_emoji_base(surface[0]) || u::is_regional_indicator(surface[0])) return TokenKind::emoji;
  return TokenKind::unknown;
}

struct Piece {
  std::size_t end = 0;  // cluster index
  bool dictionary = false;
};

// Segments one whitespace-free run of clusters and appends its tokens.
void segment(std::u32string_view text, std::span<const Span> clusters, const LexiconTrie& lexicon,
             bool merge_unknown, std::vector<Token>& out) {
  const std::size_t m = clusters.size();
  const std::size_t seg_begin = clusters.front().begin;
  const std::size_t seg_end = clusters.back().end;

  // Char offset (relative to the segment) -> cluster index, or -1 inside a cluster.
  std::vector<int> boundary(seg_end - seg_begin + 1, -1);
  for (std::size_t k = 0; k < m; ++k) boundary[clusters[k].begin - seg_begin] = static_cast<int>(k);
  boundary[seg_end - seg_begin] = static_cast<int>(m);

  std::vector<std::vector<std::size_t>> words(m);
  std::vector<char> thai(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto start = clusters[k].begin;
    thai[k] = is_thai_cluster(text.substr(start, clusters[k].size()));
    lexicon.for_each_prefix(text.substr(start, seg_end - start), [&](std::size_t len) {
      const int b = boundary[start - seg_begin + len];
      if (b >= 0) words[k].push_back(static_cast<std::size_t>(b));
    });
  }

  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> cost(m + 1, kInf);
  std::vector<Piece> choice(m);
  cost[m] = 0;
  for (std::size_t k = m; k-- > 0;) {
    auto consider = [&](std::size_t end, bool dictionary) {
      const std::size_t c = cost[end] + 1;
      if (c < cost[k] || (c == cost[k] && end > choice[k].end) ||
          (c == cost[k] && end == choice[k].end && dictionary)) {
        cost[k] = c;
        choice[k] = {end, dictionary};
      }
    };
    for (auto end : words[k]) consider(end, true);
    if (!thai[k] || !merge_unknown) {
      consider(k + 1, false);
    } else if (words[k].empty()) {
      std::size_t end = k + 1;
      while (end < m && thai[end] && words[end].empty()) ++end;
      consider(end, false);
    }
  }

  for (std::size_t k = 0; k < m;) {
    const auto& piece = choice[k];
    const Span span{clusters[k].begin, piece.end == m ? seg_end : clusters[piece.end].begin};
    const auto surface = text.substr(span.begin, span.size());
    TokenKind kind = piece.dictionary ? TokenKind::word : classify_non_dictionary(surface);
    if (!piece.dictionary && thai[k]) kind = TokenKind::unknown;
    out.push_back({u::encode(surface), kind, span});
    k = piece.end;
  }
}

}  // namespace

TokenStream tokenize(std::string_view text, const LexiconTrie& lexicon, const TokenizeOptions& options) {
  const TccRules& rules = options.rules ? *options.rules : TccRules::builtin();
  const auto t = u::decode(text);
  const auto clusters = cluster_spans(t, rules);

  TokenStream stream;
  std::size_t k = 0;
  while (k < clusters.size()) {
    if (u::is_space(t[clusters[k].begin])) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < clusters.size() && !u::is_space(t[clusters[e].begin])) ++e;
    segment(t, std::span<const Span>(clusters).subspan(k, e - k), lexicon, options.merge_unknown, stream.tokens);
    k = e;
  }

  const auto specials = options.specials.surfaces();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    auto& tok = stream.tokens[i];
    stream.separators.push_back(u::encode(std::u32string_view(t).substr(pos, tok.span.begin - pos)));
    pos = tok.span.end;
    if (std::find(specials.begin(), specials.end(), tok.surface) != specials.end()) {
      tok.kind = TokenKind::special;
    } else if (i > 0 && stream.tokens[i - 1].kind == TokenKind::special &&
               (stream.tokens[i - 1].surface == options.specials.crep ||
                stream.tokens[i - 1].surface == options.specials.wrep) &&
               std::all_of(tok.surface.begin(), tok.surface.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      tok.kind = TokenKind::count;
    }
  }
  stream.separators.push_back(u::encode(std::u32string_view(t).substr(pos)));
  return stream;
}

std::size_t covered_length(const TokenStream& stream) {
  if (stream.separators.empty()) {
    if (!stream.tokens.empty()) throw std::invalid_argument("token stream has tokens but no separators");
    return 0;
  }
  if (stream.separators.size() != stream.tokens.size() + 1)
    throw std::invalid_argument("token stream needs exactly one more separator than tokens");
  std::size_t pos = u::length(stream.separators[0]);
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    const auto& span = stream.tokens[i].span;
    if (span.end <= span.begin) throw std::invalid_argument("token " + std::to_string(i) + " has an empty span");
    if (span.begin < pos) throw std::invalid_argument("token " + std::to_string(i) + " overlaps its predecessor");
    if (span.begin != pos)
      throw std::invalid_argument("token " + std::to_string(i) + " span disagrees with the separators");
    pos = span.end + u::length(stream.separators[i + 1]);
  }
  return pos;
}

std::string detokenize(const TokenStream& stream) {
  covered_length(stream);
  if (stream.separators.empty()) return {};
  std::string out = stream.separators[0];
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    out += stream.tokens[i].surface;
    out += stream.separators[i + 1];
  }
  return out;
}

}  // namespace thaiprep
