#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "thaiprep/token.hpp"

namespace thaiprep {

/// One label per character: 1 starts a word, 0 continues one.
struct BoundaryLabels {
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  std::string to_string() const;
  /// Parses a string of '0'/'1'; throws std::invalid_argument otherwise.
  static BoundaryLabels from_string(std::string_view bits);

  bool operator==(const BoundaryLabels&) const = default;
};

/// Labels over the stream's text: each whitespace separator character is its
/// own one-character token (label 1); a token's first character is 1.
BoundaryLabels boundaries_from_tokens(const TokenStream& stream);

/// Labels from a reference segmentation written with '|' between tokens,
/// e.g. "ตา|กลม" -> 10100. Whitespace characters are labelled like in
/// boundaries_from_tokens.
BoundaryLabels labels_from_segmented(std::string_view segmented);

/// The same text with '|' between adjacent tokens (spaces kept as-is).
std::string segmented_text(const TokenStream& stream);

struct BoundaryCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  BoundaryCounts& operator+=(const BoundaryCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const BoundaryCounts&) const = default;
};

struct MetricsReport {
  BoundaryCounts counts;
  double precision = 1;
  double recall = 1;
  double f1 = 1;
  std::size_t documents = 0;
  std::string label;  // free-form description, e.g. granularity

  static MetricsReport from_counts(const BoundaryCounts& counts);
};

nlohmann::json to_json(const MetricsReport& report);

BoundaryCounts boundary_counts(const BoundaryLabels& predicted, const BoundaryLabels& gold);

/// Precision/recall over word-beginning labels. A zero denominator yields 1.
/// Throws std::invalid_argument on a length mismatch.
MetricsReport boundary_prf(const BoundaryLabels& predicted, const BoundaryLabels& gold);

/// exp(mean negative log-likelihood). Throws for negative or non-finite input.
double perplexity(double mean_nll);

/// Fraction of positions where the labels agree. Throws for empty input or a
/// length mismatch.
template <typename T>
double accuracy(std::span<const T> predicted, std::span<const T> gold) {
  if (predicted.size() != gold.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (gold.empty()) throw std::invalid_argument("accuracy: no samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predicted[i] == gold[i];
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

template <typename T>
double accuracy(const std::vector<T>& predicted, const std::vector<T>& gold) {
  return accuracy(std::span<const T>(predicted), std::span<const T>(gold));
}

struct CorpusStats {
  std::uint64_t documents = 0;
  std::uint64_t tokens = 0;
  double mean_length = 0;
  double std_length = 0;  // population standard deviation
};

nlohmann::json to_json(const CorpusStats& stats);

/// Streaming, mergeable accumulator of per-document token counts (Welford).
class StatsAccumulator {
 public:
  void add(std::uint64_t doc_tokens);
  void merge(const StatsAccumulator& other);
  CorpusStats result() const;

 private:
  std::uint64_t n_ = 0;
  std::uint64_t total_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

CorpusStats corpus_stats(std::span<const TokenStream> streams);
CorpusStats corpus_stats(std::span<const std::uint64_t> doc_lengths);

/// "<doc-id>\t<bitstring>" per line.
std::map<std::string, BoundaryLabels> load_label_file(const std::filesystem::path& path);
/// "<doc-id>\t<text with '|' between tokens>" per line, converted to labels.
std::map<std::string, BoundaryLabels> load_segmented_file(const std::filesystem::path& path);
void save_label_file(const std::map<std::string, BoundaryLabels>& labels, const std::filesystem::path& path);

/// Micro-averaged P/R/F1 over documents present in both maps. Throws
/// InputError listing ids that appear in only one of them, and
/// std::invalid_argument on per-document length mismatches.
MetricsReport evaluate_boundaries(const std::map<std::string, BoundaryLabels>& predicted,
                                  const std::map<std::string, BoundaryLabels>& gold);

}  // namespace thaiprep
