#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thaiprep/corpus_io.hpp"
#include "thaiprep/filters.hpp"
#include "thaiprep/metrics.hpp"
#include "thaiprep/postproc.hpp"
#include "thaiprep/tokenizer.hpp"

namespace thaiprep {

struct RunManifest {
  std::string command;
  std::string config_hash;                            // SHA-256 of the canonical config JSON
  std::map<std::string, std::string> input_digests;   // path -> SHA-256
  std::map<std::string, std::string> stage_versions;
  std::uint64_t read = 0;
  std::uint64_t emitted = 0;
  std::uint64_t malformed = 0;  // unparseable records; not part of `read`
  std::map<std::string, std::uint64_t> filtered;  // reason -> count
  std::uint64_t tokens = 0;
  std::vector<std::string> warnings;  // e.g. blank lexicon lines
  std::string status = "ok";
  std::string error;

  std::uint64_t filtered_total() const;
  bool reconciles() const { return read == emitted + filtered_total(); }
};

nlohmann::json to_json(const RunManifest& manifest);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);
/// Throws InputError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

struct RunOptions {
  InputFormat format = InputFormat::jsonl;
  std::size_t jobs = 1;
  std::filesystem::path manifest_path;  // default: <output>.manifest.json
  std::filesystem::path vocab_path;     // pipeline: also build a vocabulary
  std::filesystem::path audit_path;     // preprocess: rewrite records sidecar
  bool segmented = false;               // tokenize/pipeline: "id<TAB>a|b c" lines
};

/// Immutable per-run state shared by worker threads.
struct Resources {
  PipelineConfig config;
  std::optional<TccRules> rules;
  LexiconTrie lexicon;
  MisspellingMap misspellings;
  std::vector<LanguageProfile> profiles;
  std::vector<std::string> warnings;

  const TccRules& tcc() const { return rules ? *rules : TccRules::builtin(); }
};

/// Loads everything the config points at; misspelling-map keys join the
/// lexicon. Throws InputError on failure.
Resources load_resources(const PipelineConfig& config, bool need_lexicon, bool need_profiles);

/// Tokens for already-normalized text, after emoji ungrouping, lowercasing
/// and (unless `correct` is false) spelling correction.
TokenStream tokenize_and_postprocess(std::string_view text, const Resources& res, bool correct = true);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

RunManifest cmd_filter(const std::filesystem::path& input, const std::filesystem::path& output,
                       const PipelineConfig& config, const RunOptions& options = {});
/// Filtered threads in, {"id","text"} normalized documents out.
RunManifest cmd_preprocess(const std::filesystem::path& input, const std::filesystem::path& output,
                           const PipelineConfig& config, const RunOptions& options = {});
/// Normalized documents in, token lines out.
RunManifest cmd_tokenize(const std::filesystem::path& input, const std::filesystem::path& output,
                         const PipelineConfig& config, const RunOptions& options = {});
/// Raw threads in, token lines out.
RunManifest cmd_pipeline(const std::filesystem::path& input, const std::filesystem::path& output,
                         const PipelineConfig& config, const RunOptions& options = {});

struct VocabReport {
  std::size_t size = 0;
  std::uint64_t tokens = 0;
  std::optional<double> oov_rate;
};

/// Builds a top-k vocabulary from token files. When `measure` is given, also
/// reports the OOV rate of that token file against the new vocabulary.
VocabReport cmd_vocab(const std::vector<std::filesystem::path>& token_files, const std::filesystem::path& output,
                      std::size_t vocab_size, const std::optional<std::filesystem::path>& measure = std::nullopt);

enum class LabelFormat { bits, segmented };

MetricsReport cmd_eval(const std::filesystem::path& predicted, LabelFormat predicted_format,
                       const std::filesystem::path& gold, LabelFormat gold_format);

/// Converts "id<TAB>a|b c" reference segmentations to a bit label file.
/// Returns the number of documents written.
std::size_t cmd_labels(const std::filesystem::path& segmented, const std::filesystem::path& output);

CorpusStats cmd_stats(const std::filesystem::path& token_file);

/// "lang<TAB>text" lines in; one "<lang>.profile" file per language written
/// to `out_dir`. Returns the written paths.
std::vector<std::filesystem::path> cmd_train_profiles(const std::filesystem::path& input,
                                                      const std::filesystem::path& out_dir);

}  // namespace thaiprep
