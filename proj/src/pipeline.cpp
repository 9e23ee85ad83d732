#include "thaiprep/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <openssl/evp.h>

#include "thaiprep/errors.hpp"
#include "thaiprep/normalizer.hpp"

namespace thaiprep {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kStageVersions = {
    {"corpus_io", "1"}, {"filters", "1"}, {"normalizer", "1"}, {"tokenizer", "1"}, {"postproc", "1"},
};

constexpr std::size_t kBatchPerJob = 256;

std::string to_hex(const unsigned char* p, std::size_t n) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(digits[p[i] >> 4]);
    out.push_back(digits[p[i] & 0xF]);
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) throw std::runtime_error("SHA-256 update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md, &len) != 1) throw std::runtime_error("SHA-256 final failed");
    return to_hex(md, len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

fs::path manifest_path_for(const fs::path& output, const RunOptions& options) {
  if (!options.manifest_path.empty()) return options.manifest_path;
  auto p = output;
  p += ".manifest.json";
  return p;
}

fs::path errors_path_for(const fs::path& output) {
  auto p = output;
  p += ".errors.jsonl";
  return p;
}

RunManifest start_manifest(std::string command, const PipelineConfig& config, const std::vector<fs::path>& inputs) {
  RunManifest m;
  m.command = std::move(command);
  m.config_hash = sha256_hex(to_json(config).dump());
  m.stage_versions = kStageVersions;
  for (const auto& p : inputs) {
    // Pipes and devices can only be read once; they are not digested.
    m.input_digests[p.string()] = fs::is_regular_file(p) ? sha256_file(p) : std::string("not a regular file");
  }
  return m;
}

std::vector<fs::path> resource_inputs(const PipelineConfig& config, bool lexicon, bool profiles) {
  std::vector<fs::path> out;
  if (lexicon) {
    for (const auto& p : config.lexicon_paths) out.emplace_back(p);
    if (!config.misspelling_map_path.empty()) out.emplace_back(config.misspelling_map_path);
    if (!config.tcc_rules_path.empty()) out.emplace_back(config.tcc_rules_path);
  }
  if (profiles) {
    for (const auto& p : config.profile_paths) out.emplace_back(p);
  }
  return out;
}

// Writes the malformed-record report next to the output, or removes a stale one.
void write_error_sidecar(const fs::path& output, const std::vector<RecordError>& errors) {
  const auto path = errors_path_for(output);
  if (errors.empty()) {
    std::error_code ec;
    fs::remove(path, ec);
    return;
  }
  JsonlWriter w(path);
  for (const auto& e : errors) w.write({{"line", e.line}, {"error", e.message}});
  w.close();
}

// Runs body(); on failure the manifest is still written, marked as failed.
template <typename Body>
RunManifest run_with_manifest(RunManifest manifest, const fs::path& manifest_path, Body&& body) {
  try {
    body(manifest);
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.error = e.what();
    try {
      save_manifest(manifest, manifest_path);
    } catch (...) {
    }
    throw;
  }
  save_manifest(manifest, manifest_path);
  return manifest;
}

// Startup failures (missing lexicon, bad profile) still leave a manifest.
Resources load_or_record(const std::string& command, const PipelineConfig& config, const fs::path& manifest_path,
                         bool lexicon, bool profiles) {
  try {
    return load_resources(config, lexicon, profiles);
  } catch (const std::exception& e) {
    RunManifest m = start_manifest(command, config, {});
    m.status = "failed";
    m.error = e.what();
    try {
      save_manifest(m, manifest_path);
    } catch (...) {
    }
    throw;
  }
}

// Separators may hold newlines or tabs; these would break the line format.
std::string single_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return s;
}

template <typename Reader, typename Item = typename decltype(std::declval<Reader&>().next())::value_type>
std::vector<Item> read_batch(Reader& reader, std::size_t n) {
  std::vector<Item> batch;
  batch.reserve(n);
  while (batch.size() < n) {
    auto item = reader.next();
    if (!item) break;
    batch.push_back(std::move(*item));
  }
  return batch;
}

class LineWriter {
 public:
  explicit LineWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw WriteError("cannot open output file: " + path.string(), 0);
  }
  void write(const std::string& line) {
    out_ << line << '\n';
    if (!out_) throw WriteError("write failed: " + path_.string(), written_);
    ++written_;
  }
  void close() {
    out_.flush();
    if (!out_) throw WriteError("write failed: " + path_.string(), written_);
    out_.close();
  }

 private:
  fs::path path_;
  std::ofstream out_;
  std::size_t written_ = 0;
};

// Emits either space-joined tokens or "id<TAB>segmented" lines.
class StreamSink {
 public:
  StreamSink(const fs::path& path, bool segmented) : segmented_(segmented) {
    if (segmented_) {
      lines_.emplace(path);
    } else {
      tokens_.emplace(path);
    }
  }
  void write(const std::string& id, const TokenStream& stream) {
    if (segmented_) {
      lines_->write(id + "\t" + single_line(segmented_text(stream)));
    } else {
      tokens_->write(stream);
    }
  }
  void close() {
    if (segmented_) {
      lines_->close();
    } else {
      tokens_->close();
    }
  }

 private:
  bool segmented_;
  std::optional<LineWriter> lines_;
  std::optional<TokenWriter> tokens_;
};

}  // namespace

std::uint64_t RunManifest::filtered_total() const {
  std::uint64_t n = 0;
  for (const auto& [_, c] : filtered) n += c;
  return n;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json filtered = nlohmann::json::object();
  for (const auto& [k, v] : m.filtered) filtered[k] = v;
  nlohmann::json j{{"command", m.command},
                   {"config_hash", m.config_hash},
                   {"input_digests", m.input_digests},
                   {"stage_versions", m.stage_versions},
                   {"counts",
                    {{"read", m.read},
                     {"emitted", m.emitted},
                     {"filtered", filtered},
                     {"malformed", m.malformed},
                     {"tokens", m.tokens}}},
                   {"reconciled", m.reconciles()},
                   {"status", m.status}};
  if (!m.warnings.empty()) j["warnings"] = m.warnings;
  if (!m.error.empty()) j["error"] = m.error;
  return j;
}

void save_manifest(const RunManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open manifest: " + path.string(), 0);
  out << to_json(manifest).dump(2) << '\n';
  if (!out) throw WriteError("write failed: " + path.string(), 0);
}

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw InputError("read failure: " + path.string());
  return h.hex();
}

Resources load_resources(const PipelineConfig& config, bool need_lexicon, bool need_profiles) {
  config.validate();
  Resources res;
  res.config = config;
  if (need_lexicon) {
    if (!config.tcc_rules_path.empty()) res.rules = TccRules::load(config.tcc_rules_path);
    const auto specials = config.special_tokens.surfaces();
    res.lexicon = load_lexicon(config.lexicon_paths, specials, &res.warnings);
    if (!config.misspelling_map_path.empty()) {
      res.misspellings = MisspellingMap::load(config.misspelling_map_path);
      // Misspelled forms must come out as whole tokens to be corrected.
      for (const auto& [wrong, _] : res.misspellings.entries()) res.lexicon.insert(std::string_view(wrong));
    }
  }
  if (need_profiles) {
    for (const auto& p : config.profile_paths) res.profiles.push_back(load_profile(p));
  }
  return res;
}

TokenStream tokenize_and_postprocess(std::string_view text, const Resources& res, bool correct) {
  TokenizeOptions opts;
  opts.specials = res.config.special_tokens;
  opts.rules = &res.tcc();
  auto stream = lowercase_english(ungroup_emoji(tokenize(text, res.lexicon, opts)));
  if (correct && res.misspellings.size() > 0) stream = correct_spelling(stream, res.misspellings);
  return stream;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  std::size_t first_index = n;
  auto work = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        // Report the error of the earliest item so failures are reproducible.
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

RunManifest cmd_filter(const fs::path& input, const fs::path& output, const PipelineConfig& config,
                       const RunOptions& options) {
  const auto res = load_or_record("filter", config, manifest_path_for(output, options), false, true);
  auto inputs = resource_inputs(config, false, true);
  inputs.insert(inputs.begin(), input);
  const ThreadFilter filter(config.min_body_chars, config.target_language, res.profiles);
  return run_with_manifest(start_manifest("filter", config, inputs), manifest_path_for(output, options),
                           [&](RunManifest& m) {
                             ThreadReader reader(input, options.format);
                             JsonlWriter writer(output);
                             const std::size_t batch_size = kBatchPerJob * std::max<std::size_t>(options.jobs, 1);
                             for (;;) {
                               auto batch = read_batch(reader, batch_size);
                               if (batch.empty()) break;
                               std::vector<FilterDecision> decisions(batch.size());
                               parallel_for(batch.size(), options.jobs,
                                            [&](std::size_t i) { decisions[i] = filter(batch[i], config.concat_title); });
                               for (std::size_t i = 0; i < batch.size(); ++i) {
                                 ++m.read;
                                 if (decisions[i].accepted) {
                                   writer.write(to_json(batch[i]));
                                   ++m.emitted;
                                 } else {
                                   ++m.filtered[std::string(to_string(decisions[i].reason))];
                                 }
                               }
                             }
                             writer.close();
                             m.malformed = reader.errors().size();
                             write_error_sidecar(output, reader.errors());
                           });
}

RunManifest cmd_preprocess(const fs::path& input, const fs::path& output, const PipelineConfig& config,
                           const RunOptions& options) {
  config.validate();
  const Normalizer normalizer(config);
  const bool audit = !options.audit_path.empty();
  return run_with_manifest(start_manifest("preprocess", config, {input}), manifest_path_for(output, options),
                           [&](RunManifest& m) {
                             ThreadReader reader(input, options.format);
                             JsonlWriter writer(output);
                             std::optional<JsonlWriter> audit_writer;
                             if (audit) audit_writer.emplace(options.audit_path);
                             const std::size_t batch_size = kBatchPerJob * std::max<std::size_t>(options.jobs, 1);
                             for (;;) {
                               auto batch = read_batch(reader, batch_size);
                               if (batch.empty()) break;
                               std::vector<NormalizedDocument> docs(batch.size());
                               parallel_for(batch.size(), options.jobs, [&](std::size_t i) {
                                 const auto text = thread_text(batch[i], config.concat_title);
                                 if (audit) {
                                   docs[i] = normalizer.normalize(text);
                                 } else {
                                   docs[i].text = normalizer.normalize_text(text);
                                 }
                               });
                               for (std::size_t i = 0; i < batch.size(); ++i) {
                                 ++m.read;
                                 writer.write({{"id", batch[i].id}, {"text", docs[i].text}});
                                 if (audit) {
                                   nlohmann::json rw = nlohmann::json::array();
                                   for (const auto& r : docs[i].rewrites) rw.push_back(to_json(r));
                                   audit_writer->write({{"id", batch[i].id}, {"rewrites", rw}});
                                 }
                                 ++m.emitted;
                               }
                             }
                             writer.close();
                             if (audit_writer) audit_writer->close();
                             m.malformed = reader.errors().size();
                             write_error_sidecar(output, reader.errors());
                           });
}

RunManifest cmd_tokenize(const fs::path& input, const fs::path& output, const PipelineConfig& config,
                         const RunOptions& options) {
  const auto res = load_or_record("tokenize", config, manifest_path_for(output, options), true, false);
  auto inputs = resource_inputs(config, true, false);
  inputs.insert(inputs.begin(), input);
  auto manifest = start_manifest("tokenize", config, inputs);
  manifest.warnings = res.warnings;
  return run_with_manifest(std::move(manifest), manifest_path_for(output, options),
                           [&](RunManifest& m) {
                             DocumentReader reader(input);
                             StreamSink sink(output, options.segmented);
                             const std::size_t batch_size = kBatchPerJob * std::max<std::size_t>(options.jobs, 1);
                             for (;;) {
                               auto batch = read_batch(reader, batch_size);
                               if (batch.empty()) break;
                               std::vector<TokenStream> streams(batch.size());
                               parallel_for(batch.size(), options.jobs, [&](std::size_t i) {
                                 streams[i] = tokenize_and_postprocess(batch[i].text, res, !options.segmented);
                               });
                               for (std::size_t i = 0; i < batch.size(); ++i) {
                                 ++m.read;
                                 sink.write(batch[i].id, streams[i]);
                                 ++m.emitted;
                                 m.tokens += streams[i].tokens.size();
                               }
                             }
                             sink.close();
                             m.malformed = reader.errors().size();
                             write_error_sidecar(output, reader.errors());
                           });
}

RunManifest cmd_pipeline(const fs::path& input, const fs::path& output, const PipelineConfig& config,
                         const RunOptions& options) {
  // Everything is loaded before any output file is opened.
  const auto res = load_or_record("pipeline", config, manifest_path_for(output, options), true, true);
  auto inputs = resource_inputs(config, true, true);
  inputs.insert(inputs.begin(), input);
  const ThreadFilter filter(config.min_body_chars, config.target_language, res.profiles);
  const Normalizer normalizer(config);
  const bool want_vocab = !options.vocab_path.empty();

  auto manifest = start_manifest("pipeline", config, inputs);
  manifest.warnings = res.warnings;
  return run_with_manifest(
      std::move(manifest), manifest_path_for(output, options), [&](RunManifest& m) {
        ThreadReader reader(input, options.format);
        StreamSink sink(output, options.segmented);
        TokenCounter counter;
        const std::size_t batch_size = kBatchPerJob * std::max<std::size_t>(options.jobs, 1);
        struct Result {
          FilterDecision decision;
          TokenStream stream;
        };
        for (;;) {
          auto batch = read_batch(reader, batch_size);
          if (batch.empty()) break;
          std::vector<Result> results(batch.size());
          parallel_for(batch.size(), options.jobs, [&](std::size_t i) {
            auto& r = results[i];
            r.decision = filter(batch[i], config.concat_title);
            if (!r.decision.accepted) return;
            const auto text = normalizer.normalize_text(thread_text(batch[i], config.concat_title));
            r.stream = tokenize_and_postprocess(text, res, !options.segmented);
          });
          for (std::size_t i = 0; i < batch.size(); ++i) {
            ++m.read;
            const auto& r = results[i];
            if (!r.decision.accepted) {
              ++m.filtered[std::string(to_string(r.decision.reason))];
              continue;
            }
            sink.write(batch[i].id, r.stream);
            ++m.emitted;
            m.tokens += r.stream.tokens.size();
            if (want_vocab) counter.add(r.stream);
          }
        }
        sink.close();
        m.malformed = reader.errors().size();
        write_error_sidecar(output, reader.errors());
        if (want_vocab) counter.top(config.vocab_size).save(options.vocab_path);
      });
}

namespace {

template <typename Fn>
void for_each_token_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open token file: " + path.string());
  std::string line;
  std::vector<std::string> tokens;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.clear();
    std::size_t pos = 0;
    while (pos < line.size()) {
      auto sp = line.find(' ', pos);
      if (sp == std::string::npos) sp = line.size();
      if (sp > pos) tokens.push_back(line.substr(pos, sp - pos));
      pos = sp + 1;
    }
    fn(tokens);
  }
  if (in.bad()) throw InputError("read failure: " + path.string());
}

}  // namespace

VocabReport cmd_vocab(const std::vector<fs::path>& token_files, const fs::path& output, std::size_t vocab_size,
                      const std::optional<fs::path>& measure) {
  if (token_files.empty()) throw InputError("no token files given");
  TokenCounter counter;
  VocabReport report;
  for (const auto& f : token_files) {
    for_each_token_line(f, [&](const std::vector<std::string>& toks) {
      counter.add(std::span<const std::string>(toks));
      report.tokens += toks.size();
    });
  }
  const auto vocab = counter.top(vocab_size);
  vocab.save(output);
  report.size = vocab.size();
  if (measure) {
    std::uint64_t total = 0;
    std::uint64_t missing = 0;
    for_each_token_line(*measure, [&](const std::vector<std::string>& toks) {
      for (const auto& t : toks) {
        ++total;
        missing += !vocab.contains(t);
      }
    });
    if (total > 0 && !vocab.empty()) report.oov_rate = static_cast<double>(missing) / static_cast<double>(total);
  }
  return report;
}

MetricsReport cmd_eval(const fs::path& predicted, LabelFormat predicted_format, const fs::path& gold,
                       LabelFormat gold_format) {
  auto load = [](const fs::path& p, LabelFormat f) {
    return f == LabelFormat::bits ? load_label_file(p) : load_segmented_file(p);
  };
  const auto pred = load(predicted, predicted_format);
  const auto ref = load(gold, gold_format);
  try {
    return evaluate_boundaries(pred, ref);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

std::size_t cmd_labels(const fs::path& segmented, const fs::path& output) {
  const auto labels = load_segmented_file(segmented);
  save_label_file(labels, output);
  return labels.size();
}

CorpusStats cmd_stats(const fs::path& token_file) {
  StatsAccumulator acc;
  for_each_token_line(token_file, [&](const std::vector<std::string>& toks) { acc.add(toks.size()); });
  return acc.result();
}

std::vector<fs::path> cmd_train_profiles(const fs::path& input, const fs::path& out_dir) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw InputError("cannot open training file: " + input.string());
  std::vector<LabeledText> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw InputError(input.string() + ":" + std::to_string(lineno) + ": expected 'lang<TAB>text'");
    docs.push_back({line.substr(tab + 1), line.substr(0, tab)});
  }
  if (docs.empty()) throw InputError("no training documents in " + input.string());
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& p : train_profiles(docs)) {
    auto path = out_dir / (p.language() + ".profile");
    save_profile(p, path);
    written.push_back(std::move(path));
  }
  return written;
}

}  // namespace thaiprep
