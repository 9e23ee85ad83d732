// thaiprep: command-line front end for the corpus preprocessing pipeline.
//
// Settings come from (highest first) flags, THAIPREP_* environment variables
// and the --config JSON file.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thaiprep/errors.hpp"
#include "thaiprep/pipeline.hpp"

namespace {

using namespace thaiprep;

struct Common {
  std::string config_path;
  std::string input;
  std::string output;
  std::vector<std::string> lexicons;
  std::string misspell_map;
  std::vector<std::string> profiles;
  std::size_t vocab_size = 0;
  std::size_t jobs = 1;
  std::string manifest;
  std::string format = "jsonl";
  std::string vocab_out;
  std::string audit;
  bool segmented = false;

  // One entry per subcommand that registers the flag.
  std::vector<CLI::Option*> vocab_size_opt;
  std::vector<CLI::Option*> lexicon_opt;
  std::vector<CLI::Option*> misspell_opt;
  std::vector<CLI::Option*> profile_opt;
};

bool given(const std::vector<CLI::Option*>& opts) {
  return std::any_of(opts.begin(), opts.end(), [](const CLI::Option* o) { return o->count() > 0; });
}

void add_io(CLI::App* cmd, Common& c, bool output_required = true) {
  cmd->add_option("--config", c.config_path, "JSON config file")->envname("THAIPREP_CONFIG");
  cmd->add_option("--input", c.input, "Input file")->envname("THAIPREP_INPUT")->required();
  auto* out = cmd->add_option("--output", c.output, "Output file")->envname("THAIPREP_OUTPUT");
  if (output_required) out->required();
  cmd->add_option("--jobs", c.jobs, "Worker threads")->envname("THAIPREP_JOBS")->check(CLI::PositiveNumber);
  cmd->add_option("--manifest", c.manifest, "Manifest path (default <output>.manifest.json)")
      ->envname("THAIPREP_MANIFEST");
}

void add_format(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Thread input format")
      ->envname("THAIPREP_FORMAT")
      ->check(CLI::IsMember({"jsonl", "tsv"}));
}

void add_profiles(CLI::App* cmd, Common& c) {
  c.profile_opt.push_back(cmd->add_option("--profile", c.profiles, "Language profile (repeatable)")
                      ->envname("THAIPREP_PROFILE")
                      ->check(CLI::ExistingFile));
}

void add_lexicon(CLI::App* cmd, Common& c) {
  c.lexicon_opt.push_back(
      cmd->add_option("--lexicon", c.lexicons, "Lexicon file (repeatable)")->envname("THAIPREP_LEXICON"));
  c.misspell_opt.push_back(
      cmd->add_option("--misspell-map", c.misspell_map, "Misspelling map TSV")->envname("THAIPREP_MISSPELL_MAP"));
  cmd->add_flag("--segmented", c.segmented, "Write 'id<TAB>a|b' lines for evaluation");
}

PipelineConfig resolve_config(const Common& c) {
  PipelineConfig cfg = c.config_path.empty() ? PipelineConfig{} : load_config(c.config_path);
  if (given(c.lexicon_opt)) cfg.lexicon_paths = c.lexicons;
  if (given(c.misspell_opt)) cfg.misspelling_map_path = c.misspell_map;
  if (given(c.profile_opt)) cfg.profile_paths = c.profiles;
  if (given(c.vocab_size_opt)) cfg.vocab_size = c.vocab_size;
  cfg.validate();
  return cfg;
}

RunOptions run_options(const Common& c) {
  RunOptions o;
  o.format = c.format == "tsv" ? InputFormat::tsv : InputFormat::jsonl;
  o.jobs = c.jobs;
  o.manifest_path = c.manifest;
  o.vocab_path = c.vocab_out;
  o.audit_path = c.audit;
  o.segmented = c.segmented;
  return o;
}

LabelFormat label_format(const std::string& s) { return s == "bits" ? LabelFormat::bits : LabelFormat::segmented; }

int report(const RunManifest& m) {
  std::cout << to_json(m).dump(2) << '\n';
  for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
  if (m.malformed > 0) std::cerr << "warning: " << m.malformed << " malformed record(s) skipped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thai social-media corpus preprocessing and tokenization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "thaiprep 1.0");

  Common c;

  auto* filter = app.add_subcommand("filter", "Drop short, untitled and non-target-language threads");
  add_io(filter, c);
  add_format(filter, c);
  add_profiles(filter, c);

  auto* preprocess = app.add_subcommand("preprocess", "Normalize thread text");
  add_io(preprocess, c);
  add_format(preprocess, c);
  preprocess->add_option("--audit", c.audit, "Write rewrite records as JSONL");

  auto* tokenize = app.add_subcommand("tokenize", "Tokenize normalized documents");
  add_io(tokenize, c);
  add_lexicon(tokenize, c);

  auto* pipeline = app.add_subcommand("pipeline", "filter, preprocess and tokenize in one pass");
  add_io(pipeline, c);
  add_format(pipeline, c);
  add_profiles(pipeline, c);
  add_lexicon(pipeline, c);
  c.vocab_size_opt.push_back(pipeline->add_option("--vocab-size", c.vocab_size, "Vocabulary size")
                                 ->envname("THAIPREP_VOCAB_SIZE")
                                 ->check(CLI::PositiveNumber));
  pipeline->add_option("--vocab", c.vocab_out, "Also write the vocabulary here");

  std::vector<std::string> vocab_inputs;
  std::string vocab_output;
  std::string measure;
  std::size_t vocab_size = 0;
  std::string vocab_config;
  auto* vocab = app.add_subcommand("vocab", "Build a top-k vocabulary from token files");
  vocab->add_option("--config", vocab_config, "JSON config file")->envname("THAIPREP_CONFIG");
  vocab->add_option("--input", vocab_inputs, "Token file (repeatable)")->envname("THAIPREP_INPUT")->required();
  vocab->add_option("--output", vocab_output, "Vocabulary TSV")->envname("THAIPREP_OUTPUT")->required();
  auto* vs = vocab->add_option("--vocab-size", vocab_size, "Vocabulary size")
                 ->envname("THAIPREP_VOCAB_SIZE")
                 ->check(CLI::PositiveNumber);
  vocab->add_option("--measure", measure, "Report the OOV rate of this token file");

  std::string predicted, gold, predicted_format = "segmented", gold_format = "segmented";
  auto* eval = app.add_subcommand("eval", "Boundary precision/recall/F1");
  eval->add_option("--predicted", predicted, "Predicted labels")->required();
  eval->add_option("--gold", gold, "Gold labels")->required();
  eval->add_option("--predicted-format", predicted_format)->check(CLI::IsMember({"bits", "segmented"}));
  eval->add_option("--gold-format", gold_format)->check(CLI::IsMember({"bits", "segmented"}));

  std::string stats_input;
  auto* stats = app.add_subcommand("stats", "Document and token counts of a token file");
  stats->add_option("--input", stats_input, "Token file")->envname("THAIPREP_INPUT")->required();

  std::string labels_input, labels_output;
  auto* labels = app.add_subcommand("labels", "Convert '|'-segmented reference text to bit labels");
  labels->add_option("--input", labels_input, "Segmented TSV")->required();
  labels->add_option("--output", labels_output, "Label file")->required();

  std::string train_input, train_output;
  auto* train = app.add_subcommand("train-profiles", "Train language profiles from 'lang<TAB>text' lines");
  train->add_option("--input", train_input, "Training TSV")->required();
  train->add_option("--output", train_output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (filter->parsed()) return report(cmd_filter(c.input, c.output, resolve_config(c), run_options(c)));
    if (preprocess->parsed()) return report(cmd_preprocess(c.input, c.output, resolve_config(c), run_options(c)));
    if (tokenize->parsed()) return report(cmd_tokenize(c.input, c.output, resolve_config(c), run_options(c)));
    if (pipeline->parsed()) return report(cmd_pipeline(c.input, c.output, resolve_config(c), run_options(c)));
    if (vocab->parsed()) {
      auto cfg = vocab_config.empty() ? PipelineConfig{} : load_config(vocab_config);
      if (vs->count() > 0) cfg.vocab_size = vocab_size;
      std::vector<std::filesystem::path> files(vocab_inputs.begin(), vocab_inputs.end());
      std::optional<std::filesystem::path> m;
      if (!measure.empty()) m = measure;
      const auto r = cmd_vocab(files, vocab_output, cfg.vocab_size, m);
      nlohmann::json j{{"size", r.size}, {"tokens", r.tokens}};
      if (r.oov_rate) j["oov_rate"] = *r.oov_rate;
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (eval->parsed()) {
      const auto r = cmd_eval(predicted, label_format(predicted_format), gold, label_format(gold_format));
      std::cout << "precision " << r.precision << "  recall " << r.recall << "  f1 " << r.f1 << '\n';
      std::cout << to_json(r).dump() << '\n';
      return 0;
    }
    if (stats->parsed()) {
      const auto s = cmd_stats(stats_input);
      std::cout << "documents " << s.documents << "  tokens " << s.tokens << "  length " << s.mean_length << " +- "
                << s.std_length << '\n';
      std::cout << to_json(s).dump() << '\n';
      return 0;
    }
    if (labels->parsed()) {
      std::cout << cmd_labels(labels_input, labels_output) << " documents labelled\n";
      return 0;
    }
    if (train->parsed()) {
      for (const auto& p : cmd_train_profiles(train_input, train_output)) std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const WriteError& e) {
    std::cerr << "error: " << e.what() << " (" << e.written() << " records written)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
