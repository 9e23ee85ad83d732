#include "thaiprep/corpus_io.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "thaiprep/errors.hpp"

namespace thaiprep {

using nlohmann::json;

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::word:
      return "word";
    case TokenKind::special:
      return "special";
    case TokenKind::count:
      return "count";
    case TokenKind::emoji:
      return "emoji";
    case TokenKind::english:
      return "english";
    case TokenKind::unknown:
      return "unknown";
  }
  return "unknown";
}

void SpecialTokens::validate() const {
  const auto all = surfaces();
  std::set<std::string> distinct;
  for (const auto& s : all) {
    if (s.empty()) throw InputError("special token surface must not be empty");
    for (char32_t c : unicode::decode(s)) {
      if (unicode::is_space(c)) throw InputError("special token surface contains whitespace: '" + s + "'");
    }
    if (!distinct.insert(s).second) throw InputError("duplicate special token surface: " + s);
  }
}

void PipelineConfig::validate() const {
  if (vocab_size < 1) throw InputError("vocab_size must be >= 1");
  if (min_body_chars < 1) throw InputError("min_body_chars must be >= 1");
  if (rewrite_caps.crep < 2 || rewrite_caps.wrep < 2) throw InputError("rewrite caps must be >= 2");
  if (target_language.empty()) throw InputError("target_language must not be empty");
  special_tokens.validate();

  std::set<std::string> seen;
  for (const auto& name : stage_order) {
    if (std::find(kDefaultStageOrder.begin(), kDefaultStageOrder.end(), name) == kDefaultStageOrder.end())
      throw InputError("unknown stage in stage_order: " + name);
    if (!seen.insert(name).second) throw InputError("stage listed twice in stage_order: " + name);
  }
  if (seen.size() != kDefaultStageOrder.size()) throw InputError("stage_order must list every stage exactly once");
}

namespace {

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InputError("unknown config key '" + key + "' in " + std::string(where));
  }
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("config root must be an object");
  reject_unknown_keys(j,
                      {"lexicon_paths", "misspelling_map_path", "vocab_size", "min_body_chars",
                       "target_language", "special_token_spellings", "rewrite_caps", "stage_order", "number_patterns",
                       "profile_paths", "concat_title", "tcc_rules_path"},
                      "config");
  PipelineConfig c;
  try {
    read_optional(j, "lexicon_paths", c.lexicon_paths);
    read_optional(j, "misspelling_map_path", c.misspelling_map_path);
    if (auto it = j.find("vocab_size"); it != j.end()) {
      if (!it->is_number_unsigned() || it->get<std::size_t>() < 1) throw InputError("vocab_size must be a positive integer");
      c.vocab_size = it->get<std::size_t>();
    }
    if (auto it = j.find("min_body_chars"); it != j.end()) {
      if (!it->is_number_unsigned() || it->get<std::size_t>() < 1)
        throw InputError("min_body_chars must be a positive integer");
      c.min_body_chars = it->get<std::size_t>();
    }
    read_optional(j, "target_language", c.target_language);
    if (auto it = j.find("special_token_spellings"); it != j.end()) {
      reject_unknown_keys(*it, {"CREP", "WREP", "NUM", "LAUGH"}, "special_token_spellings");
      read_optional(*it, "CREP", c.special_tokens.crep);
      read_optional(*it, "WREP", c.special_tokens.wrep);
      read_optional(*it, "NUM", c.special_tokens.num);
      read_optional(*it, "LAUGH", c.special_tokens.laugh);
    }
    if (auto it = j.find("rewrite_caps"); it != j.end()) {
      reject_unknown_keys(*it, {"CREP", "WREP"}, "rewrite_caps");
      read_optional(*it, "CREP", c.rewrite_caps.crep);
      read_optional(*it, "WREP", c.rewrite_caps.wrep);
    }
    read_optional(j, "stage_order", c.stage_order);
    read_optional(j, "number_patterns", c.number_patterns);
    read_optional(j, "profile_paths", c.profile_paths);
    read_optional(j, "concat_title", c.concat_title);
    read_optional(j, "tcc_rules_path", c.tcc_rules_path);
  } catch (const json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const PipelineConfig& c) {
  return json{
      {"lexicon_paths", c.lexicon_paths},
      {"misspelling_map_path", c.misspelling_map_path},
      {"vocab_size", c.vocab_size},
      {"min_body_chars", c.min_body_chars},
      {"target_language", c.target_language},
      {"special_token_spellings",
       {{"CREP", c.special_tokens.crep},
        {"WREP", c.special_tokens.wrep},
        {"NUM", c.special_tokens.num},
        {"LAUGH", c.special_tokens.laugh}}},
      {"rewrite_caps", {{"CREP", c.rewrite_caps.crep}, {"WREP", c.rewrite_caps.wrep}}},
      {"stage_order", c.stage_order},
      {"number_patterns", c.number_patterns},
      {"profile_paths", c.profile_paths},
      {"concat_title", c.concat_title},
      {"tcc_rules_path", c.tcc_rules_path},
  };
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string thread_text(const RawThread& thread, bool concat_title) {
  if (!concat_title || thread.title.empty()) return thread.body;
  return thread.title + "\n" + thread.body;
}

// ---------------------------------------------------------------------------

namespace {

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string unescape_tsv(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '\\' && i + 1 < field.size()) {
      switch (field[i + 1]) {
        case 't':
          out.push_back('\t');
          ++i;
          continue;
        case 'n':
          out.push_back('\n');
          ++i;
          continue;
        case '\\':
          out.push_back('\\');
          ++i;
          continue;
        default:
          break;
      }
    }
    out.push_back(field[i]);
  }
  return out;
}

}  // namespace

ThreadReader::ThreadReader(const std::filesystem::path& path, InputFormat format) : in_(path), format_(format) {
  if (!in_) throw InputError("cannot open input file: " + path.string());
}

std::optional<RawThread> ThreadReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    if (!unicode::is_valid_utf8(line)) {
      fail("invalid UTF-8");
      continue;
    }
    auto thread = format_ == InputFormat::jsonl ? parse_jsonl(line) : parse_tsv(line);
    if (!thread) continue;
    if (!seen_ids_.insert(thread->id).second) {
      fail("duplicate id '" + thread->id + "'");
      continue;
    }
    return thread;
  }
  if (in_.bad()) throw InputError("read failure after line " + std::to_string(line_));
  return std::nullopt;
}

std::optional<RawThread> ThreadReader::parse_jsonl(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
  if (!j.is_object()) {
    fail("record is not a JSON object");
    return std::nullopt;
  }
  RawThread t;
  auto id = j.find("id");
  if (id == j.end() || !(id->is_string() || id->is_number_integer())) {
    fail("missing or non-string 'id'");
    return std::nullopt;
  }
  t.id = id->is_string() ? id->get<std::string>() : id->dump();
  if (t.id.empty()) {
    fail("empty 'id'");
    return std::nullopt;
  }
  auto body = j.find("body");
  if (body == j.end() || !body->is_string()) {
    fail("missing or non-string 'body'");
    return std::nullopt;
  }
  t.body = body->get<std::string>();
  if (auto title = j.find("title"); title != j.end() && !title->is_null()) {
    if (!title->is_string()) {
      fail("non-string 'title'");
      return std::nullopt;
    }
    t.title = title->get<std::string>();
  }
  if (auto meta = j.find("meta"); meta != j.end() && !meta->is_null()) {
    if (!meta->is_object()) {
      fail("'meta' is not an object");
      return std::nullopt;
    }
    for (const auto& [key, value] : meta->items()) t.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return t;
}

std::optional<RawThread> ThreadReader::parse_tsv(const std::string& line) {
  std::vector<std::string_view> fields;
  std::string_view rest(line);
  for (;;) {
    auto tab = rest.find('\t');
    fields.push_back(rest.substr(0, tab));
    if (tab == std::string_view::npos) break;
    rest.remove_prefix(tab + 1);
  }
  if (fields.size() != 3) {
    fail("expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    return std::nullopt;
  }
  if (fields[0].empty()) {
    fail("empty id");
    return std::nullopt;
  }
  return RawThread{unescape_tsv(fields[0]), unescape_tsv(fields[1]), unescape_tsv(fields[2]), {}};
}

DocumentReader::DocumentReader(const std::filesystem::path& path) : in_(path) {
  if (!in_) throw InputError("cannot open input file: " + path.string());
}

std::optional<TextDocument> DocumentReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (blank(line)) continue;
    try {
      auto j = json::parse(line);
      TextDocument doc{j.at("id").get<std::string>(), j.at("text").get<std::string>()};
      return doc;
    } catch (const json::exception& e) {
      errors_.push_back({line_, std::string("malformed document record: ") + e.what()});
    }
  }
  return std::nullopt;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw WriteError("cannot open output file: " + path.string(), 0);
}

void JsonlWriter::write(const json& record) {
  out_ << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  if (!out_) throw WriteError("write failed: " + path_.string(), written_);
  ++written_;
}

void JsonlWriter::close() {
  if (!out_.is_open()) return;
  out_.flush();
  if (!out_) throw WriteError("flush failed: " + path_.string(), written_);
  out_.close();
}

json to_json(const RawThread& thread) {
  json j{{"id", thread.id}, {"title", thread.title}, {"body", thread.body}};
  if (!thread.meta.empty()) j["meta"] = thread.meta;
  return j;
}

TokenWriter::TokenWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw WriteError("cannot open output file: " + path.string(), 0);
}

void TokenWriter::write(const TokenStream& stream) {
  std::string line;
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    if (i) line.push_back(' ');
    line += stream.tokens[i].surface;
  }
  line.push_back('\n');
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  if (!out_) throw WriteError("write failed: " + path_.string(), summary_.docs);
  ++summary_.docs;
  summary_.tokens += stream.tokens.size();
}

WriteSummary TokenWriter::close() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw WriteError("flush failed: " + path_.string(), summary_.docs);
    out_.close();
  }
  return summary_;
}

WriteSummary write_tokens(std::span<const TokenStream> streams, const std::filesystem::path& path) {
  TokenWriter writer(path);
  for (const auto& s : streams) writer.write(s);
  return writer.close();
}

std::vector<std::vector<std::string>> read_token_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open token file: " + path.string());
  std::vector<std::vector<std::string>> docs;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    docs.push_back(std::move(tokens));
  }
  return docs;
}

// ---------------------------------------------------------------------------

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
  // FNV-1a over the bytes, finished with a splitmix64 round keyed by the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SplitResult split_corpus(std::span<const std::string> ids, const CorpusSplit& split) {
  const std::size_t held_out = split.valid + split.test;
  if (held_out > ids.size() || split.train > ids.size() - held_out)
    throw std::invalid_argument("split targets (" + std::to_string(split.train) + "/" + std::to_string(split.valid) +
                                "/" + std::to_string(split.test) + ") exceed corpus size " +
                                std::to_string(ids.size()));

  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> keys(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) keys[i] = stable_hash(ids[i], split.seed);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return ids[a] < ids[b];
  });

  // 0 = train, 1 = valid, 2 = test
  std::vector<unsigned char> bucket(ids.size(), 0);
  for (std::size_t r = 0; r < held_out; ++r) bucket[order[r]] = r < split.valid ? 1 : 2;

  SplitResult out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& dst = bucket[i] == 0 ? out.train : bucket[i] == 1 ? out.valid : out.test;
    dst.push_back(ids[i]);
  }
  return out;
}

}  // namespace thaiprep
