#include "thaiprep/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "thaiprep/errors.hpp"
#include "thaiprep/tokenizer.hpp"

namespace thaiprep {

std::string BoundaryLabels::to_string() const {
  std::string s;
  s.reserve(labels.size());
  for (auto b : labels) s.push_back(b ? '1' : '0');
  return s;
}

BoundaryLabels BoundaryLabels::from_string(std::string_view bits) {
  BoundaryLabels out;
  out.labels.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("label string may only contain 0 and 1");
    out.labels.push_back(c == '1');
  }
  if (!out.labels.empty() && out.labels[0] == 0) throw std::invalid_argument("the first character must be labelled 1");
  return out;
}

BoundaryLabels boundaries_from_tokens(const TokenStream& stream) {
  const std::size_t total = covered_length(stream);
  BoundaryLabels out;
  out.labels.reserve(total);
  if (stream.separators.empty()) return out;
  out.labels.insert(out.labels.end(), unicode::length(stream.separators[0]), 1);
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    const auto& span = stream.tokens[i].span;
    out.labels.push_back(1);
    out.labels.insert(out.labels.end(), span.size() - 1, 0);
    out.labels.insert(out.labels.end(), unicode::length(stream.separators[i + 1]), 1);
  }
  return out;
}

BoundaryLabels labels_from_segmented(std::string_view segmented) {
  BoundaryLabels out;
  bool next_starts = true;
  for (char32_t c : unicode::decode(segmented)) {
    if (c == U'|') {
      next_starts = true;
      continue;
    }
    if (unicode::is_space(c)) {
      out.labels.push_back(1);
      next_starts = true;
      continue;
    }
    out.labels.push_back(next_starts ? 1 : 0);
    next_starts = false;
  }
  return out;
}

std::string segmented_text(const TokenStream& stream) {
  if (stream.separators.empty()) return {};
  std::string out = stream.separators[0];
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    out += stream.tokens[i].surface;
    const auto& sep = stream.separators[i + 1];
    out += (sep.empty() && i + 1 < stream.tokens.size()) ? std::string("|") : sep;
  }
  return out;
}

MetricsReport MetricsReport::from_counts(const BoundaryCounts& c) {
  MetricsReport r;
  r.counts = c;
  r.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  r.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json j{{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
                   {"tp", r.counts.tp},        {"fp", r.counts.fp},    {"fn", r.counts.fn},
                   {"documents", r.documents}};
  if (!r.label.empty()) j["label"] = r.label;
  return j;
}

BoundaryCounts boundary_counts(const BoundaryLabels& predicted, const BoundaryLabels& gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("label length mismatch: predicted " + std::to_string(predicted.size()) + ", gold " +
                                std::to_string(gold.size()));
  BoundaryCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted.labels[i] != 0;
    const bool g = gold.labels[i] != 0;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
  }
  return c;
}

MetricsReport boundary_prf(const BoundaryLabels& predicted, const BoundaryLabels& gold) {
  auto r = MetricsReport::from_counts(boundary_counts(predicted, gold));
  r.documents = 1;
  return r;
}

double perplexity(double mean_nll) {
  if (!std::isfinite(mean_nll) || mean_nll < 0) throw std::invalid_argument("mean negative log-likelihood must be >= 0");
  return std::exp(mean_nll);
}

nlohmann::json to_json(const CorpusStats& s) {
  return {{"documents", s.documents}, {"tokens", s.tokens}, {"mean_length", s.mean_length}, {"std_length", s.std_length}};
}

void StatsAccumulator::add(std::uint64_t doc_tokens) {
  ++n_;
  total_ += doc_tokens;
  const double x = static_cast<double>(doc_tokens);
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void StatsAccumulator::merge(const StatsAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
  total_ += o.total_;
}

CorpusStats StatsAccumulator::result() const {
  CorpusStats s;
  s.documents = n_;
  s.tokens = total_;
  if (n_ > 0) {
    s.mean_length = static_cast<double>(total_) / static_cast<double>(n_);
    s.std_length = std::sqrt(std::max(0.0, m2_ / static_cast<double>(n_)));
  }
  return s;
}

CorpusStats corpus_stats(std::span<const TokenStream> streams) {
  StatsAccumulator acc;
  for (const auto& s : streams) acc.add(s.tokens.size());
  return acc.result();
}

CorpusStats corpus_stats(std::span<const std::uint64_t> doc_lengths) {
  StatsAccumulator acc;
  for (auto n : doc_lengths) acc.add(n);
  return acc.result();
}

namespace {

template <typename Parse>
std::map<std::string, BoundaryLabels> load_tsv_labels(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open label file: " + path.string());
  std::map<std::string, BoundaryLabels> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    if (tab == std::string::npos || tab == 0) throw InputError(where + "expected '<doc-id>\\t<labels>'");
    auto id = line.substr(0, tab);
    try {
      if (!out.emplace(id, parse(std::string_view(line).substr(tab + 1))).second)
        throw InputError(where + "duplicate id '" + id + "'");
    } catch (const std::invalid_argument& e) {
      throw InputError(where + e.what());
    }
  }
  return out;
}

}  // namespace

std::map<std::string, BoundaryLabels> load_label_file(const std::filesystem::path& path) {
  return load_tsv_labels(path, [](std::string_view s) { return BoundaryLabels::from_string(s); });
}

std::map<std::string, BoundaryLabels> load_segmented_file(const std::filesystem::path& path) {
  return load_tsv_labels(path, [](std::string_view s) { return labels_from_segmented(s); });
}

void save_label_file(const std::map<std::string, BoundaryLabels>& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open label file: " + path.string(), 0);
  std::size_t n = 0;
  for (const auto& [id, l] : labels) {
    out << id << '\t' << l.to_string() << '\n';
    if (!out) throw WriteError("write failed: " + path.string(), n);
    ++n;
  }
}

MetricsReport evaluate_boundaries(const std::map<std::string, BoundaryLabels>& predicted,
                                  const std::map<std::string, BoundaryLabels>& gold) {
  std::vector<std::string> unmatched;
  for (const auto& [id, _] : predicted) {
    if (!gold.count(id)) unmatched.push_back(id + " (predicted only)");
  }
  for (const auto& [id, _] : gold) {
    if (!predicted.count(id)) unmatched.push_back(id + " (gold only)");
  }
  if (!unmatched.empty()) {
    std::string msg = "unmatched document ids:";
    for (const auto& id : unmatched) msg += " " + id;
    throw InputError(msg);
  }
  BoundaryCounts total;
  for (const auto& [id, g] : gold) {
    try {
      total += boundary_counts(predicted.at(id), g);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("document '" + id + "': " + e.what());
    }
  }
  auto r = MetricsReport::from_counts(total);
  r.documents = gold.size();
  return r;
}

}  // namespace thaiprep
