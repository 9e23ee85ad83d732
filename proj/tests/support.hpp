// Shared fixtures, generators and brute-force oracles for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "thaiprep/tokenizer.hpp"
#include "thaiprep/unicode.hpp"

namespace testing_support {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("thaiprep_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string u8(std::u32string_view s) { return thaiprep::unicode::encode(s); }

// --- Random text -------------------------------------------------------------

// A pool biased toward the characters the normalizer and tokenizer care about.
inline std::u32string random_noisy_text(std::mt19937_64& rng, std::size_t max_len) {
  static const std::vector<std::u32string> atoms = {
      U"ก", U"ข", U"ค", U"น", U"ม", U"ร", U"อ", U"ย", U"ะ", U"า", U"ำ", U"เ", U"แ", U"โ", U"ไ",
      U"ั", U"ิ", U"ี", U"ุ", U"ู", U"็", U"่", U"้", U"์",
      U"๑", U"๒", U"0", U"1", U"2", U"5", U"5555", U"555555+", U"9", U"x", U"X", U"+", U"-", U".", U",",
      U":", U"/", U"#", U"(", U")", U"[", U"]", U"{", U"}", U" ", U" ", U"  ", U"\n", U"\t", U"a", U"b",
      U"Z", U"é", U"&amp;", U"&lt;", U"&#3585;", U"<br>", U"<br />", U"&", U";", U"฿", U"$", U"บาท",
      U"😀", U"👍\U0001F3FD", U"‍", U"️", U"́", U"มาก", U"ๆ", U"กกกก", U"abcabcabc",
      U"ไปไปไป", U"อร่อย อร่อย อร่อย", U" ", U"　", U"\U0001F1F9\U0001F1ED",
  };
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::uniform_int_distribution<int> wild(0, 19);
  std::uniform_int_distribution<std::uint32_t> any_bmp(0x20, 0xFFFD);
  std::u32string out;
  const auto n = len_dist(rng);
  while (out.size() < n) {
    if (wild(rng) == 0) {
      char32_t c = any_bmp(rng);
      if (c >= 0xD800 && c <= 0xDFFF) c = U'?';
      out.push_back(c);
    } else {
      out += atoms[pick(rng)];
    }
  }
  return out;
}

// Strings of Thai orthographic material (consonants, vowels, marks, digits).
inline std::u32string random_thai_text(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  std::uniform_int_distribution<std::uint32_t> thai(0x0E01, 0x0E5B);
  std::uniform_int_distribution<int> other(0, 9);
  std::u32string out;
  const auto n = len_dist(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const int o = other(rng);
    if (o == 0) {
      out.push_back(U' ');
    } else if (o == 1) {
      out.push_back(static_cast<char32_t>(U'a' + rng() % 3));
    } else {
      out.push_back(thai(rng));
    }
  }
  return out;
}

// --- Segmentation oracle -------------------------------------------------------

struct OraclePiece {
  std::u32string surface;
  bool dictionary = false;
};

inline bool has_thai(std::u32string_view s) {
  return std::any_of(s.begin(), s.end(), thaiprep::unicode::is_thai);
}

// Exhaustively enumerates every admissible segmentation of one
// whitespace-free run of clusters and returns the minimum-count one; ties go
// to the lexicographically largest sequence of piece lengths.
//
// Admissible pieces at cluster i: any dictionary word spanning whole
// clusters; the single cluster i when it is not Thai; and, when no
// dictionary word starts at a Thai cluster i, the maximal run of such
// clusters. Without merging every single cluster is a piece.
inline std::vector<OraclePiece> brute_force_segment(const std::vector<std::u32string>& clusters,
                                                    const std::set<std::u32string>& dict, bool merge = true) {
  const std::size_t m = clusters.size();
  std::vector<bool> dead(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::u32string acc;
    bool any = false;
    for (std::size_t j = i; j < m && !any; ++j) {
      acc += clusters[j];
      any = dict.count(acc) > 0;
    }
    dead[i] = has_thai(clusters[i]) && !any;
  }

  std::vector<std::vector<std::pair<std::size_t, bool>>> options(m);  // (end, dictionary)
  for (std::size_t i = 0; i < m; ++i) {
    std::u32string acc;
    for (std::size_t j = i; j < m; ++j) {
      acc += clusters[j];
      if (dict.count(acc)) options[i].push_back({j + 1, true});
    }
    if (!has_thai(clusters[i]) || !merge) {
      options[i].push_back({i + 1, false});
    } else if (dead[i]) {
      std::size_t e = i + 1;
      while (e < m && dead[e]) ++e;
      options[i].push_back({e, false});
    }
  }

  std::vector<std::pair<std::size_t, bool>> current;
  std::vector<std::pair<std::size_t, bool>> best;
  bool found = false;
  auto lengths = [](const std::vector<std::pair<std::size_t, bool>>& seg) {
    std::vector<std::size_t> out;
    std::size_t prev = 0;
    for (const auto& [end, _] : seg) {
      out.push_back(end - prev);
      prev = end;
    }
    return out;
  };
  auto better = [&](const std::vector<std::pair<std::size_t, bool>>& a,
                    const std::vector<std::pair<std::size_t, bool>>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    const auto la = lengths(a);
    const auto lb = lengths(b);
    if (la != lb) return la > lb;
    // Same boundaries: prefer dictionary pieces, position by position.
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k].second != b[k].second) return a[k].second;
    }
    return false;
  };
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (found && current.size() > best.size()) return;
    if (i == m) {
      if (!found || better(current, best)) {
        best = current;
        found = true;
      }
      return;
    }
    for (const auto& opt : options[i]) {
      current.push_back(opt);
      self(self, opt.first);
      current.pop_back();
    }
  };
  rec(rec, 0);

  std::vector<OraclePiece> out;
  std::size_t prev = 0;
  for (const auto& [end, is_dict] : best) {
    std::u32string s;
    for (std::size_t k = prev; k < end; ++k) s += clusters[k];
    out.push_back({s, is_dict});
    prev = end;
  }
  return out;
}

// Oracle segmentation of a whole text: whitespace clusters split the text into
// independently segmented runs.
inline std::vector<OraclePiece> brute_force_tokenize(std::u32string_view text, const std::set<std::u32string>& dict,
                                                     bool merge = true) {
  const auto spans = thaiprep::cluster_spans(text);
  std::vector<OraclePiece> out;
  std::vector<std::u32string> run;
  auto flush = [&] {
    if (run.empty()) return;
    auto seg = brute_force_segment(run, dict, merge);
    out.insert(out.end(), seg.begin(), seg.end());
    run.clear();
  };
  for (const auto& sp : spans) {
    std::u32string c(text.substr(sp.begin, sp.size()));
    if (thaiprep::unicode::is_space(c[0])) {
      flush();
    } else {
      run.push_back(std::move(c));
    }
  }
  flush();
  return out;
}

// --- Counting oracles ---------------------------------------------------------

struct NaiveVocabEntry {
  std::string surface;
  std::uint64_t count;
  std::size_t first;
};

inline std::vector<std::pair<std::string, std::uint64_t>> naive_top_k(const std::vector<std::vector<std::string>>& docs,
                                                                      std::size_t k) {
  std::map<std::string, NaiveVocabEntry> seen;
  std::size_t position = 0;
  for (const auto& d : docs) {
    for (const auto& s : d) {
      auto [it, fresh] = seen.try_emplace(s, NaiveVocabEntry{s, 0, position});
      ++it->second.count;
      ++position;
    }
  }
  std::vector<NaiveVocabEntry> all;
  for (auto& [_, e] : seen) all.push_back(e);
  std::sort(all.begin(), all.end(), [](const NaiveVocabEntry& a, const NaiveVocabEntry& b) {
    return a.count != b.count ? a.count > b.count : a.first < b.first;
  });
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (std::size_t i = 0; i < all.size() && i < k; ++i) out.emplace_back(all[i].surface, all[i].count);
  return out;
}

inline double naive_oov(const std::vector<std::vector<std::string>>& docs, const std::set<std::string>& vocab) {
  std::size_t total = 0;
  std::size_t missing = 0;
  for (const auto& d : docs) {
    for (const auto& s : d) {
      ++total;
      if (!vocab.count(s)) ++missing;
    }
  }
  return static_cast<double>(missing) / static_cast<double>(total);
}

// --- Language-ID corpora --------------------------------------------------------

inline std::string random_thai_sentence(std::mt19937_64& rng, std::size_t words) {
  static const std::vector<std::string> vocab = {
      "ฉัน", "ชอบ", "กิน", "ข้าว", "มาก", "วันนี้", "อากาศ", "ดี", "ไป", "เที่ยว", "ทะเล", "กับ", "เพื่อน",
      "ร้าน", "อาหาร", "อร่อย", "ราคา", "ไม่", "แพง", "คน", "เยอะ", "รถ", "ติด", "ทำงาน", "บ้าน", "หนังสือ",
      "เรียน", "ภาษา", "ไทย", "สนุก", "ครับ", "ค่ะ", "นะ", "เลย", "แล้ว", "จะ", "ได้", "ที่", "และ", "ของ"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    out += vocab[pick(rng)];
    if (rng() % 3 == 0) out += ' ';
  }
  return out;
}

inline std::string random_english_sentence(std::mt19937_64& rng, std::size_t words) {
  static const std::vector<std::string> vocab = {
      "the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog", "today", "weather", "is", "nice",
      "we", "went", "to", "beach", "with", "friends", "food", "was", "great", "price", "not", "expensive",
      "traffic", "heavy", "work", "home", "book", "learn", "language", "fun", "really", "and", "of", "a",
      "in", "that", "have", "it"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i > 0) out += ' ';
    out += vocab[pick(rng)];
  }
  return out;
}

}  // namespace testing_support
