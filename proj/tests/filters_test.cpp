#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "support.hpp"
#include "thaiprep/errors.hpp"
#include "thaiprep/filters.hpp"

using namespace thaiprep;
using testing_support::TempDir;

namespace {

RawThread thread_with(std::string title, std::size_t body_chars, std::string fill = "ก") {
  std::string body;
  for (std::size_t i = 0; i < body_chars; ++i) body += fill;
  return {"id", std::move(title), std::move(body), {}};
}

// Mean log-likelihood straight from the smoothing formula, using counts
// recomputed here from the raw training strings.
double hand_score(const std::vector<std::string>& training, const std::string& text) {
  std::map<std::u32string, double> counts;
  std::array<double, 3> total{}, distinct{};
  for (const auto& doc : training) {
    auto s = unicode::decode(doc);
    for (auto& c : s) c = unicode::to_lower_latin(c);
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && unicode::is_space(s[i])) ++i;
      std::size_t j = i;
      while (j < s.size() && !unicode::is_space(s[j])) ++j;
      for (std::size_t a = i; a < j; ++a)
        for (std::size_t n = 1; n <= 3 && a + n <= j; ++n) {
          auto g = s.substr(a, n);
          if (counts[g]++ == 0) distinct[n - 1] += 1;
          total[n - 1] += 1;
        }
      i = j;
    }
  }
  const auto grams = extract_ngrams(text);
  double sum = 0;
  for (const auto& g : grams) {
    const auto n = g.size() - 1;
    const auto it = counts.find(g);
    const double c = it == counts.end() ? 0 : it->second;
    sum += std::log((c + 1) / (total[n] + distinct[n] + 1));
  }
  return sum / static_cast<double>(grams.size());
}

const std::vector<std::string> kThai = {"ฉันชอบกินข้าวมาก", "วันนี้อากาศดีมาก", "ไปเที่ยวทะเลกับเพื่อน"};
const std::vector<std::string> kEnglish = {"I like to eat rice", "the weather is nice today",
                                           "going to the beach with friends"};

std::vector<LanguageProfile> toy_profiles() {
  std::vector<LabeledText> docs;
  for (const auto& t : kThai) docs.push_back({t, "th"});
  for (const auto& t : kEnglish) docs.push_back({t, "en"});
  return train_profiles(docs);
}

}  // namespace

TEST(LengthFilter, ExactlyMinimumIsTooShort) {
  const auto d = length_filter(thread_with("t", 100), 100);
  EXPECT_FALSE(d.accepted);
  EXPECT_EQ(d.reason, FilterReason::too_short);
}

TEST(LengthFilter, OneMoreThanMinimumIsAccepted) {
  const auto d = length_filter(thread_with("t", 101), 100);
  EXPECT_TRUE(d.accepted);
  EXPECT_EQ(d.reason, FilterReason::ok);
}

TEST(LengthFilter, EmptyTitleRejected) {
  EXPECT_EQ(length_filter(thread_with("", 500), 100).reason, FilterReason::no_title);
  EXPECT_EQ(length_filter(thread_with(" \t", 500), 100).reason, FilterReason::no_title);
}

TEST(LengthFilter, CountsCodePointsIncludingSpaces) {
  EXPECT_TRUE(length_filter(thread_with("t", 101, " "), 100).accepted);
  // 101 Thai characters are 303 bytes but 101 code points.
  EXPECT_FALSE(length_filter(thread_with("t", 100, "ก"), 100).accepted);
}

TEST(LengthFilter, Monotone) {
  for (std::size_t n = 0; n < 300; n += 7) {
    if (length_filter(thread_with("t", n), 100).accepted) {
      for (std::size_t m = n; m < 320; m += 3) EXPECT_TRUE(length_filter(thread_with("t", m), 100).accepted);
    }
  }
}

TEST(FilterDecision, AcceptedIffOk) {
  for (auto d : {length_filter(thread_with("t", 5), 3), length_filter(thread_with("", 5), 3),
                 length_filter(thread_with("t", 2), 3)})
    EXPECT_EQ(d.accepted, d.reason == FilterReason::ok);
}

TEST(TrainProfiles, SingleDocUnigramFrequency) {
  const auto p = train_profiles(std::vector<LabeledText>{{"aa", "x"}});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p[0].relative_frequency(U"a"), 1.0);
  EXPECT_EQ(p[0].count(U"aa"), 1u);
  // Smoothed: (2 + 1) / (2 + 1 + 1)
  EXPECT_NEAR(p[0].log_prob(U"a"), std::log(3.0 / 4.0), 1e-12);
  EXPECT_NEAR(p[0].log_prob(U"b"), std::log(1.0 / 4.0), 1e-12);
}

TEST(TrainProfiles, DisjointScriptsHaveDisjointUnigrams) {
  const auto profiles = toy_profiles();
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_EQ(profiles[0].language(), "en");
  EXPECT_EQ(profiles[1].language(), "th");
  for (const auto& [g, _] : profiles[0].log_probs()) {
    if (g.size() == 1) EXPECT_EQ(profiles[1].count(g), 0u);
  }
}

TEST(TrainProfiles, Deterministic) { EXPECT_EQ(toy_profiles(), toy_profiles()); }

TEST(TrainProfiles, EmptySetFails) { EXPECT_THROW(train_profiles(std::vector<LabeledText>{}), std::invalid_argument); }

TEST(TrainProfiles, ProbabilitiesPerOrderSumBelowOne) {
  for (const auto& p : toy_profiles()) {
    std::array<double, 3> sum{};
    for (const auto& [g, lp] : p.log_probs()) {
      EXPECT_LT(lp, 0.0);
      sum[g.size() - 1] += std::exp(lp);
    }
    for (int n = 0; n < 3; ++n) {
      EXPECT_LE(sum[n], 1.0 + 1e-12);
      EXPECT_NEAR(sum[n] + p.smoothing_mass()[n], 1.0, 1e-9);
    }
  }
}

TEST(DetectLanguage, ThaiSentence) {
  const auto profiles = toy_profiles();
  const std::string text = "ฉันชอบไปทะเล";
  const auto g = detect_language(text, profiles);
  EXPECT_EQ(g.language, "th");
  EXPECT_NEAR(g.score, hand_score(kThai, text), 1e-12);
  EXPECT_GT(hand_score(kThai, text), hand_score(kEnglish, text));
}

TEST(DetectLanguage, EnglishSentence) {
  const auto profiles = toy_profiles();
  const std::string text = "the quick brown fox";
  const auto g = detect_language(text, profiles);
  EXPECT_EQ(g.language, "en");
  EXPECT_NEAR(g.score, hand_score(kEnglish, text), 1e-12);
}

TEST(DetectLanguage, EmptyTextFails) {
  const auto profiles = toy_profiles();
  EXPECT_THROW(detect_language("", profiles), std::invalid_argument);
  EXPECT_THROW(detect_language("  \n", profiles), std::invalid_argument);
  EXPECT_THROW(detect_language("abc", std::vector<LanguageProfile>{}), std::invalid_argument);
}

TEST(DetectLanguage, TiesGoToSmallerCode) {
  const auto profiles = train_profiles(std::vector<LabeledText>{{"abc", "zz"}, {"abc", "aa"}});
  EXPECT_EQ(detect_language("abc", profiles).language, "aa");
  EXPECT_EQ(detect_language("qqq", profiles).language, "aa");
}

TEST(DetectLanguage, InvariantUnderDuplication) {
  const auto profiles = toy_profiles();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto text = testing_support::u8(testing_support::random_noisy_text(rng, 40));
    if (extract_ngrams(text).empty()) continue;
    const auto a = detect_language(text, profiles);
    const auto b = detect_language(text + " " + text, profiles);
    EXPECT_EQ(a.language, b.language);
    EXPECT_NEAR(a.score, b.score, 1e-9);
  }
}

TEST(DetectLanguage, TextOfNgramsSeenOnlyInOneLanguage) {
  // Balanced corpora: every n-gram of a test string occurs in exactly one
  // language's training data.
  std::mt19937_64 rng(9);
  std::vector<LabeledText> docs;
  for (int i = 0; i < 30; ++i) {
    docs.push_back({testing_support::random_thai_sentence(rng, 12), "th"});
    docs.push_back({testing_support::random_english_sentence(rng, 12), "en"});
  }
  const auto profiles = train_profiles(docs);
  for (int i = 0; i < 50; ++i) {
    const auto& doc = docs[rng() % docs.size()];
    // A word of a training document is made of n-grams seen in its language.
    const auto words = doc.text.substr(0, doc.text.find(' '));
    bool only_one = true;
    for (const auto& g : extract_ngrams(words)) {
      for (const auto& p : profiles)
        if (p.language() != doc.language && p.count(g) > 0) only_one = false;
    }
    if (only_one) EXPECT_EQ(detect_language(words, profiles).language, doc.language);
  }
}

TEST(Profiles, SaveLoadRoundTrip) {
  TempDir dir;
  for (const auto& p : toy_profiles()) {
    const auto path = dir / (p.language() + ".profile");
    save_profile(p, path);
    const auto back = load_profile(path);
    EXPECT_EQ(back, p);
    EXPECT_EQ(detect_language("ฉันชอบ", std::vector<LanguageProfile>{back}).score,
              detect_language("ฉันชอบ", std::vector<LanguageProfile>{p}).score);
  }
}

TEST(Profiles, HeaderAndLineFormat) {
  TempDir dir;
  const auto p = train_profiles(std::vector<LabeledText>{{"ab", "xx"}})[0];
  save_profile(p, dir / "xx.profile");
  const auto text = testing_support::read_file(dir / "xx.profile");
  EXPECT_EQ(text.rfind("#language\txx\n#smoothing\t", 0), 0u);
  EXPECT_NE(text.find("\n0061\t"), std::string::npos);
  EXPECT_NE(text.find("\n0061 0062\t"), std::string::npos);
}

TEST(Profiles, MalformedFilesRejected) {
  TempDir dir;
  testing_support::write_file(dir / "bad.profile", "0061\t-1\n");
  EXPECT_THROW(load_profile(dir / "bad.profile"), InputError);
  testing_support::write_file(dir / "bad2.profile", "#language\tx\n#smoothing\t0.1\t0.1\t0.1\nZZZZ\t-1\n");
  EXPECT_THROW(load_profile(dir / "bad2.profile"), InputError);
  EXPECT_THROW(load_profile(dir / "missing.profile"), InputError);
}

TEST(ThreadFilter, LengthThenLanguage) {
  const ThreadFilter filter(10, "th", toy_profiles());
  EXPECT_TRUE(filter({"1", "หัวข้อ", "ฉันชอบกินข้าวมากวันนี้อากาศดี", {}}).accepted);
  EXPECT_EQ(filter({"2", "title", "the weather is nice today and tomorrow", {}}).reason,
            FilterReason::wrong_language);
  EXPECT_EQ(filter({"3", "หัวข้อ", "สั้น", {}}).reason, FilterReason::too_short);
  EXPECT_EQ(filter({"4", "", "ฉันชอบกินข้าวมากวันนี้อากาศดี", {}}).reason, FilterReason::no_title);
}

TEST(ThreadFilter, NoProfilesSkipsLanguageCheck) {
  const ThreadFilter filter(3, "th", {});
  EXPECT_TRUE(filter({"1", "t", "english only body", {}}).accepted);
}
