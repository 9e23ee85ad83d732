#include <gtest/gtest.h>

#include <random>
#include <regex>

#include "support.hpp"
#include "thaiprep/normalizer.hpp"

using namespace thaiprep;

namespace {

std::string normalize(std::string_view text) { return Normalizer().normalize_text(text); }

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(FixHtml, Examples) {
  EXPECT_EQ(fix_html("a &amp; b"), "a & b");
  EXPECT_EQ(fix_html("x<br>y"), "x\ny");
  EXPECT_EQ(fix_html("&notareal;"), "&notareal;");
}

TEST(FixHtml, NumericAndNestedReferences) {
  EXPECT_EQ(fix_html("&#3585;&#x0E02;"), "กข");
  EXPECT_EQ(fix_html("&amp;lt;"), "<");
  EXPECT_EQ(fix_html("a<br/>b<br />c<BR>d"), "a\nb\nc\nd");
  EXPECT_EQ(fix_html("&#0;&#xD800;"), "&#0;&#xD800;");
  EXPECT_EQ(fix_html("&nbsp;&quot;&#39;"), " \"'");
}

TEST(CollapseWhitespace, Examples) {
  EXPECT_EQ(collapse_whitespace("a   b"), "a b");
  EXPECT_EQ(collapse_whitespace("a\n\n\nb"), "a\nb");
  EXPECT_EQ(collapse_whitespace("  a  "), "a");
  EXPECT_EQ(collapse_whitespace("a \t b"), "a b");
  EXPECT_EQ(collapse_whitespace("a \n\t b"), "a\nb");
}

TEST(RemoveEmptyBrackets, Examples) {
  EXPECT_EQ(collapse_whitespace(remove_empty_brackets("hi () there")), "hi there");
  EXPECT_EQ(remove_empty_brackets("(( ))"), "");
  EXPECT_EQ(remove_empty_brackets("(x)"), "(x)");
  EXPECT_EQ(remove_empty_brackets("a[]b{ }c"), "abc");
  EXPECT_EQ(remove_empty_brackets("(]"), "(]");
}

TEST(PadSlashHash, Examples) {
  EXPECT_EQ(pad_slash_hash("a/b"), "a / b");
  EXPECT_EQ(pad_slash_hash("#tag"), "# tag");
  EXPECT_EQ(pad_slash_hash("a / b"), "a / b");
  EXPECT_EQ(pad_slash_hash("12/05/2562"), "12/05/2562");
}

TEST(NormalizeCharOrder, Examples) {
  EXPECT_EQ(normalize_char_order("ก่ิ"), "กิ่");
  EXPECT_EQ(normalize_char_order("กิิ"), "กิ");
  EXPECT_EQ(normalize_char_order("กิ่น"), "กิ่น");
}

TEST(NormalizeCharOrder, BelowBeforeAboveBeforeToneBeforeSign) {
  EXPECT_EQ(normalize_char_order("กุ้"), "กุ้");
  EXPECT_EQ(normalize_char_order("ก์ิ"), "กิ์");
  EXPECT_EQ(normalize_char_order("ก่่่"), "ก่");
  // Tone typed after SARA AM moves in front of it.
  EXPECT_EQ(normalize_char_order("นำ้"), "น้ำ");
}

TEST(NormalizeCharOrder, NoAdjacentDuplicatesAndFixpoint) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto text = testing_support::u8(testing_support::random_thai_text(rng, 30));
    const auto once = normalize_char_order(text);
    EXPECT_EQ(normalize_char_order(once), once);
    const auto t = unicode::decode(once);
    for (std::size_t k = 1; k < t.size(); ++k) {
      if (unicode::is_thai_combining(t[k])) EXPECT_NE(t[k], t[k - 1]) << once;
    }
  }
}

TEST(MarkLaugh, Examples) {
  EXPECT_EQ(mark_laugh("555555+"), " [LAUGH] ");
  EXPECT_EQ(mark_laugh("5555"), " [LAUGH] ");
  EXPECT_EQ(mark_laugh("555"), "555");
  EXPECT_EQ(mark_laugh("ขำ55555++"), "ขำ [LAUGH] +");
}

TEST(MarkNumbers, Examples) {
  EXPECT_EQ(collapse_whitespace(mark_numbers("ราคา 1,250.50 บาท")), "ราคา [NUM] บาท");
  EXPECT_EQ(collapse_whitespace(mark_numbers("โทร 08x-xxx-1234")), "โทร [NUM]");
  EXPECT_EQ(mark_numbers("๒๕๖๒"), " [NUM] ");
}

TEST(MarkNumbers, PatternSet) {
  EXPECT_EQ(mark_numbers("12/05/2562"), " [NUM] ");
  EXPECT_EQ(mark_numbers("10:30"), " [NUM] ");
  EXPECT_EQ(mark_numbers("3"), " [NUM] ");
  EXPECT_EQ(mark_numbers("mp3"), "mp3");
  EXPECT_EQ(mark_numbers("xxx"), "xxx");
  EXPECT_EQ(mark_numbers("1x"), "1x");
  EXPECT_EQ(mark_numbers("฿1x9"), "฿ [NUM] ");
  EXPECT_EQ(mark_numbers("1,xxx บาท"), " [NUM]  บาท");
  EXPECT_EQ(mark_numbers("a [CREP] 4"), "a [CREP] 4");
}

TEST(MarkNumbers, ExtraPatterns) {
  const std::vector<std::string> plate{"[A-Z]{2}\\d{4}"};
  EXPECT_EQ(mark_numbers("AB1234", {}, plate), " [NUM] ");
  EXPECT_EQ(mark_numbers("AB1234", {}), "AB1234");
  EXPECT_EQ(collapse_whitespace(mark_numbers("ทะเบียน AB1234 ราคา 500", {}, plate)), "ทะเบียน [NUM] ราคา [NUM]");
  const std::vector<std::string> thai{"ครั้งที่\\s?\\d+"};
  EXPECT_EQ(mark_numbers("ครั้งที่ 3", {}, thai), " [NUM] ");
  const std::vector<std::string> bad{"([0-9"};
  EXPECT_THROW(mark_numbers("1", {}, bad), std::invalid_argument);
}

TEST(Normalizer, ConfiguredNumberPatterns) {
  PipelineConfig config;
  config.number_patterns = {"[A-Z]{2}\\d{4}"};
  const Normalizer n(config);
  EXPECT_EQ(n.normalize_text("รถ AB1234"), "รถ [NUM]");
  const auto once = n.normalize_text("รถ AB1234 มากกกก");
  EXPECT_EQ(n.normalize_text(once), once);
  config.number_patterns = {"("};
  EXPECT_THROW(Normalizer{config}, std::invalid_argument);
}

TEST(MarkCharRepetition, Examples) {
  EXPECT_EQ(mark_char_repetition("ฉันชอบมันมากกกก"), "ฉันชอบมันมาก [CREP] 4");
  EXPECT_EQ(mark_char_repetition("กกกกกกก"), "ก [CREP] 5");
  EXPECT_EQ(mark_char_repetition("มากก"), "มากก");
}

TEST(MarkCharRepetition, EdgeCases) {
  EXPECT_EQ(mark_char_repetition("!!!"), "! [CREP] 3");
  EXPECT_EQ(mark_char_repetition("aaab"), "a [CREP] 3 b");
  EXPECT_EQ(mark_char_repetition("aaa b"), "a [CREP] 3 b");
  EXPECT_EQ(mark_char_repetition("1111"), "1111");
  EXPECT_EQ(mark_char_repetition("   "), "   ");
  EXPECT_EQ(mark_char_repetition("aaaaaaaaaa", {}, 7), "a [CREP] 7");
  EXPECT_THROW(mark_char_repetition("aaa", {}, 1), std::invalid_argument);
}

TEST(MarkWordRepetition, Examples) {
  EXPECT_EQ(mark_word_repetition("อร่อยอร่อยอร่อย"), "อร่อย [WREP] 3");
  EXPECT_EQ(mark_word_repetition("unitunitunitunitunitunitunit"), "unit [WREP] 5");
  EXPECT_EQ(mark_word_repetition("ไปไปไป"), "ไปไปไป");
}

TEST(MarkWordRepetition, SpacesSmallestPeriodAndLeftmost) {
  EXPECT_EQ(mark_word_repetition("ดีมาก ดีมาก ดีมาก"), "ดีมาก [WREP] 3");
  EXPECT_EQ(mark_word_repetition("abcabcabcabcabcabc"), "abc [WREP] 5");
  EXPECT_EQ(mark_word_repetition("xabcabcabc"), "xabc [WREP] 3");
  EXPECT_EQ(mark_word_repetition("abcabc"), "abcabc");
  EXPECT_EQ(mark_word_repetition("abc  abc  abc"), "abc  abc  abc");
}

TEST(MarkWordRepetition, CapValidation) {
  EXPECT_THROW(mark_word_repetition("abcabcabc", {}, 0), std::invalid_argument);
  EXPECT_EQ(mark_word_repetition("abcabcabcabc", {}, 2), "abc [WREP] 2");
}

TEST(NormalizeDocument, TableOneExample) {
  EXPECT_EQ(normalize("ฉันชอบมันมากกกก555555+"), "ฉันชอบมันมาก [CREP] 4 [LAUGH]");
  RawThread t{"1", "", "ฉันชอบมันมากกกก555555+", {}};
  EXPECT_EQ(normalize_document(t, PipelineConfig{}).text, "ฉันชอบมันมาก [CREP] 4 [LAUGH]");
}

TEST(NormalizeDocument, Empty) {
  EXPECT_EQ(normalize(""), "");
  EXPECT_TRUE(Normalizer().normalize("").rewrites.empty());
}

TEST(NormalizeDocument, CustomSurfacesAndCaps) {
  Normalizer::Options o;
  o.specials.crep = "<rep>";
  o.specials.laugh = "<haha>";
  o.caps.crep = 3;
  EXPECT_EQ(Normalizer(o).normalize_text("มากกกกกก55555"), "มาก <rep> 3 <haha>");
}

TEST(NormalizeDocument, StageOrderMatters) {
  // With numbers before laughter, the '5' run would be eaten as a number.
  Normalizer::Options o;
  o.stage_order = {"fix_html",    "normalize_char_order", "remove_empty_brackets", "pad_slash_hash",
                   "mark_numbers", "mark_laugh",           "mark_char_repetition",  "mark_word_repetition",
                   "collapse_whitespace"};
  EXPECT_EQ(Normalizer(o).normalize_text("ฮา 55555"), "ฮา [NUM]");
  EXPECT_EQ(normalize("ฮา 55555"), "ฮา [LAUGH]");
}

TEST(NormalizeDocument, UnknownStageRejected) {
  Normalizer::Options o;
  o.stage_order = {"fix_html", "spellcheck"};
  EXPECT_THROW(Normalizer{o}, std::invalid_argument);
}

TEST(NormalizeDocument, LaughNeverBecomesNumber) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 500; ++i) {
    const std::size_t run = 4 + rng() % 10;
    const std::string text = "ขำ " + std::string(run, '5') + (rng() % 2 ? "+" : "") + " จริง";
    const auto out = normalize(text);
    EXPECT_EQ(out, "ขำ [LAUGH] จริง");
    EXPECT_EQ(out.find("[NUM]"), std::string::npos);
  }
}

TEST(NormalizeDocument, AuditTrailExample) {
  const auto doc = Normalizer().normalize("a/b");
  ASSERT_EQ(doc.rewrites.size(), 1u);
  EXPECT_EQ(doc.rewrites[0].rule, RewriteRule::pad_slash_hash);
  EXPECT_EQ(doc.rewrites[0].source_span, (Span{1, 2}));
  EXPECT_EQ(doc.rewrites[0].replacement, " / ");
  EXPECT_EQ(to_json(doc.rewrites[0]).dump(), R"({"replacement":" / ","rule":"pad_slash_hash","span":[1,2]})");
}

TEST(ApplyRewrites, RejectsBadSpans) {
  std::vector<RewriteRecord> overlap{{RewriteRule::laugh, {0, 2}, "x"}, {RewriteRule::laugh, {1, 3}, "y"}};
  EXPECT_THROW(apply_rewrites("abcd", overlap), std::invalid_argument);
  std::vector<RewriteRecord> out_of_range{{RewriteRule::laugh, {2, 9}, "x"}};
  EXPECT_THROW(apply_rewrites("abcd", out_of_range), std::invalid_argument);
}

// Fuzzed properties over the whole stage sequence.
class NormalizerProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{2024};
};

TEST_F(NormalizerProperties, IdempotentAndReplayable) {
  const Normalizer n;
  for (int i = 0; i < 3000; ++i) {
    const auto input = testing_support::u8(testing_support::random_noisy_text(rng, 60));
    const auto doc = n.normalize(input);
    ASSERT_EQ(n.normalize_text(doc.text), doc.text) << "input: " << input;
    ASSERT_EQ(n.normalize_text(input), doc.text);
    ASSERT_EQ(apply_rewrites(input, doc.rewrites), doc.text) << "input: " << input;
    for (std::size_t k = 1; k < doc.rewrites.size(); ++k)
      ASSERT_LE(doc.rewrites[k - 1].source_span.end, doc.rewrites[k].source_span.begin);
  }
}

TEST_F(NormalizerProperties, CountsWithinCap) {
  const std::regex count_re(R"(\[(CREP|WREP)\] (\d+))");
  for (int cap : {2, 3, 5, 9}) {
    Normalizer::Options o;
    o.caps = {cap, cap};
    const Normalizer n(o);
    for (int i = 0; i < 500; ++i) {
      const auto out = n.normalize_text(testing_support::u8(testing_support::random_noisy_text(rng, 60)));
      for (std::sregex_iterator it(out.begin(), out.end(), count_re), end; it != end; ++it) {
        const int c = std::stoi((*it)[2]);
        EXPECT_GE(c, std::min(3, cap));
        EXPECT_LE(c, cap);
      }
    }
  }
}

TEST_F(NormalizerProperties, SpecialSurfacesOnlyFromRules) {
  const Normalizer n;
  const auto surfaces = SpecialTokens{}.surfaces();
  for (int i = 0; i < 1500; ++i) {
    auto input = testing_support::u8(testing_support::random_noisy_text(rng, 60));
    input.erase(std::remove(input.begin(), input.end(), '['), input.end());
    const auto doc = n.normalize(input);
    for (const auto& s : surfaces) {
      std::size_t produced = 0;
      for (const auto& r : doc.rewrites) produced += count_of(r.replacement, s);
      EXPECT_EQ(count_of(doc.text, s), produced) << "input: " << input;
    }
  }
}
