#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace thaiprep {

/// Half-open range of code point offsets into a text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

namespace unicode {

// Invalid byte sequences decode to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

bool is_valid_utf8(std::string_view bytes);
std::size_t length(std::string_view utf8);

bool is_space(char32_t c);
bool is_newline(char32_t c);

bool is_thai(char32_t c);
bool is_thai_consonant(char32_t c);
bool is_thai_leading_vowel(char32_t c);
bool is_thai_digit(char32_t c);
/// Above/below vowels, tone marks and signs that render on the preceding base.
bool is_thai_combining(char32_t c);
constexpr char32_t kSaraAm = 0x0E33;

bool is_ascii_digit(char32_t c);
bool is_digit(char32_t c);
bool is_latin_letter(char32_t c);
char32_t to_lower_latin(char32_t c);

/// Thai marks plus generic combining marks, variation selectors, ZWJ and
/// skin-tone modifiers.
bool is_combining(char32_t c);

bool is_emoji_base(char32_t c);
bool is_emoji_modifier(char32_t c);
bool is_regional_indicator(char32_t c);
constexpr char32_t kZeroWidthJoiner = 0x200D;
constexpr char32_t kVariationSelector16 = 0xFE0F;

}  // namespace unicode
}  // namespace thaiprep
