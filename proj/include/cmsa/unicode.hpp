#pragma once

#include <string>
#include <string_view>
#include <vector>

// Thin UTF-8 layer over ICU character properties and grapheme segmentation.
namespace cmsa::unicode {

// Ill-formed sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t c);

char32_t simple_lower(char32_t c);
bool is_letter_or_digit(char32_t c);
bool is_white_space(char32_t c);

// Splits on any Unicode white space.
std::vector<std::string> split_white_space(std::string_view s);

// Extended grapheme clusters, as byte slices of `s`.
std::vector<std::string_view> grapheme_clusters(std::string_view s);

// A cluster is an emoji when it starts with an Extended_Pictographic,
// Emoji_Presentation or Regional_Indicator code point, or when an Emoji
// code point is forced into emoji presentation by U+FE0F or U+20E3.
bool is_emoji_cluster(std::string_view cluster);

bool contains_emoji(std::string_view s);

}  // namespace cmsa::unicode
