#include "cmsa/unicode.hpp"

#include <unicode/ubrk.h>
#include <unicode/uchar.h>
#include <unicode/utext.h>

#include <memory>
#include <stdexcept>

namespace cmsa::unicode {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

struct BreakIteratorCloser {
  void operator()(UBreakIterator* it) const { ubrk_close(it); }
};

UBreakIterator* thread_char_iterator() {
  thread_local std::unique_ptr<UBreakIterator, BreakIteratorCloser> it = [] {
    UErrorCode status = U_ZERO_ERROR;
    UBreakIterator* raw = ubrk_open(UBRK_CHARACTER, "", nullptr, 0, &status);
    if (U_FAILURE(status)) throw std::runtime_error(std::string("ubrk_open: ") + u_errorName(status));
    return std::unique_ptr<UBreakIterator, BreakIteratorCloser>(raw);
  }();
  return it.get();
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    int k = 1;
    for (; k < len && i + k < n; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) break;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (k < len || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      i += k;  // skip the maximal ill-formed prefix
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

char32_t simple_lower(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

bool is_letter_or_digit(char32_t c) { return u_isalnum(static_cast<UChar32>(c)); }

bool is_white_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::vector<std::string> split_white_space(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char32_t c : decode_utf8(s)) {
    if (is_white_space(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      append_utf8(cur, c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string_view> grapheme_clusters(std::string_view s) {
  std::vector<std::string_view> out;
  if (s.empty()) return out;
  if (is_ascii(s)) {
    // CR LF is the only multi-byte ASCII cluster.
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
        out.push_back(s.substr(i, 2));
        ++i;
      } else {
        out.push_back(s.substr(i, 1));
      }
    }
    return out;
  }
  UErrorCode status = U_ZERO_ERROR;
  UText* text = utext_openUTF8(nullptr, s.data(), static_cast<int64_t>(s.size()), &status);
  UBreakIterator* it = thread_char_iterator();
  ubrk_setUText(it, text, &status);
  if (U_FAILURE(status)) {
    utext_close(text);
    throw std::runtime_error(std::string("grapheme segmentation failed: ") + u_errorName(status));
  }
  int32_t start = ubrk_first(it);
  for (int32_t end = ubrk_next(it); end != UBRK_DONE; start = end, end = ubrk_next(it)) {
    out.push_back(s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(end - start)));
  }
  ubrk_setText(it, nullptr, 0, &status);
  utext_close(text);
  return out;
}

bool is_emoji_cluster(std::string_view cluster) {
  if (cluster.empty() || is_ascii(cluster)) return false;
  const std::u32string cps = decode_utf8(cluster);
  const auto first = static_cast<UChar32>(cps.front());
  if (u_hasBinaryProperty(first, UCHAR_EXTENDED_PICTOGRAPHIC) ||
      u_hasBinaryProperty(first, UCHAR_EMOJI_PRESENTATION) ||
      u_hasBinaryProperty(first, UCHAR_REGIONAL_INDICATOR)) {
    return true;
  }
  if (u_hasBinaryProperty(first, UCHAR_EMOJI)) {
    for (char32_t c : cps) {
      if (c == 0xFE0F || c == 0x20E3) return true;
    }
  }
  return false;
}

bool contains_emoji(std::string_view s) {
  if (is_ascii(s)) return false;
  for (auto cluster : grapheme_clusters(s)) {
    if (is_emoji_cluster(cluster)) return true;
  }
  return false;
}

}  // namespace cmsa::unicode
