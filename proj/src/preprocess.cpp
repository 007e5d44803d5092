#include "cmsa/preprocess.hpp"

#include <algorithm>
#include <array>

#include <unicode/uchar.h>

#include "cmsa/unicode.hpp"

namespace cmsa {

namespace {

constexpr std::array<char32_t, 27> kCp1252Punctuation = {
    0x20AC, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030,
    0x0160, 0x2039, 0x0152, 0x017D, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x017E, 0x0178};

// Latin-1 renderings of the UTF-8 lead bytes C2 C3 E0 E2 E3 EF F0 (and the
// capitals that lowercase onto them).
constexpr std::array<char32_t, 10> kMojibakeLeads = {
    0x00C2, 0x00C3, 0x00C0, 0x00CF, 0x00D0, 0x00E2, 0x00E3, 0x00E0, 0x00EF, 0x00F0};

bool is_placeholder(std::string_view t) { return t == kMentionToken || t == kTopicToken; }

bool is_url_head(std::string_view t) {
  return t == "http" || t == "https" || t.starts_with("http:") || t.starts_with("https:");
}

bool is_url_tail(std::string_view t) {
  return t.find_first_of("/.:") != std::string_view::npos;
}

std::vector<std::string> run_rules_once(const std::vector<std::string>& input) {
  std::vector<std::string> tokens;
  tokens.reserve(input.size());
  for (const auto& t : input) tokens.push_back(is_placeholder(t) ? t : lowercase(t));

  tokens = strip_urls(tokens);
  std::erase_if(tokens, [](const std::string& t) { return is_garbage(t); });
  tokens = fold_mentions_topics(tokens);

  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (is_placeholder(t)) {
      out.push_back(t);
      continue;
    }
    for (auto& piece : split_emoji(t)) out.push_back(std::move(piece));
  }
  return out;
}

}  // namespace

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : unicode::decode_utf8(text)) unicode::append_utf8(out, unicode::simple_lower(c));
  return out;
}

std::vector<std::string> strip_urls(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_url_head(tokens[i])) {
      out.push_back(tokens[i]);
      continue;
    }
    while (i + 1 < tokens.size() && is_url_tail(tokens[i + 1]) && !is_url_head(tokens[i + 1])) ++i;
  }
  return out;
}

std::vector<std::string> fold_mentions_topics(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string_view t = tokens[i];
    const auto marker = t.find_first_of("@#");
    if (marker == std::string_view::npos) {
      out.emplace_back(t);
      continue;
    }
    if (marker > 0) out.emplace_back(t.substr(0, marker));
    out.emplace_back(t[marker] == '@' ? kMentionToken : kTopicToken);
    // A bare marker absorbs the next token.
    if (marker + 1 == t.size() && i + 1 < tokens.size()) ++i;
  }
  return out;
}

std::vector<std::string> split_emoji(std::string_view text) {
  std::vector<std::string> out;
  std::string run;
  for (auto cluster : unicode::grapheme_clusters(text)) {
    if (unicode::is_emoji_cluster(cluster)) {
      if (!run.empty()) out.push_back(std::move(run));
      run.clear();
      out.emplace_back(cluster);
    } else {
      run.append(cluster);
    }
  }
  if (!run.empty()) out.push_back(std::move(run));
  return out;
}

bool is_garbage_char(char32_t c) {
  if (c == 0xFFFD || c == 0xFFFC) return true;
  if (c >= 0x80 && c <= 0xBF) return true;
  if (std::find(kCp1252Punctuation.begin(), kCp1252Punctuation.end(), c) != kCp1252Punctuation.end()) return true;
  if (std::find(kMojibakeLeads.begin(), kMojibakeLeads.end(), c) != kMojibakeLeads.end()) return true;
  const auto type = u_charType(static_cast<UChar32>(c));
  return type == U_CONTROL_CHAR || type == U_FORMAT_CHAR || type == U_NON_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

bool is_garbage(std::string_view text) {
  const auto cps = unicode::decode_utf8(text);
  if (cps.empty()) return true;
  return std::all_of(cps.begin(), cps.end(), is_garbage_char);
}

TokenKind classify_token(std::string_view text) {
  if (text == kMentionToken) return TokenKind::kMention;
  if (text == kTopicToken) return TokenKind::kTopic;
  const auto clusters = unicode::grapheme_clusters(text);
  if (clusters.size() == 1 && unicode::is_emoji_cluster(clusters.front())) return TokenKind::kEmoji;
  return TokenKind::kWord;
}

TweetExample preprocess_tweet(const RawTweet& raw) {
  std::vector<std::string> tokens;
  if (const auto* text = std::get_if<std::string>(&raw.content)) {
    tokens = unicode::split_white_space(*text);
  } else {
    for (const auto& tagged : std::get<std::vector<TaggedToken>>(raw.content)) {
      for (auto& piece : unicode::split_white_space(tagged.surface)) tokens.push_back(std::move(piece));
    }
  }

  // A split can expose a URL head, marker or garbage piece glued to an emoji
  // ("😊@x"), so the rules run until the sequence stops changing.
  for (int pass = 0; pass < 8; ++pass) {
    auto next = run_rules_once(tokens);
    const bool stable = next == tokens;
    tokens = std::move(next);
    if (stable) break;
  }

  TweetExample example{raw.uid, {}, raw.label};
  example.tokens.reserve(tokens.size());
  for (auto& t : tokens) {
    const TokenKind kind = classify_token(t);
    example.tokens.push_back(Token{std::move(t), kind});
  }
  return example;
}

std::string detokenize(const TweetExample& example) {
  std::string out;
  for (const auto& token : example.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token.text;
  }
  return out;
}

}  // namespace cmsa
