#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cmsa {

enum class TokenKind { kWord, kMention, kTopic, kEmoji };

inline constexpr std::string_view kMentionToken = "MENTION";
inline constexpr std::string_view kTopicToken = "TOPIC";

struct Token {
  std::string text;
  TokenKind kind = TokenKind::kWord;

  bool operator==(const Token&) const = default;
};

// One token of the task's CoNLL-style files. The language tag is kept only so
// the record can be inspected; the classifier never reads it.
struct TaggedToken {
  std::string surface;
  std::string lang;
};

struct RawTweet {
  std::string uid;
  std::variant<std::string, std::vector<TaggedToken>> content;
  std::optional<int> label;
};

struct TweetExample {
  std::string uid;
  std::vector<Token> tokens;
  std::optional<int> label;
};

// Tweet normalization. Each rule is exposed on its own; preprocess_tweet
// chains them in the order lowercase, strip_urls, garbage removal,
// fold_mentions_topics, split_emoji.

std::string lowercase(std::string_view text);

// Deletes links. A link starts at "http"/"https" (or a token with an
// "http:"/"https:" prefix) and swallows every following token that contains
// '/', '.' or ':'.
std::vector<std::string> strip_urls(const std::vector<std::string>& tokens);

// "@ x" and "@x" become MENTION, "# x" and "#x" become TOPIC. A marker inside
// a token splits it: "hi@x" -> "hi", MENTION.
std::vector<std::string> fold_mentions_topics(const std::vector<std::string>& tokens);

// Cuts a token at emoji boundaries: every emoji grapheme becomes its own
// token, maximal non-emoji runs stay together.
std::vector<std::string> split_emoji(std::string_view text);

// True when every code point belongs to the garbage class: U+FFFD, control
// and format characters, combining marks, C1 controls and Latin-1 symbols
// (U+0080..U+00BF), the cp1252 punctuation that mojibake decodes into
// (€ … ™ “ ” and friends), and the Latin-1 letters that UTF-8 lead bytes
// turn into (â ã à ð ï and their capitals).
bool is_garbage(std::string_view text);
bool is_garbage_char(char32_t c);

TokenKind classify_token(std::string_view text);

TweetExample preprocess_tweet(const RawTweet& raw);

// Space-joined token texts.
std::string detokenize(const TweetExample& example);

}  // namespace cmsa
