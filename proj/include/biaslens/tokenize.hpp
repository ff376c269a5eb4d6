#pragma once

// Whitespace tokenizer with rule-based sentence splitting.
//
// Sentence boundaries: '.', '!' or '?' followed by whitespace and a capital
// letter, or by end of text. A short honorific/abbreviation list (Dr., Mr.,
// Ms., Mrs., Prof., e.g., i.e.) suppresses breaks. Tokens are split on
// Unicode whitespace, stripped of leading/trailing punctuation, and dropped
// entirely when only punctuation or digits remain.

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "biaslens/types.hpp"

namespace biaslens {

enum class Tag { Adjective, Other };

struct Token {
  std::string surface;
  std::string lower;
  Tag tag = Tag::Other;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string raw;  // trimmed source span, used verbatim by KWIC
  std::vector<Token> tokens;
};

struct TokenizedDoc {
  std::string record_id;
  std::vector<Sentence> sentences;
  bool tagged = false;  // set by tag_adjectives
};

namespace textdetail {

// Decodes one UTF-8 codepoint at i; advances i. Invalid bytes pass through
// as single-byte codepoints.
inline uint32_t next_codepoint(std::string_view s, size_t& i) {
  uint8_t c = uint8_t(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra = (c >= 0xF0) ? 3 : (c >= 0xE0) ? 2 : (c >= 0xC0) ? 1 : 0;
  if (extra == 0 || i + size_t(extra) >= s.size()) {
    ++i;
    return c;
  }
  uint32_t cp = c & (0x3F >> extra);
  for (int k = 1; k <= extra; ++k) {
    uint8_t cc = uint8_t(s[i + size_t(k)]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return c;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += size_t(extra) + 1;
  return cp;
}

inline bool is_space_cp(uint32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

inline bool is_punct_cp(uint32_t cp) {
  if (cp < 0x80) return std::ispunct(int(cp)) != 0;
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:  // curly quotes
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:  // dashes
    case 0x2026:  // ellipsis
    case 0x00AB: case 0x00BB:
      return true;
    default:
      return false;
  }
}

inline bool is_digit_cp(uint32_t cp) { return cp >= '0' && cp <= '9'; }

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
  return out;
}

inline const std::array<std::string_view, 7>& abbreviations() {
  static const std::array<std::string_view, 7> kAbbrev = {"Dr.", "Mr.",  "Ms.", "Mrs.",
                                                          "Prof.", "e.g.", "i.e."};
  return kAbbrev;
}

// Token ending at the '.' found at position dot (inclusive).
inline bool is_abbreviation_before(std::string_view text, size_t dot) {
  size_t start = dot;
  while (start > 0) {
    size_t prev = start - 1;
    char c = text[prev];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') break;
    start = prev;
  }
  std::string_view tok = text.substr(start, dot - start + 1);
  for (std::string_view a : abbreviations())
    if (tok == a) return true;
  return false;
}

// Strips leading/trailing punctuation codepoints; empty if nothing remains.
inline std::string strip_punct(std::string_view tok) {
  // leading
  size_t begin = 0;
  while (begin < tok.size()) {
    size_t j = begin;
    uint32_t cp = next_codepoint(tok, j);
    if (!is_punct_cp(cp)) break;
    begin = j;
  }
  // trailing: collect codepoint starts, walk back
  size_t end = tok.size();
  for (;;) {
    if (end <= begin) return {};
    // find start of last codepoint in [begin, end)
    size_t last = end - 1;
    while (last > begin && (uint8_t(tok[last]) & 0xC0) == 0x80) --last;
    size_t j = last;
    uint32_t cp = next_codepoint(tok, j);
    if (j != end || !is_punct_cp(cp)) break;
    end = last;
  }
  return std::string(tok.substr(begin, end - begin));
}

inline bool only_digits_or_punct(std::string_view tok) {
  size_t i = 0;
  while (i < tok.size()) {
    uint32_t cp = next_codepoint(tok, i);
    if (!is_digit_cp(cp) && !is_punct_cp(cp)) return false;
  }
  return true;
}

inline std::string trim_ws(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e) {
    size_t j = b;
    if (!is_space_cp(next_codepoint(s, j))) break;
    b = j;
  }
  while (e > b) {
    size_t last = e - 1;
    while (last > b && (uint8_t(s[last]) & 0xC0) == 0x80) --last;
    size_t j = last;
    if (!is_space_cp(next_codepoint(s, j)) || j != e) break;
    e = last;
  }
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::pair<size_t, size_t>> sentence_spans(std::string_view text) {
  std::vector<std::pair<size_t, size_t>> spans;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (c == '.' && is_abbreviation_before(text, i)) continue;
    // require whitespace then a capital, or end of text
    size_t j = i + 1;
    size_t ws = 0;
    while (j < text.size()) {
      size_t k = j;
      uint32_t cp = next_codepoint(text, k);
      if (!is_space_cp(cp)) break;
      j = k;
      ++ws;
    }
    bool boundary = false;
    if (j >= text.size())
      boundary = true;
    else if (ws > 0 && text[j] >= 'A' && text[j] <= 'Z')
      boundary = true;
    if (boundary) {
      spans.emplace_back(start, i + 1);
      start = j;
      i = j ? j - 1 : 0;
    }
  }
  if (start < text.size()) spans.emplace_back(start, text.size());
  return spans;
}

}  // namespace textdetail

/// Splits text into sentences and word tokens; all tokens tagged Other.
inline TokenizedDoc tokenize(std::string_view text, std::string record_id = {}) {
  TokenizedDoc doc;
  doc.record_id = std::move(record_id);
  for (auto [b, e] : textdetail::sentence_spans(text)) {
    std::string_view span = text.substr(b, e - b);
    Sentence sent;
    sent.raw = textdetail::trim_ws(span);
    if (sent.raw.empty()) continue;
    // whitespace split
    size_t i = 0;
    size_t tok_begin = 0;
    bool in_tok = false;
    auto flush = [&](size_t end_pos) {
      if (!in_tok) return;
      std::string_view raw_tok = span.substr(tok_begin, end_pos - tok_begin);
      std::string stripped = textdetail::strip_punct(raw_tok);
      in_tok = false;
      if (stripped.empty() || textdetail::only_digits_or_punct(stripped)) return;
      Token t;
      t.surface = stripped;
      t.lower = textdetail::ascii_lower(stripped);
      sent.tokens.push_back(std::move(t));
    };
    while (i < span.size()) {
      size_t j = i;
      uint32_t cp = textdetail::next_codepoint(span, j);
      if (textdetail::is_space_cp(cp)) {
        flush(i);
      } else if (!in_tok) {
        in_tok = true;
        tok_begin = i;
      }
      i = j;
    }
    flush(span.size());
    if (!sent.tokens.empty()) doc.sentences.push_back(std::move(sent));
  }
  return doc;
}

}  // namespace biaslens
