#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace threadmine {

/// A term list loaded from a one-term-per-line file (`#` starts a comment).
///
/// Terms may be multi-word phrases. Phrase lookups run over token sequences
/// produced by tokenize(), so "i don't think" matches the tokens
/// [i, don, ', t, think].
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view text, std::string name = "<inline>");
  static Lexicon load_file(const std::string& path);
  // Lexicon compiled in from data/lexicons/<name>.txt.
  static const Lexicon& builtin(std::string_view name);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  // Exact membership of a single (already normalized) term.
  bool contains(std::string_view term) const;

  // Number of phrase occurrences in the token sequence (overlaps counted).
  std::size_t count_matches(const std::vector<std::string>& tokens) const;
  std::vector<std::string> matched_terms(const std::vector<std::string>& tokens) const;

 private:
  std::string name_;
  std::vector<std::string> terms_;
  std::vector<std::vector<std::string>> term_tokens_;
  std::unordered_set<std::string> lookup_;
};

struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t index = 0;

  bool operator==(const SentenceSpan&) const = default;
};

// Rule-based splitter: `.`, `!` or `?` (plus trailing closing quotes or
// brackets) ends a sentence when followed by whitespace and an uppercase
// letter, digit or opening quote, unless the period belongs to an abbreviation.
// A blank line always ends a sentence. Spans are trimmed of whitespace.
std::vector<SentenceSpan> segment_sentences(std::string_view text);
std::vector<SentenceSpan> segment_sentences(std::string_view text, const Lexicon& abbreviations);

// Convenience: the sentence texts themselves.
std::vector<std::string> sentence_texts(std::string_view text);

// Lowercased word and punctuation tokens. Every ASCII punctuation mark is its
// own token, so contractions split at the apostrophe. Curly quotes and dashes
// are folded to their ASCII forms.
std::vector<std::string> tokenize(std::string_view sentence);

struct BlockquoteSegment {
  std::string quote_text;  // markers stripped, lines joined by one space
  std::string tail_text;   // prose after the quote, up to the next quote
  bool nested = false;     // some line carried a second `>` marker
};

// A blockquote is a maximal run of lines starting with `>`. Lines inside
// fenced code blocks are never quotes.
std::vector<BlockquoteSegment> extract_blockquotes(std::string_view markdown);

bool is_valid_utf8(std::string_view bytes);

}  // namespace threadmine
