#include "threadmine/textproc.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "threadmine/embedded_data.hpp"
#include "threadmine/error.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

Lexicon Lexicon::parse(std::string_view text, std::string name) {
  Lexicon lex;
  lex.name_ = std::move(name);
  for (std::string_view raw : split_lines(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string term = to_lower_ascii(line);
    if (!lex.lookup_.insert(term).second) continue;
    lex.term_tokens_.push_back(tokenize(term));
    lex.terms_.push_back(std::move(term));
  }
  return lex;
}

Lexicon Lexicon::load_file(const std::string& path) { return parse(read_file(path), path); }

const Lexicon& Lexicon::builtin(std::string_view name) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<Lexicon>, std::less<>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return *it->second;
  std::string key = "lexicons/" + std::string(name);
  auto content = embedded_data(key);
  if (!content) throw Error("no built-in lexicon named '" + std::string(name) + "'");
  auto lex = std::make_unique<Lexicon>(parse(*content, key));
  const Lexicon& ref = *lex;
  cache.emplace(std::string(name), std::move(lex));
  return ref;
}

bool Lexicon::contains(std::string_view term) const {
  return lookup_.count(std::string(term)) > 0;
}

std::size_t Lexicon::count_matches(const std::vector<std::string>& tokens) const {
  std::size_t count = 0;
  for (const auto& phrase : term_tokens_) {
    if (phrase.empty() || phrase.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < phrase.size() && match; ++k) {
        match = tokens[i + k] == phrase[k];
      }
      if (match) ++count;
    }
  }
  return count;
}

std::vector<std::string> Lexicon::matched_terms(const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  for (std::size_t t = 0; t < term_tokens_.size(); ++t) {
    const auto& phrase = term_tokens_[t];
    if (phrase.empty() || phrase.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < phrase.size() && match; ++k) {
        match = tokens[i + k] == phrase[k];
      }
      if (match) {
        out.push_back(terms_[t]);
        break;
      }
    }
  }
  return out;
}

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_sentence_punct(char c) { return c == '.' || c == '!' || c == '?'; }

// Length of a UTF-8 closing quote at pos (” or ’), or 0.
std::size_t closing_quote_len(std::string_view t, std::size_t pos) {
  if (pos + 3 <= t.size() &&
      static_cast<unsigned char>(t[pos]) == 0xE2 && static_cast<unsigned char>(t[pos + 1]) == 0x80 &&
      (static_cast<unsigned char>(t[pos + 2]) == 0x9D || static_cast<unsigned char>(t[pos + 2]) == 0x99)) {
    return 3;
  }
  return 0;
}

bool opens_sentence(std::string_view t, std::size_t pos) {
  char c = t[pos];
  if (is_upper(c) || is_digit(c) || c == '"' || c == '\'') return true;
  if (pos + 3 <= t.size() && static_cast<unsigned char>(c) == 0xE2 &&
      static_cast<unsigned char>(t[pos + 1]) == 0x80) {
    unsigned char third = static_cast<unsigned char>(t[pos + 2]);
    return third == 0x9C || third == 0x98;  // “ ‘
  }
  return false;
}

bool is_abbreviation(std::string_view t, std::size_t period, const Lexicon& abbreviations) {
  std::size_t start = period;
  while (start > 0 && !is_ascii_space(t[start - 1])) --start;
  std::string_view token = t.substr(start, period + 1 - start);
  while (!token.empty() && (token.front() == '(' || token.front() == '[' || token.front() == '"' ||
                            token.front() == '\'')) {
    token.remove_prefix(1);
  }
  return abbreviations.contains(to_lower_ascii(token));
}

// Index of a paragraph break starting at a newline, i.e. the position after
// "\n[ \t\r]*\n", or npos.
std::size_t paragraph_break_end(std::string_view t, std::size_t nl) {
  std::size_t j = nl + 1;
  while (j < t.size() && (t[j] == ' ' || t[j] == '\t' || t[j] == '\r')) ++j;
  if (j < t.size() && t[j] == '\n') return j + 1;
  return std::string_view::npos;
}

void push_span(std::string_view t, std::size_t start, std::size_t end,
               std::vector<SentenceSpan>& out) {
  while (start < end && is_ascii_space(t[start])) ++start;
  while (end > start && is_ascii_space(t[end - 1])) --end;
  if (end > start) out.push_back({start, end, out.size()});
}

}  // namespace

std::vector<SentenceSpan> segment_sentences(std::string_view text) {
  return segment_sentences(text, Lexicon::builtin("abbreviations"));
}

std::vector<SentenceSpan> segment_sentences(std::string_view t, const Lexicon& abbreviations) {
  std::vector<SentenceSpan> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < t.size()) {
    char c = t[i];
    if (c == '\n') {
      std::size_t brk = paragraph_break_end(t, i);
      if (brk != std::string_view::npos) {
        push_span(t, start, i, out);
        start = brk;
        i = brk;
        continue;
      }
      ++i;
      continue;
    }
    if (!is_sentence_punct(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_sentence_punct(t[j])) ++j;
    const bool single_period = (j == i + 1 && c == '.');
    while (j < t.size()) {
      if (t[j] == '"' || t[j] == '\'' || t[j] == ')' || t[j] == ']') {
        ++j;
      } else if (std::size_t q = closing_quote_len(t, j); q > 0) {
        j += q;
      } else {
        break;
      }
    }
    if (j >= t.size() || !is_ascii_space(t[j])) {
      i = j;
      continue;
    }
    std::size_t next = j;
    while (next < t.size() && is_ascii_space(t[next])) ++next;
    if (next >= t.size()) {
      i = next;
      continue;
    }
    if (!opens_sentence(t, next) || (single_period && is_abbreviation(t, i, abbreviations))) {
      i = j;
      continue;
    }
    push_span(t, start, j, out);
    start = j;
    i = j;
  }
  push_span(t, start, t.size(), out);
  return out;
}

std::vector<std::string> sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : segment_sentences(text)) {
    out.emplace_back(text.substr(s.start, s.end - s.start));
  }
  return out;
}

namespace {

// Multi-byte punctuation folded to ASCII by the tokenizer.
struct FoldedPunct {
  std::string_view utf8;
  std::string_view ascii;
};
constexpr FoldedPunct kFolded[] = {
    {"\xE2\x80\x98", "'"},  {"\xE2\x80\x99", "'"},  {"\xE2\x80\x9C", "\""},
    {"\xE2\x80\x9D", "\""}, {"\xE2\x80\x93", "-"},  {"\xE2\x80\x94", "-"},
    {"\xE2\x80\xA6", "..."},
};

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      out.push_back(std::move(word));
      word.clear();
    }
  };
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      if (is_ascii_space(static_cast<char>(c))) {
        flush();
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
        word += static_cast<char>(c);
      } else if (c >= 'A' && c <= 'Z') {
        word += static_cast<char>(c - 'A' + 'a');
      } else if (c >= 0x21 && c <= 0x7E) {
        flush();
        out.emplace_back(1, static_cast<char>(c));
      } else {
        flush();  // control characters
      }
      ++i;
      continue;
    }
    std::size_t len = std::min(utf8_length(c), s.size() - i);
    std::string_view seq = s.substr(i, len);
    bool folded = false;
    for (const auto& f : kFolded) {
      if (seq == f.utf8) {
        flush();
        if (f.ascii == "...") {
          out.insert(out.end(), 3, ".");
        } else {
          out.emplace_back(f.ascii);
        }
        folded = true;
        break;
      }
    }
    if (!folded) word.append(seq);
    i += len;
  }
  flush();
  return out;
}

namespace {

bool is_fence(std::string_view line, char& fence_char, std::size_t& fence_len) {
  std::size_t indent = 0;
  while (indent < line.size() && indent < 3 && line[indent] == ' ') ++indent;
  line.remove_prefix(indent);
  if (line.size() < 3 || (line[0] != '`' && line[0] != '~')) return false;
  std::size_t n = 0;
  while (n < line.size() && line[n] == line[0]) ++n;
  if (n < 3) return false;
  fence_char = line[0];
  fence_len = n;
  return true;
}

}  // namespace

std::vector<BlockquoteSegment> extract_blockquotes(std::string_view markdown) {
  std::vector<BlockquoteSegment> out;
  std::vector<std::string> tail_lines;
  std::vector<std::string> quote_parts;
  bool quote_nested = false;
  bool in_quote_run = false;
  std::vector<std::string_view> run_raw;

  bool in_fence = false;
  char fence_char = 0;
  std::size_t fence_len = 0;

  auto close_tail = [&] {
    if (!out.empty()) out.back().tail_text = std::string(trim(join(tail_lines, "\n")));
    tail_lines.clear();
  };
  auto close_run = [&] {
    if (!in_quote_run) return;
    in_quote_run = false;
    std::string quote = join(quote_parts, " ");
    if (quote.empty()) {
      // A run of bare markers carries no quote; keep it as prose.
      for (auto raw : run_raw) tail_lines.emplace_back(raw);
    } else {
      close_tail();
      out.push_back({std::move(quote), "", quote_nested});
    }
    quote_parts.clear();
    run_raw.clear();
    quote_nested = false;
  };

  for (std::string_view line : split_lines(markdown)) {
    if (in_fence) {
      char ch = 0;
      std::size_t len = 0;
      if (is_fence(line, ch, len) && ch == fence_char && len >= fence_len &&
          trim(line).size() == len) {
        in_fence = false;
      }
      tail_lines.emplace_back(line);
      continue;
    }
    char ch = 0;
    std::size_t len = 0;
    if (is_fence(line, ch, len)) {
      close_run();
      in_fence = true;
      fence_char = ch;
      fence_len = len;
      tail_lines.emplace_back(line);
      continue;
    }
    if (!line.empty() && line.front() == '>') {
      std::string_view content = line.substr(1);
      if (!content.empty() && content.front() == ' ') content.remove_prefix(1);
      if (!content.empty() && content.front() == '>') quote_nested = true;
      in_quote_run = true;
      run_raw.push_back(line);
      std::string_view part = trim(content);
      if (!part.empty()) quote_parts.emplace_back(part);
      continue;
    }
    close_run();
    tail_lines.emplace_back(line);
  }
  close_run();
  close_tail();
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > bytes.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc >> 6) != 0x2) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace threadmine
