#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "threadmine/corpus.hpp"

namespace threadmine {

/// One object of a forum dump. Id prefixes such as "t1_" are stripped, and
/// HTML entities in the body are decoded.
struct DumpComment {
  std::string id;
  std::string parent_id;  // empty for thread-starting posts
  std::string link_id;
  std::string author;
  std::string body;
  std::int64_t created = 0;
  bool deleted = false;
};

// Reason -> count. Reasons are short kebab-case tags.
struct SkipReport {
  std::map<std::string, std::size_t> counts;

  void add(const std::string& reason, std::size_t n = 1) { counts[reason] += n; }
  std::size_t total() const;
};

std::string decode_html_entities(std::string_view text);

// Returns nullopt (and counts the reason) for lines that cannot be used.
std::optional<DumpComment> parse_dump_line(std::string_view line, SkipReport& skips);

/// Line-by-line dump reader; blank lines are ignored.
class DumpReader {
 public:
  explicit DumpReader(std::istream& in) : in_(in) {}
  std::optional<DumpComment> next();
  const SkipReport& skips() const { return skips_; }
  std::size_t lines_read() const { return lines_; }

 private:
  std::istream& in_;
  SkipReport skips_;
  std::size_t lines_ = 0;
};

std::vector<DumpComment> read_dump(std::istream& in, SkipReport& skips);

struct ImhoConfig {
  bool strip_acronym = true;
};

struct ImhoRecord {
  std::string comment_id;
  std::string claim_sentence;
  std::optional<std::string> premise_sentence;
  bool acronym_stripped = false;

  bool operator==(const ImhoRecord&) const = default;
};

// True when "imo" or "imho" occurs as a whole word, any case. A hyphen
// joins words, so "IMHO-worthy" does not count.
bool has_opinion_trigger(std::string_view sentence);
// Removes every trigger with one adjacent comma (the following one when both
// exist) and wrapping parentheses, then tidies spacing.
std::string strip_opinion_trigger(std::string_view sentence);

std::vector<ImhoRecord> extract_imho_records(const DumpComment& comment, const ImhoConfig& config,
                                             SkipReport& skips);

struct QrConfig {
  bool byte_exact = false;
  std::size_t min_quote_chars = 20;
  std::set<std::string> exclude_thread_ids;
};

struct QrRecord {
  std::string thread_id;
  std::string parent_post_id;
  std::string response_post_id;
  std::string quote_text;
  std::string response_sentence;
  ByteSpan parent_char_span;  // bytes of the parent body
  bool ambiguous = false;     // the quote also occurs later in the parent

  bool operator==(const QrRecord&) const = default;
};

/// Text after quote normalization with a map back to source bytes:
/// normalized byte i came from source bytes [source_begin[i], source_end[i]).
struct NormalizedText {
  std::string text;
  std::vector<std::size_t> source_begin;
  std::vector<std::size_t> source_end;
};

// Whitespace runs become one space (trimmed at the ends); curly quotes and
// dash variants fold to ASCII. Byte-exact mode is the identity.
NormalizedText normalize_for_matching(std::string_view text, bool byte_exact);

// QR records for one thread's posts (any order). Orphans and rejected quotes
// are counted in skips.
std::vector<QrRecord> extract_qr_thread(const std::vector<DumpComment>& posts, const QrConfig& config,
                                        SkipReport& skips);

// Groups the dump by link_id (comments of one thread need not be
// contiguous), then extracts per thread.
std::vector<QrRecord> extract_qr_records(DumpReader& reader, const QrConfig& config, SkipReport& skips);

// Sort by (thread, response, span).
void canonicalize(std::vector<QrRecord>& records);

// The quote re-locates in the parent body at the recorded span.
bool verify_qr_record(const QrRecord& record, std::string_view parent_body, bool byte_exact);

std::string to_json_line(const ImhoRecord& record);
std::string to_json_line(const QrRecord& record);
QrRecord parse_qr_json_line(std::string_view line);

std::string summary_json(std::string_view kind, std::size_t lines_read, std::size_t records,
                         const SkipReport& skips);

enum class DistantKind { Imho, Qr };

struct BuildDistantOptions {
  DistantKind kind = DistantKind::Imho;
  std::filesystem::path in;
  std::filesystem::path out;
  std::optional<std::filesystem::path> exclude_ids;
  bool byte_exact = false;
  bool keep_acronym = false;
};

struct BuildDistantResult {
  std::size_t records = 0;
  SkipReport skips;
  std::filesystem::path summary_path;
};

// Writes the records to `out` and the summary to `<out>.summary.json`.
BuildDistantResult build_distant(const BuildDistantOptions& options);

}  // namespace threadmine
