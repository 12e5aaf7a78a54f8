#include "threadmine/distant.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "threadmine/textproc.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

using json = nlohmann::ordered_json;

std::size_t SkipReport::total() const {
  std::size_t n = 0;
  for (const auto& [reason, c] : counts) n += c;
  return n;
}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string strip_id_prefix(std::string id) {
  if (id.size() > 3 && id[0] == 't' && id[1] >= '1' && id[1] <= '9' && id[2] == '_') id.erase(0, 3);
  return id;
}

std::string string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return "";
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw Error(std::string("field '") + key + "' is not a string");
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// First trigger at or after `from`: [begin, end).
std::optional<std::pair<std::size_t, std::size_t>> find_trigger(std::string_view s, std::size_t from = 0) {
  const std::string lower = to_lower_ascii(s);
  for (std::size_t i = from; i < lower.size(); ++i) {
    if (lower[i] != 'i' || (i > 0 && (is_word_char(lower[i - 1]) || lower[i - 1] == '-'))) continue;
    for (std::string_view word : {std::string_view("imho"), std::string_view("imo")}) {
      if (lower.compare(i, word.size(), word) == 0) {
        const std::size_t end = i + word.size();
        if (end == lower.size() || (!is_word_char(lower[end]) && lower[end] != '-')) return std::make_pair(i, end);
      }
    }
  }
  return std::nullopt;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

std::string tidy_spacing(std::string_view s) {
  std::string collapsed;
  for (char c : s) {
    if (is_ascii_space(c)) {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed += ' ';
    } else {
      collapsed += c;
    }
  }
  std::string out;
  for (std::size_t i = 0; i < collapsed.size(); ++i) {
    const char c = collapsed[i];
    if (c == ' ') {
      const char next = i + 1 < collapsed.size() ? collapsed[i + 1] : '\0';
      if (next == '\0' || next == '.' || next == ',' || next == '!' || next == '?' || next == ';' || next == ':' ||
          next == ')')
        continue;
      if (!out.empty() && out.back() == '(') continue;
    }
    out += c;
  }
  return std::string(trim(out));
}

std::size_t count_code_points(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace

std::string decode_html_entities(std::string_view text) {
  static const std::map<std::string_view, std::string_view> named = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", "\xC2\xA0"}};
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out += text[i];
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += '&';
      continue;
    }
    const std::string_view name = text.substr(i + 1, semi - i - 1);
    if (auto it = named.find(name); it != named.end()) {
      out += it->second;
      i = semi;
      continue;
    }
    if (name.size() >= 2 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string_view digits = name.substr(hex ? 2 : 1);
      std::uint32_t cp = 0;
      bool ok = !digits.empty();
      for (char c : digits) {
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    }
    out += '&';
  }
  return out;
}

std::optional<DumpComment> parse_dump_line(std::string_view line, SkipReport& skips) {
  if (!is_valid_utf8(line)) {
    skips.add("invalid-utf8");
    return std::nullopt;
  }
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception&) {
    skips.add("malformed-line");
    return std::nullopt;
  }
  if (!obj.is_object()) {
    skips.add("malformed-line");
    return std::nullopt;
  }
  DumpComment c;
  try {
    c.id = strip_id_prefix(string_field(obj, "id"));
    c.parent_id = strip_id_prefix(string_field(obj, "parent_id"));
    c.link_id = strip_id_prefix(string_field(obj, "link_id"));
    c.author = string_field(obj, "author");
    if (obj.contains("body") && obj["body"].is_string()) {
      c.body = obj["body"].get<std::string>();
    } else {
      c.body = string_field(obj, "selftext");
    }
    const json* created = nullptr;
    for (const char* key : {"created", "created_utc"}) {
      if (obj.contains(key) && !obj[key].is_null()) {
        created = &obj[key];
        break;
      }
    }
    if (created) {
      if (created->is_number_integer()) {
        c.created = created->get<std::int64_t>();
      } else if (created->is_number()) {
        c.created = static_cast<std::int64_t>(created->get<double>());
      } else if (created->is_string()) {
        c.created = parse_int(created->get<std::string>());
      } else {
        throw Error("bad created field");
      }
    }
  } catch (const std::exception&) {
    skips.add("malformed-line");
    return std::nullopt;
  }
  if (c.id.empty()) {
    skips.add("malformed-line");
    return std::nullopt;
  }
  // Thread starters carry their own id as the link.
  if (c.link_id.empty()) c.link_id = c.id;
  if (c.parent_id == c.id) c.parent_id.clear();
  c.body = decode_html_entities(c.body);
  if (!is_valid_utf8(c.body)) {
    skips.add("undecodable-body");
    return std::nullopt;
  }
  const auto body = trim(c.body);
  if (body == "[deleted]" || body == "[removed]") {
    c.deleted = true;
    skips.add("deleted");
  }
  return c;
}

std::optional<DumpComment> DumpReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++lines_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (auto c = parse_dump_line(line, skips_)) return c;
  }
  return std::nullopt;
}

std::vector<DumpComment> read_dump(std::istream& in, SkipReport& skips) {
  DumpReader reader(in);
  std::vector<DumpComment> out;
  while (auto c = reader.next()) out.push_back(std::move(*c));
  for (const auto& [reason, n] : reader.skips().counts) skips.add(reason, n);
  return out;
}

bool has_opinion_trigger(std::string_view sentence) { return find_trigger(sentence).has_value(); }

std::string strip_opinion_trigger(std::string_view sentence) {
  std::string s(sentence);
  while (auto hit = find_trigger(s)) {
    auto [ra, rb] = *hit;
    if (ra > 0 && rb < s.size() && s[ra - 1] == '(' && s[rb] == ')') {
      --ra;
      ++rb;
    }
    std::size_t after = rb;
    while (after < s.size() && s[after] == ' ') ++after;
    if (after < s.size() && s[after] == ',') {
      rb = after + 1;
    } else {
      std::size_t before = ra;
      while (before > 0 && s[before - 1] == ' ') --before;
      if (before > 0 && s[before - 1] == ',') {
        ra = before - 1;
      } else if (before > 0 && is_terminal(s[before - 1]) && after < s.size() && is_terminal(s[after])) {
        // "more. imo." keeps one terminal
        rb = after + 1;
      }
    }
    s.replace(ra, rb - ra, " ");
  }
  return tidy_spacing(s);
}

std::vector<ImhoRecord> extract_imho_records(const DumpComment& comment, const ImhoConfig& config,
                                             SkipReport& skips) {
  std::vector<ImhoRecord> out;
  if (comment.deleted) return out;
  const auto sentences = sentence_texts(comment.body);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!has_opinion_trigger(sentences[i])) continue;
    ImhoRecord rec;
    rec.comment_id = comment.id;
    rec.acronym_stripped = config.strip_acronym;
    rec.claim_sentence = config.strip_acronym ? strip_opinion_trigger(sentences[i]) : sentences[i];
    if (std::none_of(rec.claim_sentence.begin(), rec.claim_sentence.end(), is_word_char)) {
      skips.add("empty-claim");
      continue;
    }
    if (i + 1 < sentences.size()) rec.premise_sentence = sentences[i + 1];
    out.push_back(std::move(rec));
  }
  return out;
}

NormalizedText normalize_for_matching(std::string_view text, bool byte_exact) {
  NormalizedText n;
  auto emit = [&](char c, std::size_t b, std::size_t e) {
    n.text += c;
    n.source_begin.push_back(b);
    n.source_end.push_back(e);
  };
  if (byte_exact) {
    for (std::size_t i = 0; i < text.size(); ++i) emit(text[i], i, i + 1);
    return n;
  }
  std::size_t i = 0;
  bool pending_space = false;
  std::size_t space_begin = 0, space_end = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    bool space = is_ascii_space(text[i]);
    char folded = 0;
    if (c == 0xC2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      space = true;
      len = 2;
    } else if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80) {
      const auto c3 = static_cast<unsigned char>(text[i + 2]);
      if (c3 == 0x98 || c3 == 0x99) folded = '\'';
      if (c3 == 0x9C || c3 == 0x9D) folded = '"';
      if (c3 >= 0x90 && c3 <= 0x95) folded = '-';
      if (folded) len = 3;
    } else if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x88 &&
               static_cast<unsigned char>(text[i + 2]) == 0x92) {
      folded = '-';
      len = 3;
    }
    if (space) {
      if (!pending_space) space_begin = i;
      pending_space = true;
      space_end = i + len;
      i += len;
      continue;
    }
    if (pending_space && !n.text.empty()) emit(' ', space_begin, space_end);
    pending_space = false;
    if (folded) {
      emit(folded, i, i + len);
    } else {
      emit(text[i], i, i + 1);
    }
    i += len;
  }
  return n;
}

std::vector<QrRecord> extract_qr_thread(const std::vector<DumpComment>& posts, const QrConfig& config,
                                        SkipReport& skips) {
  std::vector<QrRecord> out;
  if (posts.empty()) return out;
  if (config.exclude_thread_ids.count(posts.front().link_id)) {
    skips.add("excluded-thread");
    return out;
  }
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (!by_id.emplace(posts[i].id, i).second) skips.add("duplicate-id");
  }
  std::unordered_map<std::size_t, NormalizedText> parent_cache;
  for (const auto& post : posts) {
    if (post.parent_id.empty() || post.deleted) continue;
    const auto quotes = extract_blockquotes(post.body);
    if (quotes.empty()) continue;
    auto pit = by_id.find(post.parent_id);
    if (pit == by_id.end()) {
      skips.add("orphan-response", quotes.size());
      continue;
    }
    const DumpComment& parent = posts[pit->second];
    if (parent.deleted) {
      skips.add("deleted-parent", quotes.size());
      continue;
    }
    auto cached = parent_cache.find(pit->second);
    if (cached == parent_cache.end()) {
      cached = parent_cache.emplace(pit->second, normalize_for_matching(parent.body, config.byte_exact)).first;
    }
    const NormalizedText& hay = cached->second;
    for (const auto& q : quotes) {
      if (q.nested) {
        skips.add("nested-quote");
        continue;
      }
      const NormalizedText needle = normalize_for_matching(q.quote_text, config.byte_exact);
      if (count_code_points(needle.text) < config.min_quote_chars) {
        skips.add("short-quote");
        continue;
      }
      const auto pos = hay.text.find(needle.text);
      if (pos == std::string::npos) {
        skips.add("quote-not-in-parent");
        continue;
      }
      const auto sentences = sentence_texts(q.tail_text);
      if (sentences.empty()) {
        skips.add("empty-response");
        continue;
      }
      QrRecord rec;
      rec.thread_id = post.link_id;
      rec.parent_post_id = parent.id;
      rec.response_post_id = post.id;
      rec.quote_text = q.quote_text;
      rec.response_sentence = sentences.front();
      rec.parent_char_span = {hay.source_begin[pos], hay.source_end[pos + needle.text.size() - 1]};
      rec.ambiguous = hay.text.find(needle.text, pos + 1) != std::string::npos;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<QrRecord> extract_qr_records(DumpReader& reader, const QrConfig& config, SkipReport& skips) {
  std::vector<QrRecord> out;
  std::vector<std::vector<DumpComment>> groups;
  std::unordered_map<std::string, std::size_t> group_of;
  // threads whose comments arrive in several runs are merged
  while (auto c = reader.next()) {
    auto [it, fresh] = group_of.emplace(c->link_id, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(std::move(*c));
  }
  for (const auto& group : groups) {
    auto recs = extract_qr_thread(group, config, skips);
    out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  for (const auto& [reason, n] : reader.skips().counts) skips.add(reason, n);
  canonicalize(out);
  return out;
}

void canonicalize(std::vector<QrRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const QrRecord& a, const QrRecord& b) {
    return std::tie(a.thread_id, a.response_post_id, a.parent_char_span.start, a.parent_char_span.end) <
           std::tie(b.thread_id, b.response_post_id, b.parent_char_span.start, b.parent_char_span.end);
  });
}

bool verify_qr_record(const QrRecord& record, std::string_view parent_body, bool byte_exact) {
  const auto& span = record.parent_char_span;
  if (span.start >= span.end || span.end > parent_body.size()) return false;
  return normalize_for_matching(parent_body.substr(span.start, span.size()), byte_exact).text ==
         normalize_for_matching(record.quote_text, byte_exact).text;
}

std::string to_json_line(const ImhoRecord& r) {
  json j;
  j["comment_id"] = r.comment_id;
  j["claim_sentence"] = r.claim_sentence;
  j["premise_sentence"] = r.premise_sentence ? json(*r.premise_sentence) : json(nullptr);
  j["acronym_stripped"] = r.acronym_stripped;
  return j.dump();
}

std::string to_json_line(const QrRecord& r) {
  json j;
  j["thread_id"] = r.thread_id;
  j["parent_post_id"] = r.parent_post_id;
  j["response_post_id"] = r.response_post_id;
  j["quote_text"] = r.quote_text;
  j["response_sentence"] = r.response_sentence;
  j["parent_char_span"] = {r.parent_char_span.start, r.parent_char_span.end};
  j["ambiguous"] = r.ambiguous;
  return j.dump();
}

QrRecord parse_qr_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    QrRecord r;
    r.thread_id = j.at("thread_id").get<std::string>();
    r.parent_post_id = j.at("parent_post_id").get<std::string>();
    r.response_post_id = j.at("response_post_id").get<std::string>();
    r.quote_text = j.at("quote_text").get<std::string>();
    r.response_sentence = j.at("response_sentence").get<std::string>();
    r.parent_char_span = {j.at("parent_char_span").at(0).get<std::size_t>(),
                          j.at("parent_char_span").at(1).get<std::size_t>()};
    r.ambiguous = j.value("ambiguous", false);
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("bad QR record: ") + e.what());
  }
}

std::string summary_json(std::string_view kind, std::size_t lines_read, std::size_t records,
                         const SkipReport& skips) {
  json j;
  j["kind"] = kind;
  j["lines_read"] = lines_read;
  j["records"] = records;
  j["skipped"] = json::object();
  for (const auto& [reason, n] : skips.counts) j["skipped"][reason] = n;
  return j.dump(2) + "\n";
}

BuildDistantResult build_distant(const BuildDistantOptions& options) {
  std::ifstream in(options.in, std::ios::binary);
  if (!in) throw Error("cannot open " + options.in.string());
  DumpReader reader(in);
  BuildDistantResult result;
  std::string body;
  std::string_view kind;
  if (options.kind == DistantKind::Imho) {
    kind = "imho";
    ImhoConfig config;
    config.strip_acronym = !options.keep_acronym;
    while (auto c = reader.next()) {
      for (const auto& rec : extract_imho_records(*c, config, result.skips)) {
        body += to_json_line(rec);
        body += '\n';
        ++result.records;
      }
    }
    for (const auto& [reason, n] : reader.skips().counts) result.skips.add(reason, n);
  } else {
    kind = "qr";
    QrConfig config;
    config.byte_exact = options.byte_exact;
    if (options.exclude_ids) {
      for (auto raw : split_lines(read_file(*options.exclude_ids))) {
        auto id = trim(raw);
        if (!id.empty() && id.front() != '#') config.exclude_thread_ids.insert(strip_id_prefix(std::string(id)));
      }
    }
    const auto records = extract_qr_records(reader, config, result.skips);
    for (const auto& rec : records) {
      body += to_json_line(rec);
      body += '\n';
    }
    result.records = records.size();
  }
  write_file(options.out, body);
  result.summary_path = options.out;
  result.summary_path += ".summary.json";
  write_file(result.summary_path, summary_json(kind, reader.lines_read(), result.records, result.skips));
  return result;
}

}  // namespace threadmine
