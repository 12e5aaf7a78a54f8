#include "threadmine/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_set>

#include "threadmine/util.hpp"

namespace threadmine {

namespace {

constexpr std::pair<ComponentLabel, std::string_view> kLabelNames[] = {
    {ComponentLabel::MainClaim, "MainClaim"},
    {ComponentLabel::Claim, "Claim"},
    {ComponentLabel::Premise, "Premise"},
    {ComponentLabel::NonArgument, "NonArgument"},
};
constexpr std::pair<RelationKind, std::string_view> kKindNames[] = {
    {RelationKind::IntraTurn, "IntraTurn"},
    {RelationKind::InterTurn, "InterTurn"},
};
constexpr std::pair<RelationType, std::string_view> kTypeNames[] = {
    {RelationType::Support, "Support"},
    {RelationType::Attack, "Attack"},
    {RelationType::Agreement, "Agreement"},
    {RelationType::PartialAgreement, "PartialAgreement"},
    {RelationType::Rebuttal, "Rebuttal"},
    {RelationType::Undercutter, "Undercutter"},
    {RelationType::PartialAttack, "PartialAttack"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E value) {
  for (const auto& [v, n] : table) {
    if (v == value) return n;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::pair<E, std::string_view> (&table)[N], std::string_view text) {
  for (const auto& [v, n] : table) {
    if (n == text) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ComponentLabel label) { return name_of(kLabelNames, label); }
std::string_view to_string(RelationKind kind) { return name_of(kKindNames, kind); }
std::string_view to_string(RelationType type) { return name_of(kTypeNames, type); }
std::optional<ComponentLabel> parse_component_label(std::string_view t) { return value_of(kLabelNames, t); }
std::optional<RelationKind> parse_relation_kind(std::string_view t) { return value_of(kKindNames, t); }
std::optional<RelationType> parse_relation_type(std::string_view t) { return value_of(kTypeNames, t); }

ThreadIndex::ThreadIndex(const Thread& thread) : thread_(&thread) {
  for (std::size_t i = 0; i < thread.posts.size(); ++i) {
    post_by_id_.emplace(thread.posts[i].id, i);
    for (std::size_t j = 0; j < thread.posts[i].propositions.size(); ++j) {
      prop_by_id_.emplace(thread.posts[i].propositions[j].id, std::make_pair(i, j));
    }
  }
}

const Post* ThreadIndex::post(std::string_view id) const {
  auto it = post_by_id_.find(std::string(id));
  return it == post_by_id_.end() ? nullptr : &thread_->posts[it->second];
}

const Proposition* ThreadIndex::proposition(std::string_view id) const {
  auto it = prop_by_id_.find(std::string(id));
  if (it == prop_by_id_.end()) return nullptr;
  return &thread_->posts[it->second.first].propositions[it->second.second];
}

const Post* ThreadIndex::post_of(std::string_view proposition_id) const {
  auto it = prop_by_id_.find(std::string(proposition_id));
  return it == prop_by_id_.end() ? nullptr : &thread_->posts[it->second.first];
}

std::size_t ThreadIndex::position_in_post(std::string_view proposition_id) const {
  auto it = prop_by_id_.find(std::string(proposition_id));
  if (it == prop_by_id_.end()) throw Error("unknown proposition " + std::string(proposition_id));
  return it->second.second;
}

const Post* ThreadIndex::parent(const Post& p) const {
  return p.parent_id ? post(*p.parent_id) : nullptr;
}

std::vector<const Post*> ThreadIndex::ancestors(const Post& p) const {
  std::vector<const Post*> out;
  std::unordered_set<const Post*> seen{&p};
  const Post* cur = parent(p);
  while (cur && seen.insert(cur).second) {
    out.push_back(cur);
    cur = parent(*cur);
  }
  return out;
}

const Post* ThreadIndex::root() const {
  for (const auto& p : thread_->posts) {
    if (p.is_root()) return &p;
  }
  return nullptr;
}

std::optional<std::string> ThreadIndex::main_claim_id() const {
  for (const auto& p : thread_->posts) {
    for (const auto& prop : p.propositions) {
      if (prop.label == ComponentLabel::MainClaim) return prop.id;
    }
  }
  return std::nullopt;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    out += "\n  [" + v.rule + "] " + v.message;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::string thread_id, std::vector<Violation> violations)
    : Error("thread '" + thread_id + "' is invalid:" + describe(violations)),
      thread_id_(std::move(thread_id)),
      violations_(std::move(violations)) {}

namespace {

bool has_ws_or_empty(std::string_view s) {
  if (s.empty()) return true;
  return std::any_of(s.begin(), s.end(), is_ascii_space);
}

}  // namespace

std::vector<Violation> validate_thread(const Thread& t) {
  std::vector<Violation> out;
  auto add = [&](std::string_view rule, std::vector<std::string> ids, std::string msg) {
    out.push_back({std::string(rule), std::move(ids), std::move(msg)});
  };

  if (has_ws_or_empty(t.id)) add(rules::kTokenSyntax, {t.id}, "thread id must be a non-empty token");

  std::unordered_set<std::string> post_ids;
  std::unordered_set<std::string> prop_ids;
  for (const auto& p : t.posts) {
    if (!post_ids.insert(p.id).second) add(rules::kDuplicatePost, {p.id}, "post id '" + p.id + "' repeats");
    if (has_ws_or_empty(p.id)) add(rules::kTokenSyntax, {p.id}, "post id must be a non-empty token");
    if (has_ws_or_empty(p.author)) add(rules::kTokenSyntax, {p.id}, "author of post '" + p.id + "' must be a token");
    for (const auto& prop : p.propositions) {
      if (!prop_ids.insert(prop.id).second) {
        add(rules::kDuplicateProposition, {prop.id}, "proposition id '" + prop.id + "' repeats");
      }
      if (has_ws_or_empty(prop.id)) add(rules::kTokenSyntax, {prop.id}, "proposition id must be a token");
    }
  }

  std::size_t roots = 0;
  for (const auto& p : t.posts) roots += p.is_root() ? 1 : 0;
  if (roots != 1) {
    add(rules::kSingleRoot, {}, "expected exactly one post without a parent, found " + std::to_string(roots));
  }

  ThreadIndex index(t);
  for (const auto& p : t.posts) {
    if (p.parent_id && !index.post(*p.parent_id)) {
      add(rules::kParentResolves, {p.id, *p.parent_id},
          "post '" + p.id + "' replies to unknown post '" + *p.parent_id + "'");
    }
  }
  for (const auto& p : t.posts) {
    std::unordered_set<const Post*> seen{&p};
    const Post* cur = index.parent(p);
    while (cur) {
      if (cur == &p) {
        add(rules::kReplyCycle, {p.id}, "post '" + p.id + "' is its own ancestor");
        break;
      }
      if (!seen.insert(cur).second) break;
      cur = index.parent(*cur);
    }
  }

  std::size_t main_claims = 0;
  for (const auto& p : t.posts) {
    bool seen_body = false;
    const Proposition* prev_body = nullptr;
    const Proposition* prev = nullptr;
    for (const auto& prop : p.propositions) {
      if (prop.post_id != p.id) {
        add(rules::kPostMembership, {prop.id}, "proposition '" + prop.id + "' names post '" + prop.post_id +
                                                   "' but is listed under '" + p.id + "'");
      }
      if (prop.label == ComponentLabel::MainClaim) ++main_claims;
      if (prop.in_title != (prop.label == ComponentLabel::MainClaim)) {
        add(rules::kMainClaimTitle, {prop.id}, "proposition '" + prop.id + "': only the main claim lives in the title");
      }
      if (prop.in_title && (!p.is_root() || !p.title)) {
        add(rules::kMainClaimTitle, {prop.id},
            "main claim '" + prop.id + "' must belong to the title of the original post");
      }
      const std::string* source = nullptr;
      if (prop.in_title) {
        source = p.title ? &*p.title : nullptr;
      } else {
        source = &p.text;
      }
      if (source) {
        if (prop.span.start > prop.span.end || prop.span.end > source->size()) {
          add(rules::kSpanBounds, {prop.id}, "span of '" + prop.id + "' is outside the text");
        } else if (source->compare(prop.span.start, prop.span.size(), prop.text) != 0) {
          add(rules::kSpanText, {prop.id}, "text of '" + prop.id + "' does not match its span");
        }
      }
      if (prop.in_title) {
        if (seen_body) add(rules::kDocumentOrder, {prop.id}, "title proposition '" + prop.id + "' follows body text");
      } else {
        seen_body = true;
        if (prev_body) {
          if (prop.span.overlaps(prev_body->span)) {
            add(rules::kSpanOverlap, {prev_body->id, prop.id},
                "spans of '" + prev_body->id + "' and '" + prop.id + "' overlap");
          } else if (prop.span.start < prev_body->span.end) {
            add(rules::kDocumentOrder, {prop.id}, "proposition '" + prop.id + "' is listed out of text order");
          }
        }
        prev_body = &prop;
      }
      if (prev && prop.sentence_index < prev->sentence_index) {
        add(rules::kSentenceOrder, {prev->id, prop.id},
            "sentence index decreases from '" + prev->id + "' to '" + prop.id + "'");
      }
      prev = &prop;
    }
  }
  if (main_claims > 1) add(rules::kMainClaimTitle, {}, "a thread has at most one main claim");

  for (const auto& r : t.relations) {
    const Proposition* s = index.proposition(r.source_id);
    const Proposition* g = index.proposition(r.target_id);
    std::string tag = r.source_id + "->" + r.target_id;
    if (!s || !g) {
      add(rules::kRelationEndpoint, {r.source_id, r.target_id}, "relation " + tag + " names an unknown proposition");
      continue;
    }
    if (r.source_id == r.target_id) {
      add(rules::kSelfRelation, {r.source_id}, "relation " + tag + " links a proposition to itself");
    }
    if (r.kind == RelationKind::IntraTurn) {
      if (s->post_id != g->post_id) {
        add(rules::kIntraSamePost, {r.source_id, r.target_id}, "intra-turn relation " + tag + " crosses posts");
      }
      if (s->label != ComponentLabel::Premise) {
        add(rules::kIntraSourcePremise, {r.source_id},
            "intra-turn relation " + tag + " must start at a premise, not " + std::string(to_string(s->label)));
      }
    } else {
      if (s->post_id == g->post_id) {
        add(rules::kInterDifferentPost, {r.source_id, r.target_id}, "inter-turn relation " + tag + " stays in one post");
      }
      if (s->label != ComponentLabel::Claim) {
        add(rules::kInterSourceClaim, {r.source_id},
            "inter-turn relation " + tag + " must start at a claim, not " + std::string(to_string(s->label)));
      }
    }
    if (!is_argumentative(g->label)) {
      add(rules::kTargetLabel, {r.target_id}, "relation " + tag + " targets a non-argument");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Thread text format.

namespace {

struct RawLine {
  std::string_view text;  // without the newline; may still end in '\r'
  std::size_t number;
};

std::vector<RawLine> raw_lines(std::string_view doc) {
  std::vector<RawLine> out;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start < doc.size()) {
    std::size_t nl = doc.find('\n', start);
    if (nl == std::string_view::npos) nl = doc.size();
    out.push_back({doc.substr(start, nl - start), number++});
    start = nl + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool is_backtick_fence(std::string_view s) {
  return s.size() >= 3 && std::all_of(s.begin(), s.end(), [](char c) { return c == '`'; });
}

struct PendingAdu {
  std::string id;
  std::size_t sentence_index;
  ByteSpan span;
  ComponentLabel label;
};

class ThreadParser {
 public:
  explicit ThreadParser(std::string_view source) : source_(source) {}

  std::vector<Thread> run(std::string_view doc) {
    for (const RawLine& raw : raw_lines(doc)) {
      line_ = raw.number;
      if (fence_) {
        if (trim(raw.text) == *fence_) {
          fence_.reset();
          post_->text = join(fence_lines_, "\n");
          has_text_ = true;
          fence_lines_.clear();
        } else {
          fence_lines_.emplace_back(raw.text);
        }
        continue;
      }
      std::string_view line = trim(strip_cr(raw.text));
      if (line.empty() || line.front() == '#') continue;
      handle(line);
    }
    if (fence_) fail("unterminated text block");
    finish_thread();
    return std::move(threads_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(std::string(source_), line_, message); }

  void handle(std::string_view line) {
    if (line.rfind("title:", 0) == 0) {
      require_post("title");
      if (post_->title) fail("post '" + post_->id + "' has two titles");
      std::string_view rest = line.substr(6);
      if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      post_->title = std::string(rest);
      return;
    }
    if (is_backtick_fence(line)) {
      require_post("text block");
      if (has_text_) fail("post '" + post_->id + "' has two text blocks");
      fence_ = std::string(line);
      return;
    }
    auto fields = split_ws(line);
    std::string_view head = fields.front();
    if (head == "thread") {
      if (fields.size() != 2) fail("expected: thread <id>");
      finish_thread();
      thread_ = Thread{};
      thread_->id = std::string(fields[1]);
    } else if (head == "post") {
      if (!thread_) fail("post outside a thread");
      if (fields.size() != 4) fail("expected: post <id> parent=<id|-> author=<name>");
      finish_post();
      Post p;
      p.id = std::string(fields[1]);
      bool have_parent = false, have_author = false;
      for (std::size_t i = 2; i < fields.size(); ++i) {
        auto kv = fields[i];
        auto eq = kv.find('=');
        if (eq == std::string_view::npos) fail("expected key=value, got '" + std::string(kv) + "'");
        auto key = kv.substr(0, eq);
        auto value = kv.substr(eq + 1);
        if (key == "parent") {
          have_parent = true;
          if (value != "-") p.parent_id = std::string(value);
        } else if (key == "author") {
          have_author = true;
          p.author = std::string(value);
        } else {
          fail("unknown post field '" + std::string(key) + "'");
        }
      }
      if (!have_parent || !have_author) fail("post needs parent= and author=");
      post_ = std::move(p);
      has_text_ = false;
    } else if (head == "adu") {
      require_post("adu");
      if (fields.size() != 6) fail("expected: adu <id> <sentence_index> <start> <end> <label>");
      PendingAdu a;
      a.id = std::string(fields[1]);
      a.sentence_index = parse_count(fields[2], "sentence_index");
      a.span.start = parse_count(fields[3], "start");
      a.span.end = parse_count(fields[4], "end");
      auto label = parse_component_label(fields[5]);
      if (!label) fail("unknown component label '" + std::string(fields[5]) + "'");
      a.label = *label;
      adus_.push_back(std::move(a));
    } else if (head == "rel") {
      if (!thread_) fail("rel outside a thread");
      if (fields.size() != 5) fail("expected: rel <source_id> <target_id> <kind> <type>");
      RelationInstance r;
      r.source_id = std::string(fields[1]);
      r.target_id = std::string(fields[2]);
      auto kind = parse_relation_kind(fields[3]);
      if (!kind) fail("unknown relation kind '" + std::string(fields[3]) + "'");
      auto type = parse_relation_type(fields[4]);
      if (!type) fail("unknown relation type '" + std::string(fields[4]) + "'");
      r.kind = *kind;
      r.type = *type;
      thread_->relations.push_back(std::move(r));
    } else {
      fail("unrecognized line starting with '" + std::string(head) + "'");
    }
  }

  std::size_t parse_count(std::string_view field, const char* what) const {
    if (field.empty() || !std::all_of(field.begin(), field.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      fail(std::string(what) + " must be a non-negative integer, got '" + std::string(field) + "'");
    }
    return static_cast<std::size_t>(parse_int(field));
  }

  void require_post(const char* what) const {
    if (!post_) fail(std::string(what) + " outside a post");
  }

  void finish_post() {
    if (!post_) return;
    for (auto& a : adus_) {
      Proposition prop;
      prop.id = std::move(a.id);
      prop.post_id = post_->id;
      prop.sentence_index = a.sentence_index;
      prop.span = a.span;
      prop.label = a.label;
      prop.in_title = a.label == ComponentLabel::MainClaim;
      const std::string* src = prop.in_title ? (post_->title ? &*post_->title : nullptr) : &post_->text;
      if (src && a.span.start <= a.span.end && a.span.end <= src->size()) {
        prop.text = src->substr(a.span.start, a.span.size());
      }
      post_->propositions.push_back(std::move(prop));
    }
    adus_.clear();
    thread_->posts.push_back(std::move(*post_));
    post_.reset();
  }

  void finish_thread() {
    if (!thread_) return;
    finish_post();
    auto violations = validate_thread(*thread_);
    if (!violations.empty()) throw ValidationError(thread_->id, std::move(violations));
    threads_.push_back(std::move(*thread_));
    thread_.reset();
  }

  std::string_view source_;
  std::size_t line_ = 0;
  std::optional<Thread> thread_;
  std::optional<Post> post_;
  bool has_text_ = false;
  std::vector<PendingAdu> adus_;
  std::optional<std::string> fence_;
  std::vector<std::string> fence_lines_;
  std::vector<Thread> threads_;
};

std::string fence_for(std::string_view text) {
  std::size_t longest = 0, run = 0;
  for (char c : text) {
    run = c == '`' ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

}  // namespace

std::vector<Thread> parse_threads(std::string_view document, std::string_view source) {
  return ThreadParser(source).run(document);
}

Thread parse_thread(std::string_view document, std::string_view source) {
  auto threads = parse_threads(document, source);
  if (threads.size() != 1) {
    throw ParseError(std::string(source), 1, "expected exactly one thread, found " + std::to_string(threads.size()));
  }
  return std::move(threads.front());
}

std::string serialize_thread(const Thread& t) {
  std::ostringstream out;
  out << "thread " << t.id << '\n';
  for (const auto& p : t.posts) {
    out << "post " << p.id << " parent=" << (p.parent_id ? *p.parent_id : "-") << " author=" << p.author << '\n';
    if (p.title) out << "title: " << *p.title << '\n';
    for (const auto& prop : p.propositions) {
      out << "adu " << prop.id << ' ' << prop.sentence_index << ' ' << prop.span.start << ' ' << prop.span.end << ' '
          << to_string(prop.label) << '\n';
    }
    std::string fence = fence_for(p.text);
    out << fence << '\n';
    if (!p.text.empty()) out << p.text << '\n';
    out << fence << '\n';
  }
  for (const auto& r : t.relations) {
    out << "rel " << r.source_id << ' ' << r.target_id << ' ' << to_string(r.kind) << ' ' << to_string(r.type) << '\n';
  }
  return out.str();
}

std::vector<Thread> load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<Thread> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".thread") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto threads = parse_threads(read_file(f), f.string());
      out.insert(out.end(), std::make_move_iterator(threads.begin()), std::make_move_iterator(threads.end()));
    }
  } else {
    out = parse_threads(read_file(path), path.string());
  }
  return out;
}

void save_corpus(const std::filesystem::path& file, const std::vector<Thread>& corpus) {
  std::string text;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i) text += '\n';
    text += serialize_thread(corpus[i]);
  }
  write_file(file, text);
}

// ---------------------------------------------------------------------------

CorpusStats corpus_stats(const std::vector<Thread>& corpus) {
  CorpusStats s;
  for (const auto& t : corpus) {
    auto violations = validate_thread(t);
    if (!violations.empty()) throw ValidationError(t.id, std::move(violations));
    ++s.threads;
    ThreadIndex index(t);
    for (const auto& p : t.posts) {
      ++s.posts;
      std::set<std::size_t> sentences;
      std::size_t claims = 0, premises = 0;
      for (const auto& prop : p.propositions) {
        sentences.insert(prop.sentence_index);
        ++s.component_counts[prop.label];
        if (is_claim_like(prop.label)) ++claims;
        if (prop.label == ComponentLabel::Premise) ++premises;
      }
      s.sentences += sentences.size();
      if (premises > 0) s.intra_pairs += premises * (claims + premises - 1);
      if (const Post* parent = index.parent(p)) {
        std::size_t sources = 0, targets = 0;
        for (const auto& prop : p.propositions) sources += prop.label == ComponentLabel::Claim ? 1 : 0;
        for (const auto& prop : parent->propositions) targets += is_argumentative(prop.label) ? 1 : 0;
        s.inter_pairs += sources * targets;
      }
    }
    std::set<std::pair<std::string, std::string>> intra_seen, inter_seen;
    for (const auto& r : t.relations) {
      ++s.relation_counts[{r.kind, r.type}];
      const Proposition* src = index.proposition(r.source_id);
      const Proposition* tgt = index.proposition(r.target_id);
      if (r.kind == RelationKind::IntraTurn) {
        if (!intra_seen.insert({r.source_id, r.target_id}).second) continue;
        ++s.intra_positive;
        int d = static_cast<int>(src->sentence_index) - static_cast<int>(tgt->sentence_index);
        ++s.intra_distance_histogram[d];
      } else {
        const Post* src_post = index.post_of(r.source_id);
        if (!src_post->parent_id || *src_post->parent_id != tgt->post_id) continue;
        if (inter_seen.insert({r.source_id, r.target_id}).second) ++s.inter_positive;
      }
    }
  }
  s.sentences_per_post = s.posts ? static_cast<double>(s.sentences) / static_cast<double>(s.posts) : 0.0;
  s.intra_rate_defined = s.intra_pairs > 0;
  s.inter_rate_defined = s.inter_pairs > 0;
  if (s.intra_rate_defined) s.positive_rate_intra = static_cast<double>(s.intra_positive) / static_cast<double>(s.intra_pairs);
  if (s.inter_rate_defined) s.positive_rate_inter = static_cast<double>(s.inter_positive) / static_cast<double>(s.inter_pairs);
  return s;
}

std::string format_stats(const CorpusStats& s) {
  std::ostringstream out;
  out << "threads = " << s.threads << '\n';
  out << "posts = " << s.posts << '\n';
  out << "sentences = " << s.sentences << '\n';
  out << "sentences_per_post = " << format_double(s.sentences_per_post) << '\n';
  for (const auto& [label, n] : s.component_counts) out << "components." << to_string(label) << " = " << n << '\n';
  for (const auto& [key, n] : s.relation_counts) {
    out << "relations." << to_string(key.first) << '.' << to_string(key.second) << " = " << n << '\n';
  }
  for (const auto& [d, n] : s.intra_distance_histogram) {
    out << "intra_distance." << (d > 0 ? "+" : "") << d << " = " << n << '\n';
  }
  out << "intra_pairs = " << s.intra_pairs << '\n';
  out << "intra_positive = " << s.intra_positive << '\n';
  out << "positive_rate_intra = " << format_double(s.positive_rate_intra) << '\n';
  out << "positive_rate_intra_defined = " << (s.intra_rate_defined ? 1 : 0) << '\n';
  out << "inter_pairs = " << s.inter_pairs << '\n';
  out << "inter_positive = " << s.inter_positive << '\n';
  out << "positive_rate_inter = " << format_double(s.positive_rate_inter) << '\n';
  out << "positive_rate_inter_defined = " << (s.inter_rate_defined ? 1 : 0) << '\n';
  return out.str();
}

CorpusSplit split_corpus(const std::vector<Thread>& corpus, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("test fraction must lie strictly between 0 and 1");
  const std::size_t n = corpus.size();
  if (n < 2) throw Error("splitting needs at least 2 threads, got " + std::to_string(n));
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? split.test : split.train).push_back(corpus[i]);
  return split;
}

}  // namespace threadmine
