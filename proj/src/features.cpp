#include "threadmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include "threadmine/embedded_data.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

double feature_value(const NamedFeatures& features, std::string_view name) {
  double total = 0.0;
  for (const auto& f : features) {
    if (f.name == name) total += f.value;
  }
  return total;
}

double SparseFeatureVector::get(std::uint32_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), index,
                             [](const auto& e, std::uint32_t i) { return e.first < i; });
  return it != entries.end() && it->first == index ? it->second : 0.0;
}

FeatureVocabulary::FeatureVocabulary() {
  names_.emplace_back(kOovName);
  index_.emplace(std::string(kOovName), kOovIndex);
}

FeatureVocabulary FeatureVocabulary::build(const std::vector<NamedFeatures>& samples, int min_count,
                                           const std::function<bool(std::string_view)>& prunable) {
  std::map<std::string, std::size_t> counts;
  for (const auto& sample : samples) {
    for (const auto& f : sample) ++counts[f.name];
  }
  FeatureVocabulary vocab;
  vocab.min_count_ = min_count;
  for (const auto& [name, n] : counts) {
    const std::size_t need = prunable && prunable(name) ? static_cast<std::size_t>(std::max(1, min_count)) : 1;
    if (n >= need) vocab.add(name);
  }
  vocab.freeze();
  return vocab;
}

std::uint32_t FeatureVocabulary::add(std::string_view name) {
  if (frozen_) throw Error("cannot add '" + std::string(name) + "' to a frozen vocabulary");
  auto [it, inserted] = index_.emplace(std::string(name), static_cast<std::uint32_t>(names_.size()));
  if (inserted) {
    names_.emplace_back(name);
    id_.clear();
  }
  return it->second;
}

void FeatureVocabulary::freeze() { frozen_ = true; }

std::optional<std::uint32_t> FeatureVocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t FeatureVocabulary::index_or_oov(std::string_view name) const {
  return find(name).value_or(kOovIndex);
}

const std::string& FeatureVocabulary::id() const {
  if (id_.empty()) {
    std::string all;
    for (const auto& n : names_) {
      all += n;
      all += '\n';
    }
    id_ = "vocab-" + digest_hex(all);
  }
  return id_;
}

SparseFeatureVector FeatureVocabulary::encode(const NamedFeatures& features) const {
  if (!frozen_) throw Error("encoding requires a frozen vocabulary");
  std::map<std::uint32_t, double> acc;
  for (const auto& f : features) acc[index_or_oov(f.name)] += f.value;
  SparseFeatureVector out;
  out.vocabulary_id = id();
  for (const auto& [i, v] : acc) {
    if (v != 0.0) out.entries.emplace_back(i, v);
  }
  return out;
}

std::string FeatureVocabulary::serialize() const {
  std::ostringstream out;
  out << "vocabulary " << names_.size() - 1 << " min_count=" << min_count_ << " id=" << id() << '\n';
  for (std::size_t i = 1; i < names_.size(); ++i) out << "v " << names_[i] << '\n';
  return out.str();
}

FeatureVocabulary FeatureVocabulary::parse(LineCursor& in) {
  auto header = split_ws(in.expect("vocabulary"));
  if (header.size() != 3 || header[1].rfind("min_count=", 0) != 0 || header[2].rfind("id=", 0) != 0) {
    in.fail("malformed vocabulary header");
  }
  const auto n = static_cast<std::size_t>(parse_int(header[0]));
  FeatureVocabulary vocab;
  vocab.min_count_ = static_cast<int>(parse_int(header[1].substr(10)));
  for (std::size_t i = 0; i < n; ++i) vocab.add(in.expect("v"));
  vocab.freeze();
  if (vocab.id() != header[2].substr(3)) in.fail("vocabulary digest mismatch");
  return vocab;
}

const FeatureLexicons& FeatureLexicons::builtin() {
  static const FeatureLexicons lex{
      Lexicon::builtin("first_person"),    Lexicon::builtin("modals"),
      Lexicon::builtin("negation"),        Lexicon::builtin("forward_markers"),
      Lexicon::builtin("backward_markers"), Lexicon::builtin("stopwords"),
  };
  return lex;
}

namespace {

bool is_number_token(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_word_token(std::string_view tok) {
  if (tok.empty()) return false;
  unsigned char c = static_cast<unsigned char>(tok.front());
  return c >= 0x80 || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

void append_prefixed(NamedFeatures& out, const NamedFeatures& in, std::string_view prefix) {
  for (const auto& f : in) out.push_back({std::string(prefix) + f.name, f.value});
}

}  // namespace

NamedFeatures component_feature_names(const Post& post, std::size_t index, const FeatureLexicons& lex) {
  const Proposition& prop = post.propositions.at(index);
  const auto tokens = tokenize(prop.text);
  NamedFeatures out;
  for (const auto& tok : tokens) out.push_back({is_number_token(tok) ? "w=NUM" : "w=" + tok, 1.0});
  const double count = static_cast<double>(post.propositions.size());
  out.push_back({"log_tokens", std::log1p(static_cast<double>(tokens.size()))});
  out.push_back({"rel_pos", static_cast<double>(index) / count});
  out.push_back({"is_first", index == 0 ? 1.0 : 0.0});
  out.push_back({"is_last", index + 1 == post.propositions.size() ? 1.0 : 0.0});
  out.push_back({"is_title", prop.in_title ? 1.0 : 0.0});
  out.push_back({"has_question", prop.text.find('?') != std::string::npos ? 1.0 : 0.0});
  double first_person = 0, modal = 0;
  for (const auto& tok : tokens) {
    first_person += lex.first_person.contains(tok) ? 1 : 0;
    modal += lex.modals.contains(tok) ? 1 : 0;
  }
  out.push_back({"first_person", first_person});
  out.push_back({"modal", modal});
  for (const auto& m : lex.forward_markers.matched_terms(tokens)) out.push_back({"fwd=" + m, 1.0});
  for (const auto& m : lex.backward_markers.matched_terms(tokens)) out.push_back({"bwd=" + m, 1.0});
  return out;
}

SparseFeatureVector component_features(const Post& post, std::size_t index, const FeatureVocabulary& vocab,
                                       const FeatureLexicons& lex) {
  return vocab.encode(component_feature_names(post, index, lex));
}

double content_overlap(std::string_view a, std::string_view b, const Lexicon& stopwords) {
  auto content = [&](std::string_view text) {
    std::set<std::string> out;
    for (auto& tok : tokenize(text)) {
      if (is_word_token(tok) && !stopwords.contains(tok)) out.insert(std::move(tok));
    }
    return out;
  };
  const auto sa = content(a), sb = content(b);
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool has_negation(std::string_view text, const Lexicon& negation) {
  std::string folded;
  folded.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 3 <= text.size() && text.compare(i, 3, "\xE2\x80\x99") == 0) {
      folded += '\'';
      i += 2;
    } else {
      folded += text[i];
    }
  }
  for (std::string_view word : split_ws(folded)) {
    auto is_edge = [](char ch) {
      auto c = static_cast<unsigned char>(ch);
      return c < 0x80 && !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
    };
    while (!word.empty() && is_edge(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_edge(word.back())) word.remove_suffix(1);
    if (!word.empty() && negation.contains(to_lower_ascii(word))) return true;
  }
  return false;
}

std::string distance_bucket(int d) {
  if (d <= -2) return "<=-2";
  if (d >= 3) return ">=+3";
  if (d > 0) return "+" + std::to_string(d);
  return std::to_string(d);
}

DiscourseLabelSet DiscourseLabelSet::from_labels(std::vector<std::string> labels) {
  DiscourseLabelSet set;
  std::set<std::string> seen;
  for (auto& l : labels) {
    if (seen.insert(l).second) set.labels_.push_back(std::move(l));
  }
  set.id_ = "rst-" + digest_hex(join(set.labels_, "\n"));
  return set;
}

DiscourseLabelSet DiscourseLabelSet::parse(std::string_view text) {
  std::vector<std::string> labels;
  for (auto raw : split_lines(text)) {
    auto line = trim(raw);
    if (!line.empty() && line.front() != '#') labels.emplace_back(line);
  }
  return from_labels(std::move(labels));
}

const DiscourseLabelSet& DiscourseLabelSet::builtin() {
  static const DiscourseLabelSet set = parse(embedded_data("lexicons/discourse_labels").value());
  return set;
}

std::optional<std::uint32_t> DiscourseLabelSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

SparseFeatureVector discourse_onehot(std::string_view label, const DiscourseLabelSet& labels) {
  SparseFeatureVector v;
  v.vocabulary_id = labels.id();
  auto idx = labels.index_of(label);
  if (!idx) log_warning("unknown discourse label '" + std::string(label) + "' mapped to OOV");
  v.entries.emplace_back(idx.value_or(labels.oov_index()), 1.0);
  return v;
}

DiscourseRules DiscourseRules::parse(std::string_view text) {
  DiscourseRules rules;
  std::vector<std::pair<std::string, std::string>> grouped;  // label -> marker lines
  for (auto raw : split_lines(text)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw Error("discourse rule needs '<Label>: <marker>': " + std::string(line));
    std::string label(trim(line.substr(0, colon)));
    std::string marker(trim(line.substr(colon + 1)));
    auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) { return g.first == label; });
    if (it == grouped.end()) {
      grouped.emplace_back(label, marker + "\n");
    } else {
      it->second += marker + "\n";
    }
  }
  for (auto& [label, markers] : grouped) rules.rules_.push_back({label, Lexicon::parse(markers, label)});
  return rules;
}

const DiscourseRules& DiscourseRules::builtin() {
  static const DiscourseRules rules = parse(embedded_data("lexicons/discourse_rules").value());
  return rules;
}

std::string DiscourseRules::label_for(std::string_view text) const {
  const auto tokens = tokenize(text);
  for (const auto& rule : rules_) {
    if (rule.markers.count_matches(tokens) > 0) return rule.label;
  }
  return default_label_;
}

std::string heuristic_discourse_label(const ThreadIndex& index, const CandidatePair& pair,
                                      const DiscourseRules& rules) {
  const Proposition* src = index.proposition(pair.source_id);
  const Proposition* tgt = index.proposition(pair.target_id);
  if (!src || !tgt) throw Error("pair " + to_string(pair.key()) + " names an unknown proposition");
  bool target_first = true;
  if (pair.kind == RelationKind::IntraTurn) {
    target_first = index.position_in_post(tgt->id) < index.position_in_post(src->id);
  }
  const std::string text = target_first ? tgt->text + " " + src->text : src->text + " " + tgt->text;
  return rules.label_for(text);
}

DiscourseLabelMap read_discourse_label_file(std::istream& in, const std::string& source) {
  DiscourseLabelMap out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto f = split_ws(view);
    if (f.size() != 4) throw ParseError(source, number, "expected: <thread> <source_id> <target_id> <label>");
    PairKey key{std::string(f[0]), std::string(f[1]), std::string(f[2])};
    auto [it, inserted] = out.emplace(key, std::string(f[3]));
    if (!inserted && it->second != f[3]) {
      throw ParseError(source, number, "conflicting labels for " + to_string(key));
    }
  }
  return out;
}

NamedFeatures pair_feature_names(const ThreadIndex& index, const CandidatePair& pair,
                                 const std::optional<std::string>& discourse_label, const FeatureLexicons& lex) {
  const Post* src_post = index.post_of(pair.source_id);
  const Post* tgt_post = index.post_of(pair.target_id);
  if (!src_post || !tgt_post) throw Error("pair " + to_string(pair.key()) + " names an unknown proposition");
  const std::size_t si = index.position_in_post(pair.source_id);
  const std::size_t ti = index.position_in_post(pair.target_id);
  const Proposition& src = src_post->propositions[si];
  const Proposition& tgt = tgt_post->propositions[ti];

  NamedFeatures out;
  append_prefixed(out, component_feature_names(*src_post, si, lex), "src:");
  append_prefixed(out, component_feature_names(*tgt_post, ti, lex), "tgt:");
  out.push_back({"overlap", content_overlap(src.text, tgt.text, lex.stopwords)});
  out.push_back({"src_neg", has_negation(src.text, lex.negation) ? 1.0 : 0.0});
  out.push_back({"tgt_neg", has_negation(tgt.text, lex.negation) ? 1.0 : 0.0});
  if (pair.kind == RelationKind::IntraTurn && pair.sentence_distance) {
    out.push_back({"dist=" + distance_bucket(*pair.sentence_distance), 1.0});
  }
  out.push_back({"same_author", src_post->author == tgt_post->author ? 1.0 : 0.0});
  out.push_back({"src_is_reply", src_post->parent_id ? 1.0 : 0.0});
  if (discourse_label) out.push_back({"rst=" + *discourse_label, 1.0});
  return out;
}

SparseFeatureVector pair_features(const ThreadIndex& index, const CandidatePair& pair, const FeatureVocabulary& vocab,
                                  const std::optional<std::string>& discourse_label) {
  return vocab.encode(pair_feature_names(index, pair, discourse_label));
}

}  // namespace threadmine
