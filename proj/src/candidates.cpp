#include "threadmine/candidates.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "threadmine/util.hpp"

namespace threadmine {

std::string to_string(const PairKey& key) {
  return key.thread_id + ":" + key.source_id + "->" + key.target_id;
}

ComponentLabel LabelAssignment::label_of(const Thread& thread, const Proposition& prop) const {
  if (prop.in_title) return ComponentLabel::MainClaim;
  if (!predicted_) return prop.label;
  auto t = predicted_->find(thread.id);
  if (t != predicted_->end()) {
    auto p = t->second.find(prop.id);
    if (p != t->second.end()) return p->second;
  }
  throw Error("no predicted label for proposition '" + prop.id + "' in thread '" + thread.id + "'");
}

std::set<PairKey> gold_relation_keys(const Thread& thread, RelationKind kind) {
  std::set<PairKey> out;
  for (const auto& r : thread.relations) {
    if (r.kind == kind) out.insert({thread.id, r.source_id, r.target_id});
  }
  return out;
}

namespace {

void enumerate_intra_into(const Thread& thread, const Post& post, const LabelAssignment& labels,
                          const std::set<PairKey>& gold, std::vector<CandidatePair>& out) {
  std::vector<ComponentLabel> resolved;
  resolved.reserve(post.propositions.size());
  for (const auto& prop : post.propositions) resolved.push_back(labels.label_of(thread, prop));
  for (std::size_t s = 0; s < post.propositions.size(); ++s) {
    if (resolved[s] != ComponentLabel::Premise) continue;
    const auto& src = post.propositions[s];
    for (std::size_t t = 0; t < post.propositions.size(); ++t) {
      if (t == s || !is_argumentative(resolved[t])) continue;
      const auto& tgt = post.propositions[t];
      CandidatePair pair;
      pair.thread_id = thread.id;
      pair.source_id = src.id;
      pair.target_id = tgt.id;
      pair.source_post_id = post.id;
      pair.target_post_id = post.id;
      pair.kind = RelationKind::IntraTurn;
      pair.sentence_distance = static_cast<int>(src.sentence_index) - static_cast<int>(tgt.sentence_index);
      pair.gold = gold.count(pair.key()) > 0;
      out.push_back(std::move(pair));
    }
  }
}

}  // namespace

std::vector<CandidatePair> enumerate_intra(const Thread& thread, const Post& post, const LabelAssignment& labels) {
  std::vector<CandidatePair> out;
  enumerate_intra_into(thread, post, labels, gold_relation_keys(thread, RelationKind::IntraTurn), out);
  return out;
}

std::vector<CandidatePair> enumerate_intra(const Thread& thread, const LabelAssignment& labels) {
  std::vector<CandidatePair> out;
  auto gold = gold_relation_keys(thread, RelationKind::IntraTurn);
  for (const auto& post : thread.posts) enumerate_intra_into(thread, post, labels, gold, out);
  return out;
}

std::vector<CandidatePair> enumerate_inter(const Thread& thread, const LabelAssignment& labels, InterScope scope) {
  std::vector<CandidatePair> out;
  ThreadIndex index(thread);
  auto gold = gold_relation_keys(thread, RelationKind::InterTurn);
  for (const auto& reply : thread.posts) {
    std::vector<const Post*> targets;
    if (scope == InterScope::DirectParent) {
      if (const Post* parent = index.parent(reply)) targets.push_back(parent);
    } else {
      targets = index.ancestors(reply);
    }
    if (targets.empty()) continue;
    for (const auto& src : reply.propositions) {
      if (labels.label_of(thread, src) != ComponentLabel::Claim) continue;
      for (const Post* target_post : targets) {
        for (const auto& tgt : target_post->propositions) {
          if (!is_argumentative(labels.label_of(thread, tgt))) continue;
          CandidatePair pair;
          pair.thread_id = thread.id;
          pair.source_id = src.id;
          pair.target_id = tgt.id;
          pair.source_post_id = reply.id;
          pair.target_post_id = target_post->id;
          pair.kind = RelationKind::InterTurn;
          pair.gold = gold.count(pair.key()) > 0;
          out.push_back(std::move(pair));
        }
      }
    }
  }
  return out;
}

std::string window_filter_name(int lo, int hi) {
  auto signed_text = [](int v) { return (v > 0 ? "+" : "") + std::to_string(v); };
  return "window[" + signed_text(lo) + "," + signed_text(hi) + "]";
}

FilterResult apply_window(const std::vector<CandidatePair>& pairs, int lo, int hi) {
  FilterResult result;
  const std::string name = window_filter_name(lo, hi);
  for (const auto& pair : pairs) {
    if (pair.kind != RelationKind::IntraTurn || !pair.sentence_distance) {
      throw Error("window clipping is undefined for inter-turn pair " + to_string(pair.key()));
    }
    CandidatePair copy = pair;
    copy.filters_applied.push_back(name);
    const int d = *pair.sentence_distance;
    (lo <= d && d <= hi ? result.kept : result.removed).push_back(std::move(copy));
  }
  return result;
}

SalienceScorer constant_scorer() {
  return [](const Thread&, const Post& post) { return std::vector<double>(post.propositions.size(), 0.0); };
}

TargetSelection select_targets(const Thread& thread, const Post& post, const SalienceScorer& scorer, int k,
                               SelectionGranularity granularity) {
  if (k <= 0) throw Error("target selection needs k >= 1, got " + std::to_string(k));
  std::vector<double> scores = scorer(thread, post);
  if (scores.size() != post.propositions.size()) {
    throw Error("salience scorer returned " + std::to_string(scores.size()) + " scores for " +
                std::to_string(post.propositions.size()) + " propositions in post '" + post.id + "'");
  }
  TargetSelection sel;
  sel.post_id = post.id;
  sel.k = k;
  const std::size_t limit = static_cast<std::size_t>(k);

  if (granularity == SelectionGranularity::Proposition) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (std::size_t i = 0; i < order.size() && i < limit; ++i) sel.selected_ids.push_back(post.propositions[order[i]].id);
    return sel;
  }

  struct SentenceGroup {
    std::size_t sentence;
    double score;
    std::vector<std::size_t> members;
  };
  std::vector<SentenceGroup> groups;
  for (std::size_t i = 0; i < post.propositions.size(); ++i) {
    const std::size_t s = post.propositions[i].sentence_index;
    if (groups.empty() || groups.back().sentence != s) {
      groups.push_back({s, scores[i], {}});
    }
    groups.back().score = std::max(groups.back().score, scores[i]);
    groups.back().members.push_back(i);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const SentenceGroup& a, const SentenceGroup& b) { return a.score > b.score; });
  for (std::size_t g = 0; g < groups.size() && g < limit; ++g) {
    for (std::size_t m : groups[g].members) sel.selected_ids.push_back(post.propositions[m].id);
  }
  return sel;
}

FilterResult apply_target_selection(const std::vector<CandidatePair>& pairs, const SelectionMap& selections) {
  FilterResult result;
  for (const auto& pair : pairs) {
    auto it = selections.find(pair.target_post_id);
    if (it == selections.end()) {
      result.kept.push_back(pair);
      continue;
    }
    const auto& ids = it->second.selected_ids;
    CandidatePair copy = pair;
    copy.filters_applied.emplace_back(kTargetSelectionFilter);
    const bool selected = std::find(ids.begin(), ids.end(), pair.target_id) != ids.end();
    (selected ? result.kept : result.removed).push_back(std::move(copy));
  }
  return result;
}

FilterResult apply_source_target_constraint(const std::vector<CandidatePair>& pairs,
                                            const std::optional<std::string>& main_claim_id) {
  FilterResult result;
  if (pairs.empty()) return result;
  std::unordered_set<std::string> targets;
  for (const auto& pair : pairs) {
    if (pair.thread_id != pairs.front().thread_id) {
      throw Error("source/target constraint applies to one thread at a time");
    }
    targets.insert(pair.target_id);
  }
  for (const auto& pair : pairs) {
    CandidatePair copy = pair;
    copy.filters_applied.emplace_back(kSourceTargetFilter);
    const bool source_is_target = targets.count(pair.source_id) > 0;
    const bool to_main_claim = main_claim_id && pair.target_id == *main_claim_id;
    (source_is_target && !to_main_claim ? result.removed : result.kept).push_back(std::move(copy));
  }
  return result;
}

FilterResult apply_target_constraints(const std::vector<CandidatePair>& pairs, const SelectionMap& selections,
                                      const std::optional<std::string>& main_claim_id) {
  FilterResult selected = apply_target_selection(pairs, selections);
  FilterResult constrained = apply_source_target_constraint(selected.kept, main_claim_id);
  constrained.removed.insert(constrained.removed.begin(), std::make_move_iterator(selected.removed.begin()),
                             std::make_move_iterator(selected.removed.end()));
  return constrained;
}

void write_pair_file(std::ostream& out, const std::vector<CandidatePair>& pairs) {
  for (const auto& p : pairs) {
    out << p.thread_id << ' ' << p.source_id << ' ' << p.target_id << ' ' << to_string(p.kind) << ' ';
    if (p.sentence_distance) {
      out << *p.sentence_distance;
    } else {
      out << '-';
    }
    out << ' ';
    if (p.gold) {
      out << (*p.gold ? '1' : '0');
    } else {
      out << '-';
    }
    out << '\n';
  }
}

std::vector<CandidatePair> read_pair_file(std::istream& in, const std::string& source) {
  std::vector<CandidatePair> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto f = split_ws(view);
    if (f.size() != 6) throw ParseError(source, number, "expected 6 fields");
    CandidatePair p;
    p.thread_id = std::string(f[0]);
    p.source_id = std::string(f[1]);
    p.target_id = std::string(f[2]);
    auto kind = parse_relation_kind(f[3]);
    if (!kind) throw ParseError(source, number, "unknown relation kind '" + std::string(f[3]) + "'");
    p.kind = *kind;
    try {
      if (f[4] != "-") p.sentence_distance = static_cast<int>(parse_int(f[4]));
    } catch (const Error& e) {
      throw ParseError(source, number, e.what());
    }
    if (f[5] == "1") {
      p.gold = true;
    } else if (f[5] == "0") {
      p.gold = false;
    } else if (f[5] != "-") {
      throw ParseError(source, number, "gold must be 1, 0 or -");
    }
    if ((p.kind == RelationKind::IntraTurn) != p.sentence_distance.has_value()) {
      throw ParseError(source, number, "distance is required for intra-turn pairs and forbidden otherwise");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace threadmine
