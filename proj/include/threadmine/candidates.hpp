#pragma once

#include <compare>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "threadmine/corpus.hpp"

namespace threadmine {

enum class ComponentSource { Gold, Predicted };
enum class InterScope { DirectParent, Ancestors };

struct PairKey {
  std::string thread_id;
  std::string source_id;
  std::string target_id;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;
};

std::string to_string(const PairKey& key);

// thread id -> proposition id -> predicted label.
using PredictedLabels = std::unordered_map<std::string, std::unordered_map<std::string, ComponentLabel>>;

/// Which component labels drive enumeration. Title propositions are always
/// the main claim regardless of source.
class LabelAssignment {
 public:
  static LabelAssignment gold() { return LabelAssignment(nullptr); }
  static LabelAssignment predicted(const PredictedLabels& labels) { return LabelAssignment(&labels); }

  ComponentSource source() const { return predicted_ ? ComponentSource::Predicted : ComponentSource::Gold; }
  ComponentLabel label_of(const Thread& thread, const Proposition& prop) const;

 private:
  explicit LabelAssignment(const PredictedLabels* p) : predicted_(p) {}
  const PredictedLabels* predicted_;
};

struct CandidatePair {
  std::string thread_id;
  std::string source_id;
  std::string target_id;
  std::string source_post_id;
  std::string target_post_id;
  RelationKind kind = RelationKind::IntraTurn;
  // source sentence_index - target sentence_index; intra-turn only.
  std::optional<int> sentence_distance;
  // Filters this pair has passed through, in order. The last entry of a
  // removed pair names the filter that removed it.
  std::vector<std::string> filters_applied;
  std::optional<bool> gold;

  PairKey key() const { return {thread_id, source_id, target_id}; }
};

// Gold relations of one kind, keyed by pair.
std::set<PairKey> gold_relation_keys(const Thread& thread, RelationKind kind);

// One pair per (premise s, argumentative t != s) in the post, document order.
std::vector<CandidatePair> enumerate_intra(const Thread& thread, const Post& post, const LabelAssignment& labels);
std::vector<CandidatePair> enumerate_intra(const Thread& thread, const LabelAssignment& labels);
// For each reply R of P: one pair per (claim s in R, argumentative t in P).
// Ancestors scope extends P to every ancestor of R.
std::vector<CandidatePair> enumerate_inter(const Thread& thread, const LabelAssignment& labels,
                                           InterScope scope = InterScope::DirectParent);

struct FilterResult {
  std::vector<CandidatePair> kept;
  std::vector<CandidatePair> removed;
};

std::string window_filter_name(int lo, int hi);
inline constexpr std::string_view kTargetSelectionFilter = "target-selection";
inline constexpr std::string_view kSourceTargetFilter = "source-target-constraint";

// Keeps lo <= sentence_distance <= hi. Throws on inter-turn pairs.
FilterResult apply_window(const std::vector<CandidatePair>& pairs, int lo, int hi);

// One score per proposition of the post, in list order.
using SalienceScorer = std::function<std::vector<double>(const Thread&, const Post&)>;
// Every proposition scores the same; selection falls back to document order.
SalienceScorer constant_scorer();

enum class SelectionGranularity { Proposition, Sentence };

struct TargetSelection {
  std::string post_id;
  std::vector<std::string> selected_ids;  // descending salience
  int k = 0;
};

// Top-k propositions by score, ties broken by document order. In sentence
// mode the k best sentences (score = best proposition in the sentence) are
// chosen and all their propositions selected.
TargetSelection select_targets(const Thread& thread, const Post& post, const SalienceScorer& scorer, int k,
                               SelectionGranularity granularity = SelectionGranularity::Proposition);

// post id -> selection. Pairs whose target post has no entry are untouched.
using SelectionMap = std::map<std::string, TargetSelection>;

FilterResult apply_target_selection(const std::vector<CandidatePair>& pairs, const SelectionMap& selections);
// Drops s->t when s is the target of another pair in the input set, unless t
// is the main claim. All pairs must come from one thread.
FilterResult apply_source_target_constraint(const std::vector<CandidatePair>& pairs,
                                            const std::optional<std::string>& main_claim_id);
// Selection first, then the source/target rule on the surviving pairs.
FilterResult apply_target_constraints(const std::vector<CandidatePair>& pairs, const SelectionMap& selections,
                                      const std::optional<std::string>& main_claim_id);

// `<thread> <source_id> <target_id> <kind> <distance|-> <gold|->` per line.
void write_pair_file(std::ostream& out, const std::vector<CandidatePair>& pairs);
std::vector<CandidatePair> read_pair_file(std::istream& in, const std::string& source = "<pairs>");

}  // namespace threadmine
