#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threadmine/candidates.hpp"
#include "threadmine/corpus.hpp"
#include "threadmine/textproc.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

struct NamedFeature {
  std::string name;
  double value = 0.0;
};
// Feature names with values before vocabulary lookup. Repeated names add up.
using NamedFeatures = std::vector<NamedFeature>;

double feature_value(const NamedFeatures& features, std::string_view name);

/// Sparse vector tied to the vocabulary that produced it. Entries are sorted
/// by index and never zero.
struct SparseFeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  std::string vocabulary_id;

  double get(std::uint32_t index) const;
  bool operator==(const SparseFeatureVector&) const = default;
};

/// Bijective feature-name <-> index map. Index 0 is the reserved OOV slot.
class FeatureVocabulary {
 public:
  static constexpr std::uint32_t kOovIndex = 0;
  static constexpr std::string_view kOovName = "<oov>";

  FeatureVocabulary();

  // Counts every name in the samples; names passing `prunable` need at least
  // min_count occurrences, all others one. Indices follow name order, so the
  // result does not depend on sample order.
  static FeatureVocabulary build(const std::vector<NamedFeatures>& samples, int min_count,
                                 const std::function<bool(std::string_view)>& prunable);

  std::uint32_t add(std::string_view name);  // unfrozen vocabularies only
  void freeze();
  bool frozen() const { return frozen_; }

  std::optional<std::uint32_t> find(std::string_view name) const;
  std::uint32_t index_or_oov(std::string_view name) const;
  const std::string& name(std::uint32_t index) const { return names_.at(index); }
  // Number of slots, OOV included.
  std::size_t size() const { return names_.size(); }
  int min_count() const { return min_count_; }
  // Content digest; stable across runs for the same names.
  const std::string& id() const;

  // Requires a frozen vocabulary. Unknown names land in the OOV slot.
  SparseFeatureVector encode(const NamedFeatures& features) const;

  std::string serialize() const;
  static FeatureVocabulary parse(LineCursor& in);

  bool operator==(const FeatureVocabulary& o) const { return names_ == o.names_ && frozen_ == o.frozen_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  bool frozen_ = false;
  int min_count_ = 1;
  mutable std::string id_;
};

struct FeatureLexicons {
  Lexicon first_person;
  Lexicon modals;
  Lexicon negation;
  Lexicon forward_markers;
  Lexicon backward_markers;
  Lexicon stopwords;

  static const FeatureLexicons& builtin();
};

// "w=" prefix marks unigram features; only those are pruned by min_count.
inline bool is_unigram_feature(std::string_view name) {
  return name.rfind("w=", 0) == 0 || name.find(":w=") != std::string_view::npos;
}

// Component classification features for post.propositions[index]: count
// weighted unigrams (numbers folded to NUM), log(1 + token count), relative position,
// first/last/title flags, question mark, first-person and modal counts, and
// forward/backward marker flags.
NamedFeatures component_feature_names(const Post& post, std::size_t index,
                                      const FeatureLexicons& lex = FeatureLexicons::builtin());
SparseFeatureVector component_features(const Post& post, std::size_t index, const FeatureVocabulary& vocab,
                                       const FeatureLexicons& lex = FeatureLexicons::builtin());

// Content-token Jaccard overlap (stopwords and punctuation excluded).
double content_overlap(std::string_view a, std::string_view b, const Lexicon& stopwords);
bool has_negation(std::string_view text, const Lexicon& negation);
// Sentence-distance bucket name: "<=-2", "-1", "0", "+1", "+2", ">=+3".
std::string distance_bucket(int distance);

/// Discourse relation inventory used by the one-hot encoding. Known labels
/// occupy [0, size()); unknown labels map to oov_index() == size().
class DiscourseLabelSet {
 public:
  static DiscourseLabelSet parse(std::string_view text);
  static const DiscourseLabelSet& builtin();
  static DiscourseLabelSet from_labels(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  std::uint32_t oov_index() const { return static_cast<std::uint32_t>(labels_.size()); }
  std::optional<std::uint32_t> index_of(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& id() const { return id_; }

 private:
  std::vector<std::string> labels_;
  std::string id_;
};

// Exactly one entry of 1.0. Unknown labels use the OOV slot and warn.
SparseFeatureVector discourse_onehot(std::string_view label, const DiscourseLabelSet& labels);

/// Ordered marker rules; the first label whose marker occurs wins.
class DiscourseRules {
 public:
  static DiscourseRules parse(std::string_view text);
  static const DiscourseRules& builtin();

  std::string label_for(std::string_view text) const;
  const std::string& default_label() const { return default_label_; }

 private:
  struct Rule {
    std::string label;
    Lexicon markers;
  };
  std::vector<Rule> rules_;
  std::string default_label_ = "Elaboration";
};

// Label of the two proposition texts concatenated in document order (the
// earlier proposition first; inter-turn targets precede their replies).
std::string heuristic_discourse_label(const ThreadIndex& index, const CandidatePair& pair,
                                      const DiscourseRules& rules = DiscourseRules::builtin());

// `<thread> <source_id> <target_id> <label>` per line.
using DiscourseLabelMap = std::map<PairKey, std::string>;
DiscourseLabelMap read_discourse_label_file(std::istream& in, const std::string& source = "<labels>");

// Pair features: source and target component features under "src:" and
// "tgt:", content overlap, negation flags, distance bucket (intra only),
// same-author and source-is-reply flags, plus "rst=<label>" when given.
NamedFeatures pair_feature_names(const ThreadIndex& index, const CandidatePair& pair,
                                 const std::optional<std::string>& discourse_label = std::nullopt,
                                 const FeatureLexicons& lex = FeatureLexicons::builtin());
SparseFeatureVector pair_features(const ThreadIndex& index, const CandidatePair& pair, const FeatureVocabulary& vocab,
                                  const std::optional<std::string>& discourse_label = std::nullopt);

}  // namespace threadmine
