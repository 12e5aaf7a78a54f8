#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "threadmine/candidates.hpp"
#include "threadmine/distant.hpp"
#include "threadmine/features.hpp"
#include "threadmine/models.hpp"
#include "threadmine/textproc.hpp"

namespace threadmine {

struct SalienceLexicons {
  Lexicon claim_indicators;
  Lexicon second_person;
  Lexicon stopwords;

  static const SalienceLexicons& builtin();
};

// Cosine of each unit's TF-IDF vector with the post centroid; units of one
// post are the documents for idf (smoothed: log((1+N)/(1+df)) + 1).
std::vector<double> tfidf_centrality(const std::vector<std::string>& units, const Lexicon& stopwords);

// Features of units[i] within its post: position bucket ("pos=0".."pos=8",
// "pos>=9"), relative position, first/last flags, log length, centrality,
// claim-indicator flags and count, second-person count.
NamedFeatures salience_feature_names(const std::vector<std::string>& units, std::size_t i,
                                     const std::vector<double>& centrality,
                                     const SalienceLexicons& lex = SalienceLexicons::builtin());
std::vector<NamedFeatures> salience_features_for_post(const std::vector<std::string>& units,
                                                      const SalienceLexicons& lex = SalienceLexicons::builtin());

struct SalienceExample {
  std::string thread_id;
  std::string post_id;
  std::size_t unit_index = 0;
  std::string text;
  NamedFeatures features;
  bool label = false;
};

// Parent post bodies by post id.
using PostTexts = std::map<std::string, std::string>;
PostTexts post_texts_from_dump(const std::vector<DumpComment>& comments);

// One example per sentence of every quoted post, positive when some record's
// parent span overlaps the sentence. Posts without text are skipped and
// counted. Examples come grouped by post, posts in (thread, post) order.
std::vector<SalienceExample> build_salience_dataset(const std::vector<QrRecord>& records, const PostTexts& posts,
                                                    SkipReport& skips);

// QR extraction over a whole dump followed by build_salience_dataset.
std::vector<SalienceExample> salience_examples_from_dump(std::istream& dump, SkipReport& skips,
                                                         const QrConfig& config = {});

void write_salience_dataset(std::ostream& out, const std::vector<SalienceExample>& examples);

// recall[k-1] = gold units inside the top k of their post / all gold units.
struct RecallCurve {
  std::vector<double> recall;
  std::size_t gold = 0;
  std::size_t max_units = 0;  // largest post

  double at(std::size_t k) const;
};

using UnitScores = std::vector<std::vector<double>>;  // per post, per unit

// Examples must be grouped by post. Ties rank in document order.
RecallCurve recall_curve(const std::vector<SalienceExample>& examples, const UnitScores& scores, std::size_t max_k);
// First-k-units baseline.
RecallCurve position_baseline(const std::vector<SalienceExample>& examples, std::size_t max_k);

// K whose point lies farthest above the chord from K=1 to K=max; ties take
// the smaller K.
int select_knee(const RecallCurve& curve);

struct SalienceModel {
  FeatureVocabulary vocab;
  LinearModel model;

  std::vector<double> score_units(const std::vector<std::string>& units) const;
  bool operator==(const SalienceModel&) const = default;
};

struct SalienceTraining {
  SalienceModel model;
  std::vector<std::string> heldout_threads;
  RecallCurve heldout;
  RecallCurve baseline;
  int selected_k = 0;
};

inline constexpr double kReferenceTargetRecallAt5 = 62.7;

// Holds out heldout_fraction of the threads (seeded) for recall@K.
SalienceTraining train_salience(const std::vector<SalienceExample>& examples, const LinearHyper& hyper,
                                double heldout_fraction = 0.1, std::size_t max_k = 10);

UnitScores score_examples(const SalienceModel& model, const std::vector<SalienceExample>& examples);

// Adapter for target selection: scores the propositions of a post. Holds a
// reference to the model.
SalienceScorer salience_scorer(const SalienceModel& model);

void write_salience_model(std::ostream& out, const SalienceModel& model);
SalienceModel read_salience_model(std::string_view text, const std::string& source = "<salience model>");

std::string format_recall_report(const SalienceTraining& training);

}  // namespace threadmine
