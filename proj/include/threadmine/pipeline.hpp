#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threadmine/candidates.hpp"
#include "threadmine/corpus.hpp"
#include "threadmine/features.hpp"
#include "threadmine/models.hpp"
#include "threadmine/salience.hpp"

namespace threadmine {

// All runs components, then intra-turn and inter-turn relations under both
// gold and predicted components.
enum class Task { Components, Intra, Inter, All };
enum class ScorerKind { InternalLinear, ExternalFile, None };
enum class DiscourseMode { Off, Heuristic, ExternalFile };
enum class SalienceSource { Internal, Constant };

std::string_view to_string(Task t);
std::string_view to_string(ScorerKind s);
std::string_view to_string(DiscourseMode d);
std::string_view to_string(ComponentSource s);
std::string_view to_string(InterScope s);
std::string_view to_string(SelectionGranularity g);
std::string_view to_string(SalienceSource s);

struct Window {
  int lo = 0;
  int hi = 5;
  bool operator==(const Window&) const = default;
};

struct ExperimentConfig {
  Task task = Task::Intra;
  ComponentSource component_source = ComponentSource::Gold;
  ScorerKind scorer = ScorerKind::InternalLinear;
  DiscourseMode discourse = DiscourseMode::Off;
  bool ensemble = false;
  std::optional<Window> window;
  std::optional<int> target_k;
  bool source_target_constraint = false;
  std::uint64_t seed = 1;
  InterScope inter_scope = InterScope::DirectParent;
  SelectionGranularity granularity = SelectionGranularity::Proposition;
  SalienceSource salience = SalienceSource::Internal;
  double test_fraction = 0.2;
  std::string scores_file;
  std::string discourse_file;

  // Throws Error listing every broken invariant.
  void validate() const;
  // key=value pairs in a fixed order; parse_config accepts the same keys.
  std::vector<std::pair<std::string, std::string>> fields() const;
};

void set_config_field(ExperimentConfig& cfg, std::string_view key, std::string_view value);
// `key = value` lines, `#` comments. Not validated; call validate() after
// applying overrides.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Positive-class counts and percentages. Undefined precision or recall (a
/// zero denominator) is reported as 0 with the flag cleared.
struct PrfMetrics {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  bool precision_defined = false;
  bool recall_defined = false;

  static PrfMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

// ---- components ----

struct ComponentModel {
  FeatureVocabulary vocab;
  LinearModel model;

  ComponentLabel predict(const Post& post, std::size_t index) const;
  bool operator==(const ComponentModel&) const = default;
};

// Class order Claim, Premise, NonArgument; title propositions are excluded.
ComponentModel train_component_model(const std::vector<Thread>& threads, const LinearHyper& hyper);
void write_component_model(std::ostream& out, const ComponentModel& model);
ComponentModel read_component_model(std::string_view text, const std::string& source = "<component model>");

// Title propositions get MainClaim; every other proposition the model argmax.
PredictedLabels classify_components(const std::vector<Thread>& threads, const ComponentModel& model);

struct ComponentEvaluation {
  std::map<ComponentLabel, PrfMetrics> per_class;  // Claim, Premise, NonArgument
  double macro_f1 = 0.0;
  std::size_t propositions = 0;
};

// Over non-title propositions; every one of them needs a prediction.
ComponentEvaluation evaluate_components(const std::vector<Thread>& threads, const PredictedLabels& predicted);

// ---- relations ----

/// Where pair discourse labels come from.
class DiscourseSource {
 public:
  static DiscourseSource heuristic(const DiscourseRules& rules = DiscourseRules::builtin());
  static DiscourseSource external(const DiscourseLabelMap& labels);

  // Throws naming the pair when an external map lacks it.
  std::string label(const ThreadIndex& index, const CandidatePair& pair) const;

 private:
  const DiscourseRules* rules_ = nullptr;
  const DiscourseLabelMap* labels_ = nullptr;
};

/// Boosted stumps over the one-hot discourse label of a pair.
struct DiscourseVoter {
  DiscourseLabelSet labels;
  BoostedStumps stumps;
  Threshold threshold;

  double score(std::string_view label) const;
  bool operator==(const DiscourseVoter& o) const {
    return labels.labels() == o.labels.labels() && stumps == o.stumps && threshold.value == o.threshold.value;
  }
};

struct RelationModel {
  RelationKind kind = RelationKind::IntraTurn;
  bool rst_features = false;  // "rst=<label>" appended to the linear features
  FeatureVocabulary vocab;
  LinearModel linear;
  Threshold threshold;
  std::optional<DiscourseVoter> voter;
};

struct RelationTrainOptions {
  RelationKind kind = RelationKind::IntraTurn;
  std::optional<Window> window;
  InterScope scope = InterScope::DirectParent;
  bool rst_features = false;
  bool train_voter = false;
  LinearHyper hyper;
  BoostHyper boost;
  double dev_fraction = 0.1;
  // Positive examples weigh negatives/positives times this factor.
  double positive_weight_scale = 1.0;
};

// Trains on gold-label candidate pairs; thresholds are tuned on a seeded dev
// split of the threads, or on the training pairs when the dev split has no
// positives.
RelationModel train_relation_model(const std::vector<Thread>& threads, const std::optional<DiscourseSource>& discourse,
                                   const RelationTrainOptions& options);
void write_relation_model(std::ostream& out, const RelationModel& model);
RelationModel read_relation_model(std::string_view text, const std::string& source = "<relation model>");

// TP/FP/FN of the positive class. Predictions outside the universe throw.
PrfMetrics evaluate_relations(const std::set<PairKey>& gold, const std::set<PairKey>& universe,
                              const std::set<PairKey>& predicted);
// Every candidate pair predicted positive.
PredictionSet all_relations_baseline(const std::vector<CandidatePair>& pairs);

// ---- experiments ----

struct ExperimentModels {
  const ComponentModel* components = nullptr;
  const RelationModel* intra = nullptr;
  const RelationModel* inter = nullptr;
  const SalienceModel* salience = nullptr;
  const ScoreTable* external_scores = nullptr;
  const DiscourseLabelMap* external_discourse = nullptr;
};

/// Flat report. Machine keys are `<task>.<metric>.<setting>` with setting
/// gold or pred; values use shortest round-trip formatting.
struct EvalReport {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string pair_dump;  // `<thread> <src> <tgt> <score|-> <pred> <gold>`
  std::string human;
  double wall_clock_seconds = 0.0;  // human report only

  void add(std::string key, std::string value);
  void add(std::string key, double value);
  void add(std::string key, std::size_t value);
  std::string machine() const;
  std::optional<std::string> get(std::string_view key) const;
  double number(std::string_view key) const;
};

// Problems found in a machine report: F = 2PR/(P+R) within 1e-9 for every
// precision/recall/f1 triple, and enumerated = removed + scored for every
// pair-count group.
std::vector<std::string> validate_report(std::string_view machine);

EvalReport run_experiment(const ExperimentConfig& cfg, const std::vector<Thread>& test,
                          const ExperimentModels& models);

struct TrainedModels {
  std::optional<ComponentModel> components;
  std::optional<RelationModel> intra;
  std::optional<RelationModel> inter;

  // Pointers into this object; salience and external inputs are left unset.
  ExperimentModels view() const;
};

struct TrainingHyper {
  LinearHyper component{1e-4, 0.5, 40, 32, 1};
  LinearHyper relation{1e-4, 0.5, 30, 32, 1};
  BoostHyper boost;
};

// The component and relation models a config needs (seeds taken from cfg).
// External discourse labels are required when cfg.discourse says so.
TrainedModels train_models(const ExperimentConfig& cfg, const std::vector<Thread>& train,
                           const TrainingHyper& hyper = {}, const DiscourseLabelMap* external_discourse = nullptr);

struct PipelineRun {
  std::vector<std::string> train_ids, test_ids;
  EvalReport report;
};

// Seeded split, training and evaluation in one go. `inputs` supplies the
// salience model and external files; its trained-model pointers are ignored.
PipelineRun run_full_pipeline(const ExperimentConfig& cfg, const std::vector<Thread>& corpus,
                              const ExperimentModels& inputs, const TrainingHyper& hyper = {});

// One intra-turn report per window [lo, lo+1] .. [lo, max_hi].
std::vector<EvalReport> sweep_window(const ExperimentConfig& cfg, const std::vector<Thread>& test,
                                     const ExperimentModels& models, int lo, int max_hi);
std::string format_window_sweep(const std::vector<EvalReport>& reports, const std::vector<Window>& windows,
                                const ExperimentConfig& cfg);

}  // namespace threadmine
