#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "threadmine/candidates.hpp"
#include "threadmine/features.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

struct LabeledExample {
  SparseFeatureVector x;
  int label = 0;
  double weight = 1.0;
};

struct LinearHyper {
  double l2 = 1e-4;
  double learning_rate = 0.5;
  int epochs = 40;
  int batch_size = 32;
  std::uint64_t seed = 1;

  bool operator==(const LinearHyper&) const = default;
};

/// Multinomial logistic regression over a sparse vocabulary. Weights are
/// stored class-major: weight(c, j) = weights[c * dim + j].
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::vector<std::string> class_names, std::size_t dim, std::string vocabulary_id, LinearHyper hyper);

  std::size_t num_classes() const { return class_names_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::string& vocabulary_id() const { return vocabulary_id_; }
  const LinearHyper& hyper() const { return hyper_; }

  double& weight(std::size_t c, std::size_t j) { return weights_[c * dim_ + j]; }
  double weight(std::size_t c, std::size_t j) const { return weights_[c * dim_ + j]; }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }

  // Objective after initialization and after every epoch.
  const std::vector<double>& loss_trajectory() const { return loss_trajectory_; }
  std::vector<double>& loss_trajectory() { return loss_trajectory_; }

  std::vector<double> probabilities(const SparseFeatureVector& x) const;
  // Argmax; ties go to the lowest class index.
  int predict(const SparseFeatureVector& x) const;
  // Probability of class 1 for binary models.
  double positive_score(const SparseFeatureVector& x) const;

  bool operator==(const LinearModel&) const = default;

 private:
  void check_vocabulary(const SparseFeatureVector& x) const;
  std::vector<double> logits(const SparseFeatureVector& x) const;

  std::vector<std::string> class_names_;
  std::size_t dim_ = 0;
  std::string vocabulary_id_;
  LinearHyper hyper_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  std::vector<double> loss_trajectory_;
};

// Weighted mean cross-entropy plus l2/2 * ||W||^2 (bias unregularized).
// Gradients are written when the pointers are non-null.
double linear_objective(const LinearModel& model, const std::vector<LabeledExample>& examples, double l2,
                        std::vector<double>* grad_weights = nullptr, std::vector<double>* grad_bias = nullptr);

// Mini-batch gradient descent from zero weights. Requires two or more
// distinct labels.
LinearModel train_linear(const std::vector<LabeledExample>& examples, std::vector<std::string> class_names,
                         const FeatureVocabulary& vocab, const LinearHyper& hyper);

void write_linear_model(std::ostream& out, const LinearModel& model, const FeatureVocabulary& vocab);
std::pair<LinearModel, FeatureVocabulary> read_linear_model(std::string_view text,
                                                            const std::string& source = "<model>");
std::pair<LinearModel, FeatureVocabulary> read_linear_model(LineCursor& in);

struct Stump {
  std::uint32_t feature = 0;
  double threshold = 0.0;  // x[feature] <= threshold goes left
  double left = 0.0;
  double right = 0.0;

  bool operator==(const Stump&) const = default;
};

struct BoostHyper {
  int rounds = 50;
  double learning_rate = 0.3;
  double lambda = 1.0;  // leaf value regularizer

  bool operator==(const BoostHyper&) const = default;
};

/// Additive logistic model over decision stumps. Stored leaf values already
/// include the learning rate.
class BoostedStumps {
 public:
  BoostedStumps() = default;
  BoostedStumps(std::string vocabulary_id, BoostHyper hyper) : vocabulary_id_(std::move(vocabulary_id)), hyper_(hyper) {}

  const std::string& vocabulary_id() const { return vocabulary_id_; }
  const BoostHyper& hyper() const { return hyper_; }
  double learning_rate() const { return hyper_.learning_rate; }
  std::vector<Stump>& rounds() { return rounds_; }
  const std::vector<Stump>& rounds() const { return rounds_; }
  std::vector<double>& loss_trajectory() { return loss_trajectory_; }
  const std::vector<double>& loss_trajectory() const { return loss_trajectory_; }

  double margin(const SparseFeatureVector& x) const;
  double score(const SparseFeatureVector& x) const;

  bool operator==(const BoostedStumps&) const = default;

 private:
  std::string vocabulary_id_;
  BoostHyper hyper_;
  std::vector<Stump> rounds_;
  std::vector<double> loss_trajectory_;
};

double sigmoid(double z);

// Labels must be 0/1 with both present. Each round fits a Newton stump to the
// logistic-loss gradient; a round that would raise the loss is shrunk until
// it does not.
BoostedStumps train_boosted_stumps(const std::vector<LabeledExample>& examples, const std::string& vocabulary_id,
                                   const BoostHyper& hyper = {});
double boosted_loss(const BoostedStumps& model, const std::vector<LabeledExample>& examples);

void write_boosted_stumps(std::ostream& out, const BoostedStumps& model);
BoostedStumps read_boosted_stumps(LineCursor& in);

struct Threshold {
  double value = 0.5;
  std::string tuned_on;
  std::string objective = "F1-positive";
  double f1 = 0.0;
};

// Scores >= value are positive. Candidates are the distinct scores plus 0.5;
// on equal F1 the lower threshold wins, and between thresholds giving the
// same predictions an observed score wins over 0.5.
Threshold tune_threshold(const std::vector<double>& scores, const std::vector<bool>& labels,
                         std::string tuned_on = "");
double f1_at(const std::vector<double>& scores, const std::vector<bool>& labels, double threshold);

// Digest of the sorted pair keys a prediction set is defined over.
std::string pair_universe_id(std::vector<PairKey> keys);

struct PredictionSet {
  std::string universe;
  std::set<PairKey> positives;
};

PredictionSet ensemble_or(const PredictionSet& a, const PredictionSet& b);

/// Externally computed pair scores, `<thread> <source_id> <target_id> <score>`.
class ScoreTable {
 public:
  static ScoreTable parse(std::string_view text, const std::string& source = "<scores>");
  void set(const PairKey& key, double score);

  // Throws naming the pair when it is missing.
  double at(const PairKey& key) const;
  bool contains(const PairKey& key) const { return scores_.count(key) > 0; }
  std::size_t size() const { return scores_.size(); }
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

 private:
  std::map<PairKey, double> scores_;
  std::string provenance_;
};

ScoreTable load_external_scores(const std::filesystem::path& path);

}  // namespace threadmine
