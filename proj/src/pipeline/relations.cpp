#include <algorithm>
#include <ostream>
#include <sstream>

#include "threadmine/pipeline.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

DiscourseSource DiscourseSource::heuristic(const DiscourseRules& rules) {
  DiscourseSource s;
  s.rules_ = &rules;
  return s;
}

DiscourseSource DiscourseSource::external(const DiscourseLabelMap& labels) {
  DiscourseSource s;
  s.labels_ = &labels;
  return s;
}

std::string DiscourseSource::label(const ThreadIndex& index, const CandidatePair& pair) const {
  if (labels_) {
    auto it = labels_->find(pair.key());
    if (it == labels_->end()) throw Error("no discourse label for pair " + to_string(pair.key()));
    return it->second;
  }
  return heuristic_discourse_label(index, pair, *rules_);
}

double DiscourseVoter::score(std::string_view label) const { return stumps.score(discourse_onehot(label, labels)); }

namespace {

struct PairSample {
  NamedFeatures features;
  std::string discourse;
  bool gold = false;
  bool dev = false;
};

std::vector<CandidatePair> training_pairs(const Thread& thread, const RelationTrainOptions& o) {
  const auto labels = LabelAssignment::gold();
  if (o.kind == RelationKind::InterTurn) return enumerate_inter(thread, labels, o.scope);
  auto pairs = enumerate_intra(thread, labels);
  if (o.window) pairs = apply_window(pairs, o.window->lo, o.window->hi).kept;
  return pairs;
}

Threshold tune_on(const std::vector<double>& scores, const std::vector<PairSample>& samples, bool want_dev,
                  const std::string& name) {
  std::vector<double> s;
  std::vector<bool> y;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].dev == want_dev) {
      s.push_back(scores[i]);
      y.push_back(samples[i].gold);
    }
  }
  return tune_threshold(s, y, name + ":" + std::to_string(s.size()));
}

Threshold tune_with_fallback(const std::vector<double>& scores, const std::vector<PairSample>& samples) {
  const bool dev_has_positive =
      std::any_of(samples.begin(), samples.end(), [](const PairSample& p) { return p.dev && p.gold; });
  return dev_has_positive ? tune_on(scores, samples, true, "dev") : tune_on(scores, samples, false, "train");
}

std::string threshold_line(std::string_view key, const Threshold& t) {
  return std::string(key) + " " + format_double(t.value) + " " + format_double(t.f1) + " " + t.tuned_on + "\n";
}

Threshold parse_threshold(std::string_view rest, LineCursor& in) {
  auto f = split_ws(rest);
  if (f.size() != 3) in.fail("threshold line needs <value> <f1> <tuned_on>");
  Threshold t;
  t.value = parse_double(f[0]);
  t.f1 = parse_double(f[1]);
  t.tuned_on = std::string(f[2]);
  return t;
}

}  // namespace

RelationModel train_relation_model(const std::vector<Thread>& threads, const std::optional<DiscourseSource>& discourse,
                                   const RelationTrainOptions& o) {
  if ((o.rst_features || o.train_voter) && !discourse) throw Error("discourse features need a discourse source");
  if (threads.empty()) throw Error("no threads to train the relation model on");

  std::vector<bool> is_dev(threads.size(), false);
  if (threads.size() >= 2) {
    std::vector<std::size_t> order(threads.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(o.hyper.seed ^ 0x9e3779b97f4a7c15ULL);
    shuffle(order, rng);
    const auto n_dev = std::clamp<long long>(std::llround(o.dev_fraction * static_cast<double>(threads.size())), 1,
                                             static_cast<long long>(threads.size()) - 1);
    for (long long i = 0; i < n_dev; ++i) is_dev[order[static_cast<std::size_t>(i)]] = true;
  }

  std::vector<PairSample> samples;
  for (std::size_t t = 0; t < threads.size(); ++t) {
    const ThreadIndex index(threads[t]);
    for (const auto& pair : training_pairs(threads[t], o)) {
      PairSample s;
      if (discourse) s.discourse = discourse->label(index, pair);
      s.features = pair_feature_names(index, pair, o.rst_features ? std::optional(s.discourse) : std::nullopt);
      s.gold = pair.gold.value_or(false);
      s.dev = is_dev[t];
      samples.push_back(std::move(s));
    }
  }

  std::vector<NamedFeatures> train_features;
  std::size_t pos = 0, neg = 0;
  for (const auto& s : samples) {
    if (s.dev) continue;
    train_features.push_back(s.features);
    (s.gold ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) {
    throw Error(std::string("relation training pairs (") + std::string(to_string(o.kind)) +
                ") need both related and unrelated pairs");
  }
  const double pos_weight = static_cast<double>(neg) / static_cast<double>(pos) * o.positive_weight_scale;

  RelationModel model;
  model.kind = o.kind;
  model.rst_features = o.rst_features;
  model.vocab = FeatureVocabulary::build(train_features, 2, is_unigram_feature);
  std::vector<LabeledExample> examples;
  for (const auto& s : samples) {
    if (!s.dev) examples.push_back({model.vocab.encode(s.features), s.gold ? 1 : 0, s.gold ? pos_weight : 1.0});
  }
  model.linear = train_linear(examples, {"none", "related"}, model.vocab, o.hyper);

  std::vector<double> scores;
  for (const auto& s : samples) scores.push_back(model.linear.positive_score(model.vocab.encode(s.features)));
  model.threshold = tune_with_fallback(scores, samples);

  if (o.train_voter) {
    DiscourseVoter voter{DiscourseLabelSet::builtin(), {}, {}};
    std::vector<LabeledExample> onehots;
    for (const auto& s : samples) {
      if (!s.dev) onehots.push_back({discourse_onehot(s.discourse, voter.labels), s.gold ? 1 : 0, s.gold ? pos_weight : 1.0});
    }
    voter.stumps = train_boosted_stumps(onehots, voter.labels.id(), o.boost);
    std::vector<double> vs;
    for (const auto& s : samples) vs.push_back(voter.score(s.discourse));
    voter.threshold = tune_with_fallback(vs, samples);
    model.voter = std::move(voter);
  }
  return model;
}

void write_relation_model(std::ostream& out, const RelationModel& m) {
  out << "threadmine-relation 1\n";
  out << "kind " << (m.kind == RelationKind::IntraTurn ? "intra" : "inter") << '\n';
  out << "rst_features " << (m.rst_features ? 1 : 0) << '\n';
  out << threshold_line("threshold", m.threshold);
  write_linear_model(out, m.linear, m.vocab);
  out << "voter " << (m.voter ? 1 : 0) << '\n';
  if (m.voter) {
    out << "labels " << m.voter->labels.size();
    for (const auto& l : m.voter->labels.labels()) out << ' ' << l;
    out << '\n';
    out << threshold_line("voter_threshold", m.voter->threshold);
    write_boosted_stumps(out, m.voter->stumps);
  }
}

RelationModel read_relation_model(std::string_view text, const std::string& source) {
  LineCursor in(text, source);
  if (in.at_end() || trim(in.next()) != "threadmine-relation 1") in.fail("not a relation model file");
  RelationModel m;
  const auto kind = trim(in.expect("kind"));
  if (kind != "intra" && kind != "inter") in.fail("kind must be intra or inter");
  m.kind = kind == "intra" ? RelationKind::IntraTurn : RelationKind::InterTurn;
  m.rst_features = trim(in.expect("rst_features")) == "1";
  m.threshold = parse_threshold(in.expect("threshold"), in);
  auto [linear, vocab] = read_linear_model(in);
  m.linear = std::move(linear);
  m.vocab = std::move(vocab);
  if (trim(in.expect("voter")) == "1") {
    auto f = split_ws(in.expect("labels"));
    if (f.empty() || static_cast<std::size_t>(parse_int(f[0])) != f.size() - 1) in.fail("bad label list");
    std::vector<std::string> labels(f.begin() + 1, f.end());
    DiscourseVoter voter{DiscourseLabelSet::from_labels(labels), {}, {}};
    voter.threshold = parse_threshold(in.expect("voter_threshold"), in);
    voter.stumps = read_boosted_stumps(in);
    if (voter.stumps.vocabulary_id() != voter.labels.id()) in.fail("voter label set does not match its stumps");
    m.voter = std::move(voter);
  }
  return m;
}

PrfMetrics evaluate_relations(const std::set<PairKey>& gold, const std::set<PairKey>& universe,
                              const std::set<PairKey>& predicted) {
  std::size_t tp = 0, fp = 0;
  for (const auto& k : predicted) {
    if (!universe.count(k)) throw Error("predicted pair " + to_string(k) + " is outside the candidate universe");
    (gold.count(k) ? tp : fp) += 1;
  }
  return PrfMetrics::from_counts(tp, fp, gold.size() - tp);
}

PredictionSet all_relations_baseline(const std::vector<CandidatePair>& pairs) {
  PredictionSet out;
  std::vector<PairKey> keys;
  for (const auto& p : pairs) {
    keys.push_back(p.key());
    out.positives.insert(p.key());
  }
  out.universe = pair_universe_id(std::move(keys));
  return out;
}

}  // namespace threadmine
