#include <ostream>
#include <sstream>

#include "threadmine/pipeline.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

namespace {

constexpr ComponentLabel kClasses[] = {ComponentLabel::Claim, ComponentLabel::Premise, ComponentLabel::NonArgument};
const std::vector<std::string> kClassNames = {"Claim", "Premise", "NonArgument"};

int class_index(ComponentLabel label) {
  for (int i = 0; i < 3; ++i) {
    if (kClasses[i] == label) return i;
  }
  return -1;
}

}  // namespace

PrfMetrics PrfMetrics::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrfMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision_defined = tp + fp > 0;
  m.recall_defined = tp + fn > 0;
  if (m.precision_defined) m.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (m.recall_defined) m.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

ComponentLabel ComponentModel::predict(const Post& post, std::size_t index) const {
  if (post.propositions.at(index).in_title) return ComponentLabel::MainClaim;
  return kClasses[model.predict(vocab.encode(component_feature_names(post, index)))];
}

ComponentModel train_component_model(const std::vector<Thread>& threads, const LinearHyper& hyper) {
  std::vector<NamedFeatures> samples;
  std::vector<int> labels;
  for (const auto& thread : threads) {
    for (const auto& post : thread.posts) {
      for (std::size_t i = 0; i < post.propositions.size(); ++i) {
        const auto& prop = post.propositions[i];
        const int cls = class_index(prop.label);
        if (prop.in_title || cls < 0) continue;
        samples.push_back(component_feature_names(post, i));
        labels.push_back(cls);
      }
    }
  }
  if (samples.empty()) throw Error("no non-title propositions to train the component model on");
  ComponentModel out;
  out.vocab = FeatureVocabulary::build(samples, 2, is_unigram_feature);
  std::vector<LabeledExample> examples;
  for (std::size_t i = 0; i < samples.size(); ++i) examples.push_back({out.vocab.encode(samples[i]), labels[i], 1.0});
  out.model = train_linear(examples, kClassNames, out.vocab, hyper);
  return out;
}

void write_component_model(std::ostream& out, const ComponentModel& model) {
  write_linear_model(out, model.model, model.vocab);
}

ComponentModel read_component_model(std::string_view text, const std::string& source) {
  auto [model, vocab] = read_linear_model(text, source);
  if (model.class_names() != kClassNames) throw Error(source + ": not a component model (classes differ)");
  return {std::move(vocab), std::move(model)};
}

PredictedLabels classify_components(const std::vector<Thread>& threads, const ComponentModel& model) {
  PredictedLabels out;
  for (const auto& thread : threads) {
    auto& labels = out[thread.id];
    for (const auto& post : thread.posts) {
      for (std::size_t i = 0; i < post.propositions.size(); ++i) {
        labels[post.propositions[i].id] = model.predict(post, i);
      }
    }
  }
  return out;
}

ComponentEvaluation evaluate_components(const std::vector<Thread>& threads, const PredictedLabels& predicted) {
  std::size_t tp[3] = {}, fp[3] = {}, fn[3] = {};
  ComponentEvaluation eval;
  for (const auto& thread : threads) {
    auto t = predicted.find(thread.id);
    for (const auto& post : thread.posts) {
      for (const auto& prop : post.propositions) {
        if (prop.in_title) continue;
        if (t == predicted.end() || !t->second.count(prop.id)) {
          throw Error("component evaluation: no prediction for '" + prop.id + "' in thread '" + thread.id + "'");
        }
        const int g = class_index(prop.label);
        const int p = class_index(t->second.at(prop.id));
        ++eval.propositions;
        if (g == p && g >= 0) {
          ++tp[g];
          continue;
        }
        if (p >= 0) ++fp[p];
        if (g >= 0) ++fn[g];
      }
    }
  }
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    eval.per_class[kClasses[c]] = PrfMetrics::from_counts(tp[c], fp[c], fn[c]);
    sum += eval.per_class[kClasses[c]].f1;
  }
  eval.macro_f1 = sum / 3.0;
  return eval;
}

}  // namespace threadmine
