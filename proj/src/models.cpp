#include "threadmine/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace threadmine {

LinearModel::LinearModel(std::vector<std::string> class_names, std::size_t dim, std::string vocabulary_id,
                         LinearHyper hyper)
    : class_names_(std::move(class_names)),
      dim_(dim),
      vocabulary_id_(std::move(vocabulary_id)),
      hyper_(hyper),
      weights_(class_names_.size() * dim, 0.0),
      bias_(class_names_.size(), 0.0) {}

void LinearModel::check_vocabulary(const SparseFeatureVector& x) const {
  if (x.vocabulary_id != vocabulary_id_) {
    throw Error("feature vector from vocabulary " + x.vocabulary_id + " scored by a model trained on " +
                vocabulary_id_);
  }
}

std::vector<double> LinearModel::logits(const SparseFeatureVector& x) const {
  std::vector<double> z = bias_;
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double* w = weights_.data() + c * dim_;
    for (const auto& [j, v] : x.entries) {
      if (j < dim_) z[c] += w[j] * v;
    }
  }
  return z;
}

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

}  // namespace

std::vector<double> LinearModel::probabilities(const SparseFeatureVector& x) const {
  check_vocabulary(x);
  auto z = logits(x);
  softmax_inplace(z);
  return z;
}

int LinearModel::predict(const SparseFeatureVector& x) const {
  check_vocabulary(x);
  const auto z = logits(x);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double LinearModel::positive_score(const SparseFeatureVector& x) const {
  if (num_classes() != 2) throw Error("positive_score needs a binary model");
  return probabilities(x)[1];
}

double linear_objective(const LinearModel& model, const std::vector<LabeledExample>& examples, double l2,
                        std::vector<double>* grad_weights, std::vector<double>* grad_bias) {
  const std::size_t C = model.num_classes(), D = model.dim();
  if (grad_weights) grad_weights->assign(C * D, 0.0);
  if (grad_bias) grad_bias->assign(C, 0.0);
  double total_weight = 0.0, loss = 0.0;
  for (const auto& ex : examples) total_weight += ex.weight;
  if (total_weight <= 0.0) throw Error("examples carry no weight");

  for (const auto& ex : examples) {
    auto p = model.probabilities(ex.x);
    const double w = ex.weight / total_weight;
    loss -= w * std::log(std::max(p[static_cast<std::size_t>(ex.label)], std::numeric_limits<double>::min()));
    if (!grad_weights && !grad_bias) continue;
    for (std::size_t c = 0; c < C; ++c) {
      const double r = w * (p[c] - (static_cast<int>(c) == ex.label ? 1.0 : 0.0));
      if (grad_bias) (*grad_bias)[c] += r;
      if (grad_weights) {
        for (const auto& [j, v] : ex.x.entries) {
          if (j < D) (*grad_weights)[c * D + j] += r * v;
        }
      }
    }
  }
  double sq = 0.0;
  for (double v : model.weights()) sq += v * v;
  loss += 0.5 * l2 * sq;
  if (grad_weights) {
    for (std::size_t i = 0; i < grad_weights->size(); ++i) (*grad_weights)[i] += l2 * model.weights()[i];
  }
  return loss;
}

LinearModel train_linear(const std::vector<LabeledExample>& examples, std::vector<std::string> class_names,
                         const FeatureVocabulary& vocab, const LinearHyper& hyper) {
  if (examples.empty()) throw Error("train_linear: no examples");
  const std::size_t C = class_names.size();
  std::set<int> seen;
  for (const auto& ex : examples) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= C) throw Error("train_linear: label out of range");
    if (ex.x.vocabulary_id != vocab.id()) throw Error("train_linear: example encoded with another vocabulary");
    seen.insert(ex.label);
  }
  if (seen.size() < 2) throw Error("train_linear: need at least two classes, got one");
  if (hyper.batch_size < 1 || hyper.epochs < 0) throw Error("train_linear: bad batch size or epoch count");

  LinearModel model(std::move(class_names), vocab.size(), vocab.id(), hyper);
  const std::size_t D = model.dim();
  Rng rng(hyper.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  model.loss_trajectory().push_back(linear_objective(model, examples, hyper.l2));

  std::vector<double> residual(C);
  std::vector<std::pair<std::size_t, double>> touched;
  std::vector<double> grad_w(C * D, 0.0);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      double batch_weight = 0.0;
      for (std::size_t i = start; i < end; ++i) batch_weight += examples[order[i]].weight;
      if (batch_weight <= 0.0) continue;
      std::vector<double> grad_b(C, 0.0);
      std::vector<std::size_t> dirty;
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = examples[order[i]];
        auto p = model.probabilities(ex.x);
        const double w = ex.weight / batch_weight;
        for (std::size_t c = 0; c < C; ++c) {
          const double r = w * (p[c] - (static_cast<int>(c) == ex.label ? 1.0 : 0.0));
          grad_b[c] += r;
          for (const auto& [j, v] : ex.x.entries) {
            const std::size_t slot = c * D + j;
            if (grad_w[slot] == 0.0) dirty.push_back(slot);
            grad_w[slot] += r * v;
          }
        }
      }
      const double lr = hyper.learning_rate;
      const double decay = 1.0 - lr * hyper.l2;
      auto& W = model.weights();
      for (auto& v : W) v *= decay;
      for (std::size_t slot : dirty) {
        W[slot] -= lr * grad_w[slot];
        grad_w[slot] = 0.0;
      }
      for (std::size_t c = 0; c < C; ++c) model.bias()[c] -= lr * grad_b[c];
    }
    model.loss_trajectory().push_back(linear_objective(model, examples, hyper.l2));
  }
  return model;
}

namespace {

constexpr std::string_view kLinearMagic = "threadmine-linear 1";
constexpr std::string_view kStumpsMagic = "threadmine-stumps 1";

std::string doubles_line(const std::vector<double>& v) {
  std::string out;
  for (double d : v) {
    out += ' ';
    out += format_double(d);
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view rest, std::size_t expected, LineCursor& in) {
  auto f = split_ws(rest);
  if (f.size() != expected) in.fail("expected " + std::to_string(expected) + " numbers");
  std::vector<double> out;
  for (auto s : f) out.push_back(parse_double(s));
  return out;
}

std::vector<double> parse_counted_doubles(std::string_view rest, LineCursor& in) {
  auto f = split_ws(rest);
  if (f.empty()) in.fail("missing count");
  const auto n = static_cast<std::size_t>(parse_int(f[0]));
  if (f.size() != n + 1) in.fail("count does not match number of values");
  std::vector<double> out;
  for (std::size_t i = 1; i < f.size(); ++i) out.push_back(parse_double(f[i]));
  return out;
}

std::string_view value_of(std::string_view field, std::string_view key, LineCursor& in) {
  if (field.substr(0, key.size()) != key || field.size() <= key.size() || field[key.size()] != '=') {
    in.fail("expected " + std::string(key) + "=<value>");
  }
  return field.substr(key.size() + 1);
}

}  // namespace

void write_linear_model(std::ostream& out, const LinearModel& model, const FeatureVocabulary& vocab) {
  if (vocab.id() != model.vocabulary_id()) throw Error("model and vocabulary do not belong together");
  const auto& h = model.hyper();
  out << kLinearMagic << '\n';
  out << "classes " << model.num_classes();
  for (const auto& c : model.class_names()) out << ' ' << c;
  out << '\n';
  out << "hyper l2=" << format_double(h.l2) << " learning_rate=" << format_double(h.learning_rate)
      << " epochs=" << h.epochs << " batch_size=" << h.batch_size << " seed=" << h.seed << '\n';
  out << vocab.serialize();
  out << "bias" << doubles_line(model.bias()) << '\n';
  out << "trajectory " << model.loss_trajectory().size() << doubles_line(model.loss_trajectory()) << '\n';
  std::size_t nonzero = 0;
  for (double w : model.weights()) nonzero += w != 0.0;
  out << "weights " << nonzero << '\n';
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    for (std::size_t j = 0; j < model.dim(); ++j) {
      if (model.weight(c, j) != 0.0) out << "w " << c << ' ' << j << ' ' << format_double(model.weight(c, j)) << '\n';
    }
  }
  out << "end\n";
}

std::pair<LinearModel, FeatureVocabulary> read_linear_model(std::string_view text, const std::string& source) {
  LineCursor in(text, source);
  return read_linear_model(in);
}

std::pair<LinearModel, FeatureVocabulary> read_linear_model(LineCursor& in) {
  if (in.at_end() || trim(in.next()) != kLinearMagic) in.fail("not a linear model file");
  auto cls = split_ws(in.expect("classes"));
  if (cls.empty() || static_cast<std::size_t>(parse_int(cls[0])) != cls.size() - 1) in.fail("bad class list");
  std::vector<std::string> names(cls.begin() + 1, cls.end());
  auto hf = split_ws(in.expect("hyper"));
  if (hf.size() != 5) in.fail("bad hyper line");
  LinearHyper h;
  h.l2 = parse_double(value_of(hf[0], "l2", in));
  h.learning_rate = parse_double(value_of(hf[1], "learning_rate", in));
  h.epochs = static_cast<int>(parse_int(value_of(hf[2], "epochs", in)));
  h.batch_size = static_cast<int>(parse_int(value_of(hf[3], "batch_size", in)));
  h.seed = std::stoull(std::string(value_of(hf[4], "seed", in)));
  FeatureVocabulary vocab = FeatureVocabulary::parse(in);
  LinearModel model(names, vocab.size(), vocab.id(), h);
  model.bias() = parse_doubles(in.expect("bias"), names.size(), in);
  model.loss_trajectory() = parse_counted_doubles(in.expect("trajectory"), in);
  const auto n = parse_int(in.expect("weights"));
  for (long long i = 0; i < n; ++i) {
    auto f = split_ws(in.expect("w"));
    if (f.size() != 3) in.fail("weight line needs <class> <index> <value>");
    const auto c = static_cast<std::size_t>(parse_int(f[0]));
    const auto j = static_cast<std::size_t>(parse_int(f[1]));
    if (c >= names.size() || j >= model.dim()) in.fail("weight index out of range");
    model.weight(c, j) = parse_double(f[2]);
  }
  if (in.at_end() || trim(in.next()) != "end") in.fail("missing end marker");
  return {std::move(model), std::move(vocab)};
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double BoostedStumps::margin(const SparseFeatureVector& x) const {
  if (x.vocabulary_id != vocabulary_id_) {
    throw Error("feature vector from vocabulary " + x.vocabulary_id + " scored by stumps trained on " +
                vocabulary_id_);
  }
  double sum = 0.0;
  for (const auto& s : rounds_) sum += x.get(s.feature) <= s.threshold ? s.left : s.right;
  return sum;
}

double BoostedStumps::score(const SparseFeatureVector& x) const { return sigmoid(margin(x)); }

namespace {

// log(1 + exp(-y*m)) written stably, y in {-1,+1}.
double logistic_loss(double margin, int label) {
  const double z = label == 1 ? margin : -margin;
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double mean_loss(const std::vector<double>& margins, const std::vector<LabeledExample>& examples, double total_w) {
  double loss = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) loss += examples[i].weight * logistic_loss(margins[i], examples[i].label);
  return loss / total_w;
}

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double g_left = 0, h_left = 0, g_right = 0, h_right = 0;
};

}  // namespace

double boosted_loss(const BoostedStumps& model, const std::vector<LabeledExample>& examples) {
  double total_w = 0.0;
  std::vector<double> margins;
  for (const auto& ex : examples) {
    margins.push_back(model.margin(ex.x));
    total_w += ex.weight;
  }
  return mean_loss(margins, examples, total_w);
}

BoostedStumps train_boosted_stumps(const std::vector<LabeledExample>& examples, const std::string& vocabulary_id,
                                   const BoostHyper& hyper) {
  if (examples.empty()) throw Error("train_boosted_stumps: no examples");
  bool pos = false, neg = false;
  double total_w = 0.0;
  for (const auto& ex : examples) {
    if (ex.label != 0 && ex.label != 1) throw Error("train_boosted_stumps: labels must be 0 or 1");
    if (ex.x.vocabulary_id != vocabulary_id) throw Error("train_boosted_stumps: example from another vocabulary");
    (ex.label ? pos : neg) = true;
    total_w += ex.weight;
  }
  if (!pos || !neg) throw Error("train_boosted_stumps: need both labels, got one");
  if (total_w <= 0.0) throw Error("train_boosted_stumps: examples carry no weight");

  // Column view: feature -> (example, value), nonzero entries only.
  std::map<std::uint32_t, std::vector<std::pair<std::size_t, double>>> columns;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    for (const auto& [j, v] : examples[i].x.entries) columns[j].emplace_back(i, v);
  }

  BoostedStumps model(vocabulary_id, hyper);
  const std::size_t n = examples.size();
  std::vector<double> margins(n, 0.0), g(n), h(n);
  double loss = mean_loss(margins, examples, total_w);
  model.loss_trajectory().push_back(loss);

  for (int round = 0; round < hyper.rounds; ++round) {
    double G = 0, H = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margins[i]);
      g[i] = examples[i].weight * (p - examples[i].label) / total_w;
      h[i] = examples[i].weight * p * (1.0 - p) / total_w;
      G += g[i];
      H += h[i];
    }
    // Newton step scale: lambda is relative to the unnormalized hessian sum.
    const double lambda = hyper.lambda / total_w;
    const double parent = G * G / (H + lambda);

    SplitChoice best;
    for (const auto& [feature, col] : columns) {
      std::vector<std::pair<double, std::size_t>> vals;
      vals.reserve(col.size());
      double gz = G, hz = H;
      for (const auto& [i, v] : col) {
        vals.emplace_back(v, i);
        gz -= g[i];
        hz -= h[i];
      }
      // Absent entries are zeros; fold them into the sorted sweep as one group.
      const bool has_zero = col.size() < n;
      std::sort(vals.begin(), vals.end());
      struct Group {
        double value, g, h;
      };
      std::vector<Group> groups;
      bool zero_placed = !has_zero;
      for (const auto& [v, i] : vals) {
        if (!zero_placed && v > 0.0) {
          groups.push_back({0.0, gz, hz});
          zero_placed = true;
        }
        if (!groups.empty() && groups.back().value == v) {
          groups.back().g += g[i];
          groups.back().h += h[i];
        } else {
          groups.push_back({v, g[i], h[i]});
        }
      }
      if (!zero_placed) groups.push_back({0.0, gz, hz});
      double gl = 0, hl = 0;
      for (std::size_t k = 0; k + 1 < groups.size(); ++k) {
        gl += groups[k].g;
        hl += groups[k].h;
        const double gr = G - gl, hr = H - hl;
        const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
        if (!best.found || gain > best.gain) {
          best = {true, gain, feature, 0.5 * (groups[k].value + groups[k + 1].value), gl, hl, gr, hr};
        }
      }
    }

    Stump stump;
    if (best.found && best.gain > 1e-15) {
      stump.feature = best.feature;
      stump.threshold = best.threshold;
      stump.left = -hyper.learning_rate * best.g_left / (best.h_left + lambda);
      stump.right = -hyper.learning_rate * best.g_right / (best.h_right + lambda);
    } else {
      stump.feature = FeatureVocabulary::kOovIndex;
      stump.threshold = 0.0;
      stump.left = stump.right = -hyper.learning_rate * G / (H + lambda);
    }

    std::vector<double> next(n);
    double next_loss = loss;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = margins[i] + (examples[i].x.get(stump.feature) <= stump.threshold ? stump.left : stump.right);
      }
      next_loss = mean_loss(next, examples, total_w);
      if (next_loss <= loss) break;
      stump.left *= 0.5;
      stump.right *= 0.5;
    }
    if (next_loss > loss) {
      stump.left = stump.right = 0.0;
      next = margins;
      next_loss = loss;
    }
    margins = std::move(next);
    loss = next_loss;
    model.rounds().push_back(stump);
    model.loss_trajectory().push_back(loss);
  }
  return model;
}

void write_boosted_stumps(std::ostream& out, const BoostedStumps& model) {
  const auto& h = model.hyper();
  out << kStumpsMagic << '\n';
  out << "vocabulary_id " << model.vocabulary_id() << '\n';
  out << "hyper rounds=" << h.rounds << " learning_rate=" << format_double(h.learning_rate)
      << " lambda=" << format_double(h.lambda) << '\n';
  out << "trajectory " << model.loss_trajectory().size() << doubles_line(model.loss_trajectory()) << '\n';
  out << "stumps " << model.rounds().size() << '\n';
  for (const auto& s : model.rounds()) {
    out << "s " << s.feature << ' ' << format_double(s.threshold) << ' ' << format_double(s.left) << ' '
        << format_double(s.right) << '\n';
  }
  out << "end\n";
}

BoostedStumps read_boosted_stumps(LineCursor& in) {
  if (in.at_end() || trim(in.next()) != kStumpsMagic) in.fail("not a stumps model");
  std::string vocab_id(trim(in.expect("vocabulary_id")));
  auto hf = split_ws(in.expect("hyper"));
  if (hf.size() != 3) in.fail("bad hyper line");
  BoostHyper h;
  h.rounds = static_cast<int>(parse_int(value_of(hf[0], "rounds", in)));
  h.learning_rate = parse_double(value_of(hf[1], "learning_rate", in));
  h.lambda = parse_double(value_of(hf[2], "lambda", in));
  BoostedStumps model(vocab_id, h);
  model.loss_trajectory() = parse_counted_doubles(in.expect("trajectory"), in);
  const auto n = parse_int(in.expect("stumps"));
  for (long long i = 0; i < n; ++i) {
    auto f = split_ws(in.expect("s"));
    if (f.size() != 4) in.fail("stump line needs <feature> <threshold> <left> <right>");
    model.rounds().push_back({static_cast<std::uint32_t>(parse_int(f[0])), parse_double(f[1]), parse_double(f[2]),
                              parse_double(f[3])});
  }
  if (in.at_end() || trim(in.next()) != "end") in.fail("missing end marker");
  return model;
}

double f1_at(const std::vector<double>& scores, const std::vector<bool>& labels, double threshold) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (pred && labels[i]) ++tp;
    if (pred && !labels[i]) ++fp;
    if (!pred && labels[i]) ++fn;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

Threshold tune_threshold(const std::vector<double>& scores, const std::vector<bool>& labels, std::string tuned_on) {
  if (scores.size() != labels.size()) throw Error("tune_threshold: scores and labels differ in length");
  if (std::find(labels.begin(), labels.end(), true) == labels.end()) {
    throw Error("tune_threshold: no positive labels");
  }
  std::vector<double> observed(scores);
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());

  // Ascending sweep: a candidate replaces the incumbent only on strictly
  // higher F1, which keeps the lower threshold on ties.
  std::vector<double> candidates = observed;
  const bool half_observed = std::binary_search(observed.begin(), observed.end(), 0.5);
  if (!half_observed) {
    // 0.5 predicts exactly like the smallest observed score above it; if one
    // exists, that observed score is kept instead.
    auto above = std::lower_bound(observed.begin(), observed.end(), 0.5);
    if (above == observed.end()) candidates.push_back(0.5);
  }
  std::sort(candidates.begin(), candidates.end());

  Threshold best;
  best.tuned_on = std::move(tuned_on);
  bool have = false;
  for (double t : candidates) {
    const double f = f1_at(scores, labels, t);
    if (!have || f > best.f1) {
      best.value = t;
      best.f1 = f;
      have = true;
    }
  }
  return best;
}

std::string pair_universe_id(std::vector<PairKey> keys) {
  std::sort(keys.begin(), keys.end());
  std::string all;
  for (const auto& k : keys) {
    all += to_string(k);
    all += '\n';
  }
  return "pairs-" + digest_hex(all);
}

PredictionSet ensemble_or(const PredictionSet& a, const PredictionSet& b) {
  if (a.universe != b.universe) throw Error("ensemble_or: prediction sets cover different pair universes");
  PredictionSet out = a;
  out.positives.insert(b.positives.begin(), b.positives.end());
  return out;
}

void ScoreTable::set(const PairKey& key, double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw Error("score for " + to_string(key) + " outside [0,1]");
  auto [it, inserted] = scores_.emplace(key, score);
  if (!inserted && it->second != score) throw Error("conflicting scores for " + to_string(key));
}

ScoreTable ScoreTable::parse(std::string_view text, const std::string& source) {
  ScoreTable table;
  std::size_t number = 0;
  for (auto raw : split_lines(text)) {
    ++number;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto f = split_ws(line);
    if (f.size() != 4) throw ParseError(source, number, "expected: <thread> <source_id> <target_id> <score>");
    PairKey key{std::string(f[0]), std::string(f[1]), std::string(f[2])};
    double score = 0.0;
    try {
      score = parse_double(f[3]);
    } catch (const Error& e) {
      throw ParseError(source, number, e.what());
    }
    if (!(score >= 0.0 && score <= 1.0)) throw ParseError(source, number, "score " + std::string(f[3]) + " outside [0,1]");
    auto [it, inserted] = table.scores_.emplace(key, score);
    if (!inserted && it->second != score) {
      throw ParseError(source, number, "conflicting duplicate score for " + to_string(key));
    }
  }
  table.provenance_ = "file-" + digest_hex(text);
  return table;
}

double ScoreTable::at(const PairKey& key) const {
  auto it = scores_.find(key);
  if (it == scores_.end()) throw Error("no score for pair " + to_string(key) + " (" + provenance_ + ")");
  return it->second;
}

ScoreTable load_external_scores(const std::filesystem::path& path) {
  return ScoreTable::parse(read_file(path), path.string());
}

}  // namespace threadmine
