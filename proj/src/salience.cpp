#include "threadmine/salience.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace threadmine {

const SalienceLexicons& SalienceLexicons::builtin() {
  static const SalienceLexicons lex{Lexicon::builtin("claim_indicators"), Lexicon::builtin("second_person"),
                                    Lexicon::builtin("stopwords")};
  return lex;
}

namespace {

bool is_content_token(const std::string& tok, const Lexicon& stopwords) {
  if (tok.empty()) return false;
  const auto c = static_cast<unsigned char>(tok.front());
  const bool wordish = c >= 0x80 || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  return wordish && !stopwords.contains(tok);
}

// [begin, end) ranges of examples sharing (thread, post).
std::vector<std::pair<std::size_t, std::size_t>> post_groups(const std::vector<SalienceExample>& examples) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < examples.size();) {
    std::size_t j = i + 1;
    while (j < examples.size() && examples[j].thread_id == examples[i].thread_id &&
           examples[j].post_id == examples[i].post_id)
      ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

}  // namespace

std::vector<double> tfidf_centrality(const std::vector<std::string>& units, const Lexicon& stopwords) {
  const std::size_t n = units.size();
  std::vector<std::map<std::string, double>> tf(n);
  std::map<std::string, std::size_t> df;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& tok : tokenize(units[i])) {
      if (is_content_token(tok, stopwords)) tf[i][tok] += 1.0;
    }
    for (const auto& [t, c] : tf[i]) ++df[t];
  }
  std::map<std::string, double> centroid;
  for (auto& vec : tf) {
    for (auto& [t, v] : vec) {
      v *= std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(df[t]))) + 1.0;
      centroid[t] += v / static_cast<double>(n);
    }
  }
  double cnorm = 0.0;
  for (const auto& [t, v] : centroid) cnorm += v * v;
  cnorm = std::sqrt(cnorm);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0, norm = 0.0;
    for (const auto& [t, v] : tf[i]) {
      dot += v * centroid[t];
      norm += v * v;
    }
    if (norm > 0.0 && cnorm > 0.0) out[i] = dot / (std::sqrt(norm) * cnorm);
  }
  return out;
}

NamedFeatures salience_feature_names(const std::vector<std::string>& units, std::size_t i,
                                     const std::vector<double>& centrality, const SalienceLexicons& lex) {
  const auto tokens = tokenize(units.at(i));
  NamedFeatures out;
  out.push_back({i >= 9 ? "pos>=9" : "pos=" + std::to_string(i), 1.0});
  out.push_back({"rel_pos", units.size() > 1 ? static_cast<double>(i) / static_cast<double>(units.size() - 1) : 0.0});
  out.push_back({"is_first", i == 0 ? 1.0 : 0.0});
  out.push_back({"is_last", i + 1 == units.size() ? 1.0 : 0.0});
  out.push_back({"log_len", std::log1p(static_cast<double>(tokens.size()))});
  out.push_back({"centrality", centrality.at(i)});
  const auto cues = lex.claim_indicators.matched_terms(tokens);
  for (const auto& c : cues) out.push_back({"cue=" + c, 1.0});
  out.push_back({"cue_count", static_cast<double>(lex.claim_indicators.count_matches(tokens))});
  out.push_back({"second_person", static_cast<double>(lex.second_person.count_matches(tokens))});
  return out;
}

std::vector<NamedFeatures> salience_features_for_post(const std::vector<std::string>& units,
                                                      const SalienceLexicons& lex) {
  const auto centrality = tfidf_centrality(units, lex.stopwords);
  std::vector<NamedFeatures> out;
  for (std::size_t i = 0; i < units.size(); ++i) out.push_back(salience_feature_names(units, i, centrality, lex));
  return out;
}

PostTexts post_texts_from_dump(const std::vector<DumpComment>& comments) {
  PostTexts out;
  for (const auto& c : comments) {
    if (!c.deleted) out.emplace(c.id, c.body);
  }
  return out;
}

std::vector<SalienceExample> build_salience_dataset(const std::vector<QrRecord>& records, const PostTexts& posts,
                                                    SkipReport& skips) {
  std::map<std::pair<std::string, std::string>, std::vector<ByteSpan>> quoted;
  for (const auto& r : records) quoted[{r.thread_id, r.parent_post_id}].push_back(r.parent_char_span);

  std::vector<SalienceExample> out;
  for (const auto& [key, spans] : quoted) {
    auto it = posts.find(key.second);
    if (it == posts.end()) {
      skips.add("unresolved-post");
      continue;
    }
    const std::string& body = it->second;
    const auto sentences = segment_sentences(body);
    if (sentences.empty()) {
      skips.add("empty-post");
      continue;
    }
    std::vector<std::string> units;
    for (const auto& s : sentences) units.push_back(body.substr(s.start, s.end - s.start));
    auto features = salience_features_for_post(units);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      SalienceExample ex;
      ex.thread_id = key.first;
      ex.post_id = key.second;
      ex.unit_index = i;
      ex.text = units[i];
      ex.features = std::move(features[i]);
      const ByteSpan sent{sentences[i].start, sentences[i].end};
      ex.label = std::any_of(spans.begin(), spans.end(), [&](const ByteSpan& s) { return s.overlaps(sent); });
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<SalienceExample> salience_examples_from_dump(std::istream& dump, SkipReport& skips,
                                                         const QrConfig& config) {
  const auto comments = read_dump(dump, skips);
  std::vector<std::vector<DumpComment>> groups;
  std::map<std::string, std::size_t> group_of;
  for (const auto& c : comments) {
    auto [it, fresh] = group_of.emplace(c.link_id, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(c);
  }
  std::vector<QrRecord> records;
  for (const auto& g : groups) {
    auto r = extract_qr_thread(g, config, skips);
    records.insert(records.end(), r.begin(), r.end());
  }
  canonicalize(records);
  return build_salience_dataset(records, post_texts_from_dump(comments), skips);
}

void write_salience_dataset(std::ostream& out, const std::vector<SalienceExample>& examples) {
  for (const auto& ex : examples) {
    nlohmann::ordered_json j;
    j["thread_id"] = ex.thread_id;
    j["post_id"] = ex.post_id;
    j["unit"] = ex.unit_index;
    j["label"] = ex.label;
    j["text"] = ex.text;
    auto& f = j["features"] = nlohmann::ordered_json::object();
    for (const auto& nf : ex.features) f[nf.name] = nf.value;
    out << j.dump() << '\n';
  }
}

double RecallCurve::at(std::size_t k) const {
  if (k == 0) return 0.0;
  if (recall.empty()) return 0.0;
  return recall[std::min(k, recall.size()) - 1];
}

RecallCurve recall_curve(const std::vector<SalienceExample>& examples, const UnitScores& scores, std::size_t max_k) {
  const auto groups = post_groups(examples);
  if (groups.size() != scores.size()) throw Error("recall_curve: one score list per post required");
  RecallCurve curve;
  std::vector<std::size_t> hits(max_k, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto [b, e] = groups[g];
    const std::size_t n = e - b;
    if (scores[g].size() != n) throw Error("recall_curve: score count differs from unit count");
    curve.max_units = std::max(curve.max_units, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[g][x] > scores[g][y]; });
    for (std::size_t i = b; i < e; ++i) curve.gold += examples[i].label;
    std::size_t found = 0;
    for (std::size_t k = 0; k < max_k; ++k) {
      if (k < n && examples[b + order[k]].label) ++found;
      hits[k] += found;
    }
  }
  for (std::size_t h : hits) {
    curve.recall.push_back(curve.gold ? 100.0 * static_cast<double>(h) / static_cast<double>(curve.gold) : 0.0);
  }
  return curve;
}

RecallCurve position_baseline(const std::vector<SalienceExample>& examples, std::size_t max_k) {
  UnitScores scores;
  for (const auto& [b, e] : post_groups(examples)) {
    std::vector<double> s;
    for (std::size_t i = b; i < e; ++i) s.push_back(-static_cast<double>(i - b));
    scores.push_back(std::move(s));
  }
  return recall_curve(examples, scores, max_k);
}

int select_knee(const RecallCurve& curve) {
  const std::size_t m = curve.recall.size();
  if (m == 0) throw Error("select_knee: empty curve");
  if (m < 3) return 1;
  const double x0 = 1.0, y0 = curve.recall.front();
  const double x1 = static_cast<double>(m), y1 = curve.recall.back();
  int best = 1;
  double best_d = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double x = static_cast<double>(k), y = curve.recall[k - 1];
    // Signed height above the chord; the chord's length is a common factor.
    const double d = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0);
    if (d > best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

std::vector<double> SalienceModel::score_units(const std::vector<std::string>& units) const {
  std::vector<double> out;
  for (const auto& f : salience_features_for_post(units)) out.push_back(model.positive_score(vocab.encode(f)));
  return out;
}

UnitScores score_examples(const SalienceModel& model, const std::vector<SalienceExample>& examples) {
  UnitScores out;
  for (const auto& [b, e] : post_groups(examples)) {
    std::vector<double> s;
    for (std::size_t i = b; i < e; ++i) s.push_back(model.model.positive_score(model.vocab.encode(examples[i].features)));
    out.push_back(std::move(s));
  }
  return out;
}

SalienceTraining train_salience(const std::vector<SalienceExample>& examples, const LinearHyper& hyper,
                                double heldout_fraction, std::size_t max_k) {
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0)) throw Error("held-out fraction must lie in (0,1)");
  std::set<std::string> thread_set;
  for (const auto& ex : examples) thread_set.insert(ex.thread_id);
  if (thread_set.size() < 2) throw Error("train_salience: need at least two threads");
  std::vector<std::string> threads(thread_set.begin(), thread_set.end());
  Rng rng(hyper.seed);
  shuffle(threads, rng);
  const auto n_held = std::clamp<long long>(std::llround(heldout_fraction * static_cast<double>(threads.size())), 1,
                                            static_cast<long long>(threads.size()) - 1);
  std::set<std::string> held(threads.begin(), threads.begin() + n_held);

  std::vector<SalienceExample> train, test;
  for (const auto& ex : examples) (held.count(ex.thread_id) ? test : train).push_back(ex);

  std::vector<NamedFeatures> samples;
  std::size_t pos = 0;
  for (const auto& ex : train) {
    samples.push_back(ex.features);
    pos += ex.label;
  }
  if (pos == 0 || pos == train.size()) throw Error("train_salience: training split needs both labels");
  SalienceTraining result;
  result.model.vocab = FeatureVocabulary::build(samples, 1, nullptr);
  const double pos_weight = static_cast<double>(train.size() - pos) / static_cast<double>(pos);
  std::vector<LabeledExample> labeled;
  for (const auto& ex : train) {
    labeled.push_back({result.model.vocab.encode(ex.features), ex.label ? 1 : 0, ex.label ? pos_weight : 1.0});
  }
  result.model.model = train_linear(labeled, {"other", "target"}, result.model.vocab, hyper);
  result.heldout_threads.assign(held.begin(), held.end());
  result.heldout = recall_curve(test, score_examples(result.model, test), max_k);
  result.baseline = position_baseline(test, max_k);
  result.selected_k = select_knee(result.heldout);
  return result;
}

SalienceScorer salience_scorer(const SalienceModel& model) {
  return [&model](const Thread&, const Post& post) {
    std::vector<std::string> units;
    for (const auto& p : post.propositions) units.push_back(p.text);
    return model.score_units(units);
  };
}

void write_salience_model(std::ostream& out, const SalienceModel& model) {
  write_linear_model(out, model.model, model.vocab);
}

SalienceModel read_salience_model(std::string_view text, const std::string& source) {
  auto [model, vocab] = read_linear_model(text, source);
  return {std::move(vocab), std::move(model)};
}

std::string format_recall_report(const SalienceTraining& t) {
  std::ostringstream out;
  out << "K   model   first-K\n";
  for (std::size_t k = 1; k <= t.heldout.recall.size(); ++k) {
    char line[64];
    std::snprintf(line, sizeof line, "%-3zu %6.2f  %6.2f\n", k, t.heldout.at(k), t.baseline.at(k));
    out << line;
  }
  out << "selected K = " << t.selected_k << "\n";
  char ref[96];
  std::snprintf(ref, sizeof ref, "reference target recall at K=5: %.1f (comparison only)\n", kReferenceTargetRecallAt5);
  out << ref;
  return out.str();
}

}  // namespace threadmine
