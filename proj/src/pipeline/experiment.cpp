#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "threadmine/pipeline.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

namespace {

struct FilterCount {
  std::string name;
  std::size_t removed = 0;
  std::size_t removed_gold = 0;
};

struct RelationRun {
  std::string setting;
  std::size_t enumerated = 0, enumerated_gold = 0, scored = 0, scored_gold = 0, gold_total = 0;
  std::vector<FilterCount> filters;
  PrfMetrics result, baseline;
  std::optional<PrfMetrics> linear, voter;
  std::optional<double> threshold, voter_threshold;
  std::string dump;
};

std::string_view task_prefix(RelationKind kind) { return kind == RelationKind::IntraTurn ? "intra" : "inter"; }

template <typename F>
auto stage(std::string_view name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error("stage " + std::string(name) + ": " + e.what());
  }
}

RelationRun run_relations(const ExperimentConfig& cfg, RelationKind kind, const std::vector<Thread>& test,
                          const ExperimentModels& models, const PredictedLabels* predicted) {
  const bool intra = kind == RelationKind::IntraTurn;
  const RelationModel* model = intra ? models.intra : models.inter;
  const bool use_linear = cfg.scorer == ScorerKind::InternalLinear;
  if ((use_linear || cfg.ensemble) && !model) {
    throw Error(std::string("no trained ") + std::string(task_prefix(kind)) + "-turn relation model");
  }
  if (cfg.ensemble && !model->voter) throw Error("ensemble requested but the relation model has no discourse voter");
  if (use_linear && model->rst_features && cfg.discourse == DiscourseMode::Off) {
    throw Error("relation model expects discourse features but discourse=off");
  }
  if (cfg.scorer == ScorerKind::ExternalFile && !models.external_scores) throw Error("external scores not loaded");

  std::optional<DiscourseSource> discourse;
  if (cfg.discourse == DiscourseMode::Heuristic) discourse = DiscourseSource::heuristic();
  if (cfg.discourse == DiscourseMode::ExternalFile) {
    if (!models.external_discourse) throw Error("external discourse labels not loaded");
    discourse = DiscourseSource::external(*models.external_discourse);
  }

  SalienceScorer scorer = constant_scorer();
  if (!intra && cfg.target_k && cfg.salience == SalienceSource::Internal) {
    if (!models.salience) throw Error("salience=internal needs a trained salience model");
    scorer = salience_scorer(*models.salience);
  }

  RelationRun run;
  run.setting = predicted ? "pred" : "gold";
  if (intra && cfg.window) run.filters.push_back({window_filter_name(cfg.window->lo, cfg.window->hi)});
  if (!intra && cfg.target_k) run.filters.push_back({std::string(kTargetSelectionFilter)});
  if (!intra && cfg.source_target_constraint) run.filters.push_back({std::string(kSourceTargetFilter)});

  const LabelAssignment labels = predicted ? LabelAssignment::predicted(*predicted) : LabelAssignment::gold();
  std::set<PairKey> gold, universe, final_pos, linear_pos, voter_pos, kept_keys;
  std::ostringstream dump;

  for (const auto& thread : test) {
    const ThreadIndex index(thread);
    const auto thread_gold = gold_relation_keys(thread, kind);
    gold.insert(thread_gold.begin(), thread_gold.end());
    const auto pairs = intra ? enumerate_intra(thread, labels) : enumerate_inter(thread, labels, cfg.inter_scope);

    FilterResult filtered{pairs, {}};
    if (intra && cfg.window) {
      filtered = apply_window(pairs, cfg.window->lo, cfg.window->hi);
    } else if (!intra && (cfg.target_k || cfg.source_target_constraint)) {
      SelectionMap selections;
      if (cfg.target_k) {
        for (const auto& p : pairs) {
          if (selections.count(p.target_post_id)) continue;
          selections.emplace(p.target_post_id,
                             select_targets(thread, *index.post(p.target_post_id), scorer, *cfg.target_k, cfg.granularity));
        }
      }
      filtered = cfg.source_target_constraint ? apply_target_constraints(pairs, selections, index.main_claim_id())
                                              : apply_target_selection(pairs, selections);
    }

    std::map<PairKey, std::pair<std::optional<double>, bool>> outcome;
    for (const auto& p : filtered.removed) {
      for (auto& f : run.filters) {
        if (f.name == p.filters_applied.back()) {
          ++f.removed;
          f.removed_gold += p.gold.value_or(false);
        }
      }
      outcome[p.key()] = {std::nullopt, false};
    }
    for (const auto& p : filtered.kept) {
      ++run.scored;
      run.scored_gold += p.gold.value_or(false);
      kept_keys.insert(p.key());
      std::optional<std::string> rst;
      if (discourse) rst = discourse->label(index, p);
      std::optional<double> score;
      bool predicted_positive = false;
      if (use_linear) {
        const SparseFeatureVector x =
            model->vocab.encode(pair_feature_names(index, p, model->rst_features ? rst : std::nullopt));
        score = model->linear.positive_score(x);
        predicted_positive = *score >= model->threshold.value;
        if (predicted_positive) linear_pos.insert(p.key());
      } else if (cfg.scorer == ScorerKind::ExternalFile) {
        score = models.external_scores->at(p.key());
        predicted_positive = *score >= 0.5;
        if (predicted_positive) linear_pos.insert(p.key());
      }
      if (cfg.ensemble) {
        const bool vote = model->voter->score(*rst) >= model->voter->threshold.value;
        if (vote) voter_pos.insert(p.key());
      }
      outcome[p.key()] = {score, predicted_positive};
    }
    for (const auto& p : pairs) {
      ++run.enumerated;
      run.enumerated_gold += p.gold.value_or(false);
      universe.insert(p.key());
    }
    for (const auto& p : pairs) {
      const auto& [score, linear_vote] = outcome.at(p.key());
      const bool pred = linear_vote || voter_pos.count(p.key()) > 0;
      if (pred) final_pos.insert(p.key());
      dump << p.thread_id << ' ' << p.source_id << ' ' << p.target_id << ' '
           << (score ? format_double(*score) : std::string("-")) << ' ' << (pred ? 1 : 0) << ' '
           << (p.gold.value_or(false) ? 1 : 0) << '\n';
    }
  }

  run.gold_total = gold.size();
  run.dump = dump.str();
  run.result = evaluate_relations(gold, universe, final_pos);
  run.baseline = evaluate_relations(gold, universe, kept_keys);
  if (cfg.ensemble) {
    PredictionSet a{pair_universe_id({kept_keys.begin(), kept_keys.end()}), linear_pos};
    PredictionSet b{a.universe, voter_pos};
    if (ensemble_or(a, b).positives != final_pos) throw Error("ensemble bookkeeping mismatch");
    run.voter = evaluate_relations(gold, universe, voter_pos);
    run.voter_threshold = model->voter->threshold.value;
    if (cfg.scorer != ScorerKind::None) run.linear = evaluate_relations(gold, universe, linear_pos);
  }
  if (use_linear) run.threshold = model->threshold.value;
  return run;
}

void add_prf(EvalReport& r, const std::string& prefix, const PrfMetrics& m, const std::string& setting) {
  r.add(prefix + ".tp." + setting, m.tp);
  r.add(prefix + ".fp." + setting, m.fp);
  r.add(prefix + ".fn." + setting, m.fn);
  r.add(prefix + ".precision." + setting, m.precision);
  r.add(prefix + ".recall." + setting, m.recall);
  r.add(prefix + ".f1." + setting, m.f1);
  r.add(prefix + ".precision_defined." + setting, std::string(m.precision_defined ? "1" : "0"));
  r.add(prefix + ".recall_defined." + setting, std::string(m.recall_defined ? "1" : "0"));
}

void add_relation_run(EvalReport& r, std::string_view task, const RelationRun& run) {
  const std::string t(task), s = run.setting;
  r.add(t + ".pairs.enumerated." + s, run.enumerated);
  r.add(t + ".pairs.enumerated_gold." + s, run.enumerated_gold);
  for (const auto& f : run.filters) {
    r.add(t + ".pairs.removed." + f.name + "." + s, f.removed);
    r.add(t + ".pairs.gold_removed." + f.name + "." + s, f.removed_gold);
  }
  r.add(t + ".pairs.scored." + s, run.scored);
  r.add(t + ".pairs.scored_gold." + s, run.scored_gold);
  r.add(t + ".relation.gold_total." + s, run.gold_total);
  add_prf(r, t + ".relation", run.result, s);
  add_prf(r, t + ".baseline.all_relations", run.baseline, s);
  if (run.linear) add_prf(r, t + ".linear", *run.linear, s);
  if (run.voter) add_prf(r, t + ".voter", *run.voter, s);
  if (run.threshold) r.add(t + ".threshold.relation." + s, *run.threshold);
  if (run.voter_threshold) r.add(t + ".threshold.voter." + s, *run.voter_threshold);
}

// ---- human tables ----

std::string cell(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%7.2f", v);
  return buf;
}

std::string ref_cell(double v) {
  if (v < 0) return "      -";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%7.1f", v);
  return buf;
}

std::string padded(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

struct PublishedRow {
  const char* name;
  double p_gold, p_pred, r_gold, r_pred, f_gold, f_pred;  // negative = not published
  bool needs_external;
};

const std::vector<PublishedRow> kPublishedIntra = {
    {"All relations", 5.0, -1, 100.0, -1, 9.0, -1, false},
    {"Discourse features only", 6.3, 5.7, 79.5, 77.0, 11.8, 10.6, false},
    {"Fine-tuned LM + discourse ensemble", 16.7, 15.5, 73.0, 70.2, 27.2, 25.4, true},
};
const std::vector<PublishedRow> kPublishedInter = {
    {"All relations", 5.0, -1, 100.0, -1, 9.0, -1, false},
    {"Discourse features only", 5.1, 3.8, 80.0, 77.0, 9.6, 7.2, false},
    {"Fine-tuned LM + selection + constraint", 18.9, 17.5, 79.0, 74.0, 30.5, 28.3, true},
};

constexpr std::size_t kNameWidth = 40;

std::string relation_table(std::string_view title, const std::map<std::string, RelationRun>& runs,
                           const std::vector<PublishedRow>& published, std::string_view system_name) {
  std::ostringstream out;
  out << title << "\n";
  out << padded("", kNameWidth) << "  Precision        Recall           F-score\n";
  out << padded("Method", kNameWidth) << "   Gold    Pred    Gold    Pred    Gold    Pred\n";
  using Getter = std::function<std::optional<PrfMetrics>(const RelationRun&)>;
  auto row = [&](std::string name, const Getter& get) {
    std::optional<PrfMetrics> g, p;
    if (auto it = runs.find("gold"); it != runs.end()) g = get(it->second);
    if (auto it = runs.find("pred"); it != runs.end()) p = get(it->second);
    if (!g && !p) return;
    auto c = [](const std::optional<PrfMetrics>& m, double PrfMetrics::*field) {
      return m ? cell((*m).*field) : std::string("      -");
    };
    out << padded(std::move(name), kNameWidth) << c(g, &PrfMetrics::precision) << ' ' << c(p, &PrfMetrics::precision)
        << ' ' << c(g, &PrfMetrics::recall) << ' ' << c(p, &PrfMetrics::recall) << ' ' << c(g, &PrfMetrics::f1) << ' '
        << c(p, &PrfMetrics::f1) << "\n";
  };
  row("All relations", [](const RelationRun& r) { return std::optional(r.baseline); });
  row("Discourse voter (boosted stumps)", [](const RelationRun& r) { return r.voter; });
  row("Pair scorer alone", [](const RelationRun& r) { return r.linear; });
  row(std::string(system_name), [](const RelationRun& r) { return std::optional(r.result); });
  out << "Published reference\n";
  for (const auto& ref : published) {
    out << padded(std::string("  ") + ref.name, kNameWidth) << ref_cell(ref.p_gold) << ' ' << ref_cell(ref.p_pred) << ' '
        << ref_cell(ref.r_gold) << ' ' << ref_cell(ref.r_pred) << ' ' << ref_cell(ref.f_gold) << ' '
        << ref_cell(ref.f_pred) << (ref.needs_external ? "  (external scores required)" : "") << "\n";
  }
  for (const auto& [setting, run] : runs) {
    out << "pairs (" << setting << "): enumerated " << run.enumerated;
    for (const auto& f : run.filters) out << ", removed by " << f.name << " " << f.removed;
    out << ", scored " << run.scored << ", gold relations " << run.gold_total << "\n";
  }
  return out.str();
}

std::string component_table(const ComponentEvaluation& e) {
  std::ostringstream out;
  out << "Component classification (F-score)\n";
  out << padded("Method", kNameWidth) << "      C       P      NA   macro\n";
  out << padded("Linear classifier", kNameWidth) << cell(e.per_class.at(ComponentLabel::Claim).f1) << ' '
      << cell(e.per_class.at(ComponentLabel::Premise).f1) << ' ' << cell(e.per_class.at(ComponentLabel::NonArgument).f1)
      << ' ' << cell(e.macro_f1) << "\n";
  out << "Published reference\n";
  out << padded("  Fine-tuned LM", kNameWidth) << ref_cell(67.1) << ' ' << ref_cell(72.5) << ' ' << ref_cell(75.7)
      << "          (external scores required)\n";
  out << "propositions evaluated: " << e.propositions << "\n";
  return out.str();
}

std::string system_name(const ExperimentConfig& cfg) {
  std::string name = cfg.scorer == ScorerKind::InternalLinear ? "Linear"
                     : cfg.scorer == ScorerKind::ExternalFile ? "External scores"
                                                              : "No scorer";
  if (cfg.discourse != DiscourseMode::Off && !cfg.ensemble && cfg.scorer == ScorerKind::InternalLinear) {
    name += " + discourse features";
  }
  if (cfg.ensemble) name += " OR discourse voter";
  return name + " (this run)";
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg, const std::vector<Thread>& test,
                          const ExperimentModels& models) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  EvalReport report;
  for (const auto& [k, v] : cfg.fields()) report.add("config." + k, v);
  report.add("config.salience_model", std::string(models.salience ? "loaded" : "none"));
  report.add("data.test_threads", test.size());

  std::vector<ComponentSource> sources;
  if (cfg.task == Task::All) {
    sources = {ComponentSource::Gold, ComponentSource::Predicted};
  } else {
    sources = {cfg.component_source};
  }
  const bool need_predicted = cfg.task == Task::Components ||
                              std::find(sources.begin(), sources.end(), ComponentSource::Predicted) != sources.end();
  PredictedLabels predicted;
  if (need_predicted) {
    if (!models.components) throw Error("stage components: no trained component model");
    predicted = stage("components", [&] { return classify_components(test, *models.components); });
  }

  std::ostringstream human;
  std::string dump;
  if (cfg.task == Task::Components || cfg.task == Task::All) {
    const auto eval = stage("components", [&] { return evaluate_components(test, predicted); });
    for (const auto& [label, m] : eval.per_class) add_prf(report, "components." + std::string(to_string(label)), m, "pred");
    report.add("components.macro_f1.pred", eval.macro_f1);
    report.add("components.propositions.pred", eval.propositions);
    human << component_table(eval) << "\n";
  }

  for (RelationKind kind : {RelationKind::IntraTurn, RelationKind::InterTurn}) {
    const bool wanted = cfg.task == Task::All || (kind == RelationKind::IntraTurn ? cfg.task == Task::Intra
                                                                                   : cfg.task == Task::Inter);
    if (!wanted) continue;
    std::map<std::string, RelationRun> runs;
    for (ComponentSource src : sources) {
      const PredictedLabels* labels = src == ComponentSource::Predicted ? &predicted : nullptr;
      RelationRun run = stage(task_prefix(kind), [&] { return run_relations(cfg, kind, test, models, labels); });
      add_relation_run(report, task_prefix(kind), run);
      dump += "# " + std::string(task_prefix(kind)) + " " + run.setting + "\n" + run.dump;
      runs.emplace(run.setting, std::move(run));
    }
    const bool is_intra = kind == RelationKind::IntraTurn;
    human << relation_table(is_intra ? "Intra-turn relation prediction" : "Inter-turn relation prediction", runs,
                            is_intra ? kPublishedIntra : kPublishedInter, system_name(cfg))
          << "\n";
  }

  report.pair_dump = dump;
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  char clock[64];
  std::snprintf(clock, sizeof clock, "wall-clock: %.3f s\n", report.wall_clock_seconds);
  std::ostringstream config_lines;
  for (const auto& [k, v] : cfg.fields()) config_lines << "  " << k << " = " << v << "\n";
  report.human = "Configuration\n" + config_lines.str() + "\n" + human.str() + clock;
  return report;
}

ExperimentModels TrainedModels::view() const {
  ExperimentModels m;
  if (components) m.components = &*components;
  if (intra) m.intra = &*intra;
  if (inter) m.inter = &*inter;
  return m;
}

TrainedModels train_models(const ExperimentConfig& cfg, const std::vector<Thread>& train, const TrainingHyper& hyper,
                           const DiscourseLabelMap* external_discourse) {
  TrainedModels out;
  const bool components = cfg.task == Task::Components || cfg.task == Task::All ||
                          cfg.component_source == ComponentSource::Predicted;
  if (components) {
    LinearHyper h = hyper.component;
    h.seed = cfg.seed;
    out.components = stage("train-components", [&] { return train_component_model(train, h); });
  }
  std::optional<DiscourseSource> discourse;
  if (cfg.discourse == DiscourseMode::Heuristic) discourse = DiscourseSource::heuristic();
  if (cfg.discourse == DiscourseMode::ExternalFile) {
    if (!external_discourse) throw Error("discourse=external-file needs the label file for training");
    discourse = DiscourseSource::external(*external_discourse);
  }
  const bool need_relation_model = cfg.scorer == ScorerKind::InternalLinear || cfg.ensemble;
  auto options = [&](RelationKind kind) {
    RelationTrainOptions o;
    o.kind = kind;
    if (kind == RelationKind::IntraTurn) o.window = cfg.window;
    o.scope = cfg.inter_scope;
    o.rst_features = cfg.discourse != DiscourseMode::Off && !cfg.ensemble;
    o.train_voter = cfg.ensemble;
    o.hyper = hyper.relation;
    o.hyper.seed = cfg.seed;
    o.boost = hyper.boost;
    return o;
  };
  if (need_relation_model && (cfg.task == Task::Intra || cfg.task == Task::All)) {
    out.intra = stage("train-intra", [&] { return train_relation_model(train, discourse, options(RelationKind::IntraTurn)); });
  }
  if (need_relation_model && (cfg.task == Task::Inter || cfg.task == Task::All)) {
    out.inter = stage("train-inter", [&] { return train_relation_model(train, discourse, options(RelationKind::InterTurn)); });
  }
  return out;
}

PipelineRun run_full_pipeline(const ExperimentConfig& cfg, const std::vector<Thread>& corpus,
                              const ExperimentModels& inputs, const TrainingHyper& hyper) {
  cfg.validate();
  PipelineRun run;
  const auto split = stage("split", [&] { return split_corpus(corpus, cfg.test_fraction, cfg.seed); });
  for (const auto& t : split.train) run.train_ids.push_back(t.id);
  for (const auto& t : split.test) run.test_ids.push_back(t.id);
  const TrainedModels trained = train_models(cfg, split.train, hyper, inputs.external_discourse);
  ExperimentModels models = trained.view();
  models.salience = inputs.salience;
  models.external_scores = inputs.external_scores;
  models.external_discourse = inputs.external_discourse;
  run.report = run_experiment(cfg, split.test, models);
  run.report.add("data.train_threads", run.train_ids.size());
  return run;
}

std::vector<EvalReport> sweep_window(const ExperimentConfig& cfg, const std::vector<Thread>& test,
                                     const ExperimentModels& models, int lo, int max_hi) {
  if (cfg.task != Task::Intra) throw Error("window sweeps run on task=intra");
  std::vector<EvalReport> out;
  for (int hi = lo + 1; hi <= max_hi; ++hi) {
    ExperimentConfig c = cfg;
    c.window = Window{lo, hi};
    out.push_back(run_experiment(c, test, models));
  }
  return out;
}

std::string format_window_sweep(const std::vector<EvalReport>& reports, const std::vector<Window>& windows,
                                const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "Intra-turn relation prediction by window\n";
  out << padded("Method", 28) << padded("Window", 10) << "   P        R        F\n";
  const std::string setting(to_string(cfg.component_source));
  auto side = [](int v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); };
  for (std::size_t i = reports.size(); i-- > 0;) {
    const auto& r = reports[i];
    const std::string w = side(windows[i].lo) + " to " + side(windows[i].hi);
    for (const auto& [name, prefix] : {std::pair<std::string, std::string>{"All relations", "intra.baseline.all_relations"},
                                       {system_name(cfg), "intra.relation"}}) {
      out << padded(name, 28) << padded(w, 10) << cell(r.number(prefix + ".precision." + setting)) << "  "
          << cell(r.number(prefix + ".recall." + setting)) << "  " << cell(r.number(prefix + ".f1." + setting)) << "\n";
    }
  }
  return out.str();
}

}  // namespace threadmine
