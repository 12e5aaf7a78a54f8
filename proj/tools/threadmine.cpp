// Command-line entry point for the threadmine toolkit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "threadmine/corpus.hpp"
#include "threadmine/distant.hpp"
#include "threadmine/pipeline.hpp"
#include "threadmine/salience.hpp"
#include "threadmine/util.hpp"

using namespace threadmine;

namespace {

struct ExperimentArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string corpus;
  std::string components_model, intra_model, inter_model, salience_model;
};

void add_experiment_args(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--config", a.config_file, "key=value experiment config");
  cmd->add_option("--set", a.overrides, "override a config field, key=value (repeatable)");
  cmd->add_option("--corpus", a.corpus, "thread file or directory")->required();
  cmd->add_option("--components-model", a.components_model);
  cmd->add_option("--intra-model", a.intra_model);
  cmd->add_option("--inter-model", a.inter_model);
  cmd->add_option("--salience-model", a.salience_model);
}

ExperimentConfig load_config(const ExperimentArgs& a) {
  ExperimentConfig cfg = a.config_file.empty() ? ExperimentConfig{} : parse_config(read_file(a.config_file), a.config_file);
  for (const auto& o : a.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + o + "'");
    set_config_field(cfg, trim(std::string_view(o).substr(0, eq)), trim(std::string_view(o).substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

// Keeps loaded models alive behind the ExperimentModels pointers.
struct LoadedModels {
  std::optional<ComponentModel> components;
  std::optional<RelationModel> intra, inter;
  std::optional<SalienceModel> salience;
  std::optional<ScoreTable> scores;
  std::optional<DiscourseLabelMap> discourse;

  ExperimentModels view() const {
    ExperimentModels m;
    if (components) m.components = &*components;
    if (intra) m.intra = &*intra;
    if (inter) m.inter = &*inter;
    if (salience) m.salience = &*salience;
    if (scores) m.external_scores = &*scores;
    if (discourse) m.external_discourse = &*discourse;
    return m;
  }
};

LoadedModels load_inputs(const ExperimentConfig& cfg, const ExperimentArgs& a) {
  LoadedModels m;
  if (!a.components_model.empty()) m.components = read_component_model(read_file(a.components_model), a.components_model);
  if (!a.intra_model.empty()) m.intra = read_relation_model(read_file(a.intra_model), a.intra_model);
  if (!a.inter_model.empty()) m.inter = read_relation_model(read_file(a.inter_model), a.inter_model);
  if (!a.salience_model.empty()) m.salience = read_salience_model(read_file(a.salience_model), a.salience_model);
  if (cfg.scorer == ScorerKind::ExternalFile) m.scores = load_external_scores(cfg.scores_file);
  if (cfg.discourse == DiscourseMode::ExternalFile) {
    std::ifstream in(cfg.discourse_file);
    if (!in) throw Error("cannot open " + cfg.discourse_file);
    m.discourse = read_discourse_label_file(in, cfg.discourse_file);
  }
  return m;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::string to_text(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

LinearHyper linear_hyper(std::uint64_t seed, int epochs) {
  LinearHyper h;
  h.seed = seed;
  if (epochs > 0) h.epochs = epochs;
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threadmine: argument mining over discussion threads"};
  app.require_subcommand(1);

  // stats
  std::string stats_corpus;
  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("corpus", stats_corpus, "thread file or directory")->required();

  // split
  std::string split_corpus_path, split_out;
  double split_fraction = 0.2;
  std::uint64_t split_seed = 1;
  auto* split = app.add_subcommand("split", "seeded thread-level train/test split");
  split->add_option("--corpus", split_corpus_path)->required();
  split->add_option("--out-dir", split_out, "writes train.thread and test.thread here")->required();
  split->add_option("--test-fraction", split_fraction);
  split->add_option("--seed", split_seed);

  // train-components
  std::string tc_corpus, tc_out;
  std::uint64_t tc_seed = 1;
  int tc_epochs = 0;
  auto* train_components = app.add_subcommand("train-components", "train the component classifier");
  train_components->add_option("--corpus", tc_corpus)->required();
  train_components->add_option("--out", tc_out)->required();
  train_components->add_option("--seed", tc_seed);
  train_components->add_option("--epochs", tc_epochs);

  // train-relations
  ExperimentArgs tr;
  std::string tr_out, tr_kind = "intra";
  auto* train_relations = app.add_subcommand("train-relations", "train a relation scorer (and discourse voter)");
  train_relations->add_option("--config", tr.config_file);
  train_relations->add_option("--set", tr.overrides);
  train_relations->add_option("--corpus", tr.corpus)->required();
  train_relations->add_option("--kind", tr_kind)->check(CLI::IsMember({"intra", "inter"}));
  train_relations->add_option("--out", tr_out)->required();

  // train-salience
  std::string ts_dump, ts_out, ts_report, ts_dataset;
  std::uint64_t ts_seed = 1;
  double ts_heldout = 0.1;
  auto* train_salience_cmd = app.add_subcommand("train-salience", "train the target salience scorer from a dump");
  train_salience_cmd->add_option("--dump", ts_dump, "newline-delimited comment dump")->required();
  train_salience_cmd->add_option("--out", ts_out)->required();
  train_salience_cmd->add_option("--report", ts_report, "recall@K table");
  train_salience_cmd->add_option("--dataset", ts_dataset, "write the example dump for audit");
  train_salience_cmd->add_option("--seed", ts_seed);
  train_salience_cmd->add_option("--heldout-fraction", ts_heldout);

  // predict / evaluate
  ExperimentArgs pa;
  std::string pa_out;
  auto* predict = app.add_subcommand("predict", "pair-level predictions with trained models");
  add_experiment_args(predict, pa);
  predict->add_option("--out", pa_out, "pair dump (default stdout)");

  ExperimentArgs ea;
  std::string ea_report, ea_human, ea_pairs;
  bool ea_train = false;
  auto* evaluate = app.add_subcommand("evaluate", "metrics report; --train runs split, training and evaluation");
  add_experiment_args(evaluate, ea);
  evaluate->add_flag("--train", ea_train, "split the corpus by seed and train every model first");
  evaluate->add_option("--report", ea_report, "machine-readable report (default stdout)");
  evaluate->add_option("--human", ea_human, "human-readable report");
  evaluate->add_option("--pairs", ea_pairs, "pair-level dump");

  // sweep-window
  ExperimentArgs sa;
  int sweep_lo = 0, sweep_hi = 5;
  std::string sweep_report;
  auto* sweep = app.add_subcommand("sweep-window", "intra-turn runs for windows [lo,lo+1]..[lo,hi]");
  add_experiment_args(sweep, sa);
  sweep->add_option("--lo", sweep_lo);
  sweep->add_option("--hi", sweep_hi);
  sweep->add_option("--report", sweep_report, "machine-readable reports (default stdout)");

  // build-distant
  BuildDistantOptions bd;
  std::string bd_kind, bd_exclude;
  auto* build = app.add_subcommand("build-distant", "distant-labeled records from a forum dump");
  build->add_option("--kind", bd_kind)->required()->check(CLI::IsMember({"imho", "qr"}));
  build->add_option("--in", bd.in)->required();
  build->add_option("--out", bd.out)->required();
  build->add_option("--exclude-ids", bd_exclude, "thread ids to leave out, one per line");
  build->add_flag("--byte-exact", bd.byte_exact, "match quotes without normalization");
  build->add_flag("--keep-acronym", bd.keep_acronym, "leave IMO/IMHO in claim sentences");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) {
      std::cout << format_stats(corpus_stats(load_corpus(stats_corpus)));
    } else if (*split) {
      const auto parts = split_corpus(load_corpus(split_corpus_path), split_fraction, split_seed);
      std::filesystem::create_directories(split_out);
      save_corpus(std::filesystem::path(split_out) / "train.thread", parts.train);
      save_corpus(std::filesystem::path(split_out) / "test.thread", parts.test);
      std::cout << "train " << parts.train.size() << " threads, test " << parts.test.size() << " threads\n";
    } else if (*train_components) {
      const auto model = train_component_model(load_corpus(tc_corpus), linear_hyper(tc_seed, tc_epochs));
      write_file(tc_out, to_text([&](std::ostream& o) { write_component_model(o, model); }));
    } else if (*train_relations) {
      ExperimentConfig cfg = load_config(tr);
      set_config_field(cfg, "task", tr_kind);
      cfg.validate();
      LoadedModels inputs = load_inputs(cfg, tr);
      const TrainedModels trained = train_models(cfg, load_corpus(tr.corpus), {}, inputs.view().external_discourse);
      const auto& model = tr_kind == "intra" ? trained.intra : trained.inter;
      if (!model) throw Error("config needs scorer=internal-linear or ensemble=on to train a relation model");
      write_file(tr_out, to_text([&](std::ostream& o) { write_relation_model(o, *model); }));
    } else if (*train_salience_cmd) {
      std::ifstream in(ts_dump, std::ios::binary);
      if (!in) throw Error("cannot open " + ts_dump);
      SkipReport skips;
      const auto examples = salience_examples_from_dump(in, skips);
      if (!ts_dataset.empty()) write_file(ts_dataset, to_text([&](std::ostream& o) { write_salience_dataset(o, examples); }));
      const auto training = train_salience(examples, linear_hyper(ts_seed, 0), ts_heldout);
      write_file(ts_out, to_text([&](std::ostream& o) { write_salience_model(o, training.model); }));
      write_or_print(ts_report, format_recall_report(training));
    } else if (*predict) {
      const ExperimentConfig cfg = load_config(pa);
      const LoadedModels inputs = load_inputs(cfg, pa);
      write_or_print(pa_out, run_experiment(cfg, load_corpus(pa.corpus), inputs.view()).pair_dump);
    } else if (*evaluate) {
      const ExperimentConfig cfg = load_config(ea);
      const LoadedModels inputs = load_inputs(cfg, ea);
      const auto corpus = load_corpus(ea.corpus);
      EvalReport report =
          ea_train ? run_full_pipeline(cfg, corpus, inputs.view()).report : run_experiment(cfg, corpus, inputs.view());
      const auto problems = validate_report(report.machine());
      for (const auto& p : problems) std::cerr << "report check failed: " << p << "\n";
      write_or_print(ea_report, report.machine());
      if (!ea_human.empty()) write_file(ea_human, report.human);
      if (!ea_pairs.empty()) write_file(ea_pairs, report.pair_dump);
      if (!problems.empty()) return 2;
    } else if (*sweep) {
      ExperimentConfig cfg = load_config(sa);
      const LoadedModels inputs = load_inputs(cfg, sa);
      const auto reports = sweep_window(cfg, load_corpus(sa.corpus), inputs.view(), sweep_lo, sweep_hi);
      std::string machine;
      std::vector<Window> windows;
      for (std::size_t i = 0; i < reports.size(); ++i) {
        windows.push_back({sweep_lo, sweep_lo + 1 + static_cast<int>(i)});
        machine += "# window " + std::to_string(sweep_lo) + "," + std::to_string(windows.back().hi) + "\n";
        machine += reports[i].machine();
      }
      write_or_print(sweep_report, machine);
      std::cerr << format_window_sweep(reports, windows, cfg);
    } else if (*build) {
      bd.kind = bd_kind == "imho" ? DistantKind::Imho : DistantKind::Qr;
      if (!bd_exclude.empty()) bd.exclude_ids = bd_exclude;
      const auto result = build_distant(bd);
      std::cerr << result.records << " records, " << result.skips.total() << " skipped; summary in "
                << result.summary_path.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
