#include <algorithm>

#include "threadmine/pipeline.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view key, std::string_view value, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, e] : table) {
    if (name == value) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : table) allowed += (allowed.empty() ? "" : "|") + std::string(name);
  throw Error("config " + std::string(key) + ": '" + std::string(value) + "' is not one of " + allowed);
}

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == e) return name;
  }
  return "?";
}

constexpr std::pair<std::string_view, Task> kTasks[] = {
    {"components", Task::Components}, {"intra", Task::Intra}, {"inter", Task::Inter}, {"all", Task::All}};
constexpr std::pair<std::string_view, ScorerKind> kScorers[] = {
    {"internal-linear", ScorerKind::InternalLinear}, {"external-file", ScorerKind::ExternalFile}, {"none", ScorerKind::None}};
constexpr std::pair<std::string_view, DiscourseMode> kDiscourse[] = {
    {"off", DiscourseMode::Off}, {"heuristic", DiscourseMode::Heuristic}, {"external-file", DiscourseMode::ExternalFile}};
constexpr std::pair<std::string_view, ComponentSource> kSources[] = {
    {"gold", ComponentSource::Gold}, {"pred", ComponentSource::Predicted}};
constexpr std::pair<std::string_view, InterScope> kScopes[] = {
    {"direct-parent", InterScope::DirectParent}, {"ancestors", InterScope::Ancestors}};
constexpr std::pair<std::string_view, SelectionGranularity> kGranularity[] = {
    {"proposition", SelectionGranularity::Proposition}, {"sentence", SelectionGranularity::Sentence}};
constexpr std::pair<std::string_view, SalienceSource> kSalience[] = {
    {"internal", SalienceSource::Internal}, {"constant", SalienceSource::Constant}};

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw Error("config " + std::string(key) + ": expected on or off, got '" + std::string(v) + "'");
}

std::string window_text(const std::optional<Window>& w) {
  if (!w) return "none";
  auto side = [](int v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); };
  return side(w->lo) + "," + side(w->hi);
}

}  // namespace

std::string_view to_string(Task t) { return enum_name(t, kTasks); }
std::string_view to_string(ScorerKind s) { return enum_name(s, kScorers); }
std::string_view to_string(DiscourseMode d) { return enum_name(d, kDiscourse); }
std::string_view to_string(ComponentSource s) { return enum_name(s, kSources); }
std::string_view to_string(InterScope s) { return enum_name(s, kScopes); }
std::string_view to_string(SelectionGranularity g) { return enum_name(g, kGranularity); }
std::string_view to_string(SalienceSource s) { return enum_name(s, kSalience); }

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  const bool intra = task == Task::Intra || task == Task::All;
  const bool inter = task == Task::Inter || task == Task::All;
  if (window && !intra) problems.push_back("window applies to intra-turn runs only");
  if (window && window->lo > window->hi) problems.push_back("window lower bound exceeds upper bound");
  if (target_k && !inter) problems.push_back("target_k applies to inter-turn runs only");
  if (target_k && *target_k <= 0) problems.push_back("target_k must be positive");
  if (source_target_constraint && !inter) problems.push_back("constraint applies to inter-turn runs only");
  if (scorer == ScorerKind::ExternalFile && scores_file.empty()) problems.push_back("scorer=external-file needs scores_file");
  if (discourse == DiscourseMode::ExternalFile && discourse_file.empty()) {
    problems.push_back("discourse=external-file needs discourse_file");
  }
  if (ensemble && discourse == DiscourseMode::Off) problems.push_back("ensemble needs discourse labels");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) problems.push_back("test_fraction must lie in (0,1)");
  if (!problems.empty()) throw Error("invalid experiment config: " + join(problems, "; "));
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::fields() const {
  return {
      {"task", std::string(to_string(task))},
      {"component_source", std::string(to_string(component_source))},
      {"scorer", std::string(to_string(scorer))},
      {"discourse", std::string(to_string(discourse))},
      {"ensemble", ensemble ? "on" : "off"},
      {"window", window_text(window)},
      {"target_k", target_k ? std::to_string(*target_k) : "none"},
      {"constraint", source_target_constraint ? "on" : "off"},
      {"seed", std::to_string(seed)},
      {"inter_scope", std::string(to_string(inter_scope))},
      {"granularity", std::string(to_string(granularity))},
      {"salience", std::string(to_string(salience))},
      {"test_fraction", format_double(test_fraction)},
      {"scores_file", scores_file.empty() ? "none" : scores_file},
      {"discourse_file", discourse_file.empty() ? "none" : discourse_file},
  };
}

void set_config_field(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "task") {
    cfg.task = parse_enum(key, value, kTasks);
  } else if (key == "component_source") {
    cfg.component_source = parse_enum(key, value, kSources);
  } else if (key == "scorer") {
    cfg.scorer = parse_enum(key, value, kScorers);
  } else if (key == "discourse") {
    cfg.discourse = parse_enum(key, value, kDiscourse);
  } else if (key == "ensemble") {
    cfg.ensemble = parse_bool(key, value);
  } else if (key == "window") {
    if (value == "none") {
      cfg.window.reset();
    } else {
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) throw Error("config window: expected <lo>,<hi> or none");
      cfg.window = Window{static_cast<int>(parse_int(trim(value.substr(0, comma)))),
                          static_cast<int>(parse_int(trim(value.substr(comma + 1))))};
    }
  } else if (key == "target_k") {
    if (value == "none") {
      cfg.target_k.reset();
    } else {
      cfg.target_k = static_cast<int>(parse_int(value));
    }
  } else if (key == "constraint") {
    cfg.source_target_constraint = parse_bool(key, value);
  } else if (key == "seed") {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string_view::npos) {
      throw Error("config seed: expected a non-negative integer");
    }
    cfg.seed = std::stoull(std::string(value));
  } else if (key == "inter_scope") {
    cfg.inter_scope = parse_enum(key, value, kScopes);
  } else if (key == "granularity") {
    cfg.granularity = parse_enum(key, value, kGranularity);
  } else if (key == "salience") {
    cfg.salience = parse_enum(key, value, kSalience);
  } else if (key == "test_fraction") {
    cfg.test_fraction = parse_double(value);
  } else if (key == "scores_file") {
    cfg.scores_file = value == "none" ? "" : std::string(value);
  } else if (key == "discourse_file") {
    cfg.discourse_file = value == "none" ? "" : std::string(value);
  } else {
    throw Error("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  ExperimentConfig cfg;
  std::size_t number = 0;
  for (auto raw : split_lines(text)) {
    ++number;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, number, "expected key = value");
    try {
      set_config_field(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, number, e.what());
    }
  }
  return cfg;
}

}  // namespace threadmine
