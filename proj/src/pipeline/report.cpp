#include <cmath>
#include <map>
#include <sstream>

#include "threadmine/pipeline.hpp"
#include "threadmine/util.hpp"

namespace threadmine {

void EvalReport::add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
void EvalReport::add(std::string key, double value) { add(std::move(key), format_double(value)); }
void EvalReport::add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }

std::string EvalReport::machine() const {
  std::string out;
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

std::optional<std::string> EvalReport::get(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

double EvalReport::number(std::string_view key) const {
  auto v = get(key);
  if (!v) throw Error("report has no entry '" + std::string(key) + "'");
  return parse_double(*v);
}

namespace {

// "a.b.precision.gold" -> {"a.b", "precision", "gold"}
bool split_metric_key(std::string_view key, std::string& prefix, std::string& metric, std::string& setting) {
  const auto last = key.rfind('.');
  if (last == std::string_view::npos || last == 0) return false;
  const auto mid = key.rfind('.', last - 1);
  if (mid == std::string_view::npos) return false;
  prefix = std::string(key.substr(0, mid));
  metric = std::string(key.substr(mid + 1, last - mid - 1));
  setting = std::string(key.substr(last + 1));
  return true;
}

}  // namespace

std::vector<std::string> validate_report(std::string_view machine) {
  std::map<std::string, std::string> values;
  std::vector<std::string> problems;
  std::size_t number = 0;
  for (auto raw : split_lines(machine)) {
    ++number;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string_view::npos) {
      problems.push_back("line " + std::to_string(number) + ": not `key = value`");
      continue;
    }
    values[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
  }
  auto num = [&](const std::string& key) -> std::optional<double> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    try {
      return parse_double(it->second);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  for (const auto& [key, value] : values) {
    std::string prefix, metric, setting;
    if (!split_metric_key(key, prefix, metric, setting)) continue;
    if (metric == "precision") {
      auto p = num(key), r = num(prefix + ".recall." + setting), f = num(prefix + ".f1." + setting);
      if (!p || !r || !f) {
        problems.push_back(prefix + " (" + setting + "): precision without recall and f1");
        continue;
      }
      const double expect = *p + *r > 0.0 ? 2.0 * *p * *r / (*p + *r) : 0.0;
      if (std::abs(expect - *f) > 1e-9) {
        problems.push_back(prefix + " (" + setting + "): F " + format_double(*f) + " but 2PR/(P+R) = " +
                           format_double(expect));
      }
    }
    if (metric == "enumerated" && prefix.size() >= 6 && prefix.compare(prefix.size() - 6, 6, ".pairs") == 0) {
      const auto enumerated = num(key);
      const auto scored = num(prefix + ".scored." + setting);
      if (!enumerated || !scored) {
        problems.push_back(prefix + " (" + setting + "): enumerated count without scored count");
        continue;
      }
      double removed = 0.0;
      const std::string removed_prefix = prefix + ".removed.";
      const std::string suffix = "." + setting;
      for (auto it = values.lower_bound(removed_prefix); it != values.end() && it->first.rfind(removed_prefix, 0) == 0;
           ++it) {
        if (it->first.size() > suffix.size() &&
            it->first.compare(it->first.size() - suffix.size(), suffix.size(), suffix) == 0) {
          removed += num(it->first).value_or(0.0);
        }
      }
      if (removed + *scored != *enumerated) {
        problems.push_back(prefix + " (" + setting + "): enumerated " + format_double(*enumerated) + " != removed " +
                           format_double(removed) + " + scored " + format_double(*scored));
      }
    }
  }
  return problems;
}

}  // namespace threadmine
