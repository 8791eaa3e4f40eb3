#include "lcprod/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "lcprod/block_rule.hpp"
#include "lcprod/error.hpp"
#include "lcprod/functional.hpp"

namespace lcprod {

const char* to_string(ExperimentType type) {
  switch (type) {
    case ExperimentType::Convexity: return "convexity";
    case ExperimentType::Convergence: return "convergence";
    case ExperimentType::Criterion: return "criterion";
    case ExperimentType::Bound: return "bound";
  }
  return "unknown";
}

std::string ConfigParseResult::describe_issues() const {
  std::ostringstream os;
  for (const ConfigIssue& issue : issues) {
    if (issue.line) os << "line " << issue.line << ": ";
    os << issue.field << ": " << issue.message << "\n";
  }
  return os.str();
}

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"measure", {"rule"}},
      {"functional", {"rule"}},
      {"experiment",
       {"type", "kind", "depths", "eval_depth", "probe_depth", "point_count", "samples",
        "pairs", "block", "seed", "output"}},
  };
  return keys;
}

class Validator {
 public:
  explicit Validator(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  std::vector<ConfigIssue> issues;

  const Entry* find(const std::string& field) const {
    auto it = entries_.find(field);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void add(const std::string& field, const std::string& message) {
    const Entry* e = find(field);
    issues.push_back({e ? e->line : 0, field, message});
  }

  std::optional<std::uint64_t> integer(const std::string& field) {
    const Entry* e = find(field);
    if (!e) return std::nullopt;
    std::uint64_t v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      add(field, "expected a non-negative integer, got '" + e->value + "'");
      return std::nullopt;
    }
    return v;
  }

  template <class T>
  void integer_into(const std::string& field, T& out) {
    if (auto v = integer(field)) out = static_cast<T>(*v);
  }

  std::optional<std::vector<std::size_t>> integer_list(const std::string& field) {
    const Entry* e = find(field);
    if (!e) return std::nullopt;
    std::vector<std::size_t> out;
    std::string token;
    std::istringstream is(e->value);
    while (std::getline(is, token, ',')) {
      const std::string t = trim(token);
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        add(field, "expected a comma-separated list of integers, got '" + e->value + "'");
        return std::nullopt;
      }
      out.push_back(v);
    }
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace

ConfigParseResult parse_config(std::string_view text) {
  ConfigParseResult result;
  std::map<std::string, Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream lines{std::string(text)};
  std::string raw;
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        result.issues.push_back({line_no, line, "malformed section header"});
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().contains(section)) {
        result.issues.push_back({line_no, section, "unknown section"});
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      result.issues.push_back({line_no, section, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string field = section + "." + key;
    if (section.empty()) {
      result.issues.push_back({line_no, key, "key outside any section"});
      continue;
    }
    if (!known_keys().contains(section)) continue;
    if (!known_keys().at(section).contains(key)) {
      result.issues.push_back({line_no, field, "unknown key"});
      continue;
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
      result.issues.push_back({line_no, field, "unbalanced quotes"});
      continue;
    }
    if (entries.contains(field)) {
      result.issues.push_back({line_no, field, "duplicate key"});
      continue;
    }
    entries.emplace(field, Entry{value, line_no});
  }

  Validator v(std::move(entries));
  v.issues = std::move(result.issues);
  ExperimentConfig cfg;

  if (const Entry* e = v.find("experiment.type")) {
    bool found = false;
    for (auto t : {ExperimentType::Convexity, ExperimentType::Convergence,
                   ExperimentType::Criterion, ExperimentType::Bound}) {
      if (e->value == to_string(t)) {
        cfg.experiment = t;
        found = true;
      }
    }
    if (!found) v.add("experiment.type", "expected convexity, convergence, criterion or bound");
  } else {
    v.add("experiment.type", "missing");
  }
  const ExperimentType type = cfg.experiment;
  const bool needs_functional = type != ExperimentType::Convexity;
  const bool needs_eval_depth =
      type == ExperimentType::Convergence || type == ExperimentType::Bound;

  if (const Entry* e = v.find("measure.rule")) {
    cfg.measure_rule = e->value;
    try {
      parse_block_rule(e->value);
    } catch (const Error& err) {
      v.add("measure.rule", err.what());
    }
  } else {
    v.add("measure.rule", "missing");
  }

  if (const Entry* e = v.find("functional.rule")) {
    cfg.functional_rule = e->value;
    try {
      parse_functional(e->value);
    } catch (const Error& err) {
      v.add("functional.rule", err.what());
    }
  } else if (needs_functional) {
    v.add("functional.rule", "missing (required for " + std::string(to_string(type)) + ")");
  }

  if (const Entry* e = v.find("experiment.kind")) {
    if (auto k = approximant_kind_from_string(e->value)) {
      cfg.kind = *k;
    } else {
      v.add("experiment.kind",
            "expected CondExp, CondExpReflected, Theorem1, HalfSum or Theorem3Linear");
    }
  }

  if (auto seed = v.integer("experiment.seed")) {
    cfg.seed = *seed;
  } else if (!v.find("experiment.seed")) {
    v.add("experiment.seed", "missing (runs must be seeded explicitly)");
  }

  if (const Entry* e = v.find("experiment.output"); e && !e->value.empty()) {
    cfg.output = e->value;
  } else {
    v.add("experiment.output", "missing");
  }

  v.integer_into("experiment.eval_depth", cfg.eval_depth);
  v.integer_into("experiment.probe_depth", cfg.probe_depth);
  v.integer_into("experiment.point_count", cfg.point_count);
  v.integer_into("experiment.samples", cfg.samples);
  v.integer_into("experiment.pairs", cfg.pairs);
  v.integer_into("experiment.block", cfg.block);
  if (auto depths = v.integer_list("experiment.depths")) cfg.depths = *depths;

  if (needs_functional && cfg.depths.empty() && !v.find("experiment.depths")) {
    v.add("experiment.depths", "missing (required for " + std::string(to_string(type)) + ")");
  }
  if (!cfg.depths.empty()) {
    if (std::find(cfg.depths.begin(), cfg.depths.end(), 0) != cfg.depths.end()) {
      v.add("experiment.depths", "depths start at 1");
    }
    if (!std::is_sorted(cfg.depths.begin(), cfg.depths.end()) ||
        std::adjacent_find(cfg.depths.begin(), cfg.depths.end()) != cfg.depths.end()) {
      v.add("experiment.depths", "depths must be strictly increasing");
    }
  }
  if (needs_eval_depth) {
    if (!v.find("experiment.eval_depth")) {
      v.add("experiment.eval_depth", "missing (required for " + std::string(to_string(type)) + ")");
    } else if (!cfg.depths.empty() && cfg.depths.back() >= cfg.eval_depth) {
      v.add("experiment.depths", "experiment.depths must stay below experiment.eval_depth (max depth " +
                                     std::to_string(cfg.depths.back()) + ", eval_depth " +
                                     std::to_string(cfg.eval_depth) + ")");
    }
    if (cfg.probe_depth <= cfg.eval_depth) {
      v.add("experiment.probe_depth", "must exceed experiment.eval_depth");
    }
    if (cfg.point_count == 0) v.add("experiment.point_count", "must be positive");
  }
  if (type == ExperimentType::Criterion && !cfg.depths.empty() &&
      cfg.probe_depth <= cfg.depths.back()) {
    v.add("experiment.probe_depth", "must exceed every entry of experiment.depths");
  }
  if (type == ExperimentType::Convexity) {
    if (cfg.samples < 10000) v.add("experiment.samples", "convexity checks need >= 10000 samples");
    if (cfg.block == 0) v.add("experiment.block", "blocks are numbered from 1");
    if (cfg.pairs == 0) v.add("experiment.pairs", "must be positive");
  }

  result.issues = std::move(v.issues);
  std::stable_sort(result.issues.begin(), result.issues.end(),
                   [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  if (result.issues.empty()) result.config = std::move(cfg);
  return result;
}

std::string to_config_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[measure]\nrule = \"" << c.measure_rule << "\"\n\n";
  if (!c.functional_rule.empty()) {
    os << "[functional]\nrule = \"" << c.functional_rule << "\"\n\n";
  }
  os << "[experiment]\n";
  os << "type = " << to_string(c.experiment) << "\n";
  os << "kind = " << to_string(c.kind) << "\n";
  if (!c.depths.empty()) {
    os << "depths = ";
    for (std::size_t i = 0; i < c.depths.size(); ++i) os << (i ? ", " : "") << c.depths[i];
    os << "\n";
  }
  os << "eval_depth = " << c.eval_depth << "\n";
  os << "probe_depth = " << c.probe_depth << "\n";
  os << "point_count = " << c.point_count << "\n";
  os << "samples = " << c.samples << "\n";
  os << "pairs = " << c.pairs << "\n";
  os << "block = " << c.block << "\n";
  os << "seed = " << c.seed << "\n";
  os << "output = \"" << c.output << "\"\n";
  return os.str();
}

}  // namespace lcprod
