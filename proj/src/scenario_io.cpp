#include "pipefair/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pipefair/error.hpp"

namespace pipefair {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "pop1.mu",    "pop1.sigma", "pop2.mu",     "pop2.sigma",  "gamma",       "disclose",
      "cost.min",   "cost.max",   "rule1.kind",  "rule1.beta",  "rule1.knots", "rule2.kind",
      "rule2.beta", "rule2.knots"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& field, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(field, "expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ParseError(field, "expected a finite number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParseError(field, "expected true or false, got '" + text + "'");
}

std::vector<Knot> parse_knots(const std::string& field, const std::string& text) {
  std::vector<Knot> knots;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ParseError(field, "knot '" + item + "' must look like score:probability");
    }
    knots.push_back({parse_real(field, trim(item.substr(0, colon))),
                     parse_real(field, trim(item.substr(colon + 1)))});
  }
  if (knots.empty()) throw ParseError(field, "no knots given");
  return knots;
}

std::optional<AdmissionRule> rule_from_fields(const std::map<std::string, std::string>& kv,
                                              const std::string& prefix) {
  const auto kind_it = kv.find(prefix + ".kind");
  const auto beta_it = kv.find(prefix + ".beta");
  const auto knots_it = kv.find(prefix + ".knots");
  if (kind_it == kv.end()) {
    if (beta_it != kv.end() || knots_it != kv.end()) {
      throw ParseError(prefix + ".kind", "missing while other " + prefix + " fields are set");
    }
    return std::nullopt;
  }
  const std::string& kind = kind_it->second;
  try {
    if (kind == "threshold") {
      if (beta_it == kv.end()) throw ParseError(prefix + ".beta", "required for threshold rules");
      try {
        return AdmissionRule::threshold(parse_cutoff(beta_it->second));
      } catch (const InvalidArgument& e) {
        throw ParseError(prefix + ".beta", e.what());
      }
    }
    if (kind == "step") {
      if (knots_it == kv.end()) throw ParseError(prefix + ".knots", "required for step rules");
      return AdmissionRule::monotone_step(parse_knots(prefix + ".knots", knots_it->second));
    }
    if (kind == "all") return AdmissionRule::admit_all();
    if (kind == "none") return AdmissionRule::admit_none();
  } catch (const InvalidArgument& e) {
    throw ParseError(prefix + ".knots", e.what());
  }
  throw ParseError(prefix + ".kind", "expected threshold, step, all or none; got '" + kind + "'");
}

}  // namespace

const std::optional<AdmissionRule>& ScenarioFile::rule(int group) const {
  if (group == 1) return rule1;
  if (group == 2) return rule2;
  throw InvalidArgument("group must be 1 or 2");
}

ScenarioFile parse_scenario(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (!known_keys().contains(key)) throw ParseError(key, "unknown field");
    if (value.empty()) throw ParseError(key, "empty value");
    if (!kv.emplace(key, value).second) throw ParseError(key, "given more than once");
  }

  auto require = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(key, "missing required field");
    return it->second;
  };

  ScenarioFile out;
  Scenario& s = out.scenario;
  s.pop1.mu = parse_real("pop1.mu", require("pop1.mu"));
  s.pop1.sigma = parse_real("pop1.sigma", require("pop1.sigma"));
  s.pop2.mu = parse_real("pop2.mu", require("pop2.mu"));
  s.pop2.sigma = parse_real("pop2.sigma", require("pop2.sigma"));
  s.grading.disclose = kv.contains("disclose") ? parse_bool("disclose", kv.at("disclose")) : true;
  if (s.grading.disclose || kv.contains("gamma")) {
    s.grading.gamma = parse_real("gamma", require("gamma"));
  }
  s.cost.c_min = parse_real("cost.min", require("cost.min"));
  s.cost.c_max = parse_real("cost.max", require("cost.max"));

  if (!(s.pop1.sigma > 0.0)) throw ParseError("pop1.sigma", "must be positive");
  if (!(s.pop2.sigma > 0.0)) throw ParseError("pop2.sigma", "must be positive");
  if (s.grading.disclose && !(s.grading.gamma > 0.0)) throw ParseError("gamma", "must be positive");
  if (s.cost.c_min > s.cost.c_max) throw ParseError("cost.min", "must not exceed cost.max");

  out.rule1 = rule_from_fields(kv, "rule1");
  out.rule2 = rule_from_fields(kv, "rule2");
  out.warnings = validate(s);
  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string format_rule_fields(const std::string& prefix, const AdmissionRule& rule) {
  std::ostringstream os;
  switch (rule.kind()) {
    case AdmissionRule::Kind::Threshold:
      os << prefix << ".kind = threshold\n" << prefix << ".beta = " << format_number(rule.beta()) << '\n';
      break;
    case AdmissionRule::Kind::MonotoneStep:
      os << prefix << ".kind = step\n" << prefix << ".knots = ";
      for (std::size_t i = 0; i < rule.knots().size(); ++i) {
        if (i) os << ", ";
        os << format_number(rule.knots()[i].score) << ':' << format_number(rule.knots()[i].probability);
      }
      os << '\n';
      break;
    case AdmissionRule::Kind::AdmitAll:
      os << prefix << ".kind = all\n";
      break;
    case AdmissionRule::Kind::AdmitNone:
      os << prefix << ".kind = none\n";
      break;
  }
  return os.str();
}

}  // namespace

std::string format_scenario(const ScenarioFile& file) {
  const Scenario& s = file.scenario;
  std::ostringstream os;
  os << "pop1.mu = " << format_number(s.pop1.mu) << '\n'
     << "pop1.sigma = " << format_number(s.pop1.sigma) << '\n'
     << "pop2.mu = " << format_number(s.pop2.mu) << '\n'
     << "pop2.sigma = " << format_number(s.pop2.sigma) << '\n'
     << "gamma = " << format_number(s.grading.gamma) << '\n'
     << "disclose = " << (s.grading.disclose ? "true" : "false") << '\n'
     << "cost.min = " << format_number(s.cost.c_min) << '\n'
     << "cost.max = " << format_number(s.cost.c_max) << '\n';
  if (file.rule1) os << format_rule_fields("rule1", *file.rule1);
  if (file.rule2) os << format_rule_fields("rule2", *file.rule2);
  return os.str();
}

AdmissionRule parse_rule_spec(const std::string& spec) {
  if (spec == "all") return AdmissionRule::admit_all();
  if (spec == "none") return AdmissionRule::admit_none();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ParseError("rule", "expected threshold:B, step:s:p,..., all or none; got '" + spec + "'");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (kind == "threshold") return AdmissionRule::threshold(parse_cutoff(rest));
    if (kind == "step") return AdmissionRule::monotone_step(parse_knots("rule", rest));
  } catch (const InvalidArgument& e) {
    throw ParseError("rule", e.what());
  }
  throw ParseError("rule", "unknown rule kind '" + kind + "'");
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidArgument("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pipefair
