#pragma once

// Scenario files: flat "key = value" text, one field per line, '#' comments.
//
//   pop1.mu, pop1.sigma, pop2.mu, pop2.sigma   group priors
//   gamma                                      grade noise sd (required when disclose = true)
//   disclose                                   true | false
//   cost.min, cost.max                         hiring cost interval
//   rule1.kind, rule2.kind                     threshold | step | all | none (optional)
//   rule1.beta, rule2.beta                     threshold value, or -inf / inf
//   rule1.knots, rule2.knots                   "score:prob, score:prob, ..."

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pipefair/model.hpp"

namespace pipefair {

struct ScenarioFile {
  Scenario scenario;
  std::optional<AdmissionRule> rule1;
  std::optional<AdmissionRule> rule2;
  std::vector<std::string> warnings;

  const std::optional<AdmissionRule>& rule(int group) const;
};

// Throws ParseError naming the offending field.
ScenarioFile parse_scenario(std::string_view text);
ScenarioFile load_scenario(const std::filesystem::path& path);

std::string format_scenario(const ScenarioFile& file);

// "threshold:B", "step:s1:p1,s2:p2,...", "all", "none".
AdmissionRule parse_rule_spec(const std::string& spec);

// 12 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace pipefair
