#include "pipefair/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "pipefair/audit.hpp"
#include "pipefair/calibration.hpp"
#include "pipefair/error.hpp"
#include "pipefair/mc_oracle.hpp"
#include "pipefair/parallel.hpp"
#include "pipefair/posterior.hpp"
#include "pipefair/scenario_io.hpp"

#ifndef PIPEFAIR_VERSION
#define PIPEFAIR_VERSION "dev"
#endif

namespace pipefair {

namespace {

constexpr std::uint64_t kDefaultMcSamples = 2000000;
constexpr std::uint64_t kDefaultMcSeed = 20240917;

struct CostOverrides {
  std::optional<double> cost;
  std::optional<double> cost_min;
  std::optional<double> cost_max;

  void add_to(CLI::App* app) {
    app->add_option("--cost", cost, "Override both cost.min and cost.max");
    app->add_option("--cost-min", cost_min, "Override cost.min");
    app->add_option("--cost-max", cost_max, "Override cost.max");
  }

  void apply(Scenario& s) const {
    if (cost) s.cost = CostSpec::single(*cost);
    if (cost_min) s.cost.c_min = *cost_min;
    if (cost_max) s.cost.c_max = *cost_max;
    validate(s.cost);
  }

  std::string describe(const Scenario& s) const {
    return "cost=[" + format_number(s.cost.c_min) + "," + format_number(s.cost.c_max) + "]";
  }
};

struct Manifest {
  std::string subcommand;
  std::string scenario_path;
  std::string parameters;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string outputs;

  std::string header() const {
    std::ostringstream os;
    os << "# tool = pipefair " << PIPEFAIR_VERSION << '\n'
       << "# subcommand = " << subcommand << '\n'
       << "# scenario = " << scenario_path << '\n'
       << "# parameters = " << parameters << '\n'
       << "# seed = " << (seed ? std::to_string(*seed) : std::string("none")) << '\n'
       << "# threads = " << (threads ? std::to_string(*threads) : std::string("1")) << '\n'
       << "# outputs = " << (outputs.empty() ? std::string("stdout") : outputs) << '\n';
    return os.str();
  }
};

void kv(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << " = " << value << '\n';
}

void kv(std::ostream& out, const std::string& key, double value) { kv(out, key, format_number(value)); }

std::string grid_string(const GridSpec& g) {
  return format_number(g.lo) + ":" + format_number(g.hi) + ":" + std::to_string(g.points);
}

AdmissionRule rule_for_group(const ScenarioFile& file, int group, const std::string& flag) {
  if (!flag.empty()) return parse_rule_spec(flag);
  const auto& r = file.rule(group);
  if (!r) {
    throw ParseError("rule" + std::to_string(group) + ".kind",
                     "no rule in scenario file and none given on the command line");
  }
  return *r;
}

// ---------------------------------------------------------------- posterior

struct PosteriorOptions {
  std::string scenario;
  int group = 1;
  std::string beta;
  std::string rule;
  double grade = 0.0;
};

int cmd_posterior(const PosteriorOptions& o, std::ostream& out) {
  const auto file = load_scenario(o.scenario);
  const Scenario& s = file.scenario;
  if (!s.grading.disclose) throw InvalidArgument("posterior over grades needs disclose = true");
  const PopulationPrior& prior = s.prior(o.group);
  AdmissionRule rule = !o.beta.empty() ? AdmissionRule::threshold(parse_cutoff(o.beta))
                                       : rule_for_group(file, o.group, o.rule);
  if (rule.is_zero()) throw InvalidArgument("rule admits nobody; posterior undefined");

  const double gamma = s.grading.gamma;
  const auto summary = posterior_mean(prior, gamma, rule, o.grade);
  const double quad = posterior_moment(prior, gamma, rule, o.grade, 1);
  kv(out, "group", std::to_string(o.group));
  kv(out, "rule", rule.describe());
  kv(out, "grade", o.grade);
  kv(out, "method", to_string(summary.method));
  kv(out, summary.method == PosteriorMethod::Reduction ? "reduction_mean" : "closed_form_mean",
     summary.mean);
  kv(out, "quadrature_mean", quad);
  kv(out, "difference", std::abs(summary.mean - quad));
  return kExitOk;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
  std::string scenario;
  std::string mode;
  CostOverrides costs;
};

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out) {
  auto file = load_scenario(o.scenario);
  Scenario& s = file.scenario;
  o.costs.apply(s);
  kv(out, "mode", o.mode);

  if (o.mode == "igm") {
    const auto r = calibrate_single_threshold_igm(s);
    kv(out, "beta1", r.beta1);
    kv(out, "beta2", r.beta2);
    kv(out, "g_star", r.g_star);
    kv(out, "residual1", r.residual1);
    kv(out, "residual2", r.residual2);
    kv(out, "converged", r.converged ? "true" : "false");
    if (!r.diagnostics.empty()) kv(out, "diagnostics", r.diagnostics);
    return r.converged ? kExitOk : kExitNotConverged;
  }
  if (o.mode == "no-grades") {
    if (s.grading.disclose) {
      throw InvalidArgument("no-grades mode requires disclose = false in the scenario");
    }
    const Cutoff beta = no_grades_threshold(s);
    const auto rule = AdmissionRule::threshold(beta);
    kv(out, "beta1", beta.to_string());
    kv(out, "beta2", beta.to_string());
    kv(out, "admitted_mean1", posterior_mean_no_grades(s.pop1, rule));
    kv(out, "admitted_mean2", posterior_mean_no_grades(s.pop2, rule));
    kv(out, "cost_max", s.cost.c_max);
    kv(out, "converged", "true");
    return kExitOk;
  }
  if (o.mode == "noiseless") {
    const auto rule = noiseless_rule(s.cost);
    kv(out, "rule", rule.describe());
    kv(out, "beta1", rule.beta());
    kv(out, "beta2", rule.beta());
    kv(out, "converged", "true");
    return kExitOk;
  }
  if (o.mode == "eo-gamma1") {
    const auto r = eo_fixed_point_gamma1(s);
    kv(out, "beta1", r.calibration.beta1);
    kv(out, "beta2", r.calibration.beta2);
    kv(out, "residual1", r.calibration.residual1);
    kv(out, "residual2", r.calibration.residual2);
    kv(out, "iterations", std::to_string(r.iterations));
    kv(out, "converged", r.calibration.converged ? "true" : "false");
    if (r.calibration.converged) {
      kv(out, "g_star1", r.g_star1);
      kv(out, "g_star2", r.g_star2);
      kv(out, "eo_residual", r.eo_residual);
      kv(out, "eo_argmax_t", r.eo_argmax);
    } else {
      kv(out, "diagnostics", r.calibration.diagnostics);
      std::ostringstream traj;
      const std::size_t from = r.trajectory.size() > 5 ? r.trajectory.size() - 5 : 0;
      for (std::size_t i = from; i < r.trajectory.size(); ++i) {
        if (i > from) traj << ' ';
        traj << '(' << format_number(r.trajectory[i].first) << ','
             << format_number(r.trajectory[i].second) << ')';
      }
      kv(out, "trajectory_tail", traj.str());
    }
    return r.calibration.converged ? kExitOk : kExitNotConverged;
  }
  throw InvalidArgument("unknown mode '" + o.mode + "' (igm, no-grades, noiseless, eo-gamma1)");
}

// ---------------------------------------------------------------- audit

struct AuditOptions {
  std::string scenario;
  std::string rule1;
  std::string rule2;
  std::string exam = "noisy";
  std::string csv;
  CostOverrides costs;
};

int cmd_audit(const AuditOptions& o, std::ostream& out) {
  auto file = load_scenario(o.scenario);
  Scenario& s = file.scenario;
  o.costs.apply(s);
  ExamNoise exam = ExamNoise::Unit;
  if (o.exam == "noiseless") {
    exam = ExamNoise::None;
  } else if (o.exam != "noisy") {
    throw InvalidArgument("--exam must be noisy or noiseless");
  }
  const auto rule1 = rule_for_group(file, 1, o.rule1);
  const auto rule2 = rule_for_group(file, 2, o.rule2);
  const auto report = audit(s, rule1, rule2, exam);

  kv(out, "rule1", rule1.describe());
  kv(out, "rule2", rule2.describe());
  kv(out, "exam", o.exam);
  kv(out, "eo_gap", report.eo_gap);
  kv(out, "eo_argmax_t", report.eo_argmax);
  kv(out, "eo_argmax_cost", report.eo_argmax_cost);
  kv(out, "igm_violation", report.igm_violation);
  kv(out, "igm_argmax_cost", report.igm_argmax);
  kv(out, "sigm_gap", report.sigm_gap);
  kv(out, "sigm_argmax_t", report.sigm_argmax);
  kv(out, "type_grid", grid_string(report.type_grid));
  kv(out, "cost_grid", grid_string(report.cost_grid));

  if (!o.csv.empty()) {
    Manifest m{"audit", o.scenario,
               "rule1=" + rule1.describe() + " rule2=" + rule2.describe() + " exam=" + o.exam +
                   " " + o.costs.describe(s),
               std::nullopt, std::nullopt, o.csv};
    std::ostringstream csv;
    csv << m.header() << "metric,value,argmax,grid_lo,grid_hi,grid_points\n";
    auto row = [&](const char* name, double v, double arg, const GridSpec& g) {
      csv << name << ',' << format_number(v) << ',' << format_number(arg) << ','
          << format_number(g.lo) << ',' << format_number(g.hi) << ',' << g.points << '\n';
    };
    row("eo_gap", report.eo_gap, report.eo_argmax, report.type_grid);
    row("igm_violation", report.igm_violation, report.igm_argmax, report.cost_grid);
    row("sigm_gap", report.sigm_gap, report.sigm_argmax, report.type_grid);
    write_file_atomically(o.csv, csv.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::string scenario;
  std::string grid1 = "-3:3:41";
  std::string grid2 = "-3:3:41";
  std::string target = "multi-igm";
  std::string csv;
  std::size_t threads = 0;
  CostOverrides costs;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  auto file = load_scenario(o.scenario);
  Scenario& s = file.scenario;
  o.costs.apply(s);
  const GridSpec g1 = parse_grid_spec(o.grid1);
  const GridSpec g2 = parse_grid_spec(o.grid2);
  const SweepTarget target = parse_sweep_target(o.target);
  const std::size_t threads = o.threads > 0 ? o.threads : default_thread_count();
  const auto result = sweep_impossibility(s, g1, g2, target, threads);

  Manifest m{"sweep", o.scenario,
             "target=" + o.target + " grid1=" + grid_string(g1) + " grid2=" + grid_string(g2) +
                 " " + o.costs.describe(s) + " type_grid=" + grid_string(result.type_grid) +
                 " cost_grid=" + grid_string(result.cost_grid),
             std::nullopt, threads, o.csv};
  std::ostringstream csv;
  csv << m.header() << "beta1,beta2,metric,value,argmax\n";
  for (const auto& r : result.records) {
    csv << format_number(r.beta1) << ',' << format_number(r.beta2) << ',' << to_string(target) << ','
        << format_number(r.value) << ',' << format_number(r.argmax) << '\n';
  }

  std::ostringstream summary;
  kv(summary, "records", std::to_string(result.records.size()));
  kv(summary, "minimum", result.minimum.value);
  kv(summary, "argmin_beta1", result.minimum.beta1);
  kv(summary, "argmin_beta2", result.minimum.beta2);
  kv(summary, "argmin_argmax", result.minimum.argmax);

  if (o.csv.empty()) {
    out << csv.str();
    std::istringstream lines(summary.str());
    for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  } else {
    write_file_atomically(o.csv, csv.str());
    out << summary.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- mc-check

struct McCheckOptions {
  std::string scenario;
  std::uint64_t samples = kDefaultMcSamples;
  std::uint64_t seed = kDefaultMcSeed;
  std::size_t threads = 0;
  std::string csv;
};

struct McRow {
  std::string check;
  int group = 1;
  double closed_form = 0.0;
  McEstimate mc;
  bool pass = false;
};

int cmd_mc_check(const McCheckOptions& o, std::ostream& out) {
  if (o.samples < kMcMinSamples) {
    throw InvalidArgument("--samples must be at least " + std::to_string(kMcMinSamples));
  }
  const auto file = load_scenario(o.scenario);
  const Scenario& s = file.scenario;
  const std::size_t threads = o.threads > 0 ? o.threads : default_thread_count();
  const double gamma = s.grading.gamma;
  if (!s.grading.disclose) throw InvalidArgument("mc-check needs disclose = true");

  std::vector<McRow> rows;
  std::uint64_t seed = o.seed;
  auto add = [&](std::string name, int group, double closed, const McEstimate& mc) {
    rows.push_back({std::move(name), group, closed, mc, mc.agrees_with(closed, 3.0)});
  };
  for (int group = 1; group <= 2; ++group) {
    const auto& prior = s.prior(group);
    const auto rule = file.rule(group).value_or(AdmissionRule::threshold(0.0));
    if (rule.is_zero()) throw InvalidArgument("mc-check needs non-zero rules");
    add("posterior_mean(g=0)", group, posterior_mean(prior, gamma, rule, 0.0).mean,
        mc_posterior_mean(prior, gamma, rule, 0.0, kDefaultGradeHalfWidth, o.samples, seed++, threads));
    add("hire_rate(t=2,g*=1)", group, hire_probability_given_type(prior, gamma, rule, 1.0, 2.0),
        mc_hire_rate_given_type(prior, gamma, rule, 1.0, 2.0, o.samples, seed++, threads));
    add("no_grades_mean", group, posterior_mean_no_grades(prior, rule),
        mc_admitted_mean(prior, rule, o.samples, seed++, threads));
  }
  add("admit_all_posterior(g=0)", 1,
      posterior_mean(s.pop1, gamma, AdmissionRule::admit_all(), 0.0).mean,
      mc_posterior_mean(s.pop1, gamma, AdmissionRule::admit_all(), 0.0, kDefaultGradeHalfWidth,
                        o.samples, seed++, threads));

  bool all_pass = true;
  std::ostringstream table;
  table << std::left << std::setw(26) << "check" << std::setw(7) << "group" << std::setw(16)
        << "closed_form" << std::setw(16) << "mc_estimate" << std::setw(16) << "std_error"
        << std::setw(10) << "n_eff" << "status\n";
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    const char* status = r.mc.under_sampled() ? "UNDERSAMPLED" : (r.pass ? "PASS" : "FAIL");
    table << std::left << std::setw(26) << r.check << std::setw(7) << r.group << std::setw(16)
          << format_number(r.closed_form) << std::setw(16) << format_number(r.mc.value)
          << std::setw(16) << format_number(r.mc.std_error) << std::setw(10) << r.mc.n_effective
          << status << '\n';
  }
  out << table.str();
  kv(out, "result", all_pass ? "PASS" : "FAIL");

  if (!o.csv.empty()) {
    Manifest m{"mc-check", o.scenario, "samples=" + std::to_string(o.samples), o.seed, threads,
               o.csv};
    std::ostringstream csv;
    csv << m.header() << "check,group,closed_form,mc_estimate,std_error,n_effective,seed,status\n";
    for (const auto& r : rows) {
      csv << r.check << ',' << r.group << ',' << format_number(r.closed_form) << ','
          << format_number(r.mc.value) << ',' << format_number(r.mc.std_error) << ','
          << r.mc.n_effective << ',' << r.mc.seed << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
    }
    write_file_atomically(o.csv, csv.str());
  }
  return all_pass ? kExitOk : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian posteriors, hiring thresholds and fairness audits for a two-stage "
               "Gaussian screening pipeline"};
  app.set_version_flag("--version", std::string("pipefair ") + PIPEFAIR_VERSION);
  app.require_subcommand(1);

  PosteriorOptions post;
  auto* c_post = app.add_subcommand("posterior", "Employer posterior mean at a grade");
  c_post->add_option("scenario", post.scenario, "Scenario file")->required();
  c_post->add_option("--group", post.group, "Group (1 or 2)")->check(CLI::Range(1, 2));
  c_post->add_option("--beta", post.beta, "Threshold rule (accepts -inf)");
  c_post->add_option("--rule", post.rule, "Rule spec, e.g. step:0:0.5,1:1");
  c_post->add_option("--grade", post.grade, "Grade g")->required();

  CalibrateOptions cal;
  auto* c_cal = app.add_subcommand("calibrate", "Construct admission thresholds");
  c_cal->add_option("scenario", cal.scenario, "Scenario file")->required();
  c_cal->add_option("--mode", cal.mode, "igm | no-grades | noiseless | eo-gamma1")->required();
  cal.costs.add_to(c_cal);

  AuditOptions aud;
  auto* c_aud = app.add_subcommand("audit", "EO gap, IGM violation and sIGM gap");
  c_aud->add_option("scenario", aud.scenario, "Scenario file")->required();
  c_aud->add_option("--rule1", aud.rule1, "Group 1 rule spec (default: from file)");
  c_aud->add_option("--rule2", aud.rule2, "Group 2 rule spec (default: from file)");
  c_aud->add_option("--exam", aud.exam, "noisy | noiseless");
  c_aud->add_option("--csv", aud.csv, "Write the report as CSV");
  aud.costs.add_to(c_aud);

  SweepOptions sw;
  auto* c_sw = app.add_subcommand("sweep", "Violation over a grid of threshold pairs");
  c_sw->add_option("scenario", sw.scenario, "Scenario file")->required();
  c_sw->add_option("--grid1", sw.grid1, "Group 1 thresholds lo:hi:points");
  c_sw->add_option("--grid2", sw.grid2, "Group 2 thresholds lo:hi:points");
  c_sw->add_option("--target", sw.target, "multi-igm | multi-eo | sigm");
  c_sw->add_option("--csv", sw.csv, "Write records to this file instead of stdout");
  c_sw->add_option("--threads", sw.threads, "Worker threads (default: $PIPEFAIR_THREADS or all cores)");
  sw.costs.add_to(c_sw);

  McCheckOptions mc;
  auto* c_mc = app.add_subcommand("mc-check", "Closed forms against Monte Carlo");
  c_mc->add_option("scenario", mc.scenario, "Scenario file")->required();
  c_mc->add_option("--samples", mc.samples, "Samples per check");
  c_mc->add_option("--seed", mc.seed, "Base seed");
  c_mc->add_option("--threads", mc.threads, "Worker threads (default: $PIPEFAIR_THREADS or all cores)");
  c_mc->add_option("--csv", mc.csv, "Write the table as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*c_post) return cmd_posterior(post, out);
    if (*c_cal) return cmd_calibrate(cal, out);
    if (*c_aud) return cmd_audit(aud, out);
    if (*c_sw) return cmd_sweep(sw, out);
    if (*c_mc) return cmd_mc_check(mc, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace pipefair
