#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rightmost/errors.hpp"
#include "rightmost/estimators.hpp"
#include "rightmost/parallel.hpp"
#include "rightmost/qsd.hpp"
#include "rightmost/renewal.hpp"

namespace rightmost::cli {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json opt_num(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json fit_json(const std::optional<DecayFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope},       {"intercept", fit->intercept}, {"r2", fit->r_squared},
          {"slope_se", fit->slope_se}, {"x_min", fit->x_min},         {"x_max", fit->x_max},
          {"points", fit->points}};
}

Truncation parse_mode(const std::string& mode) {
  if (mode == "project") return Truncation::Project;
  if (mode == "kill") return Truncation::Kill;
  throw ConfigError("--mode must be project or kill, got '" + mode + "'");
}

int threads_for(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("RIGHTMOST_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("RIGHTMOST_THREADS must be a positive integer, got '") + env + "'");
  }
  return resolve_threads(0);
}

// Width that keeps a finite start inside the window for n levels.
int auto_window(const InitialCondition& init, int n) {
  if (init.kind == InitialCondition::Kind::Full) return 128;
  return (n + 1) / 2 + init.depth_sites() + (n + 1) / 2 + 2;
}

SimParams params_for(const RunConfig& cfg, const InitialCondition& init, int n) {
  SimParams p{cfg.p, std::max(n, 1), cfg.window > 0 ? cfg.window : auto_window(init, n), cfg.seed};
  p.validate();
  return p;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_common(const RunConfig& cfg) {
  require(cfg.p >= 0.0 && cfg.p <= 1.0, "--p must lie in [0,1]");
  require(cfg.trials >= 1, "--trials must be >= 1");
  require(cfg.window == 0 || cfg.window >= 2, "--window must be >= 2 (or 0 for automatic)");
  require(cfg.format == "csv" || cfg.format == "json", "--format must be csv or json");
  require(cfg.min_count >= 1, "--min-count must be >= 1");
}

struct Output {
  std::string header;
  std::ostringstream body;
};

std::string csv_header(const RunConfig& cfg) { return "# " + cfg.header_json() + "\n"; }

json header_object(const RunConfig& cfg) { return json::parse(cfg.header_json()); }

std::string cmd_survival(const RunConfig& cfg) {
  const auto init = InitialCondition::parse(cfg.initial);
  require(init.kind != InitialCondition::Kind::Full, "survival needs --initial origin or finite:<offsets>");
  require(cfg.n >= 1, "--n must be >= 1");
  const SimParams params = params_for(cfg, init, cfg.n);
  const auto alive = survival_counts(params, init, cfg.trials, threads_for(cfg));
  json rows = json::array();
  std::ostringstream csv;
  csv << csv_header(cfg) << "n,survivors,p_hat,ci_low,ci_high\n";
  for (int n = 1; n <= cfg.n; ++n) {
    const auto s = alive[static_cast<std::size_t>(n)];
    const double p_hat = static_cast<double>(s) / static_cast<double>(cfg.trials);
    const auto ci = wilson_ci(s, cfg.trials);
    csv << n << ',' << s << ',' << num(p_hat) << ',' << num(ci.low) << ',' << num(ci.high) << '\n';
    rows.push_back({{"n", n}, {"survivors", s}, {"p_hat", p_hat}, {"ci_low", ci.low}, {"ci_high", ci.high}});
  }
  if (cfg.format == "csv") return csv.str();
  return json{{"header", header_object(cfg)}, {"rows", rows}}.dump(2) + "\n";
}

std::string cmd_qsd_exact(const RunConfig& cfg) {
  const TruncatedStateSpace space{cfg.w, parse_mode(cfg.mode)};
  const Kernel kernel = build_kernel(cfg.p, space);
  const YaglomResult y = yaglom(kernel);
  const double residual = fixed_point_residual(kernel, y.nu);
  if (cfg.format == "csv") {
    std::ostringstream csv;
    csv << csv_header(cfg) << "# lambda=" << num(y.lambda) << " iterations=" << y.iterations << '\n';
    csv << "state,offsets,prob\n";
    for (const auto& [s, prob] : y.nu.probs) {
      csv << s << ",\"" << json(TruncatedStateSpace::offsets_of(s)).dump() << "\"," << num(prob) << '\n';
    }
    return csv.str();
  }
  json states = json::array();
  for (const auto& [s, prob] : y.nu.probs) {
    states.push_back({{"offsets", TruncatedStateSpace::offsets_of(s)}, {"prob", prob}});
  }
  return json{{"header", header_object(cfg)},
              {"p", cfg.p},
              {"w", cfg.w},
              {"mode", cfg.mode},
              {"lambda", y.lambda},
              {"iterations", y.iterations},
              {"residual", residual},
              {"states", states}}
             .dump(2) +
         "\n";
}

std::string cmd_qsd_mc(const RunConfig& cfg) {
  require(cfg.n >= 0, "--n must be >= 0");
  require(cfg.r >= 1 && cfg.r <= 20, "--r must lie in 1..20");
  const auto init = InitialCondition::origin();
  const SimParams params = params_for(cfg, init, cfg.n);
  const ConditionalLaw res = conditional_law_mc(params, cfg.n, cfg.r, cfg.trials, threads_for(cfg));
  const auto survivors = res.sample.survivors;
  std::ostringstream csv;
  csv << csv_header(cfg) << "pattern,count,prob,ci_low,ci_high,survivors,trials\n";
  json rows = json::array();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cfg.r); ++bits) {
    const auto count = res.sample.patterns[bits];
    const double prob = static_cast<double>(count) / static_cast<double>(survivors);
    const auto ci = wilson_ci(count, survivors);
    const std::string pattern = CylinderPattern{cfg.r, bits}.to_string();
    csv << pattern << ',' << count << ',' << num(prob) << ',' << num(ci.low) << ',' << num(ci.high) << ','
        << survivors << ',' << cfg.trials << '\n';
    rows.push_back({{"pattern", pattern}, {"count", count}, {"prob", prob}, {"ci_low", ci.low},
                    {"ci_high", ci.high}});
  }
  if (cfg.format == "csv") return csv.str();
  return json{{"header", header_object(cfg)}, {"survivors", survivors}, {"trials", cfg.trials}, {"rows", rows}}
             .dump(2) +
         "\n";
}

std::string cmd_converge(const RunConfig& cfg) {
  require(!cfg.n_list.empty(), "--n-list is required");
  require(cfg.r >= 1 && cfg.r < cfg.w, "--r must satisfy 1 <= r < w");
  const auto init = InitialCondition::parse(cfg.initial);
  const int n_max = *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
  const SimParams params = params_for(cfg, init, n_max);
  const auto oracle = yaglom(build_kernel(cfg.p, TruncatedStateSpace{cfg.w, parse_mode(cfg.mode)}));
  const auto target = project_to_cylinder(oracle.nu, cfg.r);
  const auto report = convergence_experiment(params, init, cfg.n_list, cfg.r, cfg.trials, target, threads_for(cfg));

  std::ostringstream csv;
  csv << csv_header(cfg) << "n,tv,ci,samples,m,good_fraction\n";
  json rows = json::array();
  for (const auto& row : report.rows) {
    csv << row.n << ',' << num(row.tv) << ',' << num(row.ci) << ',' << row.samples << ',' << row.m << ','
        << (row.good_fraction ? num(*row.good_fraction) : "") << '\n';
    rows.push_back({{"n", row.n},
                    {"tv", row.tv},
                    {"ci", row.ci},
                    {"samples", row.samples},
                    {"m", row.m},
                    {"good_fraction", opt_num(row.good_fraction)}});
  }
  csv << "# monotone=" << (report.monotone ? "true" : "false") << " lambda=" << num(oracle.lambda);
  if (init.kind == InitialCondition::Kind::Full) csv << " reach_probability=" << num(report.reach_probability);
  csv << '\n';
  if (cfg.format == "csv") return csv.str();
  json doc{{"header", header_object(cfg)},
           {"rows", rows},
           {"monotone", report.monotone},
           {"lambda", oracle.lambda},
           {"window", params.window_width}};
  if (init.kind == InitialCondition::Kind::Full) doc["reach_probability"] = report.reach_probability;
  return doc.dump(2) + "\n";
}

std::string cmd_renewal(const RunConfig& cfg) {
  const auto init = InitialCondition::parse(cfg.initial);
  require(init.kind == InitialCondition::Kind::Full, "renewal needs --initial full");
  require(cfg.n >= 1, "--n must be >= 1");
  const SimParams params = params_for(cfg, init, cfg.n);
  const std::int64_t beta_trials = cfg.beta_trials > 0 ? cfg.beta_trials : cfg.trials;
  const TailReport rep = tail_statistics(params, init, cfg.n, cfg.trials, beta_trials, threads_for(cfg));

  json rows = json::array();
  std::ostringstream csv;
  csv << csv_header(cfg) << "m,count_I_ge_m,p_I_ge_m,count_YI_ge_m2,p_YI_ge_m2\n";
  for (const auto& r : rep.rows) {
    csv << r.m << ',' << r.count_i << ',' << num(r.p_i) << ',' << r.count_y << ',' << num(r.p_y) << '\n';
    rows.push_back({{"m", r.m},
                    {"count_I_ge_m", r.count_i},
                    {"p_I_ge_m", r.p_i},
                    {"count_YI_ge_m2", r.count_y},
                    {"p_YI_ge_m2", r.p_y}});
  }
  const json summary{{"beta_hat", opt_num(rep.beta.beta)},
                     {"beta_se", opt_num(rep.beta.beta_se)},
                     {"cone_fit", fit_json(rep.beta.cone)},
                     {"survival_rate", opt_num(rep.beta.survival_rate)},
                     {"survival_fit", fit_json(rep.beta.survival)},
                     {"beta_note", rep.beta.note},
                     {"beta_trials", beta_trials},
                     {"i_tail_fit", fit_json(rep.i_fit)},
                     {"samples", rep.samples},
                     {"reach_probability", rep.reach_probability},
                     {"not_reaching_rate", rep.not_reaching_rate},
                     {"window", rep.window_width}};
  if (cfg.format == "csv") {
    csv << "# summary " << summary.dump() << '\n';
    return csv.str();
  }
  return json{{"header", header_object(cfg)}, {"rows", rows}, {"summary", summary}}.dump(2) + "\n";
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--p", cfg.p, "bond-open probability")->capture_default_str();
  sub->add_option("--trials", cfg.trials, "number of Monte Carlo trials")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  sub->add_option("--window", cfg.window, "tracked sites per level (0: automatic)")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "worker threads (0: RIGHTMOST_THREADS or all cores)");
  sub->add_option("--out", cfg.out, "output file (default: stdout)");
  sub->add_option("--format", cfg.format, "csv or json")->capture_default_str();
}

}  // namespace

std::string RunConfig::header_json() const {
  json config{{"subcommand", subcommand},
              {"p", p},
              {"n", n},
              {"n_list", n_list},
              {"trials", trials},
              {"seed", seed},
              {"window", window},
              {"r", r},
              {"initial", initial},
              {"w", w},
              {"mode", mode},
              {"min_count", min_count},
              {"beta_trials", beta_trials},
              {"format", format}};
  return json{{"artifact", "rightmost"}, {"version", kVersion}, {"config", config}}.dump();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Oriented percolation seen from its rightmost point"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto* survival = app.add_subcommand("survival", "survival curve P(T > n) from a finite start");
  add_common(survival, cfg);
  survival->add_option("--n", cfg.n, "highest level")->capture_default_str();
  survival->add_option("--initial", cfg.initial, "origin or finite:<offsets>")->capture_default_str();

  auto* exact = app.add_subcommand("qsd-exact", "quasi-stationary law of the truncated chain");
  exact->add_option("--p", cfg.p, "bond-open probability")->capture_default_str();
  exact->add_option("--w", cfg.w, "tracked depth in sites (<= 12)")->capture_default_str();
  exact->add_option("--mode", cfg.mode, "project or kill")->capture_default_str();
  exact->add_option("--out", cfg.out, "output file (default: stdout)");
  exact->add_option("--format", cfg.format, "json or csv");

  auto* mc = app.add_subcommand("qsd-mc", "conditioned Monte Carlo law of the cylinder pattern");
  add_common(mc, cfg);
  mc->add_option("--n", cfg.n, "level")->capture_default_str();
  mc->add_option("--r", cfg.r, "cylinder radius")->capture_default_str();

  auto* converge = app.add_subcommand("converge", "distance to the quasi-stationary law along n");
  add_common(converge, cfg);
  converge->add_option("--n-list", cfg.n_list, "comma-separated levels")->delimiter(',')->required();
  converge->add_option("--r", cfg.r, "cylinder radius")->capture_default_str();
  converge->add_option("--initial", cfg.initial, "full, origin or finite:<offsets>")->capture_default_str();
  converge->add_option("--w", cfg.w, "oracle depth")->capture_default_str();
  converge->add_option("--mode", cfg.mode, "oracle truncation: project or kill")->capture_default_str();

  auto* renewal = app.add_subcommand("renewal", "renewal index tails");
  add_common(renewal, cfg);
  renewal->add_option("--n", cfg.n, "horizon level")->capture_default_str();
  renewal->add_option("--initial", cfg.initial, "full")->capture_default_str();
  renewal->add_option("--beta-trials", cfg.beta_trials, "trials for the decay fits (0: --trials)");
  renewal->add_option("--min-count", cfg.min_count, "minimum count for a fit point")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    std::string text;
    if (survival->parsed()) {
      cfg.subcommand = "survival";
      validate_common(cfg);
      text = cmd_survival(cfg);
    } else if (exact->parsed()) {
      cfg.subcommand = "qsd-exact";
      if (exact->count("--format") == 0) cfg.format = "json";
      validate_common(cfg);
      text = cmd_qsd_exact(cfg);
    } else if (mc->parsed()) {
      cfg.subcommand = "qsd-mc";
      validate_common(cfg);
      text = cmd_qsd_mc(cfg);
    } else if (converge->parsed()) {
      cfg.subcommand = "converge";
      if (converge->count("--initial") == 0) cfg.initial = "full";
      validate_common(cfg);
      text = cmd_converge(cfg);
    } else {
      cfg.subcommand = "renewal";
      if (renewal->count("--initial") == 0) cfg.initial = "full";
      if (renewal->count("--n") == 0) cfg.n = 80;
      validate_common(cfg);
      text = cmd_renewal(cfg);
    }
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file '" + cfg.out + "'");
      file << text;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalGuard& e) {
    err << "numerical guard: " << e.what() << '\n';
    return kGuardTripped;
  } catch (const WindowOverflow& e) {
    err << "window overflow: " << e.what() << '\n';
    return kGuardTripped;
  } catch (const NoData& e) {
    err << "no data: " << e.what() << '\n';
    return kNoData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"rightmost"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rightmost::cli
