// mssc: command-line front end for the spectral coherence independence tests.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mssc/ar1.hpp"
#include "mssc/errors.hpp"
#include "mssc/experiment.hpp"
#include "mssc/lss.hpp"
#include "mssc/mssc_test.hpp"
#include "mssc/panel_io.hpp"
#include "mssc/rng.hpp"

namespace {

using namespace mssc;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

Ar1Variant parse_variant(const std::string& name) {
  if (name == "H0" || name == "h0") return Ar1Variant::H0;
  if (name == "H1loc" || name == "local") return Ar1Variant::H1Local;
  if (name == "H1glob" || name == "global") return Ar1Variant::H1Global;
  throw InvalidInput("unknown variant '" + name + "' (expected H0, H1loc or H1glob)");
}

PanelFormat parse_format(const std::string& name, const std::string& path) {
  if (name == "csv") return PanelFormat::Csv;
  if (name == "binary" || name == "bin") return PanelFormat::Binary;
  if (name == "auto") {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    return ext == "csv" ? PanelFormat::Csv : PanelFormat::Binary;
  }
  throw InvalidInput("unknown format '" + name + "' (expected csv, binary or auto)");
}

GridKind parse_grid(const std::string& name) {
  if (name == "test") return GridKind::Test;
  if (name == "fourier") return GridKind::Fourier;
  throw InvalidInput("grid must be 'test' or 'fourier'");
}

// "659,180,90;316,100,50" -> ladder of (N, B, M)
std::vector<LadderPoint> parse_ladder(const std::string& text) {
  std::vector<LadderPoint> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.empty()) continue;
    LadderPoint p;
    char c1 = 0;
    char c2 = 0;
    std::stringstream ss(item);
    if (!(ss >> p.N >> c1 >> p.B >> c2 >> p.M) || c1 != ',' || c2 != ',') {
      throw InvalidInput("cannot parse ladder point '" + item + "' (expected N,B,M)");
    }
    out.push_back(p);
  }
  return out;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw InvalidInput("cannot open '" + out + "' for writing");
    os << text;
  }
}

json test_report_json(const TestReport& r) {
  json j = {{"statistic", r.statistic},
            {"value", r.value},
            {"threshold", r.threshold},
            {"p_value", r.p_value},
            {"reject", r.reject},
            {"config", {{"N", r.config.N}, {"B", r.config.B}, {"M", r.config.M}, {"alpha", r.config.alpha}}},
            {"grid", r.grid == GridKind::Test ? "test" : "fourier"}};
  if (r.argmax) {
    // 1-based series indices, as they appear in the CSV header.
    j["argmax"] = {{"i", r.argmax->i + 1}, {"j", r.argmax->j + 1}, {"bin", r.argmax->bin}, {"nu", r.argmax->nu}};
  }
  if (r.rescaled) j["rescaled"] = *r.rescaled;
  return j;
}

struct CommonFlags {
  std::uint64_t seed = 1;
  long long reps = 0;
  unsigned parallel = 1;
  std::string out;
  std::string config;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--reps", f.reps, "Monte Carlo replications");
  cmd->add_option("--parallel", f.parallel, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output path (or prefix for experiments)");
  cmd->add_option("--config", f.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_flag("--timing", f.timing, "Include wall time in reports");
}

struct ExperimentFlags {
  std::string ladder;
  double alpha = 0.05;
  double theta = 0.5;
  double beta = -1.0;
  double r_target = -1.0;
  std::string statistics;
  long long calib_reps = 0;
  double epsilon = 0.1;
  std::string grid = "test";
};

ExperimentConfig build_config(ExperimentKind kind, const CommonFlags& c, const ExperimentFlags& e,
                              const CLI::App& cmd) {
  ExperimentConfig cfg;
  if (!c.config.empty()) {
    std::ifstream is(c.config);
    json j;
    try {
      is >> j;
    } catch (const json::exception& ex) {
      throw InvalidInput("cannot parse '" + c.config + "': " + ex.what());
    }
    // A full report carries its config under "config".
    cfg = config_from_json(j.is_object() && j.contains("config") ? j.at("config") : j);
  }
  cfg.experiment = kind;
  auto given = [&](const char* name) {
    const CLI::Option* opt = cmd.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  // Explicit flags override the file.
  if (given("--ladder")) cfg.ladder = parse_ladder(e.ladder);
  if (given("--alpha")) cfg.alpha = e.alpha;
  if (given("--theta")) cfg.theta = e.theta;
  if (given("--beta")) cfg.alternative = Alternative::local(e.beta);
  if (given("--r-target")) cfg.alternative = Alternative::global(e.r_target);
  if (given("--statistics")) {
    cfg.statistics.clear();
    std::stringstream ss(e.statistics);
    std::string s;
    while (std::getline(ss, s, ',')) cfg.statistics.push_back(parse_statistic(s));
  }
  if (given("--calib-reps")) cfg.n_calib = e.calib_reps;
  if (given("--epsilon")) cfg.epsilon = e.epsilon;
  if (given("--grid")) cfg.grid = parse_grid(e.grid);
  if (given("--seed")) cfg.seed = c.seed;
  if (given("--reps")) cfg.n_reps = c.reps;
  if (given("--parallel")) cfg.parallelism = c.parallel;
  return cfg;
}

void print_summary(const ExperimentReport& report) {
  for (const auto& r : report.rejections) {
    std::printf("%-26s %-5s rate=%.4f (%lld/%lld)  threshold=%.6g [%s]\n", r.size.label().c_str(),
                to_string(r.statistic), r.rejection_rate(), static_cast<long long>(r.rejections),
                static_cast<long long>(r.n_reps), r.threshold, r.threshold_source.c_str());
  }
  for (const auto& c : report.rocs) {
    std::printf("%-26s %-5s AUC=%.4f  beta=%.6g\n", c.size.label().c_str(), to_string(c.statistic),
                c.auc, c.beta);
  }
  for (const auto& f : report.fits) {
    std::printf("%-26s KS=%.4f  n=%zu\n", f.size.label().c_str(), f.ks_distance, f.rescaled.size());
  }
  for (const auto& g : report.gaps) {
    std::printf("%-26s median numerator gap=%.6g  median denominator gap=%.6g\n",
                g.size.label().c_str(), g.median_numerator, g.median_denominator);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MSSC independence testing for multivariate complex time series"};
  app.require_subcommand(1);

  // simulate
  CommonFlags sim_common;
  Index sim_M = 2;
  Index sim_N = 256;
  double sim_theta = 0.5;
  double sim_beta = 0.0;
  std::string sim_variant = "H0";
  std::string sim_format = "auto";
  std::uint32_t sim_replication = 0;
  auto* sim = app.add_subcommand("simulate", "Simulate an AR(1) panel and write it to a file");
  add_common(sim, sim_common);
  sim->add_option("-M,--series", sim_M, "Number of series")->required();
  sim->add_option("-N,--samples", sim_N, "Number of samples")->required();
  sim->add_option("--theta", sim_theta, "Diagonal AR coefficient");
  sim->add_option("--beta", sim_beta, "Coupling coefficient");
  sim->add_option("--variant", sim_variant, "H0 | H1loc | H1glob");
  sim->add_option("--format", sim_format, "csv | binary | auto (from extension)");
  sim->add_option("--replication", sim_replication, "Replication index within the seed");

  // test
  CommonFlags test_common;
  std::string test_input;
  std::string test_format = "auto";
  int test_B = 0;
  double test_alpha = 0.05;
  std::string test_statistic = "mssc";
  std::string test_grid = "test";
  double test_null_theta = 0.5;
  auto* test = app.add_subcommand("test", "Run an independence test on a panel file");
  add_common(test, test_common);
  test->add_option("input", test_input, "Panel file (CSV or binary)")->required();
  test->add_option("--format", test_format, "csv | binary | auto");
  test->add_option("-B,--span", test_B, "Smoothing span (even)")->required();
  test->add_option("--alpha", test_alpha, "Significance level");
  test->add_option("--statistic", test_statistic, "mssc | frob | log");
  test->add_option("--grid", test_grid, "test | fourier (fourier is outside the asymptotic guarantee)");
  test->add_option("--null-theta", test_null_theta,
                   "AR coefficient of the H0 model used to calibrate LSS thresholds");

  // experiments
  struct ExperimentCommand {
    ExperimentKind kind;
    CLI::App* cmd;
    CommonFlags common;
    ExperimentFlags flags;
  };
  std::vector<ExperimentCommand> experiments;
  experiments.reserve(5);
  const std::pair<ExperimentKind, const char*> verbs[] = {
      {ExperimentKind::Type1, "type1"},
      {ExperimentKind::Power, "power"},
      {ExperimentKind::Roc, "roc"},
      {ExperimentKind::GumbelFit, "gumbel-fit"},
      {ExperimentKind::BartlettGap, "bartlett-gap"},
  };
  for (const auto& [kind, verb] : verbs) {
    experiments.push_back({kind, nullptr, {}, {}});
    auto& e = experiments.back();
    e.cmd = app.add_subcommand(verb, std::string("Monte Carlo experiment: ") + verb);
    add_common(e.cmd, e.common);
    e.cmd->add_option("--ladder", e.flags.ladder, "Sizes as N,B,M;N,B,M;...");
    e.cmd->add_option("--alpha", e.flags.alpha, "Significance level");
    e.cmd->add_option("--theta", e.flags.theta, "Diagonal AR coefficient");
    if (kind == ExperimentKind::Power || kind == ExperimentKind::Roc) {
      auto* b = e.cmd->add_option("--beta", e.flags.beta, "Local alternative coupling");
      auto* r = e.cmd->add_option("--r-target", e.flags.r_target, "Global alternative dependence r");
      b->excludes(r);
    }
    if (kind != ExperimentKind::GumbelFit && kind != ExperimentKind::BartlettGap) {
      e.cmd->add_option("--statistics", e.flags.statistics, "Comma list of mssc,frob,log");
      e.cmd->add_option("--calib-reps", e.flags.calib_reps, "H0 draws for Monte Carlo thresholds");
      e.cmd->add_option("--epsilon", e.flags.epsilon, "LSS normalization exponent");
    }
    e.cmd->add_option("--grid", e.flags.grid, "test | fourier");
  }

  // calibrate-beta
  CommonFlags cb_common;
  Index cb_M = 2;
  double cb_theta = 0.5;
  std::string cb_variant = "H1glob";
  double cb_r = 0.01;
  auto* cb = app.add_subcommand("calibrate-beta", "Find the coupling giving a target dependence r");
  add_common(cb, cb_common);
  cb->add_option("-M,--series", cb_M, "Number of series")->required();
  cb->add_option("--theta", cb_theta, "Diagonal AR coefficient");
  cb->add_option("--variant", cb_variant, "H1loc | H1glob");
  cb->add_option("--r-target", cb_r, "Target dependence in [0, 0.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*sim) {
      const Ar1Spec spec{sim_M, sim_theta, sim_beta, parse_variant(sim_variant)};
      if (sim_common.out.empty()) throw InvalidInput("simulate needs --out");
      const RngStream stream{sim_common.seed, stream_domain(StreamPurpose::User), sim_replication};
      const TimeSeriesPanel panel = simulate_panel(spec, sim_N, stream);
      write_panel(sim_common.out, panel, parse_format(sim_format, sim_common.out));
      std::fprintf(stderr, "wrote %lld x %lld panel to %s\n", static_cast<long long>(sim_M),
                   static_cast<long long>(sim_N), sim_common.out.c_str());
      return kExitOk;
    }

    if (*test) {
      const TimeSeriesPanel panel = read_panel(test_input, parse_format(test_format, test_input));
      const GridKind grid = parse_grid(test_grid);
      const StatisticKind kind = parse_statistic(test_statistic);
      TestReport report;
      json extra;
      if (kind == StatisticKind::Mssc) {
        report = mssc_test(panel, test_B, test_alpha, grid);
      } else {
        const Index N = panel.num_samples();
        const Index M = panel.num_series();
        const LssConfig cfg{kind == StatisticKind::LssFrobenius ? LssFunction::Frobenius : LssFunction::LogDet,
                            0.1, grid};
        const long long reps = test_common.reps > 0 ? test_common.reps : 1000;
        if (reps < 100) throw InvalidInput("LSS calibration needs at least 100 replications");
        const StatisticKind kinds[] = {kind};
        const auto draws = simulate_statistics(Ar1Simulator(Ar1Spec{M, test_null_theta, 0.0, Ar1Variant::H0}), N,
                                               test_B, kinds, reps, test_common.seed,
                                               stream_domain(StreamPurpose::Calibration), test_common.parallel,
                                               cfg.epsilon, grid);
        std::vector<double> null_values;
        for (const auto& d : draws) null_values.push_back(d.get(kind));
        report.statistic = to_string(kind);
        report.value = lss_statistic(panel, test_B, cfg);
        report.threshold = empirical_quantile(null_values, 1.0 - test_alpha);
        report.reject = report.value > report.threshold;
        report.config = {N, test_B, M, test_alpha};
        report.grid = grid;
        long long above = 0;
        for (double v : null_values) above += v >= report.value ? 1 : 0;
        report.p_value = static_cast<double>(above + 1) / static_cast<double>(reps + 1);
        extra = {{"calibration", {{"n_reps", reps}, {"seed", test_common.seed}, {"null_theta", test_null_theta}}}};
      }
      json j = test_report_json(report);
      if (!extra.is_null()) j.update(extra);
      std::fprintf(stderr, "%s = %.6g, threshold = %.6g, p = %.4g -> %s\n", report.statistic.c_str(),
                   report.value, report.threshold, report.p_value,
                   report.reject ? "reject independence" : "do not reject");
      emit(test_common.out, j.dump(2) + "\n");
      return kExitOk;
    }

    for (auto& e : experiments) {
      if (!*e.cmd) continue;
      const ExperimentConfig cfg = build_config(e.kind, e.common, e.flags, *e.cmd);
      const ExperimentReport report = run_experiment(cfg);
      print_summary(report);
      if (e.common.out.empty()) {
        std::cout << report.dump(e.common.timing);
      } else {
        for (const auto& path : report.write_files(e.common.out, e.common.timing)) {
          std::fprintf(stderr, "wrote %s\n", path.c_str());
        }
      }
      return kExitOk;
    }

    if (*cb) {
      const Ar1Variant variant = parse_variant(cb_variant);
      const double beta = calibrate_beta(cb_M, cb_theta, variant, cb_r);
      const double r = dependence_measure(Ar1Spec{cb_M, cb_theta, beta, variant});
      const json j = {{"M", cb_M}, {"theta", cb_theta}, {"variant", to_string(variant)},
                      {"r_target", cb_r}, {"beta", beta}, {"r", r}};
      emit(cb_common.out, j.dump(2) + "\n");
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const Unsupported& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
