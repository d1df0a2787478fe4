#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mssc/ar1.hpp"
#include "mssc/errors.hpp"
#include "mssc/gumbel.hpp"
#include "mssc/lss.hpp"
#include "mssc/mssc_test.hpp"
#include "mssc/oracle.hpp"
#include "mssc/parallel.hpp"
#include "mssc/rng.hpp"

namespace mssc {

// ===========================================================================
// Configuration
// ===========================================================================

enum class ExperimentKind { Type1, Power, Roc, GumbelFit, BartlettGap };

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Type1: return "type1";
    case ExperimentKind::Power: return "power";
    case ExperimentKind::Roc: return "roc";
    case ExperimentKind::GumbelFit: return "gumbel_fit";
    case ExperimentKind::BartlettGap: return "bartlett_gap";
  }
  return "?";
}

inline ExperimentKind parse_experiment(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  for (auto kind : {ExperimentKind::Type1, ExperimentKind::Power, ExperimentKind::Roc,
                    ExperimentKind::GumbelFit, ExperimentKind::BartlettGap}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidInput("unknown experiment '" + name + "'");
}

struct LadderPoint {
  Index N = 0;
  int B = 0;
  Index M = 0;

  std::string label() const {
    return "(N=" + std::to_string(N) + ", B=" + std::to_string(B) + ", M=" + std::to_string(M) + ")";
  }
  bool operator==(const LadderPoint&) const = default;
};

struct Alternative {
  enum class Kind { None, Local, Global };
  Kind kind = Kind::None;
  double value = 0.0;  // beta for Local, target dependence r for Global

  static Alternative none() { return {}; }
  static Alternative local(double beta) { return {Kind::Local, beta}; }
  static Alternative global(double r_target) { return {Kind::Global, r_target}; }
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Type1;
  std::vector<LadderPoint> ladder;
  double alpha = 0.05;
  double theta = 0.5;
  Alternative alternative;
  Index n_reps = 2000;
  Index n_calib = 0;  // H0 draws for Monte Carlo thresholds; 0 means n_reps
  std::uint64_t seed = 1;
  unsigned parallelism = 1;  // execution only; never changes results
  std::vector<StatisticKind> statistics = {StatisticKind::Mssc};
  double epsilon = 0.1;
  GridKind grid = GridKind::Test;

  Index calibration_reps() const { return n_calib > 0 ? n_calib : n_reps; }

  void validate() const {
    if (ladder.empty()) throw InvalidInput("experiment ladder is empty");
    for (const auto& p : ladder) {
      if (p.B < 0 || p.B % 2 != 0 || static_cast<Index>(p.B) + 1 > p.N || p.M < 2) {
        throw InvalidInput("invalid ladder point " + p.label() +
                           ": need B even, B + 1 <= N and M >= 2");
      }
      if (p.N > 0xFFFFFFFFll || p.M > 0xFFFFFFFFll) {
        throw InvalidInput("ladder point " + p.label() + " exceeds 32-bit stream counters");
      }
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (!(std::abs(theta) < 1.0)) throw InvalidInput("theta must satisfy |theta| < 1");
    if (n_reps < 1) throw InvalidInput("n_reps must be positive");
    if (parallelism < 1) throw InvalidInput("parallelism must be at least 1");
    if (statistics.empty()) throw InvalidInput("no statistics selected");
    if (std::set<StatisticKind>(statistics.begin(), statistics.end()).size() != statistics.size()) {
      throw InvalidInput("duplicate statistic in selection");
    }
    const bool needs_alt =
        experiment == ExperimentKind::Power || experiment == ExperimentKind::Roc;
    if (needs_alt && alternative.kind == Alternative::Kind::None) {
      throw InvalidInput(std::string(to_string(experiment)) + " needs an alternative");
    }
    if (!needs_alt && alternative.kind != Alternative::Kind::None) {
      throw InvalidInput(std::string(to_string(experiment)) + " runs under H0 only");
    }
    if (alternative.kind == Alternative::Kind::Global &&
        !(alternative.value >= 0.0 && alternative.value < 0.5)) {
      throw InvalidInput("global alternative needs a target dependence r in [0, 0.5)");
    }
    if (experiment == ExperimentKind::GumbelFit && n_reps < 2) {
      throw InvalidInput("gumbel_fit needs at least two replications");
    }
    if (ladder.size() > 0xFFFF) throw InvalidInput("ladder too long");
  }
};

// ===========================================================================
// Report
// ===========================================================================

struct RejectionRow {
  LadderPoint size;
  StatisticKind statistic = StatisticKind::Mssc;
  Index rejections = 0;
  Index n_reps = 0;
  double threshold = 0.0;
  std::string threshold_source;  // "gumbel" or "monte_carlo"
  std::optional<double> beta;

  double rejection_rate() const {
    return n_reps > 0 ? static_cast<double>(rejections) / static_cast<double>(n_reps) : 0.0;
  }
};

struct RocCurve {
  LadderPoint size;
  StatisticKind statistic = StatisticKind::Mssc;
  std::vector<std::pair<double, double>> points;  // (false positive rate, true positive rate)
  double auc = 0.0;
  Index n_null = 0;
  Index n_alt = 0;
  double beta = 0.0;
};

struct GumbelFit {
  LadderPoint size;
  std::vector<double> rescaled;  // sorted
  double ks_distance = 0.0;
};

struct GapRow {
  LadderPoint size;
  std::vector<double> numerator;
  std::vector<double> denominator;
  double median_numerator = 0.0;
  double median_denominator = 0.0;
};

inline constexpr int kReportVersion = 1;

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<RejectionRow> rejections;
  std::vector<RocCurve> rocs;
  std::vector<GumbelFit> fits;
  std::vector<GapRow> gaps;
  double wall_seconds = 0.0;

  nlohmann::json to_json(bool include_timing = false) const;
  std::string dump(bool include_timing = false) const { return to_json(include_timing).dump(2) + "\n"; }
  // Writes <prefix>.json plus the CSV tables for this experiment kind.
  std::vector<std::string> write_files(const std::string& prefix, bool include_timing = false) const;
};

// ---------------------------------------------------------------------------
// JSON conversion
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json ladder = json::array();
  for (const auto& p : c.ladder) ladder.push_back({{"N", p.N}, {"B", p.B}, {"M", p.M}});
  json alt;
  switch (c.alternative.kind) {
    case Alternative::Kind::None: alt = {{"kind", "none"}}; break;
    case Alternative::Kind::Local: alt = {{"kind", "H1loc"}, {"beta", c.alternative.value}}; break;
    case Alternative::Kind::Global:
      alt = {{"kind", "H1glob"}, {"r_target", c.alternative.value}};
      break;
  }
  json stats = json::array();
  for (auto s : c.statistics) stats.push_back(to_string(s));
  return {{"experiment", to_string(c.experiment)},
          {"ladder", ladder},
          {"alpha", c.alpha},
          {"theta", c.theta},
          {"alternative", alt},
          {"n_reps", c.n_reps},
          {"n_calib", c.calibration_reps()},
          {"seed", c.seed},
          {"statistics", stats},
          {"epsilon", c.epsilon},
          {"grid", c.grid == GridKind::Test ? "test" : "fourier"}};
}

// Reads a configuration file. "parallelism" is accepted here even though it
// is not echoed into reports.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) c.experiment = parse_experiment(j.at("experiment").get<std::string>());
    for (const auto& p : j.at("ladder")) {
      if (p.is_array()) {
        if (p.size() != 3) throw InvalidInput("ladder entries must be [N, B, M]");
        c.ladder.push_back({p[0].get<Index>(), p[1].get<int>(), p[2].get<Index>()});
      } else {
        c.ladder.push_back({p.at("N").get<Index>(), p.at("B").get<int>(), p.at("M").get<Index>()});
      }
    }
    c.alpha = j.value("alpha", c.alpha);
    c.theta = j.value("theta", c.theta);
    if (j.contains("alternative")) {
      const auto& a = j.at("alternative");
      const std::string kind = a.value("kind", std::string("none"));
      if (kind == "none") {
        c.alternative = Alternative::none();
      } else if (kind == "H1loc" || kind == "local") {
        c.alternative = Alternative::local(a.at("beta").get<double>());
      } else if (kind == "H1glob" || kind == "global") {
        c.alternative = Alternative::global(a.at("r_target").get<double>());
      } else {
        throw InvalidInput("unknown alternative kind '" + kind + "'");
      }
    }
    c.n_reps = j.value("n_reps", c.n_reps);
    c.n_calib = j.value("n_calib", c.n_calib);
    c.seed = j.value("seed", c.seed);
    c.parallelism = j.value("parallelism", c.parallelism);
    if (j.contains("statistics")) {
      c.statistics.clear();
      for (const auto& s : j.at("statistics")) c.statistics.push_back(parse_statistic(s.get<std::string>()));
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    if (j.contains("grid")) {
      const std::string g = j.at("grid").get<std::string>();
      if (g == "test") c.grid = GridKind::Test;
      else if (g == "fourier") c.grid = GridKind::Fourier;
      else throw InvalidInput("grid must be 'test' or 'fourier'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed experiment configuration: ") + e.what());
  }
  return c;
}

inline nlohmann::json ExperimentReport::to_json(bool include_timing) const {
  using nlohmann::json;
  json results = json::array();
  for (const auto& r : rejections) {
    json row = {{"N", r.size.N},
                {"B", r.size.B},
                {"M", r.size.M},
                {"statistic", to_string(r.statistic)},
                {"rejection_rate", r.rejection_rate()},
                {"rejections", r.rejections},
                {"n_reps", r.n_reps},
                {"threshold", r.threshold},
                {"threshold_source", r.threshold_source}};
    if (r.beta) row["beta"] = *r.beta;
    results.push_back(row);
  }
  for (const auto& c : rocs) {
    json pts = json::array();
    for (const auto& [fpr, tpr] : c.points) pts.push_back({fpr, tpr});
    results.push_back({{"N", c.size.N},
                       {"B", c.size.B},
                       {"M", c.size.M},
                       {"statistic", to_string(c.statistic)},
                       {"auc", c.auc},
                       {"n_null", c.n_null},
                       {"n_alt", c.n_alt},
                       {"beta", c.beta},
                       {"points", pts}});
  }
  for (const auto& f : fits) {
    results.push_back({{"N", f.size.N},
                       {"B", f.size.B},
                       {"M", f.size.M},
                       {"statistic", "MSSC"},
                       {"ks_distance", f.ks_distance},
                       {"n_reps", static_cast<Index>(f.rescaled.size())}});
  }
  for (const auto& g : gaps) {
    results.push_back({{"N", g.size.N},
                       {"B", g.size.B},
                       {"M", g.size.M},
                       {"median_numerator_gap", g.median_numerator},
                       {"median_denominator_gap", g.median_denominator},
                       {"n_reps", static_cast<Index>(g.numerator.size())}});
  }
  json timing = include_timing ? json{{"wall_seconds", wall_seconds}} : json(nullptr);
  return {{"version", kReportVersion},
          {"config", config_to_json(config)},
          {"results", results},
          {"timing", timing}};
}

namespace detail {

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw InvalidInput("failed writing '" + path + "'");
}

}  // namespace detail

inline std::vector<std::string> ExperimentReport::write_files(const std::string& prefix,
                                                              bool include_timing) const {
  std::vector<std::string> written;
  detail::write_text(prefix + ".json", dump(include_timing));
  written.push_back(prefix + ".json");

  if (!rejections.empty()) {
    // One row per ladder point, one column per statistic.
    std::string csv = "N,B,M";
    for (auto s : config.statistics) csv += std::string(",") + to_string(s);
    csv += ",n_reps\n";
    for (const auto& p : config.ladder) {
      csv += std::to_string(p.N) + "," + std::to_string(p.B) + "," + std::to_string(p.M);
      Index reps = 0;
      for (auto s : config.statistics) {
        for (const auto& r : rejections) {
          if (r.size == p && r.statistic == s) {
            csv += "," + detail::format_number(r.rejection_rate());
            reps = r.n_reps;
          }
        }
      }
      csv += "," + std::to_string(reps) + "\n";
    }
    detail::write_text(prefix + "_table.csv", csv);
    written.push_back(prefix + "_table.csv");
  }
  if (!rocs.empty()) {
    std::string csv = "N,B,M,statistic,fpr,tpr\n";
    for (const auto& c : rocs) {
      for (const auto& [fpr, tpr] : c.points) {
        csv += std::to_string(c.size.N) + "," + std::to_string(c.size.B) + "," +
               std::to_string(c.size.M) + "," + to_string(c.statistic) + "," +
               detail::format_number(fpr) + "," + detail::format_number(tpr) + "\n";
      }
    }
    detail::write_text(prefix + "_roc.csv", csv);
    written.push_back(prefix + "_roc.csv");
  }
  if (!fits.empty()) {
    std::string csv = "N,B,M,rescaled,empirical_cdf,gumbel_cdf\n";
    for (const auto& f : fits) {
      const double n = static_cast<double>(f.rescaled.size());
      for (std::size_t i = 0; i < f.rescaled.size(); ++i) {
        const double t = f.rescaled[i];
        csv += std::to_string(f.size.N) + "," + std::to_string(f.size.B) + "," +
               std::to_string(f.size.M) + "," + detail::format_number(t) + "," +
               detail::format_number(static_cast<double>(i + 1) / n) + "," +
               detail::format_number(GumbelLaw::cdf(t)) + "\n";
      }
    }
    detail::write_text(prefix + "_ecdf.csv", csv);
    written.push_back(prefix + "_ecdf.csv");
  }
  if (!gaps.empty()) {
    std::string csv = "N,B,M,median_numerator_gap,median_denominator_gap,n_reps\n";
    for (const auto& g : gaps) {
      csv += std::to_string(g.size.N) + "," + std::to_string(g.size.B) + "," +
             std::to_string(g.size.M) + "," + detail::format_number(g.median_numerator) + "," +
             detail::format_number(g.median_denominator) + "," +
             std::to_string(g.numerator.size()) + "\n";
    }
    detail::write_text(prefix + "_table.csv", csv);
    written.push_back(prefix + "_table.csv");
  }
  return written;
}

// ===========================================================================
// Runners
// ===========================================================================

inline double median(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Empirical ROC from statistic samples under H0 (null) and H1 (alt). Every
// distinct observed value is used as a threshold "reject when >= t", swept
// from the top, so the points run from (0, 0) to (1, 1) and are monotone in
// both coordinates. The area is computed with the trapezoid rule.
inline std::pair<std::vector<std::pair<double, double>>, double> roc_curve(
    std::vector<double> null, std::vector<double> alt) {
  if (null.empty() || alt.empty()) throw InvalidInput("roc_curve needs samples under both hypotheses");
  std::sort(null.begin(), null.end(), std::greater<>());
  std::sort(alt.begin(), alt.end(), std::greater<>());
  std::vector<double> thresholds(null);
  thresholds.insert(thresholds.end(), alt.begin(), alt.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double n0 = static_cast<double>(null.size());
  const double n1 = static_cast<double>(alt.size());
  std::vector<std::pair<double, double>> points{{0.0, 0.0}};
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  double auc = 0.0;
  for (double t : thresholds) {
    while (i0 < null.size() && null[i0] >= t) ++i0;
    while (i1 < alt.size() && alt[i1] >= t) ++i1;
    const std::pair<double, double> p{static_cast<double>(i0) / n0, static_cast<double>(i1) / n1};
    auc += (p.first - points.back().first) * 0.5 * (p.second + points.back().second);
    points.push_back(p);
  }
  return {std::move(points), auc};
}

namespace detail {

inline std::uint32_t ladder_domain(StreamPurpose purpose, std::size_t ladder_index) {
  return stream_domain(purpose, static_cast<std::uint32_t>(ladder_index));
}

inline Ar1Spec null_model(const ExperimentConfig& c, Index M) {
  return Ar1Spec{M, c.theta, 0.0, Ar1Variant::H0};
}

inline Ar1Spec alternative_model(const ExperimentConfig& c, Index M) {
  switch (c.alternative.kind) {
    case Alternative::Kind::Local:
      return Ar1Spec{M, c.theta, c.alternative.value, Ar1Variant::H1Local};
    case Alternative::Kind::Global:
      return Ar1Spec{M, c.theta, calibrate_beta(M, c.theta, Ar1Variant::H1Global, c.alternative.value),
                     Ar1Variant::H1Global};
    case Alternative::Kind::None:
      break;
  }
  throw InvalidInput("no alternative configured");
}

inline std::vector<StatisticKind> lss_only(const std::vector<StatisticKind>& kinds) {
  std::vector<StatisticKind> out;
  for (auto k : kinds) {
    if (k != StatisticKind::Mssc) out.push_back(k);
  }
  return out;
}

inline Index count_above(const std::vector<StatisticValues>& values, StatisticKind kind,
                         double threshold) {
  Index n = 0;
  for (const auto& v : values) n += v.get(kind) > threshold ? 1 : 0;
  return n;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// Size of every selected test under H0. MSSC uses its Gumbel threshold; LSS
// statistics use Monte Carlo thresholds from a separate set of H0 draws.
inline ExperimentReport run_type1(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != ExperimentKind::Type1) throw InvalidInput("run_type1: wrong experiment kind");
  detail::Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  for (std::size_t li = 0; li < config.ladder.size(); ++li) {
    const LadderPoint& p = config.ladder[li];
    const Ar1Spec model = detail::null_model(config, p.M);
    const Ar1Simulator simulator(model);
    const auto values = simulate_statistics(
        simulator, p.N, p.B, config.statistics, config.n_reps, config.seed,
        detail::ladder_domain(StreamPurpose::Evaluation, li), config.parallelism, config.epsilon,
        config.grid);
    const auto lss = detail::lss_only(config.statistics);
    std::vector<CalibratedThreshold> kappas;
    if (!lss.empty()) {
      kappas = calibrate_thresholds_mc(
          model, p.N, p.B, lss, config.alpha, config.calibration_reps(), config.seed,
          {config.parallelism, detail::ladder_domain(StreamPurpose::Calibration, li),
           config.epsilon, config.grid});
    }
    for (auto kind : config.statistics) {
      RejectionRow row;
      row.size = p;
      row.statistic = kind;
      row.n_reps = config.n_reps;
      if (kind == StatisticKind::Mssc) {
        row.threshold = mssc_threshold(p.N, p.B, p.M, config.alpha);
        row.threshold_source = "gumbel";
      } else {
        row.threshold = std::find_if(kappas.begin(), kappas.end(),
                                     [&](const auto& k) { return k.kind == kind; })->kappa;
        row.threshold_source = "monte_carlo";
      }
      row.rejections = detail::count_above(values, kind, row.threshold);
      report.rejections.push_back(row);
    }
  }
  report.wall_seconds = clock.seconds();
  return report;
}

// Power under the alternative with every threshold set to the (1 - alpha)
// sample quantile of the same statistic under H0 at matching sizes.
inline ExperimentReport run_power(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != ExperimentKind::Power) throw InvalidInput("run_power: wrong experiment kind");
  detail::Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  for (std::size_t li = 0; li < config.ladder.size(); ++li) {
    const LadderPoint& p = config.ladder[li];
    const auto kappas = calibrate_thresholds_mc(
        detail::null_model(config, p.M), p.N, p.B, config.statistics, config.alpha,
        config.calibration_reps(), config.seed,
        {config.parallelism, detail::ladder_domain(StreamPurpose::Calibration, li), config.epsilon,
         config.grid});
    const Ar1Spec alt = detail::alternative_model(config, p.M);
    const auto values = simulate_statistics(
        Ar1Simulator(alt), p.N, p.B, config.statistics, config.n_reps, config.seed,
        detail::ladder_domain(StreamPurpose::Evaluation, li), config.parallelism, config.epsilon,
        config.grid);
    for (const auto& k : kappas) {
      RejectionRow row;
      row.size = p;
      row.statistic = k.kind;
      row.n_reps = config.n_reps;
      row.threshold = k.kappa;
      row.threshold_source = "monte_carlo";
      row.beta = alt.beta;
      row.rejections = detail::count_above(values, k.kind, k.kappa);
      report.rejections.push_back(row);
    }
  }
  report.wall_seconds = clock.seconds();
  return report;
}

inline ExperimentReport run_roc(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != ExperimentKind::Roc) throw InvalidInput("run_roc: wrong experiment kind");
  detail::Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  for (std::size_t li = 0; li < config.ladder.size(); ++li) {
    const LadderPoint& p = config.ladder[li];
    const auto null_values = simulate_statistics(
        Ar1Simulator(detail::null_model(config, p.M)), p.N, p.B, config.statistics,
        config.calibration_reps(), config.seed,
        detail::ladder_domain(StreamPurpose::Calibration, li), config.parallelism, config.epsilon,
        config.grid);
    const Ar1Spec alt = detail::alternative_model(config, p.M);
    const auto alt_values = simulate_statistics(
        Ar1Simulator(alt), p.N, p.B, config.statistics, config.n_reps, config.seed,
        detail::ladder_domain(StreamPurpose::Evaluation, li), config.parallelism, config.epsilon,
        config.grid);
    for (auto kind : config.statistics) {
      std::vector<double> x0;
      std::vector<double> x1;
      for (const auto& v : null_values) x0.push_back(v.get(kind));
      for (const auto& v : alt_values) x1.push_back(v.get(kind));
      auto [points, auc] = roc_curve(std::move(x0), std::move(x1));
      RocCurve curve;
      curve.size = p;
      curve.statistic = kind;
      curve.points = std::move(points);
      curve.auc = auc;
      curve.n_null = static_cast<Index>(null_values.size());
      curve.n_alt = static_cast<Index>(alt_values.size());
      curve.beta = alt.beta;
      report.rocs.push_back(std::move(curve));
    }
  }
  report.wall_seconds = clock.seconds();
  return report;
}

// Distribution of the rescaled MSSC under H0 against the standard Gumbel law.
inline ExperimentReport run_gumbel_fit(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != ExperimentKind::GumbelFit) {
    throw InvalidInput("run_gumbel_fit: wrong experiment kind");
  }
  detail::Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  report.config.statistics = {StatisticKind::Mssc};
  const StatisticKind kinds[] = {StatisticKind::Mssc};
  for (std::size_t li = 0; li < config.ladder.size(); ++li) {
    const LadderPoint& p = config.ladder[li];
    const auto values = simulate_statistics(
        Ar1Simulator(detail::null_model(config, p.M)), p.N, p.B, kinds, config.n_reps,
        config.seed, detail::ladder_domain(StreamPurpose::Evaluation, li), config.parallelism,
        config.epsilon, config.grid);
    GumbelFit fit;
    fit.size = p;
    for (const auto& v : values) fit.rescaled.push_back(v.mssc.rescaled);
    std::sort(fit.rescaled.begin(), fit.rescaled.end());
    fit.ks_distance = oracle::ks_statistic(fit.rescaled, GumbelLaw::cdf);
    report.fits.push_back(std::move(fit));
  }
  report.wall_seconds = clock.seconds();
  return report;
}

inline ExperimentReport run_bartlett_gap(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != ExperimentKind::BartlettGap) {
    throw InvalidInput("run_bartlett_gap: wrong experiment kind");
  }
  detail::Stopwatch clock;
  ExperimentReport report;
  report.config = config;
  for (std::size_t li = 0; li < config.ladder.size(); ++li) {
    const LadderPoint& p = config.ladder[li];
    const Ar1Simulator simulator(detail::null_model(config, p.M));
    const FftPlan plan(static_cast<std::size_t>(p.N));
    std::vector<oracle::BartlettGapReport> reps(static_cast<std::size_t>(config.n_reps));
    parallel_for(reps.size(), config.parallelism, [&](std::size_t r) {
      const RngStream stream{config.seed, detail::ladder_domain(StreamPurpose::Evaluation, li),
                             static_cast<std::uint32_t>(r)};
      reps[r] = oracle::bartlett_gap_report(simulator, p.N, p.B, stream, plan);
    });
    GapRow row;
    row.size = p;
    for (const auto& g : reps) {
      row.numerator.push_back(g.numerator_gap);
      row.denominator.push_back(g.denominator_gap);
    }
    row.median_numerator = median(row.numerator);
    row.median_denominator = median(row.denominator);
    report.gaps.push_back(std::move(row));
  }
  report.wall_seconds = clock.seconds();
  return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::Type1: return run_type1(config);
    case ExperimentKind::Power: return run_power(config);
    case ExperimentKind::Roc: return run_roc(config);
    case ExperimentKind::GumbelFit: return run_gumbel_fit(config);
    case ExperimentKind::BartlettGap: return run_bartlett_gap(config);
  }
  throw InvalidInput("unknown experiment kind");
}

}  // namespace mssc
