#pragma once

// Batch commands behind the chanres executable. Each command returns the
// report text and a process exit code so it can be driven from tests.
//
// Exit codes: 0 success, 1 suite failure, 2 invalid input, 3 solver failure.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chanres/channel_json.hpp"
#include "chanres/discrimination.hpp"

namespace chanres {

using ordered_json = nlohmann::ordered_json;

enum ExitCode : int { kExitOk = 0, kExitSuiteFailure = 1, kExitInvalid = 2, kExitSolver = 3 };

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::MaxIterations:
    case ErrorCode::Infeasible:
      return kExitSolver;
    case ErrorCode::AssertionMismatch:
      return kExitSuiteFailure;
    default:
      return kExitInvalid;
  }
}

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string command;
  std::string tag;  // verify suite name
  std::vector<std::string> inputs;
  int dim = 2;
  ClassTag cls = ClassTag::MIO;
  DistanceMeasure measure = DistanceMeasure::TraceDistance;
  double tol = 1e-6;
  int trials = 20;
  std::uint64_t seed = 1;
  int restarts = 4;
  int count = 10;
  std::string generator = "haar-unitary";
  bool include_dephasing = false;
  OutputFormat out = OutputFormat::Json;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string report;
};

/// 12 significant digits, locale independent.
inline std::string fmt12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s + '\n';
}

/// Independent per-trial stream so trial i does not depend on how many
/// numbers earlier trials consumed.
inline Rng trial_rng(std::uint64_t seed, int trial) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return Rng(z ^ (z >> 31));
}

// ---------------------------------------------------------------------------
// Random free channels used as witnesses.

/// Incoherent unitary: a permutation with random phases.
inline QuantumChannel random_incoherent_unitary(Rng& rng, int d) {
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  for (int i = d - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform() * (i + 1)) % (i + 1);
    std::swap(perm[i], perm[j]);
  }
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) u(perm[i], i) = std::polar(1.0, 2 * M_PI * rng.uniform());
  return unitary_channel(u, "incoherent-unitary");
}

/// A random MIO channel: mixture of an incoherent unitary and Delta o R.
inline QuantumChannel random_mio_channel(Rng& rng, int d) {
  const double w = rng.uniform();
  const QuantumChannel a = random_incoherent_unitary(rng, d);
  const QuantumChannel b = compose(dephasing_channel(d), random_channel(rng, d));
  QuantumChannel m = mixture({w, 1 - w}, {a, b});
  m.set_name("random-mio");
  return m;
}

// ---------------------------------------------------------------------------
// analyze

inline ordered_json analyze_channel(const QuantumChannel& n, const RunConfig& cfg) {
  MeasureOptions mopt;
  mopt.tol = cfg.tol;
  ordered_json r;
  r["command"] = "analyze";
  r["channel"] = n.name();
  r["dim_in"] = n.dim_in();
  r["dim_out"] = n.dim_out();
  r["measure"] = to_string(cfg.measure);
  r["prng"] = Rng::kAlgorithm;
  r["seed"] = cfg.seed;
  ordered_json probes = ordered_json::array();
  double max_gap = 0;
  for (int i = 0; i < n.dim_in(); ++i) {
    const DensityMatrix out = apply_channel(n, DensityMatrix::basis(n.dim_in(), i));
    const CoherenceResult c1 = c_trace(out, mopt);
    const RobustnessResult cr = c_robustness(out, mopt);
    max_gap = std::max({max_gap, 0.5 * c1.certificate.gap, cr.gap});
    ordered_json p;
    p["probe"] = i;
    p["c_l1"] = c_l1(out);
    p["c_trace"] = c1.value;
    p["c_trace_gap"] = 0.5 * c1.certificate.gap;
    p["c_robustness"] = cr.value;
    p["c_robustness_gap"] = cr.gap;
    probes.push_back(std::move(p));
  }
  r["basis_probes"] = std::move(probes);
  const PowerReport power = generating_power(n, cfg.measure, std::nullopt, mopt);
  max_gap = std::max(max_gap, power.certificate_gap);
  r["generating_power"] = power.generating;
  r["generating_power_gap"] = power.certificate_gap;
  r["maximizing_basis_state"] = power.maximizing_index;
  if (n.dim_in() == n.dim_out()) {
    Rng rng(cfg.seed);
    SearchOptions sopt;
    sopt.restarts = cfg.restarts;
    sopt.measure = mopt;
    const IncreasingSearchResult inc = increasing_power_search(n, cfg.measure, rng, sopt);
    r["increasing_power_search"] = inc.value;
    r["increasing_power_random_starts"] =
        std::isfinite(inc.random_start_best) ? ordered_json(inc.random_start_best) : ordered_json(nullptr);
  } else {
    r["increasing_power_search"] = nullptr;
    r["increasing_power_random_starts"] = nullptr;
  }
  ordered_json mem;
  mem["is_mio"] = is_mio(n);
  mem["is_dio"] = is_dio(n);
  if (n.kraus()) {
    mem["kraus_certifies_sio"] = kraus_certifies_sio(*n.kraus());
    mem["kraus_certifies_io"] = kraus_certifies_io(*n.kraus());
  } else {
    mem["kraus_certifies_sio"] = nullptr;
    mem["kraus_certifies_io"] = nullptr;
  }
  r["membership"] = std::move(mem);
  r["max_certificate_gap"] = max_gap;
  return r;
}

inline CommandResult cmd_analyze(const RunConfig& cfg) {
  if (cfg.inputs.empty()) fail(ErrorCode::ParseError, "analyze needs --input", "input");
  CommandResult res;
  if (cfg.out == OutputFormat::Json) {
    ordered_json all = ordered_json::array();
    for (const auto& path : cfg.inputs) {
      QuantumChannel n = load_channel(path);
      if (n.name().empty()) n.set_name(path);
      all.push_back(analyze_channel(n, cfg));
    }
    res.report = (all.size() == 1 ? all[0] : all).dump(2) + "\n";
  } else {
    res.report = csv_line({"channel", "probe", "c_l1", "c_trace", "c_robustness", "generating_power",
                           "increasing_power_search", "is_mio", "is_dio", "max_certificate_gap"});
    for (const auto& path : cfg.inputs) {
      QuantumChannel n = load_channel(path);
      if (n.name().empty()) n.set_name(path);
      const ordered_json a = analyze_channel(n, cfg);
      for (const auto& p : a["basis_probes"]) {
        const auto& inc = a["increasing_power_search"];
        res.report += csv_line({n.name(), std::to_string(p["probe"].get<int>()), fmt12(p["c_l1"]),
                                fmt12(p["c_trace"]), fmt12(p["c_robustness"]),
                                fmt12(a["generating_power"]), inc.is_null() ? "" : fmt12(inc.get<double>()),
                                a["membership"]["is_mio"].get<bool>() ? "1" : "0",
                                a["membership"]["is_dio"].get<bool>() ? "1" : "0",
                                fmt12(a["max_certificate_gap"])});
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// verify

struct TrialRecord {
  int trial = 0;
  std::string label;     // what was checked in this row
  double value = 0;      // computed quantity
  double reference = 0;  // bound or oracle it is compared against
  double violation = 0;  // > 0 only when the check fails beyond its slack
  double gap = 0;        // largest certificate gap involved
  bool pass = true;
};

struct SuiteReport {
  std::string suite;
  std::vector<TrialRecord> rows;
  double max_violation() const {
    double v = 0;
    for (const auto& r : rows) v = std::max(v, r.violation);
    return v;
  }
  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
  }
};

namespace detail {

/// |value - reference| <= slack
inline TrialRecord equality_row(int trial, std::string label, double value, double reference,
                                double slack, double gap = 0) {
  const double excess = std::abs(value - reference) - slack;
  return {trial, std::move(label), value, reference, std::max(0.0, excess), gap, excess <= 0};
}

/// value <= reference + slack
inline TrialRecord bound_row(int trial, std::string label, double value, double reference,
                             double slack, double gap = 0) {
  const double excess = value - reference - slack;
  return {trial, std::move(label), value, reference, std::max(0.0, excess), gap, excess <= 0};
}

inline std::vector<ClassTag> classes_for(const RunConfig& cfg) { return {cfg.cls}; }

inline MeasureOptions measure_options(const RunConfig& cfg) {
  MeasureOptions m;
  m.tol = cfg.tol;
  return m;
}

}  // namespace detail

inline constexpr double kRouteTol = 1e-4;
inline constexpr double kSearchTol = 1e-3;
inline constexpr double kPropertySlack = 1e-6;
inline constexpr double kClosedFormTol = 1e-6;

/// Increasing-power search versus generating power.
inline SuiteReport suite_prop1(const RunConfig& cfg) {
  SuiteReport rep{"prop1", {}};
  const MeasureOptions mopt = detail::measure_options(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const QuantumChannel n = random_channel(rng, cfg.dim);
    const PowerReport p = generating_power(n, DistanceMeasure::TraceDistance, std::nullopt, mopt);
    SearchOptions sopt;
    sopt.restarts = cfg.restarts;
    sopt.measure = mopt;
    const IncreasingSearchResult s = increasing_power_search(n, DistanceMeasure::TraceDistance, rng, sopt);
    rep.rows.push_back(detail::equality_row(t, "search_vs_generating", s.value, p.generating, kSearchTol,
                                            p.certificate_gap));
  }
  return rep;
}

/// Free-probe success probability: generating-power route versus class games.
inline SuiteReport suite_thm2(const RunConfig& cfg) {
  SuiteReport rep{"thm2", {}};
  const MeasureOptions mopt = detail::measure_options(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const QuantumChannel n = random_channel(rng, cfg.dim);
    const PowerReport p = generating_power(n, DistanceMeasure::TraceDistance, std::nullopt, mopt);
    const double via_power = 0.5 + 0.5 * p.generating;
    for (ClassTag tag : detail::classes_for(cfg)) {
      const FreeChannelClass cls = FreeChannelClass::of(tag, cfg.dim);
      double via_games = 0;
      double gap = p.certificate_gap;
      for (int i = 0; i < cfg.dim; ++i) {
        const DiscriminationResult g = p_succ_vs_class(n, cls, DensityMatrix::basis(cfg.dim, i), cfg.tol);
        via_games = std::max(via_games, g.p_succ);
        gap = std::max(gap, g.certificate_gap);
      }
      rep.rows.push_back(detail::equality_row(t, std::string("routes.") + to_string(tag), via_games,
                                              via_power, kRouteTol, gap));
    }
  }
  return rep;
}

/// Structural properties of the generating power.
inline SuiteReport suite_prop3(const RunConfig& cfg) {
  SuiteReport rep{"prop3", {}};
  const MeasureOptions mopt = detail::measure_options(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const QuantumChannel n1 = random_channel(rng, cfg.dim);
    const QuantumChannel n2 = random_channel(rng, cfg.dim);
    const QuantumChannel m1 = random_mio_channel(rng, cfg.dim);
    const QuantumChannel m2 = random_mio_channel(rng, cfg.dim);
    const double p = rng.uniform();
    const PropertySuiteReport s = property_suite(n1, n2, m1, m2, p, kPropertySlack, mopt);
    for (const auto& c : s.clauses) {
      rep.rows.push_back(detail::bound_row(t, c.clause, c.lhs, c.rhs, kPropertySlack));
    }
  }
  return rep;
}

/// Advantage of a probe over free probes (check == "thm4") or the absolute
/// success-probability ceiling (check == "cor5").
inline SuiteReport suite_advantage(const RunConfig& cfg, const std::string& check) {
  SuiteReport rep{check, {}};
  const MeasureOptions mopt = detail::measure_options(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const QuantumChannel n = random_channel(rng, cfg.dim);
    const DensityMatrix rho = t % 2 == 0 ? DensityMatrix::random_pure(rng, cfg.dim)
                                         : DensityMatrix::random(rng, cfg.dim);
    for (ClassTag tag : detail::classes_for(cfg)) {
      const AdvantageReport a = advantage(n, FreeChannelClass::of(tag, cfg.dim), rho, cfg.tol, mopt);
      const std::string label = check + "." + to_string(tag);
      if (check == "thm4") {
        rep.rows.push_back(detail::bound_row(t, label, a.advantage, a.bound, kBoundSlack));
      } else {
        rep.rows.push_back(detail::bound_row(t, label, a.p_probe, a.corollary_bound, kBoundSlack));
      }
    }
  }
  return rep;
}

/// Incoherent-probe success probability across all four classes. MIO and DIO
/// are solved exactly; for SIO and IO the replacement channel onto the
/// closest incoherent state (a Kraus-certified member) gives an upper bound,
/// and containment in MIO gives the matching lower bound.
inline SuiteReport suite_prop6(const RunConfig& cfg) {
  SuiteReport rep{"prop6", {}};
  const MeasureOptions mopt = detail::measure_options(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const QuantumChannel n = random_channel(rng, cfg.dim);
    const PowerReport p = generating_power(n, DistanceMeasure::TraceDistance, std::nullopt, mopt);
    const double target = 0.5 + 0.5 * p.generating;
    double mio_value = 0;
    for (ClassTag tag : {ClassTag::MIO, ClassTag::DIO}) {
      double v = 0, gap = 0;
      for (int i = 0; i < cfg.dim; ++i) {
        const auto g = p_succ_vs_class(n, FreeChannelClass::of(tag, cfg.dim), DensityMatrix::basis(cfg.dim, i), cfg.tol);
        v = std::max(v, g.p_succ);
        gap = std::max(gap, g.certificate_gap);
      }
      if (tag == ClassTag::MIO) mio_value = v;
      rep.rows.push_back(detail::equality_row(t, std::string("incoherent_probes.") + to_string(tag), v,
                                              target, kRouteTol, gap));
    }
    // Kraus-certified upper bound shared by SIO and IO.
    double upper = 0;
    bool certified = true;
    for (int i = 0; i < cfg.dim; ++i) {
      const DensityMatrix probe = DensityMatrix::basis(cfg.dim, i);
      const DensityMatrix out = apply_channel(n, probe);
      const CoherenceResult c = c_trace(out, mopt);
      const QuantumChannel witness =
          replacement_channel(DensityMatrix::from_matrix(c.closest, kChannelTol), cfg.dim);
      certified = certified && witness.kraus() && kraus_certifies_sio(*witness.kraus()) &&
                  kraus_certifies_io(*witness.kraus());
      upper = std::max(upper, helstrom(n, witness, probe).p_succ);
    }
    for (ClassTag tag : {ClassTag::SIO, ClassTag::IO}) {
      TrialRecord row = detail::equality_row(t, std::string("incoherent_probes.") + to_string(tag), upper,
                                             target, kRouteTol);
      // Sandwich: MIO value <= class value <= upper.
      row.pass = row.pass && certified && mio_value <= upper + kRouteTol;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

/// Incoherent measurements cannot tell a channel from the class.
inline SuiteReport suite_thm9(const RunConfig& cfg) {
  SuiteReport rep{"thm9", {}};
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const QuantumChannel n = random_channel(rng, cfg.dim);
    const DensityMatrix rho = t % 2 == 0 ? DensityMatrix::random_pure(rng, cfg.dim)
                                         : DensityMatrix::random(rng, cfg.dim);
    for (ClassTag tag : detail::classes_for(cfg)) {
      const CollapseReport c = verify_incoherent_povm_collapse(n, FreeChannelClass::of(tag, cfg.dim), rho, cfg.tol);
      TrialRecord row = detail::equality_row(t, std::string("collapse.") + to_string(tag), c.witness_value,
                                             0.5, kCollapseTol, c.solver_gap);
      row.pass = row.pass && c.pass;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

inline SuiteReport suite_qubit_closed_form(const RunConfig& cfg) {
  if (cfg.dim != 2) fail(ErrorCode::DimensionMismatch, "qubit-closed-form requires --dim 2", "dim");
  SuiteReport rep{"qubit-closed-form", {}};
  const MeasureOptions mopt = detail::measure_options(cfg);
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const ComplexMatrix u = haar_unitary(rng, 2);
    const PowerReport p = generating_power(unitary_channel(u), DistanceMeasure::TraceDistance, std::nullopt, mopt);
    rep.rows.push_back(detail::equality_row(t, "closed_form", p.generating, qubit_unitary_power(u),
                                            kClosedFormTol, p.certificate_gap));
  }
  return rep;
}

inline SuiteReport suite_bounds(const RunConfig& cfg) {
  SuiteReport rep{"bounds", {}};
  MeasureOptions mopt = detail::measure_options(cfg);
  const double ceiling = 1.0 - 1.0 / cfg.dim;
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = trial_rng(cfg.seed, t);
    const DensityMatrix rho = t % 2 == 0 ? DensityMatrix::random_pure(rng, cfg.dim)
                                         : DensityMatrix::random(rng, cfg.dim);
    const CoherenceResult c = c_trace(rho, mopt);
    rep.rows.push_back(detail::bound_row(t, "c_trace_ceiling", c.value, ceiling, 1e-9, 0.5 * c.certificate.gap));
    if (cfg.dim == 2) {
      const RobustnessResult r = c_robustness(rho, mopt);
      rep.rows.push_back(detail::equality_row(t, "c_trace_vs_half_l1", c.value, 0.5 * c_l1(rho), 1e-6, 0.5 * c.certificate.gap));
      rep.rows.push_back(detail::equality_row(t, "robustness_vs_twice_c_trace", r.value, 2 * c.value, 1e-6, r.gap));
    }
  }
  return rep;
}

inline const std::vector<std::string>& verify_tags() {
  static const std::vector<std::string> tags{"prop1", "thm2", "prop3", "thm4", "cor5",
                                             "prop6", "thm9", "qubit-closed-form", "bounds"};
  return tags;
}

inline SuiteReport run_suite(const RunConfig& cfg) {
  if (cfg.dim < 2) fail(ErrorCode::DimensionMismatch, "--dim must be at least 2", "dim");
  if (cfg.trials < 0) fail(ErrorCode::ParseError, "--trials must be nonnegative", "trials");
  if (cfg.cls == ClassTag::SIO || cfg.cls == ClassTag::IO) {
    if (cfg.tag == "thm2" || cfg.tag == "thm4" || cfg.tag == "cor5" || cfg.tag == "thm9") {
      fail(ErrorCode::UnsupportedCombination, "suite " + cfg.tag + " needs --class mio or dio", "class");
    }
  }
  if (cfg.tag == "prop1") return suite_prop1(cfg);
  if (cfg.tag == "thm2") return suite_thm2(cfg);
  if (cfg.tag == "prop3") return suite_prop3(cfg);
  if (cfg.tag == "thm4" || cfg.tag == "cor5") return suite_advantage(cfg, cfg.tag);
  if (cfg.tag == "prop6") return suite_prop6(cfg);
  if (cfg.tag == "thm9") return suite_thm9(cfg);
  if (cfg.tag == "qubit-closed-form") return suite_qubit_closed_form(cfg);
  if (cfg.tag == "bounds") return suite_bounds(cfg);
  fail(ErrorCode::ParseError, "unknown suite '" + cfg.tag + "'", "tag");
}

inline std::string render_suite(const SuiteReport& s, const RunConfig& cfg) {
  if (cfg.out == OutputFormat::Csv) {
    std::string out = csv_line({"suite", "prng", "seed", "dim", "trial", "check", "value", "reference",
                                "violation", "gap", "pass"});
    for (const auto& r : s.rows) {
      out += csv_line({s.suite, Rng::kAlgorithm, std::to_string(cfg.seed), std::to_string(cfg.dim),
                       std::to_string(r.trial), r.label, fmt12(r.value), fmt12(r.reference),
                       fmt12(r.violation), fmt12(r.gap), r.pass ? "1" : "0"});
    }
    return out;
  }
  ordered_json j;
  j["suite"] = s.suite;
  j["prng"] = Rng::kAlgorithm;
  j["seed"] = cfg.seed;
  j["dim"] = cfg.dim;
  j["class"] = to_string(cfg.cls);
  j["tol"] = cfg.tol;
  j["trials"] = cfg.trials;
  j["restarts"] = cfg.restarts;
  ordered_json rows = ordered_json::array();
  for (const auto& r : s.rows) {
    ordered_json row;
    row["trial"] = r.trial;
    row["check"] = r.label;
    row["value"] = r.value;
    row["reference"] = r.reference;
    row["violation"] = r.violation;
    row["gap"] = r.gap;
    row["pass"] = r.pass;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["max_violation"] = s.max_violation();
  j["pass"] = s.pass();
  return j.dump(2) + "\n";
}

inline CommandResult cmd_verify(const RunConfig& cfg) {
  const SuiteReport s = run_suite(cfg);
  return {s.pass() ? kExitOk : kExitSuiteFailure, render_suite(s, cfg)};
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  std::string id;
  double generating = 0;
  double p_free = 0;
  double best_coherent = 0;
  double bound_slack = 0;  // corollary ceiling minus the best coherent value
  bool ok = true;
  std::string error;
};

inline SweepRow sweep_row(const QuantumChannel& n, const std::string& id, Rng& rng, const RunConfig& cfg) {
  SweepRow row;
  row.id = id;
  const MeasureOptions mopt = detail::measure_options(cfg);
  const FreeChannelClass cls = FreeChannelClass::of(cfg.cls, n.dim_in());
  const FreeProbeResult free = p_succ_free_probes(n, cls, cfg.tol, mopt);
  row.generating = 2 * (free.via_power - 0.5);
  row.p_free = free.value;
  ExplorationOptions eo;
  eo.restarts = cfg.restarts;
  eo.iterations = 20;
  eo.tol = cfg.tol;
  eo.measure = mopt;
  const ExplorationResult e = explore_coherent_probe_advantage(n, cfg.cls, rng, eo);
  row.best_coherent = e.p_succ;
  const double w = omega(DistanceMeasure::TraceDistance, FreeStateSet::incoherent(n.dim_in()), e.probe, mopt).value;
  row.bound_slack = 0.5 + 0.5 * row.generating + 0.5 * w - e.p_succ;
  return row;
}

inline CommandResult cmd_sweep(const RunConfig& cfg) {
  if (cfg.count < 0) fail(ErrorCode::ParseError, "--count must be nonnegative", "count");
  if (cfg.cls == ClassTag::SIO || cfg.cls == ClassTag::IO) {
    fail(ErrorCode::UnsupportedCombination, "sweep needs --class mio or dio", "class");
  }
  if (cfg.generator != "haar-unitary" && cfg.generator != "random-channel") {
    fail(ErrorCode::ParseError, "unknown generator '" + cfg.generator + "'", "generator");
  }
  std::vector<std::pair<std::string, std::function<QuantumChannel(Rng&)>>> jobs;
  if (cfg.include_dephasing) {
    jobs.emplace_back("dephasing", [&](Rng&) { return dephasing_channel(cfg.dim); });
  }
  for (int i = 0; i < cfg.count; ++i) {
    jobs.emplace_back(cfg.generator + "-" + std::to_string(i), [&](Rng& rng) {
      return cfg.generator == "haar-unitary" ? random_unitary_channel(rng, cfg.dim)
                                             : random_channel(rng, cfg.dim);
    });
  }
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    Rng rng = trial_rng(cfg.seed, static_cast<int>(k));
    try {
      rows.push_back(sweep_row(jobs[k].second(rng), jobs[k].first, rng, cfg));
    } catch (const Error& e) {
      SweepRow r;
      r.id = jobs[k].first;
      r.ok = false;
      r.error = to_string(e.code());
      rows.push_back(r);
    }
  }
  CommandResult res;
  const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok; });
  res.exit_code = all_ok ? kExitOk : kExitSolver;
  if (cfg.out == OutputFormat::Csv) {
    res.report = csv_line({"channel_id", "generating_power", "p_succ_free_probes", "best_coherent_probe",
                           "bound_slack", "status"});
    for (const auto& r : rows) {
      res.report += r.ok ? csv_line({r.id, fmt12(r.generating), fmt12(r.p_free), fmt12(r.best_coherent),
                                     fmt12(r.bound_slack), "ok"})
                         : csv_line({r.id, "", "", "", "", r.error});
    }
  } else {
    ordered_json j;
    j["command"] = "sweep";
    j["prng"] = Rng::kAlgorithm;
    j["seed"] = cfg.seed;
    j["dim"] = cfg.dim;
    j["class"] = to_string(cfg.cls);
    j["generator"] = cfg.generator;
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json o;
      o["channel_id"] = r.id;
      o["status"] = r.ok ? "ok" : r.error;
      if (r.ok) {
        o["generating_power"] = r.generating;
        o["p_succ_free_probes"] = r.p_free;
        o["best_coherent_probe"] = r.best_coherent;
        o["bound_slack"] = r.bound_slack;
      }
      arr.push_back(std::move(o));
    }
    j["rows"] = std::move(arr);
    res.report = j.dump(2) + "\n";
  }
  return res;
}

/// Dispatch with the exit-code contract applied to library errors.
inline CommandResult run_command(const RunConfig& cfg) {
  try {
    if (cfg.command == "analyze") return cmd_analyze(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    fail(ErrorCode::ParseError, "unknown command '" + cfg.command + "'", "command");
  } catch (const Error& e) {
    std::string msg = std::string("error: ") + e.what();
    if (!e.invariant().empty()) msg += " (invariant: " + e.invariant() + ")";
    msg += "\n";
    return {exit_code_for(e.code()), msg};
  }
}

}  // namespace chanres
