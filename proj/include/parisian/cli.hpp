#pragma once

// Run configuration, table output and the command implementations behind the
// command-line front end.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "parisian/classical.hpp"
#include "parisian/errors.hpp"
#include "parisian/model.hpp"
#include "parisian/numerics.hpp"
#include "parisian/parisian.hpp"
#include "parisian/passage.hpp"
#include "parisian/reference.hpp"
#include "parisian/simulate.hpp"

namespace parisian::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_validation = 3 };

struct ClaimSpec {
  std::string type = "exponential";  // exponential | tabulated
  double rate = 1.0;
  std::string file;                  // two-column CSV for tabulated claims
  int max_order = 24;
};

struct RunConfig {
  // model
  double u = 0.0, c = 2.0, lambda = 1.0, d = 2.0;
  ClaimSpec claims;
  // solver
  Mode mode = Mode::accurate;
  int n_max = 8;
  double t_max = 10.0;
  double step = 0.0;
  int panels = 4;
  Tolerance tol;
  // simulation
  std::uint64_t seed = 20240607;
  std::size_t paths = 100000;
  unsigned threads = 0;
  double sim_horizon = 0.0;
  double bin_width = 1.0;
  std::vector<double> x_edges;
  std::string raw_path;
  // density
  bool cumulative = false;
  std::vector<double> deficits;
  // passage
  double level = 1.0;
  bool transform = false;
  std::vector<double> deltas{0.0};
  std::vector<double> rs{1.0};
  // validate
  double tolerance_scale = 1.0;
  // output
  std::string format = "csv";
  std::string output = "-";

  ModelParams model() const {
    ClaimDistribution law = ClaimDistribution::exponential(1.0);
    if (claims.type == "exponential") {
      law = ClaimDistribution::exponential(claims.rate);
    } else if (claims.type == "tabulated") {
      if (claims.file.empty()) throw ConfigError("tabulated claims need claims.file");
      std::ifstream in(claims.file);
      if (!in) throw ConfigError("cannot open claim file '" + claims.file + "'");
      TabulatedOptions opts;
      opts.max_order = std::max(claims.max_order, n_max + 1);
      law = ClaimDistribution::from_csv(in, opts);
    } else {
      throw ConfigError("unknown claim type '" + claims.type + "' (expected exponential or tabulated)");
    }
    return ModelParams(u, c, lambda, std::move(law), d);
  }

  SolverConfig solver() const {
    SolverConfig s;
    s.mode = mode;
    s.n_max = n_max;
    s.horizon = t_max;
    s.step = step;
    s.tol = tol;
    s.panels = panels;
    return s;
  }

  SimConfig simulation() const {
    SimConfig s;
    s.paths = paths;
    s.horizon = sim_horizon;
    s.seed = seed;
    s.stream_count = threads;
    s.keep_raw = !raw_path.empty();
    return s;
  }

  void validate() const {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (!(t_max >= 0.0)) throw ConfigError("t_max must be >= 0");
    if (!(step >= 0.0)) throw ConfigError("step must be >= 0");
    if (panels < 1) throw ConfigError("panels must be >= 1");
    tol.validate();
    if (paths < 1) throw ConfigError("paths must be >= 1");
    if (!(bin_width > 0.0)) throw ConfigError("bin_width must be > 0");
    if (!(level >= 0.0)) throw ConfigError("passage level must be >= 0");
    if (!(tolerance_scale >= 0.0)) throw ConfigError("tolerance_scale must be >= 0");
    if (format != "csv" && format != "json") throw ConfigError("output format must be csv or json");
    for (double x : deficits)
      if (!(x > 0.0)) throw ConfigError("deficit values must be > 0");
  }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!keys.count(item.key())) throw ConfigError("unknown config key '" + where + "." + item.key() + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Reads a JSON config; unknown keys are rejected. Relative claim file paths
/// are resolved against `base`.
inline RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base = {}) {
  using detail::check_keys;
  using detail::read;
  RunConfig cfg;
  check_keys(doc, "config", {"model", "solver", "simulation", "density", "passage", "validate", "output"});
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    check_keys(m, "model", {"u", "c", "lambda", "d", "claims"});
    read(m, "u", cfg.u, "model");
    read(m, "c", cfg.c, "model");
    read(m, "lambda", cfg.lambda, "model");
    read(m, "d", cfg.d, "model");
    if (m.contains("claims")) {
      const auto& cl = m["claims"];
      check_keys(cl, "model.claims", {"type", "rate", "file", "max_order"});
      read(cl, "type", cfg.claims.type, "model.claims");
      read(cl, "rate", cfg.claims.rate, "model.claims");
      read(cl, "file", cfg.claims.file, "model.claims");
      read(cl, "max_order", cfg.claims.max_order, "model.claims");
      if (!cfg.claims.file.empty() && std::filesystem::path(cfg.claims.file).is_relative() && !base.empty())
        cfg.claims.file = (base / cfg.claims.file).string();
    }
  }
  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    check_keys(s, "solver", {"mode", "n_max", "t_max", "step", "panels", "tolerance"});
    std::string mode;
    read(s, "mode", mode, "solver");
    if (!mode.empty()) cfg.mode = parse_mode(mode);
    read(s, "n_max", cfg.n_max, "solver");
    read(s, "t_max", cfg.t_max, "solver");
    read(s, "step", cfg.step, "solver");
    read(s, "panels", cfg.panels, "solver");
    if (s.contains("tolerance")) {
      const auto& t = s["tolerance"];
      check_keys(t, "solver.tolerance", {"abs", "rel", "tail_mass"});
      read(t, "abs", cfg.tol.abs, "solver.tolerance");
      read(t, "rel", cfg.tol.rel, "solver.tolerance");
      read(t, "tail_mass", cfg.tol.tail_mass, "solver.tolerance");
    }
  }
  if (doc.contains("simulation")) {
    const auto& s = doc["simulation"];
    check_keys(s, "simulation", {"paths", "seed", "threads", "horizon", "bin_width", "x_edges", "raw"});
    read(s, "paths", cfg.paths, "simulation");
    read(s, "seed", cfg.seed, "simulation");
    read(s, "threads", cfg.threads, "simulation");
    read(s, "horizon", cfg.sim_horizon, "simulation");
    read(s, "bin_width", cfg.bin_width, "simulation");
    read(s, "x_edges", cfg.x_edges, "simulation");
    read(s, "raw", cfg.raw_path, "simulation");
  }
  if (doc.contains("density")) {
    const auto& s = doc["density"];
    check_keys(s, "density", {"cumulative", "deficit"});
    read(s, "cumulative", cfg.cumulative, "density");
    read(s, "deficit", cfg.deficits, "density");
  }
  if (doc.contains("passage")) {
    const auto& s = doc["passage"];
    check_keys(s, "passage", {"level", "transform", "delta", "r"});
    read(s, "level", cfg.level, "passage");
    read(s, "transform", cfg.transform, "passage");
    read(s, "delta", cfg.deltas, "passage");
    read(s, "r", cfg.rs, "passage");
  }
  if (doc.contains("validate")) {
    const auto& s = doc["validate"];
    check_keys(s, "validate", {"tolerance_scale"});
    read(s, "tolerance_scale", cfg.tolerance_scale, "validate");
  }
  if (doc.contains("output")) {
    const auto& s = doc["output"];
    check_keys(s, "output", {"format", "path"});
    read(s, "format", cfg.format, "output");
    read(s, "path", cfg.output, "output");
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

// ---------------------------------------------------------------- tables

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Nine significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string to_text(const Cell& cell) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& v) const { return v; }
  } visit;
  return std::visit(visit, cell);
}

inline void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << to_text(row[i]);
    out << '\n';
  }
}

inline void write_json(std::ostream& out, const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
      const auto& cell = row[i];
      nlohmann::json value;
      if (const auto* v = std::get_if<std::int64_t>(&cell)) {
        value = *v;
      } else if (const auto* v = std::get_if<double>(&cell)) {
        if (std::isfinite(*v)) value = std::stod(format_number(*v));
      } else if (const auto* v = std::get_if<std::string>(&cell)) {
        value = *v;
      }
      obj[table.header[i]] = value;
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

inline void write_table(std::ostream& out, const Table& table, const std::string& format) {
  if (format == "json") {
    write_json(out, table);
  } else {
    write_csv(out, table);
  }
}

// ---------------------------------------------------------------- commands

/// p_u^d(n), n = 1..n_max.
inline Table cmd_prob(const RunConfig& cfg) {
  cfg.validate();
  auto scfg = cfg.solver();
  scfg.horizon = 0.0;
  const auto probs = ParisianSolver(cfg.model(), scfg).probabilities();
  Table t{{"n", "p"}, {}};
  for (std::size_t n = 0; n < probs.pu.size(); ++n) t.add({static_cast<std::int64_t>(n + 1), probs.pu[n]});
  return t;
}

/// Long-format grid over (d, t_max]: densities, cumulative probabilities, or
/// deficit-extended densities at each requested x.
inline Table cmd_density(const RunConfig& cfg) {
  cfg.validate();
  const ParisianSolver solver(cfg.model(), cfg.solver());
  const double t_end = cfg.t_max > 0.0 ? cfg.t_max : solver.horizon();
  const char* c0 = cfg.cumulative ? "psi0d" : "w0d";
  const char* cu = cfg.cumulative ? "psiud" : "wud";
  auto emit = [&](Table& t, const ParisianSolution& sol, const double* x) {
    const auto& a = cfg.cumulative ? sol.psi0d : sol.w0d;
    const auto& b = cfg.cumulative ? sol.psiud : sol.wud;
    for (int n = 1; n <= sol.n_max(); ++n)
      for (std::size_t i = 1; i < sol.nodes(); ++i) {
        const double time = sol.time(i);
        if (time > t_end + 1e-9) break;
        std::vector<Cell> row{static_cast<std::int64_t>(n), time};
        if (x) row.emplace_back(*x);
        row.emplace_back(a[n - 1][i]);
        row.emplace_back(b[n - 1][i]);
        t.add(std::move(row));
      }
  };
  if (cfg.deficits.empty()) {
    Table t{{"n", "t", c0, cu}, {}};
    emit(t, solver.solve(), nullptr);
    return t;
  }
  Table t{{"n", "t", "x", c0, cu}, {}};
  for (double x : cfg.deficits) emit(t, solver.solve_deficit(x), &x);
  return t;
}

/// Joint law of the first passage above `level`: the atom plus densities on
/// the output grid, or the transform identity on a (delta, r) grid.
inline Table cmd_passage(const RunConfig& cfg) {
  cfg.validate();
  const auto params = cfg.model();
  const PassageLaw law(params, cfg.level);
  if (cfg.transform) {
    Table t{{"y", "delta", "r", "rho", "lhs", "rhs", "terms"}, {}};
    for (double delta : cfg.deltas)
      for (double r : cfg.rs) {
        const auto tr = law.transform(delta, r, 0.1 * cfg.tol.abs);
        t.add({cfg.level, delta, r, tr.rho, tr.lhs, tr.rhs, static_cast<std::int64_t>(tr.terms)});
      }
    return t;
  }
  const double step = cfg.solver().output_step();
  const double t0 = cfg.level / params.c();
  const double t_end = cfg.t_max > 0.0 ? cfg.t_max : poisson_horizon(params.lambda(), cfg.n_max, cfg.tol.tail_mass);
  Table t{{"k", "t", "value", "kind"}, {}};
  const auto atom = law.atom();
  t.add({std::int64_t{0}, atom.location, atom.mass, std::string("atom")});
  for (int k = 1; k <= cfg.n_max; ++k)
    for (std::size_t i = 1;; ++i) {
      const double time = t0 + step * static_cast<double>(i);
      if (time > t_end + 1e-9) break;
      t.add({static_cast<std::int64_t>(k), time, law.density(k, time), std::string("density")});
    }
  return t;
}

/// Monte Carlo estimates with binomial standard errors. Time bins of width
/// bin_width start at d; deficit bins use x_edges when given.
inline Table cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  const auto params = cfg.model();
  const auto sim = cfg.simulation();
  sim.validate(params);
  std::vector<double> t_edges;
  const double t_end = cfg.t_max > 0.0 ? cfg.t_max : params.d() + 10.0 * cfg.bin_width;
  for (double e = params.d(); e < t_end + 1e-9; e += cfg.bin_width) t_edges.push_back(e);
  if (t_edges.size() < 2) t_edges.push_back(params.d() + cfg.bin_width);
  const auto est = estimate_joint(params, sim, cfg.n_max, t_edges, cfg.x_edges);

  Table t{{"kind", "n", "t_lo", "t_hi", "x_lo", "x_hi", "estimate", "stderr", "hits"}, {}};
  const Cell none{};
  auto row = [&](const std::string& kind, Cell n, Cell tlo, Cell thi, Cell xlo, Cell xhi, const MCEstimate& e) {
    t.add({kind, n, tlo, thi, xlo, xhi, e.value, e.std_error, static_cast<std::int64_t>(e.hits)});
  };
  row("ruin", none, none, est.horizon, none, none, est.ruin);
  row("classical_ruin", none, none, est.horizon, none, none, est.classical_ruin);
  row("censored", none, none, est.horizon, none, none, est.censored);
  for (int n = 1; n <= cfg.n_max; ++n) row("p", std::int64_t{n}, none, est.horizon, none, none, est.p[n - 1]);
  for (int n = 1; n <= cfg.n_max; ++n)
    for (std::size_t b = 0; b + 1 < est.t_edges.size(); ++b)
      row("psi", std::int64_t{n}, est.t_edges[b], est.t_edges[b + 1], none, none, est.psi[n - 1][b]);
  for (int n = 1; n <= cfg.n_max; ++n)
    for (std::size_t b = 0; b + 1 < est.t_edges.size(); ++b)
      for (std::size_t x = 0; x + 1 < est.x_edges.size(); ++x)
        row("deficit", std::int64_t{n}, est.t_edges[b], est.t_edges[b + 1], est.x_edges[x], est.x_edges[x + 1],
            est.deficit[n - 1][b][x]);

  if (!cfg.raw_path.empty()) {
    std::ofstream raw(cfg.raw_path);
    if (!raw) throw ConfigError("cannot write raw dump '" + cfg.raw_path + "'");
    Table r{{"path", "tau_d", "n", "deficit"}, {}};
    for (const auto& rec : est.raw)
      r.add({static_cast<std::int64_t>(rec.path), rec.tau_d, static_cast<std::int64_t>(rec.claims), rec.deficit});
    write_csv(raw, r);
  }
  return t;
}

struct Report {
  Table table{{"check", "measured", "tolerance", "status"}, {}};
  bool passed = true;

  void check(const std::string& name, double measured, double tolerance) {
    const bool ok = std::isfinite(measured) && measured <= tolerance;
    passed = passed && ok;
    table.add({name, measured, tolerance, std::string(ok ? "PASS" : "FAIL")});
  }
  void info(const std::string& name, double measured) { table.add({name, measured, Cell{}, std::string("INFO")}); }
};

/// Invariant suite on the configured model plus fixed reference problems.
/// Every tolerance is multiplied by tolerance_scale.
inline Report cmd_validate(const RunConfig& cfg) {
  cfg.validate();
  const double s = cfg.tolerance_scale;
  const auto params = cfg.model();
  const bool expo = params.claims().is_exponential();
  Report rep;

  double norm = 0.0;
  for (double y : {0.5, 1.0, 2.0, 5.0}) norm = std::max(norm, std::abs(PassageLaw(params, y).normalization(1e-9) - 1.0));
  rep.check("passage_normalization", norm, 1e-6 * s);

  double tr = 0.0;
  for (double y : {0.5, 1.0, 2.0})
    for (double delta : {0.0, 0.1, 0.5})
      for (double r : {0.3, 0.7, 1.0}) {
        const auto res = PassageLaw(params, y).transform(delta, r, 1e-9);
        tr = std::max(tr, std::abs(res.lhs - res.rhs));
      }
  rep.check("passage_transform", tr, 1e-6 * s);

  auto scfg = cfg.solver();
  scfg.mode = Mode::accurate;
  scfg.step = 0.0;
  const ParisianSolver solver(params, scfg);
  const auto sol = solver.solve();
  rep.check("min_pre_clamp", std::max(0.0, -sol.min_pre_clamp), 1e-12 * s);

  double first = 0.0;
  for (std::size_t i = 1; i < sol.nodes(); ++i) first = std::max(first, std::abs(sol.wud[0][i] - w_first(params, sol.time(i))));
  rep.check("closed_form_n1", first, 1e-6 * s);

  if (params.d() > 0.0) {
    auto rcfg = scfg;
    rcfg.n_max = std::min(cfg.n_max, 4);
    const ParisianSolver small(params.with_reserve(0.0), rcfg);
    const auto direct = small.solve();
    const auto renewal = small.renewal();
    double gap = 0.0;
    for (std::size_t n = 0; n < renewal.size(); ++n)
      for (std::size_t i = 0; i < renewal[n].size(); ++i) gap = std::max(gap, std::abs(renewal[n][i] - direct.w0d[n][i]));
    rep.check("two_path_agreement", gap, 1e-5 * s);
  }

  const auto probs = solver.probabilities();
  double total = 0.0;
  for (double p : probs.pu) total += p;
  rep.check("sum_p_at_most_one", std::max(0.0, total - 1.0), 0.0);
  if (expo) {
    const double p1 = reference::p_one(params);
    rep.check("p1_closed_form_rel", std::abs(probs.pu[0] - p1) / p1, 1e-6 * s);
  }

  {
    const ModelParams zero_d = params.with_delay(0.0);
    ClaimSampler claims(params.claims());
    std::size_t mismatch = 0;
    for (std::uint64_t path = 0; path < 20000; ++path) {
      auto rng = path_rng(cfg.seed, path);
      claims.reset();
      const auto o = simulate_path(zero_d, 50.0, rng, claims);
      const bool same = o.parisian_ruin == o.classical_ruin &&
                        (!o.parisian_ruin || (o.tau_d == o.tau && o.claims_at_ruin == o.claims_at_classical));
      if (!same) ++mismatch;
    }
    rep.check("zero_delay_detection", static_cast<double>(mismatch), 0.0);
  }

  // Reference problem with printed closed forms.
  const ModelParams ref(0.0, 1.2, 1.0, ClaimDistribution::exponential(1.0), 2.0);
  SolverConfig acc;
  acc.n_max = 3;
  acc.horizon = 10.0;
  const auto rs = ParisianSolver(ref, acc).solve();
  double e2 = 0.0, e3 = 0.0;
  for (std::size_t i = 1; i < rs.nodes(); ++i) {
    const double t = rs.time(i);
    e2 = std::max(e2, std::abs(rs.w0d[1][i] - reference::w0_two(ref, t)));
    e3 = std::max(e3, std::abs(rs.w0d[2][i] - reference::w0_three(ref, t)));
  }
  rep.check("closed_form_n2", e2, 1e-4 * s);
  rep.check("closed_form_n3", e3, 1e-4 * s);

  SolverConfig rect = acc;
  rect.mode = Mode::paper_faithful;
  rect.n_max = 1;
  const auto ps = ParisianSolver(ref, rect).solve();
  const double exact = reference::psi_one(ref, 3.0);
  rep.check("rectangle_psi_n1_t3", std::abs(ps.psi0(1, 3.0) - 0.0044364), 5e-8 * s);
  rep.check("accurate_psi_n1_t3", std::abs(rs.psi0(1, 3.0) - exact), 1e-7 * s);
  rep.info("rectangle_bias_n1_t3", (exact - ps.psi0(1, 3.0)) / exact);

  // Sum over k of the deficit marginals at u = 0 equals the ruin probability.
  const ModelParams cat(0.0, 2.0, 1.0, ClaimDistribution::exponential(1.0), 2.0);
  const ClassicalRuinDensity cl(cat);
  double mass = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double term = cl.marginal_tail(k, 0.0);
    mass += term;
    if (term < 1e-16) break;
  }
  rep.check("classical_mass_u0", std::abs(mass - 0.5), 1e-6 * s);
  return rep;
}

}  // namespace parisian::cli
