#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parisian/cli.hpp"

using namespace parisian;
using namespace parisian::cli;

namespace {

struct Overrides {
  std::string config;
  std::optional<double> u, c, lambda, d, mu, t_max, step, tol_abs, tol_rel, tail_mass;
  std::optional<std::string> claims_file, mode, format, output;
  std::optional<int> n_max, panels;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<unsigned> threads;
  std::optional<double> sim_horizon, bin_width, level, tolerance_scale;
  std::vector<double> x_edges, deficits, deltas, rs;
  bool cumulative = false, transform = false;
  std::optional<std::string> raw;

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(cfg.u, u);
    set(cfg.c, c);
    set(cfg.lambda, lambda);
    set(cfg.d, d);
    if (mu) {
      cfg.claims.type = "exponential";
      cfg.claims.rate = *mu;
    }
    if (claims_file) {
      cfg.claims.type = "tabulated";
      cfg.claims.file = *claims_file;
    }
    if (mode) cfg.mode = parse_mode(*mode);
    set(cfg.n_max, n_max);
    set(cfg.t_max, t_max);
    set(cfg.step, step);
    set(cfg.panels, panels);
    set(cfg.tol.abs, tol_abs);
    set(cfg.tol.rel, tol_rel);
    set(cfg.tol.tail_mass, tail_mass);
    set(cfg.seed, seed);
    set(cfg.paths, paths);
    set(cfg.threads, threads);
    set(cfg.sim_horizon, sim_horizon);
    set(cfg.bin_width, bin_width);
    set(cfg.level, level);
    set(cfg.tolerance_scale, tolerance_scale);
    set(cfg.format, format);
    set(cfg.output, output);
    set(cfg.raw_path, raw);
    if (!x_edges.empty()) cfg.x_edges = x_edges;
    if (!deficits.empty()) cfg.deficits = deficits;
    if (!deltas.empty()) cfg.deltas = deltas;
    if (!rs.empty()) cfg.rs = rs;
    if (cumulative) cfg.cumulative = true;
    if (transform) cfg.transform = true;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("-u,--reserve", o.u, "initial reserve u");
  cmd->add_option("-c,--premium", o.c, "premium rate c");
  cmd->add_option("--lambda", o.lambda, "claim intensity");
  cmd->add_option("-d,--delay", o.d, "Parisian delay d");
  cmd->add_option("--mu", o.mu, "exponential claim rate");
  cmd->add_option("--claims-file", o.claims_file, "tabulated claim density CSV (x,f)");
  cmd->add_option("--mode", o.mode, "accurate | paper-faithful");
  cmd->add_option("-n,--n-max", o.n_max, "largest claim count");
  cmd->add_option("--t-max", o.t_max, "right end of the time grid");
  cmd->add_option("--step", o.step, "output grid step");
  cmd->add_option("--panels", o.panels, "quadrature panels");
  cmd->add_option("--tol-abs", o.tol_abs, "absolute tolerance");
  cmd->add_option("--tol-rel", o.tol_rel, "relative tolerance");
  cmd->add_option("--tail-mass", o.tail_mass, "truncation mass");
  cmd->add_option("--format", o.format, "csv | json");
  cmd->add_option("-o,--output", o.output, "output file ('-' for stdout)");
}

void emit(const Table& table, const RunConfig& cfg) {
  if (cfg.output.empty() || cfg.output == "-") {
    write_table(std::cout, table, cfg.format);
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw ConfigError("cannot write output file '" + cfg.output + "'");
  write_table(out, table, cfg.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint law of Parisian ruin time and claim count in the Cramer-Lundberg model"};
  app.require_subcommand(1);
  Overrides o;

  auto* prob = app.add_subcommand("prob", "probabilities p(n) of exactly n claims until Parisian ruin");
  add_common(prob, o);

  auto* density = app.add_subcommand("density", "density grid w(n,t) over (d, t_max]");
  add_common(density, o);
  density->add_flag("--cumulative", o.cumulative, "integrated densities psi(n,t)");
  density->add_option("--deficit", o.deficits, "deficit values x for w(n,t,x)");

  auto* passage = app.add_subcommand("passage", "first-passage law v_y(k,t)");
  add_common(passage, o);
  passage->add_option("-y,--level", o.level, "passage level y");
  passage->add_flag("--transform", o.transform, "evaluate the transform identity");
  passage->add_option("--delta", o.deltas, "discount rates");
  passage->add_option("--r", o.rs, "claim-count weights in (0,1]");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_common(simulate, o);
  simulate->add_option("--paths", o.paths, "number of paths");
  simulate->add_option("--seed", o.seed, "RNG seed");
  simulate->add_option("--threads", o.threads, "worker threads (0: hardware)");
  simulate->add_option("--horizon", o.sim_horizon, "simulation horizon (0: derived)");
  simulate->add_option("--bin-width", o.bin_width, "ruin-time bin width");
  simulate->add_option("--x-edges", o.x_edges, "deficit bin edges");
  simulate->add_option("--raw", o.raw, "dump one row per ruined path to this file");

  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  add_common(validate, o);
  validate->add_option("--seed", o.seed, "RNG seed");
  validate->add_option("--tolerance-scale", o.tolerance_scale, "multiply every tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    const RunConfig cfg = o.resolve();
    if (prob->parsed()) emit(cmd_prob(cfg), cfg);
    if (density->parsed()) emit(cmd_density(cfg), cfg);
    if (passage->parsed()) emit(cmd_passage(cfg), cfg);
    if (simulate->parsed()) emit(cmd_simulate(cfg), cfg);
    if (validate->parsed()) {
      const auto rep = cmd_validate(cfg);
      emit(rep.table, cfg);
      if (!rep.passed) {
        std::cerr << "validation failed\n";
        return exit_validation;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_ok;
}
