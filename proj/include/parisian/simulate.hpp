#pragma once

// Exact-event Monte Carlo for the surplus process with Parisian ruin detection.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "parisian/errors.hpp"
#include "parisian/model.hpp"
#include "parisian/numerics.hpp"

namespace parisian {

struct SimConfig {
  std::size_t paths = 100000;
  double horizon = 0.0;        // 0 derives it from n_max
  std::uint64_t seed = 20240607;
  unsigned stream_count = 0;   // worker threads; 0 uses hardware concurrency
  bool keep_raw = false;       // keep one record per ruined path

  void validate(const ModelParams& params) const {
    if (paths < 1) throw ConfigError("paths must be >= 1");
    if (horizon != 0.0 && !(horizon > params.d())) throw ConfigError("simulation horizon must exceed d");
  }
};

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double n_eff = 0.0;
  std::uint64_t hits = 0;

  static MCEstimate binomial(std::uint64_t hits, std::uint64_t n) {
    MCEstimate e;
    e.hits = hits;
    e.n_eff = static_cast<double>(n);
    e.value = static_cast<double>(hits) / e.n_eff;
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / e.n_eff);
    return e;
  }
};

struct PathOutcome {
  bool parisian_ruin = false;
  double tau_d = 0.0;
  int claims_at_ruin = 0;
  double deficit_at_ruin = 0.0;
  bool classical_ruin = false;
  double tau = 0.0;
  int claims_at_classical = 0;
  double classical_deficit = 0.0;
  bool censored = false;   // horizon reached before Parisian ruin
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the k-th draw of path p is a hash of (seed, p, k), so
/// results do not depend on how paths are split across workers.
class PathStream {
 public:
  using result_type = std::uint64_t;

  PathStream(std::uint64_t seed, std::uint64_t path) : key_(splitmix64(splitmix64(seed) ^ (path * 0xd1b54a32d192ed03ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline PathStream path_rng(std::uint64_t seed, std::uint64_t index) { return PathStream(seed, index); }

class ClaimSampler {
 public:
  explicit ClaimSampler(const ClaimDistribution& claims) {
    if (claims.is_exponential()) {
      exp_.emplace(claims.rate());
    } else {
      const auto values = claims.node_values();
      std::vector<double> nodes(values.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = claims.grid_step() * static_cast<double>(i);
      table_.emplace(nodes.begin(), nodes.end(), values.begin());
    }
  }

  void reset() {
    if (exp_) exp_->reset();
    if (table_) table_->reset();
  }

  template <class URBG>
  double operator()(URBG& rng) {
    return exp_ ? (*exp_)(rng) : (*table_)(rng);
  }

 private:
  std::optional<std::exponential_distribution<double>> exp_;
  std::optional<std::piecewise_linear_distribution<double>> table_;
};

/// One path up to Parisian ruin or the horizon. Between claims the surplus is
/// linear, so up-crossings and the instant the below-zero age reaches d are
/// computed exactly. `claims` draws one claim size from rng per call.
template <class URBG, class Claims>
PathOutcome simulate_path(const ModelParams& params, double horizon, URBG& rng, Claims& claims) {
  std::exponential_distribution<double> wait(params.lambda());
  const double c = params.c();
  const double d = params.d();
  PathOutcome out;
  double t = 0.0;
  double x = params.u();
  int n = 0;
  std::optional<double> below_since;
  for (;;) {
    const double next = t + wait(rng);
    if (below_since) {
      const double up = t - x / c;
      const double ruin = *below_since + d;
      if (ruin < up && ruin <= next) {
        if (ruin > horizon) break;
        out.parisian_ruin = true;
        out.tau_d = ruin;
        out.claims_at_ruin = n;
        out.deficit_at_ruin = -(x + c * (ruin - t));
        return out;
      }
      if (up <= next) below_since.reset();
    }
    if (next > horizon) break;
    x += c * (next - t);
    t = next;
    ++n;
    x -= claims(rng);
    if (x < 0.0) {
      if (!out.classical_ruin) {
        out.classical_ruin = true;
        out.tau = t;
        out.claims_at_classical = n;
        out.classical_deficit = -x;
      }
      if (!below_since) below_since = t;
    }
  }
  out.censored = true;
  return out;
}

template <class URBG>
PathOutcome simulate_path(const ModelParams& params, double horizon, URBG& rng) {
  ClaimSampler claims(params.claims());
  return simulate_path(params, horizon, rng, claims);
}

struct RuinRecord {
  std::uint64_t path = 0;
  double tau_d = 0.0;
  int claims = 0;
  double deficit = 0.0;
};

struct JointEstimate {
  std::uint64_t paths = 0;
  double horizon = 0.0;
  MCEstimate ruin;            // Parisian ruin before the horizon
  MCEstimate classical_ruin;  // classical ruin before the horizon
  MCEstimate censored;        // no Parisian ruin before the horizon
  std::vector<MCEstimate> p;  // [n-1]: exactly n claims at Parisian ruin
  std::vector<double> t_edges;
  std::vector<std::vector<MCEstimate>> psi;  // [n-1][bin]: ruin time in [t_k, t_{k+1})
  std::vector<double> x_edges;
  std::vector<std::vector<std::vector<MCEstimate>>> deficit;  // [n-1][t bin][x bin]
  std::vector<RuinRecord> raw;
};

namespace detail {

inline std::ptrdiff_t bin_of(const std::vector<double>& edges, double v) {
  if (edges.size() < 2 || v < edges.front() || v >= edges.back()) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  return static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
}

struct Counts {
  std::uint64_t ruin = 0, classical = 0;
  std::vector<std::uint64_t> p, psi, deficit;
  std::vector<RuinRecord> raw;
};

}  // namespace detail

/// Joint estimates of p(n), binned psi(n,t) and the binned deficit law, for
/// n = 1..n_max. Paths are processed in fixed chunks; counts are integers, so
/// the result does not depend on the number of workers.
inline JointEstimate estimate_joint(const ModelParams& params, const SimConfig& cfg, int n_max,
                                    std::vector<double> t_edges = {}, std::vector<double> x_edges = {}) {
  cfg.validate(params);
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  for (const auto* edges : {&t_edges, &x_edges})
    for (std::size_t i = 1; i < edges->size(); ++i)
      if (!((*edges)[i] > (*edges)[i - 1])) throw ConfigError("bin edges must be strictly increasing");

  JointEstimate est;
  est.paths = cfg.paths;
  est.horizon = cfg.horizon > 0.0 ? cfg.horizon
                                  : std::max(params.d() + 1.0, poisson_horizon(params.lambda(), n_max, 1e-9));
  const std::size_t nt = t_edges.size() > 1 ? t_edges.size() - 1 : 0;
  const std::size_t nx = x_edges.size() > 1 ? x_edges.size() - 1 : 0;
  const auto nn = static_cast<std::size_t>(n_max);

  constexpr std::size_t chunk = 4096;
  const std::size_t chunks = (cfg.paths + chunk - 1) / chunk;
  std::vector<detail::Counts> parts(chunks);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    ClaimSampler claims(params.claims());
    for (std::size_t ci = next.fetch_add(1); ci < chunks; ci = next.fetch_add(1)) {
      auto& part = parts[ci];
      part.p.assign(nn, 0);
      part.psi.assign(nn * nt, 0);
      part.deficit.assign(nn * nt * nx, 0);
      const std::size_t lo = ci * chunk;
      const std::size_t hi = std::min(cfg.paths, lo + chunk);
      for (std::size_t path = lo; path < hi; ++path) {
        auto rng = path_rng(cfg.seed, path);
        claims.reset();
        const auto o = simulate_path(params, est.horizon, rng, claims);
        if (o.classical_ruin && o.tau <= est.horizon) ++part.classical;
        if (!o.parisian_ruin) continue;
        ++part.ruin;
        if (cfg.keep_raw) part.raw.push_back({path, o.tau_d, o.claims_at_ruin, o.deficit_at_ruin});
        if (o.claims_at_ruin < 1 || o.claims_at_ruin > n_max) continue;
        const auto n = static_cast<std::size_t>(o.claims_at_ruin - 1);
        ++part.p[n];
        const auto tb = detail::bin_of(t_edges, o.tau_d);
        if (tb < 0) continue;
        ++part.psi[n * nt + static_cast<std::size_t>(tb)];
        const auto xb = detail::bin_of(x_edges, o.deficit_at_ruin);
        if (xb >= 0) ++part.deficit[(n * nt + static_cast<std::size_t>(tb)) * nx + static_cast<std::size_t>(xb)];
      }
    }
  };

  unsigned workers = cfg.stream_count ? cfg.stream_count : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  detail::Counts total;
  total.p.assign(nn, 0);
  total.psi.assign(nn * nt, 0);
  total.deficit.assign(nn * nt * nx, 0);
  for (auto& part : parts) {
    total.ruin += part.ruin;
    total.classical += part.classical;
    for (std::size_t i = 0; i < total.p.size(); ++i) total.p[i] += part.p[i];
    for (std::size_t i = 0; i < total.psi.size(); ++i) total.psi[i] += part.psi[i];
    for (std::size_t i = 0; i < total.deficit.size(); ++i) total.deficit[i] += part.deficit[i];
    if (cfg.keep_raw) est.raw.insert(est.raw.end(), part.raw.begin(), part.raw.end());
  }

  const auto N = static_cast<std::uint64_t>(cfg.paths);
  est.ruin = MCEstimate::binomial(total.ruin, N);
  est.classical_ruin = MCEstimate::binomial(total.classical, N);
  est.censored = MCEstimate::binomial(N - total.ruin, N);
  est.t_edges = std::move(t_edges);
  est.x_edges = std::move(x_edges);
  est.p.resize(nn);
  est.psi.assign(nn, std::vector<MCEstimate>(nt));
  est.deficit.assign(nn, std::vector<std::vector<MCEstimate>>(nt, std::vector<MCEstimate>(nx)));
  for (std::size_t n = 0; n < nn; ++n) {
    est.p[n] = MCEstimate::binomial(total.p[n], N);
    for (std::size_t b = 0; b < nt; ++b) {
      est.psi[n][b] = MCEstimate::binomial(total.psi[n * nt + b], N);
      for (std::size_t xb = 0; xb < nx; ++xb)
        est.deficit[n][b][xb] = MCEstimate::binomial(total.deficit[(n * nt + b) * nx + xb], N);
    }
  }
  return est;
}

}  // namespace parisian
