#pragma once

// Joint law of the Parisian ruin time and the number of claims until it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "parisian/classical.hpp"
#include "parisian/errors.hpp"
#include "parisian/model.hpp"
#include "parisian/numerics.hpp"
#include "parisian/passage.hpp"

namespace parisian {

enum class Mode { paper_faithful, accurate };

inline std::string_view to_string(Mode mode) { return mode == Mode::accurate ? "accurate" : "paper-faithful"; }

inline Mode parse_mode(std::string_view text) {
  if (text == "accurate") return Mode::accurate;
  if (text == "paper-faithful" || text == "paper_faithful" || text == "paper") return Mode::paper_faithful;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected accurate or paper-faithful)");
}

struct SolverConfig {
  Mode mode = Mode::accurate;
  int n_max = 20;
  double horizon = 0.0;  // right end T of the time grid; 0 derives it from n_max
  double step = 0.0;     // output step; 0 means 0.1 (paper-faithful) or 0.025 (accurate)
  Tolerance tol;
  ClassicalOptions classical;
  int panels = 4;        // Gauss-Legendre panels for y and s integrals over [0, cd] and [y/c, d]
  double clamp_slack = 1e-12;

  double output_step() const { return step > 0.0 ? step : (mode == Mode::accurate ? 0.025 : 0.1); }
};

inline double w_first(const ModelParams& params, double t) {
  if (t <= params.d()) return 0.0;
  return params.lambda() * std::exp(-params.lambda() * t) * params.claims().tail(params.u() + params.c() * t);
}

/// Densities on the nodes t_i = d + i*step, i = 0..nodes-1; index 0 holds the
/// right limit at d. Cumulative arrays hold the integral from d.
struct ParisianSolution {
  double d = 0.0;
  double step = 0.0;
  Mode mode = Mode::accurate;
  std::vector<std::vector<double>> w0d, wud, psi0d, psiud;  // [n-1][i]
  double min_pre_clamp = 0.0;

  int n_max() const noexcept { return static_cast<int>(w0d.size()); }
  std::size_t nodes() const noexcept { return w0d.empty() ? 0 : w0d.front().size(); }
  double time(std::size_t i) const noexcept { return d + step * static_cast<double>(i); }
  double horizon() const noexcept { return time(nodes() - 1); }

  DensityGrid grid(int n, bool reserve) const {
    const auto& v = row(reserve ? wud : w0d, n);
    return DensityGrid(d, step, std::vector<double>(v.begin() + 1, v.end()),
                       mode == Mode::accurate ? Rule::trapezoid : Rule::right_rectangle, v.front());
  }

  double w0(int n, double t) const { return interp_linear(grid(n, false), t); }
  double wu(int n, double t) const { return interp_linear(grid(n, true), t); }
  double psi0(int n, double t) const { return cumulative(row(psi0d, n), t); }
  double psiu(int n, double t) const { return cumulative(row(psiud, n), t); }

 private:
  const std::vector<double>& row(const std::vector<std::vector<double>>& table, int n) const {
    if (n < 1 || n > static_cast<int>(table.size())) throw ConfigError("claim count n out of computed range");
    return table[static_cast<std::size_t>(n - 1)];
  }

  double cumulative(const std::vector<double>& v, double t) const {
    if (t <= d) return 0.0;
    const double pos = (t - d) / step;
    const double last = static_cast<double>(v.size() - 1);
    if (pos >= last - 1e-9) {
      if (pos > last + 1e-9) throw ConfigError("t beyond computed horizon");
      return v.back();
    }
    const auto lo = static_cast<std::size_t>(std::floor(pos + 1e-9));
    const double frac = std::max(0.0, pos - static_cast<double>(lo));
    return v[lo] + frac * (v[lo + 1] - v[lo]);
  }
};

struct Probabilities {
  std::vector<double> p0;  // p_0^d(n), n = 1..n_max
  std::vector<double> pu;  // p_u^d(n)
};

class ParisianSolver {
 public:
  ParisianSolver(ModelParams params, SolverConfig cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    if (cfg_.n_max < 1) throw ConfigError("n_max must be >= 1");
    cfg_.tol.validate();
    if (cfg_.panels < 1) throw ConfigError("panels must be >= 1");
    if (!(cfg_.clamp_slack >= 0.0)) throw ConfigError("clamp slack must be >= 0");
    step_ = cfg_.output_step();
    if (!(step_ > 0.0)) throw ConfigError("grid step must be > 0");
    const double d = params_.d();
    const double ratio = d / step_;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
      throw ConfigError("Parisian delay d must be an integer multiple of the grid step");
    double T = cfg_.horizon > 0.0 ? cfg_.horizon : poisson_horizon(params_.lambda(), cfg_.n_max, cfg_.tol.tail_mass);
    if (!(T > d)) throw ConfigError("horizon must exceed the Parisian delay d");
    intervals_ = static_cast<std::size_t>(std::ceil((T - d) / step_ - 1e-9));
    if (intervals_ < 1) intervals_ = 1;
  }

  const ModelParams& params() const noexcept { return params_; }
  const SolverConfig& config() const noexcept { return cfg_; }
  double step() const noexcept { return step_; }
  double horizon() const noexcept { return params_.d() + step_ * static_cast<double>(intervals_); }

  /// Direct recursion for both families on the output grid.
  ParisianSolution solve() const { return solve_impl(std::nullopt); }

  /// Deficit-extended densities w^d(n,t,x) at a fixed deficit x > 0.
  ParisianSolution solve_deficit(double x) const {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("deficit x must be > 0");
    return solve_impl(x);
  }

  /// u = 0 densities from the renewal equation, summed as a Neumann series.
  std::vector<std::vector<double>> renewal() const {
    if (cfg_.mode == Mode::accurate) {
      const auto fine = renewal_run(0.5 * step_, 2 * intervals_);
      const auto coarse = renewal_run(step_, intervals_);
      std::vector<std::vector<double>> out(fine.size());
      double low = 0.0;
      for (std::size_t n = 0; n < fine.size(); ++n) {
        out[n] = richardson(fine[n], coarse[n]);
        for (std::size_t i = 0; i < out[n].size(); ++i) out[n][i] = clamp(out[n][i], low, static_cast<int>(n) + 1, i);
      }
      return out;
    }
    return renewal_run(step_, intervals_);
  }

  /// Probabilities of exactly n claims until Parisian ruin, from time-marginal
  /// classical densities (no time grid).
  Probabilities probabilities() const {
    const int n_max = cfg_.n_max;
    const double c = params_.c();
    const double d = params_.d();
    const double cd = c * d;
    const auto ys = Gauss16::nodes(0.0, cd, cfg_.panels);
    std::vector<std::vector<double>> B(static_cast<std::size_t>(n_max));
    std::vector<std::vector<double>> P(static_cast<std::size_t>(n_max));
    for (int k = 0; k < n_max; ++k) {
      B[k].resize(ys.size());
      P[k].resize(ys.size());
      for (std::size_t g = 0; g < ys.size(); ++g) {
        const double y = ys[g].first;
        if (k >= 1) B[k][g] = bracket(k, y, std::nullopt);
        P[k][g] = k == 0 ? std::exp(-params_.lambda() * y / c)
                         : Gauss16::integrate([&](double s) { return v_point(k, y, s); }, y / c, d, cfg_.panels);
      }
    }

    auto family = [&](const ClassicalRuinDensity& cl, const std::vector<double>* p0) {
      std::vector<std::vector<double>> marg(static_cast<std::size_t>(n_max));
      for (int m = 1; m < n_max; ++m) {
        marg[m].resize(ys.size());
        for (std::size_t g = 0; g < ys.size(); ++g) marg[m][g] = cl.marginal(m, ys[g].first);
      }
      std::vector<double> tails(static_cast<std::size_t>(n_max) + 1);
      for (int m = 1; m <= n_max; ++m) tails[m] = cl.marginal_tail(m, cd);
      std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
      for (int n = 1; n <= n_max; ++n) {
        double value = 0.0;
        for (int k = 0; k < n; ++k) value += poisson_pmf(params_.lambda() * d, k) * tails[n - k];
        for (int k = 1; k < n; ++k)
          for (std::size_t g = 0; g < ys.size(); ++g) value += ys[g].second * marg[n - k][g] * B[k][g];
        const auto& restart = p0 ? *p0 : p;
        for (int m = 1; m < n; ++m)
          for (int k = 0; k + m < n; ++k) {
            double acc = 0.0;
            for (std::size_t g = 0; g < ys.size(); ++g) acc += ys[g].second * marg[m][g] * P[k][g];
            value += acc * restart[n - m - k];
          }
        p[n] = value;
      }
      return p;
    };

    Probabilities out;
    const ClassicalRuinDensity zero(params_.with_reserve(0.0), cfg_.classical);
    const auto p0 = family(zero, nullptr);
    out.p0.assign(p0.begin() + 1, p0.end());
    if (params_.u() == 0.0) {
      out.pu = out.p0;
    } else {
      const ClassicalRuinDensity cl(params_, cfg_.classical);
      const auto pu = family(cl, &p0);
      out.pu.assign(pu.begin() + 1, pu.end());
    }
    return out;
  }

 private:
  struct Run {
    std::vector<std::vector<double>> w0, wu, psi0, psiu;
    double low = 0.0;
  };

  struct FamilyTerms {
    std::vector<std::vector<double>> first;  // [n-1][i]
    std::vector<std::vector<double>> k_int;  // [m-1][z]
    std::vector<std::vector<double>> k_end;  // [m-1][z]
  };

  // v_y(k,s) including the boundary value at s = y/c.
  double v_point(int k, double y, double s) const {
    const double gap = params_.c() * s - y;
    if (k == 0 || y <= 0.0 || gap < 0.0 || s <= 0.0) return 0.0;
    const double f = params_.claims().conv_density(k, gap);
    if (f == 0.0) return 0.0;
    const double lam = params_.lambda();
    const double kd = k;
    return std::exp(kd * std::log(lam) + std::log(y) + (kd - 1.0) * std::log(s) - lam * s - std::lgamma(kd + 1.0)) * f;
  }

  // F-bar^{k*}(z), or f^{k*}(z + x) for the deficit-extended variant.
  double after(int k, double z, std::optional<double> x) const {
    const auto& claims = params_.claims();
    if (!x) return claims.conv_tail(k, z);
    if (k == 0) return 0.0;
    return claims.conv_density(k, z + *x);
  }

  // Weight on deficit y in (0, cd] for k claims in the following d units of time.
  double bracket(int k, double y, std::optional<double> x) const {
    const double lam = params_.lambda();
    const double c = params_.c();
    const double d = params_.d();
    const double s0 = y / c;
    const double tail = after(k, c * d - y, x);
    double value = (poisson_pmf(lam * d, k) - std::exp(-lam * s0) * poisson_pmf(lam * (d - s0), k)) * tail;
    for (int m = 1; m < k; ++m) {
      auto integrand = [&](double s) {
        return v_point(m, y, s) * poisson_pmf(lam * (d - s), k - m) * after(k - m, c * (d - s), x);
      };
      value -= Gauss16::integrate(integrand, s0, d, cfg_.panels);
    }
    return value;
  }

  double clamp(double v, double& low, int n, std::size_t i) const {
    low = std::min(low, v);
    if (v >= 0.0) return v;
    if (v >= -cfg_.clamp_slack) return 0.0;
    std::ostringstream msg;
    msg << "density " << v << " below clamp slack at n=" << n << ", node " << i;
    throw NumericalError(NumericalFailure::tolerance_not_met, msg.str());
  }

  // Term with deficit beyond cd at classical ruin, plus the corrected term for
  // deficits inside (0, cd], and the merged restart kernels.
  FamilyTerms family_terms(const ClassicalRuinDensity& cl, double h, std::size_t N, std::optional<double> x,
                           bool rect) const {
    const int n_max = cfg_.n_max;
    const int L = n_max - 1;
    const double lam = params_.lambda();
    const double c = params_.c();
    const double d = params_.d();
    const auto D = static_cast<std::size_t>(std::llround(d / h));
    const auto nn = static_cast<std::size_t>(n_max);

    FamilyTerms out;
    out.first.assign(nn, std::vector<double>(N + 1, 0.0));
    std::vector<std::vector<double>> raw(static_cast<std::size_t>(std::max(L, 0)), std::vector<double>(N + 1, 0.0));
    std::vector<std::vector<double>> base = raw;

    if (!x) {
      const auto tails = cl.time_grids(n_max, h, N, c * d, true);
      for (int n = 1; n <= n_max; ++n)
        for (int k = 0; k < n; ++k) {
          const double pk = poisson_pmf(lam * d, k);
          for (std::size_t i = 0; i <= N; ++i) out.first[n - 1][i] += pk * tails[n - k - 1][i];
        }
    } else {
      const auto at = cl.time_grids(n_max, h, N, c * d + *x);
      for (int n = 1; n <= n_max; ++n)
        for (std::size_t i = 0; i <= N; ++i) out.first[n - 1][i] = std::exp(-lam * d) * at[n - 1][i];
      if (L >= 1) {
        for (const auto& [y, wy] : Gauss16::nodes(c * d, c * d + *x, cfg_.panels)) {
          const auto slice = cl.time_grids(L, h, N, y);
          for (int n = 2; n <= n_max; ++n)
            for (int k = 1; k < n; ++k) {
              const double coef = wy * poisson_pmf(lam * d, k) * params_.claims().conv_density(k, c * d - y + *x);
              if (coef == 0.0) continue;
              for (std::size_t i = 0; i <= N; ++i) out.first[n - 1][i] += coef * slice[n - k - 1][i];
            }
        }
      }
    }
    if (L < 1) {
      out.k_int = raw;
      out.k_end = raw;
      return out;
    }

    std::vector<std::vector<double>> B(nn, std::vector<double>(D + 1, 0.0));
    for (int k = 1; k < n_max; ++k)
      for (std::size_t j = 0; j <= D; ++j) B[k][j] = bracket(k, c * h * static_cast<double>(j), x);

    auto ws = [&](std::size_t a) {
      if (rect) return a == 0 ? 0.0 : 1.0;
      return (a == 0 || a == D) ? 0.5 : 1.0;
    };

    for (std::size_t j = 0; j <= D; ++j) {
      const double y = c * h * static_cast<double>(j);
      const auto slice = cl.time_grids(L, h, N, y);

      // no claims before the up-crossing at s = y/c
      {
        const std::size_t a = j;
        const double coef = ws(a) * c * std::exp(-lam * h * static_cast<double>(a));
        if (coef != 0.0 && a <= N)
          for (int l = 1; l <= L; ++l) {
            auto& r = raw[l - 1];
            const auto& w = slice[l - 1];
            for (std::size_t b = 0; a + b <= N; ++b) r[a + b] += coef * w[b];
            base[l - 1][a] += coef * w[0];
          }
      }
      if (j >= 1) {
        for (std::size_t a = j; a <= std::min(D, N); ++a) {
          const double wy = (j == a) ? 0.5 : 1.0;
          const double s = h * static_cast<double>(a);
          for (int k = 1; k < L; ++k) {
            const double coef = ws(a) * c * h * wy * v_point(k, y, s);
            if (coef == 0.0) continue;
            for (int l = 1; l + k <= L; ++l) {
              auto& r = raw[l + k - 1];
              const auto& w = slice[l - 1];
              for (std::size_t b = 0; a + b <= N; ++b) r[a + b] += coef * w[b];
              base[l + k - 1][a] += coef * w[0];
            }
          }
        }
      }
      if (D > 0) {
        const double wy = (j == 0 || j == D) ? 0.5 : 1.0;
        for (int n = 2; n <= n_max; ++n)
          for (int k = 1; k < n; ++k) {
            const double coef = c * h * wy * B[k][j];
            if (coef == 0.0) continue;
            const auto& w = slice[n - k - 1];
            auto& f = out.first[n - 1];
            for (std::size_t i = 0; i <= N; ++i) f[i] += coef * w[i];
          }
      }
    }

    out.k_int = raw;
    out.k_end = raw;
    for (std::size_t m = 0; m < raw.size(); ++m)
      for (std::size_t z = 0; z <= N; ++z) {
        if (rect) {
          out.k_int[m][z] = raw[m][z] - base[m][z];
          out.k_end[m][z] = raw[m][z] - base[m][z];
        } else {
          out.k_int[m][z] = raw[m][z] - 0.5 * base[m][z];
          out.k_end[m][z] = 0.5 * (raw[m][z] - base[m][z]);
        }
      }
    return out;
  }

  std::vector<std::vector<double>> recurse(const FamilyTerms& terms, const std::vector<std::vector<double>>* restart,
                                           double h, std::size_t N, double& low) const {
    const int n_max = cfg_.n_max;
    std::vector<std::vector<double>> w(static_cast<std::size_t>(n_max), std::vector<double>(N + 1, 0.0));
    const auto& src = restart ? *restart : w;
    const double h2 = h * h;
    for (int n = 1; n <= n_max; ++n) {
      auto& row = w[n - 1];
      for (std::size_t i = 0; i <= N; ++i) {
        double value = terms.first[n - 1][i];
        for (int m = 1; m < n; ++m) {
          const auto& ki = terms.k_int[m - 1];
          const auto& g = src[n - m - 1];
          double acc = terms.k_end[m - 1][i] * g[0];
          for (std::size_t z = 0; z < i; ++z) acc += ki[z] * g[i - z];
          value += h2 * acc;
        }
        row[i] = clamp(value, low, n, i);
      }
    }
    return w;
  }

  std::vector<double> cumulate(const std::vector<double>& w, double h, bool rect) const {
    std::vector<double> out(w.size(), 0.0);
    for (std::size_t i = 1; i < w.size(); ++i)
      out[i] = out[i - 1] + (rect ? h * w[i] : 0.5 * h * (w[i - 1] + w[i]));
    return out;
  }

  Run run(double h, std::size_t N, std::optional<double> x, bool rect) const {
    Run out;
    const ClassicalRuinDensity zero(params_.with_reserve(0.0), cfg_.classical);
    const auto t0 = family_terms(zero, h, N, x, rect);
    out.w0 = recurse(t0, nullptr, h, N, out.low);
    if (params_.u() == 0.0) {
      out.wu = out.w0;
    } else {
      const ClassicalRuinDensity cl(params_, cfg_.classical);
      const auto tu = family_terms(cl, h, N, x, rect);
      out.wu = recurse(tu, &out.w0, h, N, out.low);
    }
    for (const auto& w : out.w0) out.psi0.push_back(cumulate(w, h, rect));
    for (const auto& w : out.wu) out.psiu.push_back(cumulate(w, h, rect));
    return out;
  }

  ParisianSolution solve_impl(std::optional<double> x) const {
    ParisianSolution sol;
    sol.d = params_.d();
    sol.step = step_;
    sol.mode = cfg_.mode;
    if (cfg_.mode == Mode::paper_faithful) {
      auto r = run(step_, intervals_, x, true);
      sol.w0d = std::move(r.w0);
      sol.wud = std::move(r.wu);
      sol.psi0d = std::move(r.psi0);
      sol.psiud = std::move(r.psiu);
      sol.min_pre_clamp = r.low;
      return sol;
    }
    const auto fine = run(0.5 * step_, 2 * intervals_, x, false);
    const auto coarse = run(step_, intervals_, x, false);
    double low = std::min(fine.low, coarse.low);
    auto combine = [&](const std::vector<std::vector<double>>& f, const std::vector<std::vector<double>>& g,
                       bool density) {
      std::vector<std::vector<double>> out(f.size());
      for (std::size_t n = 0; n < f.size(); ++n) {
        out[n] = richardson(f[n], g[n]);
        if (density)
          for (std::size_t i = 0; i < out[n].size(); ++i) out[n][i] = clamp(out[n][i], low, static_cast<int>(n) + 1, i);
      }
      return out;
    };
    sol.w0d = combine(fine.w0, coarse.w0, true);
    sol.wud = combine(fine.wu, coarse.wu, true);
    sol.psi0d = combine(fine.psi0, coarse.psi0, false);
    sol.psiud = combine(fine.psiu, coarse.psiu, false);
    sol.min_pre_clamp = low;
    return sol;
  }

  // h(n,·) and the restart kernel varpi(m,·) evaluated pointwise, then the
  // Neumann series with trapezoid convolutions.
  std::vector<std::vector<double>> renewal_run(double h, std::size_t N) const {
    const int n_max = cfg_.n_max;
    const int L = n_max - 1;
    const double lam = params_.lambda();
    const double c = params_.c();
    const double d = params_.d();
    const ClassicalRuinDensity zero(params_.with_reserve(0.0), cfg_.classical);
    const auto nn = static_cast<std::size_t>(n_max);

    std::vector<std::vector<double>> hn(nn, std::vector<double>(N + 1, 0.0));
    for (int n = 1; n <= n_max; ++n)
      for (std::size_t i = 0; i <= N; ++i) {
        const double tau = h * static_cast<double>(i);
        double value = 0.0;
        for (int k = 0; k < n; ++k) value += poisson_pmf(lam * d, k) * zero.deficit_tail(n - k, tau, c * d);
        hn[n - 1][i] = value;
      }
    if (L >= 1 && d > 0.0) {
      for (const auto& [y, wy] : Gauss16::nodes(0.0, c * d, cfg_.panels)) {
        std::vector<double> B(nn, 0.0);
        for (int k = 1; k < n_max; ++k) B[k] = bracket(k, y, std::nullopt);
        for (std::size_t i = 0; i <= N; ++i) {
          const double tau = h * static_cast<double>(i);
          for (int l = 1; l <= L; ++l) {
            const double w = zero.density(l, tau, y);
            for (int n = l + 1; n <= n_max; ++n) hn[n - 1][i] += wy * w * B[n - l];
          }
        }
      }
    }

    std::vector<std::vector<double>> varpi(static_cast<std::size_t>(std::max(L, 0)), std::vector<double>(N + 1, 0.0));
    if (L >= 1 && d > 0.0) {
      std::vector<double> K(static_cast<std::size_t>(L));
      std::vector<double> wl(static_cast<std::size_t>(L));
      for (std::size_t i = 1; i <= N; ++i) {
        const double z = h * static_cast<double>(i);
        for (const auto& [s, wsn] : Gauss16::nodes(0.0, std::min(d, z), cfg_.panels)) {
          const double t1 = z - s;
          std::fill(K.begin(), K.end(), 0.0);
          for (int l = 1; l <= L; ++l) K[l - 1] += c * std::exp(-lam * s) * zero.density(l, t1, c * s);
          if (L >= 2) {
            for (const auto& [y, wy] : Gauss16::nodes(0.0, c * s, cfg_.panels)) {
              for (int l = 1; l < L; ++l) wl[l - 1] = zero.density(l, t1, y);
              for (int k = 1; k < L; ++k) {
                const double v = wy * v_point(k, y, s);
                if (v == 0.0) continue;
                for (int l = 1; l + k <= L; ++l) K[l + k - 1] += v * wl[l - 1];
              }
            }
          }
          for (int m = 1; m <= L; ++m) varpi[m - 1][i] += wsn * K[m - 1];
        }
      }
    }

    auto convolve = [&](const std::vector<std::vector<double>>& g) {
      std::vector<std::vector<double>> out(nn, std::vector<double>(N + 1, 0.0));
      double sup = 0.0;
      for (int n = 2; n <= n_max; ++n)
        for (std::size_t i = 1; i <= N; ++i) {
          double acc = 0.0;
          for (int m = 1; m < n; ++m) {
            const auto& vm = varpi[m - 1];
            const auto& gm = g[n - m - 1];
            double part = 0.5 * vm[i] * gm[0];
            for (std::size_t zi = 1; zi < i; ++zi) part += vm[zi] * gm[i - zi];
            acc += part;
          }
          out[n - 1][i] = h * acc;
          sup = std::max(sup, std::abs(out[n - 1][i]));
        }
      return std::make_pair(out, sup);
    };

    auto total = hn;
    auto term = hn;
    for (int k = 1; k < n_max; ++k) {
      auto [next, sup] = convolve(term);
      if (!std::isfinite(sup)) throw NumericalError(NumericalFailure::series_divergence, "Neumann term is not finite");
      for (std::size_t n = 0; n < nn; ++n)
        for (std::size_t i = 0; i <= N; ++i) total[n][i] += next[n][i];
      if (sup < cfg_.tol.abs) break;
      term = std::move(next);
    }
    return total;
  }

  ModelParams params_;
  SolverConfig cfg_;
  double step_ = 0.1;
  std::size_t intervals_ = 1;
};

/// w_0^d(n,·) by the direct recursion.
inline DensityGrid w0_recursive(const ModelParams& params, int n, SolverConfig cfg = {}) {
  if (n < 1) throw ConfigError("claim count n must be >= 1");
  cfg.n_max = std::max(cfg.n_max, n);
  return ParisianSolver(params, cfg).solve().grid(n, false);
}

/// w_u^d(n,·) by the direct recursion.
inline DensityGrid wu_recursive(const ModelParams& params, int n, SolverConfig cfg = {}) {
  if (n < 1) throw ConfigError("claim count n must be >= 1");
  cfg.n_max = std::max(cfg.n_max, n);
  return ParisianSolver(params, cfg).solve().grid(n, true);
}

/// w_u^d(n,t,x) at one point; t must lie on the output grid or is interpolated.
inline double w_deficit(const ModelParams& params, int n, double t, double x, SolverConfig cfg = {}) {
  if (n < 1) throw ConfigError("claim count n must be >= 1");
  cfg.n_max = std::max(cfg.n_max, n);
  if (t <= params.d()) return 0.0;
  if (cfg.horizon <= 0.0) cfg.horizon = t;
  return ParisianSolver(params, cfg).solve_deficit(x).wu(n, t);
}

/// w_0^d(n,·) through the renewal equation.
inline DensityGrid h_and_renewal(const ModelParams& params, int n, SolverConfig cfg = {}) {
  if (n < 1) throw ConfigError("claim count n must be >= 1");
  cfg.n_max = std::max(cfg.n_max, n);
  const ParisianSolver solver(params, cfg);
  const auto rows = solver.renewal();
  const auto& v = rows[static_cast<std::size_t>(n - 1)];
  return DensityGrid(params.d(), solver.step(), std::vector<double>(v.begin() + 1, v.end()), Rule::trapezoid, v.front());
}

inline double p_of_n(const ModelParams& params, int n, SolverConfig cfg = {}) {
  if (n < 1) throw ConfigError("claim count n must be >= 1");
  cfg.n_max = n;
  return ParisianSolver(params, cfg).probabilities().pu.back();
}

inline double psi_of_n_t(const ParisianSolution& sol, int n, double t) { return sol.psiu(n, t); }

}  // namespace parisian
