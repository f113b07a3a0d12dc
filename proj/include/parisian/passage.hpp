#pragma once

// First upward passage of level y from 0: joint law of passage time and claim count.

#include <algorithm>
#include <cmath>
#include <vector>

#include "parisian/errors.hpp"
#include "parisian/model.hpp"
#include "parisian/numerics.hpp"

namespace parisian {

class PassageLaw {
 public:
  PassageLaw(ModelParams params, double y) : params_(std::move(params)), y_(y) {
    if (!(y_ >= 0.0) || !std::isfinite(y_)) throw ConfigError("passage level y must be >= 0");
  }

  const ModelParams& params() const noexcept { return params_; }
  double level() const noexcept { return y_; }

  /// No claims before the deterministic crossing at y/c.
  Atom atom() const { return {y_ / params_.c(), std::exp(-params_.lambda() * y_ / params_.c())}; }

  /// v_y(k,t) for k >= 1; zero for t <= y/c. For k = 0 see atom().
  double density(int k, double t) const {
    if (k < 0) throw ConfigError("claim count k must be >= 0");
    const double c = params_.c();
    if (k == 0 || y_ == 0.0 || t <= y_ / c) return 0.0;
    const double lam = params_.lambda();
    const double kd = k;
    const double gap = c * t - y_;
    const auto& claims = params_.claims();
    if (claims.is_exponential()) {
      const double mu = claims.rate();
      const double log_value = kd * std::log(lam * mu) + std::log(y_) + (kd - 1.0) * std::log(t * gap) -
                               std::lgamma(kd + 1.0) - std::lgamma(kd) - lam * t - mu * gap;
      return std::exp(log_value);
    }
    const double f = claims.conv_density(k, gap);
    if (f == 0.0) return 0.0;
    return std::exp(kd * std::log(lam) + std::log(y_) + (kd - 1.0) * std::log(t) - lam * t - std::lgamma(kd + 1.0)) * f;
  }

  AtomDensity law(int k) const {
    if (k < 0) throw ConfigError("claim count k must be >= 0");
    if (k == 0) return AtomDensity({atom()}, {});
    auto self = *this;
    return AtomDensity({}, [self, k](double t) { return self.density(k, t); });
  }

  /// Integral of v_y(k,·) over [y/c, T]; the atom for k = 0.
  double mass(int k, double T, int panels = 64) const {
    const double t0 = y_ / params_.c();
    if (k == 0) return T >= t0 ? atom().mass : 0.0;
    if (T <= t0) return 0.0;
    return Gauss16::integrate([&](double t) { return density(k, t); }, t0, T, panels);
  }

  struct Transform {
    double lhs = 0.0;
    double rhs = 0.0;
    double rho = 0.0;
    int terms = 0;       // claim counts summed
    double horizon = 0;  // t truncation
  };

  /// Integral of e^{-delta t} sum_k r^k v_y(k,t) against e^{-rho y}, with the
  /// k-sum and t-integral truncated so the neglected mass is below tol.
  Transform transform(double delta, double r, double tol = 1e-10) const {
    if (!(delta >= 0.0)) throw ConfigError("discount delta must be >= 0");
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("weight r must lie in (0, 1]");
    const double c = params_.c();
    const double lam = params_.lambda();
    Transform out;
    out.rho = solve_lundberg(params_.claims(), c, lam, delta, r);
    out.rhs = std::exp(-out.rho * y_);
    const double t0 = y_ / c;
    out.lhs = std::exp(-delta * t0) * atom().mass;
    if (y_ == 0.0) return out;

    const double T = truncation_point(envelope(delta, r), 0.5 * tol, t0);
    out.horizon = T;
    // k-tail: sum_{k>K} r^k v_y(k,t) <= sup f * (y/t) * P(Poisson(lambda t) > K), t <= T
    const double weight = params_.claims().sup_density() * y_ * std::max(std::log(T / t0), 1.0);
    int K = 1;
    while (weight * poisson_upper(lam * T, K) > 0.5 * tol) {
      if (++K > 100000) throw NumericalError(NumericalFailure::truncation, "passage k-sum does not converge");
    }
    out.terms = K;
    const double rate = lam + params_.claims().sup_density() * c + delta;
    const int panels = std::max(16, static_cast<int>(std::ceil((T - t0) * rate)));
    const auto nodes = Gauss16::nodes(t0, T, panels);
    std::vector<double> discount(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) discount[i] = nodes[i].second * std::exp(-delta * nodes[i].first);
    double rk = 1.0;
    for (int k = 1; k <= K; ++k) {
      rk *= r;
      double acc = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) acc += discount[i] * density(k, nodes[i].first);
      out.lhs += rk * acc;
    }
    return out;
  }

  /// Total passage probability: atom plus all densities (equals 1 under net profit).
  double normalization(double tol = 1e-10) const { return transform(0.0, 1.0, tol).lhs; }

 private:
  // Bound on e^{-delta t} sum_k r^k v_y(k,t).
  Envelope envelope(double delta, double r) const {
    const double lam = params_.lambda();
    const double c = params_.c();
    const auto& claims = params_.claims();
    if (claims.is_exponential()) {
      const double mu = claims.rate();
      const double a = std::sqrt(r * lam * mu * c);
      const double rate = lam + delta + mu * c - 2.0 * a;
      if (rate > 0.0) return Envelope{y_ * std::exp(mu * y_) * a * a, rate, 0.0};
    }
    return Envelope{claims.sup_density() * c, delta + lam * (1.0 - r), 0.0};
  }

  ModelParams params_;
  double y_;
};

inline AtomDensity v_density(const ModelParams& params, double y, int k) { return PassageLaw(params, y).law(k); }

inline double v_density(const ModelParams& params, double y, int k, double t) {
  return PassageLaw(params, y).density(k, t);
}

inline PassageLaw::Transform transform_check(const ModelParams& params, double y, double delta, double r,
                                             double tol = 1e-10) {
  return PassageLaw(params, y).transform(delta, r, tol);
}

}  // namespace parisian
