#pragma once

// Closed-form values for exponential claims, used as regression oracles.

#include <cmath>

#include "parisian/errors.hpp"
#include "parisian/model.hpp"

namespace parisian::reference {

namespace detail {

inline double rate_of(const ModelParams& p) {
  if (!p.claims().is_exponential()) throw ConfigError("closed forms require exponential claims");
  return p.claims().rate();
}

}  // namespace detail

/// Classical ruin probability from reserve u.
inline double classical_ruin(const ModelParams& p) {
  const double mu = detail::rate_of(p);
  return p.lambda() / (p.c() * mu) * std::exp(-(mu - p.lambda() / p.c()) * p.u());
}

/// Probability of Parisian ruin with exactly one claim.
inline double p_one(const ModelParams& p) {
  const double mu = detail::rate_of(p);
  const double lam = p.lambda();
  return std::exp(-lam * p.d() - mu * (p.u() + p.c() * p.d())) * lam / (lam + mu * p.c());
}

inline double w1(const ModelParams& p, double t) {
  const double mu = detail::rate_of(p);
  if (t <= p.d()) return 0.0;
  return p.lambda() * std::exp(-(p.lambda() + mu * p.c()) * t - mu * p.u());
}

/// w_0^d(2,t), piecewise on (d,2d] and (2d,inf).
inline double w0_two(const ModelParams& p, double t) {
  const double mu = detail::rate_of(p);
  const double lam = p.lambda();
  const double c = p.c();
  const double d = p.d();
  if (t <= d) return 0.0;
  const double poly = t > 2.0 * d ? 0.5 * mu * c * t * t + d - 0.5 * mu * c * d * d
                                  : mu * c * (t - d) * (t - d) + d + 0.5 * mu * c * d * d;
  return lam * lam * std::exp(-(lam + mu * c) * t) * poly;
}

/// w_0^d(3,t), piecewise on (d,2d], (2d,3d] and (3d,inf).
inline double w0_three(const ModelParams& p, double t) {
  const double mu = detail::rate_of(p);
  const double lam = p.lambda();
  const double c = p.c();
  const double d = p.d();
  if (t <= d) return 0.0;
  const double m2 = c * c * mu * mu;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double d2 = d * d, d3 = d2 * d, d4 = d3 * d;
  double poly;
  if (t > 3.0 * d) {
    poly = (2 * m2 * t4 + (12 * c * d * mu - 6 * m2 * d2) * t2 + 4 * m2 * d3 * t + 12 * d2 - 16 * c * d3 * mu +
            5 * m2 * d4) / 24.0;
  } else if (t > 2.0 * d) {
    poly = (m2 * t4 + 12 * m2 * d * t3 + (12 * c * d * mu - 60 * m2 * d2) * t2 + 112 * m2 * d3 * t + 12 * d2 -
            16 * c * d3 * mu - 76 * m2 * d4) / 24.0;
  } else {
    poly = (3 * m2 * t4 - 12 * m2 * d * t3 + (12 * c * d * mu + 24 * m2 * d2) * t2 -
            (24 * c * d2 * mu + 24 * m2 * d3) * t + 6 * d2 + 16 * c * d3 * mu + 10 * m2 * d4) / 12.0;
  }
  return lam * lam * lam * std::exp(-(lam + mu * c) * t) * poly;
}

/// Integral of w_u^d(1,s) over (d, t].
inline double psi_one(const ModelParams& p, double t) {
  const double mu = detail::rate_of(p);
  if (t <= p.d()) return 0.0;
  const double a = p.lambda() + mu * p.c();
  return p.lambda() * std::exp(-mu * p.u()) * (std::exp(-a * p.d()) - std::exp(-a * t)) / a;
}

}  // namespace parisian::reference
