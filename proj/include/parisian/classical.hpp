#pragma once

// Joint density of (claims until classical ruin, ruin time, deficit at ruin).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "parisian/errors.hpp"
#include "parisian/model.hpp"
#include "parisian/numerics.hpp"

namespace parisian {

enum class Evaluation { automatic, closed_form, quadrature };

struct ClassicalOptions {
  Evaluation evaluation = Evaluation::automatic;
  int panels = 16;          // Gauss-Legendre panels for the inner x and s integrals
  double tail_mass = 1e-12; // truncation target for semi-infinite t integrals
};

/// w_u(k,t,y) and its deficit-tail and time-marginal versions for one reserve u.
class ClassicalRuinDensity {
 public:
  explicit ClassicalRuinDensity(ModelParams params, ClassicalOptions opts = {})
      : params_(std::move(params)), opts_(opts) {
    if (opts_.panels < 1) throw ConfigError("classical quadrature panels must be >= 1");
    if (!(opts_.tail_mass > 0.0)) throw ConfigError("classical tail_mass must be > 0");
    if (opts_.evaluation == Evaluation::closed_form && !params_.claims().is_exponential())
      throw ConfigError("closed-form classical density requires exponential claims");
    closed_ = params_.claims().is_exponential() && opts_.evaluation != Evaluation::quadrature;
  }

  const ModelParams& params() const noexcept { return params_; }
  const ClassicalOptions& options() const noexcept { return opts_; }
  double reserve() const noexcept { return params_.u(); }
  bool closed_form() const noexcept { return closed_; }

  /// w_u(k,t,y): density of ruin at time t with deficit y after exactly k claims.
  double density(int k, double t, double y) const {
    check_order(k);
    if (t < 0.0 || y < 0.0) return 0.0;
    if (closed_) return closed_density(k, t, y);
    return general(k, t, y, false);
  }

  /// Integral of w_u(k,t,y) over y in (z, inf).
  double deficit_tail(int k, double t, double z) const {
    check_order(k);
    if (t < 0.0) return 0.0;
    z = std::max(z, 0.0);
    if (closed_) return closed_density(k, t, z) / params_.claims().rate();
    return general(k, t, z, true);
  }

  /// w_u(k,y) = integral of w_u(k,t,y) over t in (0, inf).
  double marginal(int k, double y) const {
    check_order(k);
    if (y < 0.0) return 0.0;
    return marginal_impl(k, y, false);
  }

  /// Integral of w_u(k,y) over y in (z, inf).
  double marginal_tail(int k, double z) const {
    check_order(k);
    z = std::max(z, 0.0);
    if (params_.claims().is_exponential() && closed_) return marginal_impl(k, z, false) / params_.claims().rate();
    return marginal_impl(k, z, true);
  }

  /// Time beyond which the remaining t-mass of w_u(k,·,y) is below tail_mass for every y.
  double horizon(int k) const { return truncation_point(envelope(k), opts_.tail_mass); }

  /// Values w_u(k, b*step, y) (or deficit tails when tail is set) for k = 1..kmax,
  /// b = 0..count. The correction sum for u > 0 under general claims is a
  /// trapezoid convolution over the same grid.
  std::vector<std::vector<double>> time_grids(int kmax, double step, std::size_t count, double y,
                                              bool tail = false) const {
    check_order(kmax);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(kmax), std::vector<double>(count + 1, 0.0));
    if (closed_ || params_.u() == 0.0) {
      for (int k = 1; k <= kmax; ++k)
        for (std::size_t b = 0; b <= count; ++b) {
          const double t = step * static_cast<double>(b);
          out[k - 1][b] = tail ? deficit_tail(k, t, y) : density(k, t, y);
        }
      return out;
    }

    const ClassicalRuinDensity zero(params_.with_reserve(0.0), opts_);
    std::vector<std::vector<double>> w0(static_cast<std::size_t>(std::max(kmax - 1, 0)));
    for (int m = 1; m < kmax; ++m) {
      w0[m - 1].resize(count + 1);
      for (std::size_t b = 0; b <= count; ++b) w0[m - 1][b] = zero.direct(m, step * static_cast<double>(b), y, tail);
    }
    std::vector<std::vector<double>> g(static_cast<std::size_t>(std::max(kmax - 1, 0)));
    for (int j = 1; j < kmax; ++j) {
      g[j - 1].resize(count + 1);
      for (std::size_t a = 0; a <= count; ++a) g[j - 1][a] = sifted(j, step * static_cast<double>(a));
    }
    const double c = params_.c();
    for (int k = 1; k <= kmax; ++k) {
      for (std::size_t b = 0; b <= count; ++b) {
        double value = direct(k, step * static_cast<double>(b), y, tail);
        double corr = 0.0;
        for (int j = 1; j < k; ++j) {
          const auto& gj = g[j - 1];
          const auto& wz = w0[k - j - 1];
          double acc = 0.0;
          for (std::size_t a = 0; a <= b; ++a) {
            const double wt = (a == 0 || a == b) ? 0.5 : 1.0;
            acc += wt * gj[a] * wz[b - a];
          }
          corr += acc * step;
        }
        value -= c * corr;
        out[k - 1][b] = value;
      }
    }
    return out;
  }

 private:
  void check_order(int k) const {
    if (k < 1) throw ConfigError("claim count k must be >= 1");
  }

  double closed_density(int k, double t, double y) const {
    const double lam = params_.lambda();
    const double mu = params_.claims().rate();
    const double c = params_.c();
    const double u = params_.u();
    const double decay = -(lam + mu * c) * t - mu * u - mu * y;
    if (k == 1) return lam * mu * std::exp(decay);
    if (t == 0.0) return 0.0;
    const double kd = k;
    double log_value = kd * std::log(lam * mu) - std::lgamma(kd + 1.0) - std::lgamma(kd) + decay;
    if (u == 0.0) {
      log_value += (kd - 1.0) * std::log(c) + (2.0 * kd - 2.0) * std::log(t);
    } else {
      log_value += std::log(kd * u + c * t) + (kd - 2.0) * std::log(u + c * t) + (kd - 1.0) * std::log(t);
    }
    return std::exp(log_value);
  }

  // f(x + y), or the claim tail at x + y for the deficit-tail variant.
  double kernel(double x, double y, bool tail) const {
    return tail ? params_.claims().tail(x + y) : params_.claims().pdf(x + y);
  }

  // The convolution integral over x, without the j-sum correction.
  double direct(int k, double t, double y, bool tail) const {
    if (t < 0.0) return 0.0;
    const double lam = params_.lambda();
    const double u = params_.u();
    const double c = params_.c();
    const double reach = u + c * t;
    if (k == 1) return lam * std::exp(-lam * t) * kernel(reach, y, tail);
    if (t == 0.0) return 0.0;
    const double kd = k;
    const double pref = std::exp(kd * std::log(lam) + (kd - 1.0) * std::log(t) - lam * t - std::lgamma(kd));
    const auto& claims = params_.claims();
    auto integrand = [&](double x) {
      const double w = u == 0.0 ? x / reach : 1.0;
      return w * claims.conv_density(k - 1, reach - x) * kernel(x, y, tail);
    };
    return pref * Gauss16::integrate(integrand, 0.0, reach, opts_.panels);
  }

  // e^{-lambda s} (lambda s)^j / j! f^{j*}(u + c s)
  double sifted(int j, double s) const {
    if (s <= 0.0) return 0.0;
    const double lam = params_.lambda();
    return poisson_pmf(lam * s, j) * params_.claims().conv_density(j, params_.u() + params_.c() * s);
  }

  double general(int k, double t, double y, bool tail) const {
    double value = direct(k, t, y, tail);
    if (params_.u() == 0.0 || k == 1 || t == 0.0) return value;
    const ClassicalRuinDensity zero(params_.with_reserve(0.0), opts_);
    double corr = 0.0;
    for (int j = 1; j < k; ++j) {
      auto integrand = [&](double s) { return sifted(j, s) * zero.direct(k - j, t - s, y, tail); };
      corr += Gauss16::integrate(integrand, 0.0, t, opts_.panels);
    }
    return value - params_.c() * corr;
  }

  Envelope envelope(int k) const {
    const double lam = params_.lambda();
    const double kd = k;
    const double scale = std::exp(kd * std::log(lam) - std::lgamma(kd)) * params_.claims().sup_density();
    return Envelope{scale, lam, kd - 1.0};
  }

  int time_panels(double T) const {
    const double rate = params_.lambda() + params_.c() * params_.claims().sup_density();
    return std::max(opts_.panels, static_cast<int>(std::ceil(T * rate)));
  }

  double marginal_impl(int k, double y, bool tail) const {
    const double lam = params_.lambda();
    const double c = params_.c();
    if (closed_ && params_.u() == 0.0 && !tail) {
      const double mu = params_.claims().rate();
      const double kd = k;
      const double log_value = std::lgamma(2.0 * kd - 1.0) - std::lgamma(kd + 1.0) - std::lgamma(kd) +
                               kd * std::log(lam * mu) + (kd - 1.0) * std::log(c) -
                               (2.0 * kd - 1.0) * std::log(lam + mu * c) - mu * y;
      return std::exp(log_value);
    }
    const double T = horizon(k);
    if (closed_) {
      auto integrand = [&](double t) { return closed_density(k, t, y); };
      return Gauss16::integrate(integrand, 0.0, T, time_panels(T));
    }
    // The t-convolution in the correction term factorizes over the infinite range.
    auto first = [&](double t) { return direct(k, t, y, tail); };
    double value = Gauss16::integrate(first, 0.0, T, time_panels(T));
    if (params_.u() == 0.0 || k == 1) return value;
    const ClassicalRuinDensity zero(params_.with_reserve(0.0), opts_);
    double corr = 0.0;
    for (int j = 1; j < k; ++j) {
      const double jd = j;
      const Envelope env{std::exp(jd * std::log(lam) - std::lgamma(jd + 1.0)) * params_.claims().sup_density(), lam, jd};
      const double S = truncation_point(env, opts_.tail_mass);
      auto gj = [&](double s) { return sifted(j, s); };
      const double G = Gauss16::integrate(gj, 0.0, S, time_panels(S));
      corr += G * zero.marginal_impl(k - j, y, tail);
    }
    return value - c * corr;
  }

  ModelParams params_;
  ClassicalOptions opts_;
  bool closed_ = false;
};

inline double w0(const ModelParams& params, int k, double t, double y) {
  return ClassicalRuinDensity(params.with_reserve(0.0)).density(k, t, y);
}

inline double wu(const ModelParams& params, int k, double t, double y) {
  return ClassicalRuinDensity(params).density(k, t, y);
}

inline double wu_marginal(const ModelParams& params, int k, double y) {
  return ClassicalRuinDensity(params).marginal(k, y);
}

}  // namespace parisian
