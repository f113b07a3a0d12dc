#pragma once

// Grids, quadrature rules, interpolation and tail certification shared by
// the analytic modules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "parisian/errors.hpp"

namespace parisian {

enum class Rule { right_rectangle, trapezoid };

inline std::string_view to_string(Rule rule) {
  return rule == Rule::right_rectangle ? "right-rectangle" : "trapezoid";
}

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  double tail_mass = 1e-10;

  void validate() const {
    if (!(abs > 0.0)) throw ConfigError("tolerance.abs must be > 0");
    if (!(rel > 0.0)) throw ConfigError("tolerance.rel must be > 0");
    if (!(tail_mass > 0.0)) throw ConfigError("tolerance.tail_mass must be > 0");
  }
};

/// Values of a density on the uniform nodes t0 + i*step, i = 1..size().
///
/// The node t0 itself is excluded: densities handled here vanish at and below
/// their support start, which may carry a jump. The right limit at t0 is kept
/// in start_value() so trapezoid sums and interpolation near t0 stay exact.
class DensityGrid {
 public:
  DensityGrid() = default;

  DensityGrid(double t0, double step, std::vector<double> values, Rule rule = Rule::trapezoid,
              double start_value = 0.0)
      : t0_(t0), step_(step), values_(std::move(values)), rule_(rule), start_value_(start_value) {
    if (!(step_ > 0.0)) throw ConfigError("grid step must be > 0");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        std::ostringstream msg;
        msg << "grid value at t=" << node(i) << " is not finite";
        throw NumericalError(NumericalFailure::non_finite, msg.str());
      }
    }
    if (!std::isfinite(start_value_))
      throw NumericalError(NumericalFailure::non_finite, "grid start value is not finite");
  }

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t0_ + step_ * static_cast<double>(values_.size()); }
  double step() const noexcept { return step_; }
  Rule rule() const noexcept { return rule_; }
  double start_value() const noexcept { return start_value_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  /// Time of the i-th stored value (0-based), i.e. t0 + (i+1)*step.
  double node(std::size_t i) const noexcept { return t0_ + step_ * static_cast<double>(i + 1); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Index of the stored node closest to t, if t lies on a node within 1e-9 steps.
  std::ptrdiff_t node_index(double t) const noexcept {
    const double pos = (t - t0_) / step_;
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 || r < 1.0 || r > static_cast<double>(values_.size())) return -1;
    return static_cast<std::ptrdiff_t>(r) - 1;
  }

 private:
  double t0_ = 0.0;
  double step_ = 1.0;
  std::vector<double> values_;
  Rule rule_ = Rule::trapezoid;
  double start_value_ = 0.0;
};

/// Linear interpolation inside (t0, t1]; 0 at or below t0 and beyond t1.
inline double interp_linear(const DensityGrid& grid, double t) {
  if (grid.size() == 0 || !(t > grid.t0()) || t > grid.t1() + 1e-12 * grid.step()) return 0.0;
  const double pos = (t - grid.t0()) / grid.step();
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo >= grid.size()) return grid[grid.size() - 1];
  const double frac = pos - static_cast<double>(lo);
  const double left = lo == 0 ? grid.start_value() : grid[lo - 1];
  return left + frac * (grid[lo] - left);
}

namespace detail {

inline void check_finite(double value, double where) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "integrand is not finite at t=" << where;
    throw NumericalError(NumericalFailure::non_finite, msg.str());
  }
}

inline std::size_t panel_count(double a, double b, double step) {
  const double n = (b - a) / step;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw ConfigError("integration range must be an integer number of steps");
  return static_cast<std::size_t>(r);
}

}  // namespace detail

/// Integral of a stored grid over [a, b]; both limits must lie on t0 or a node.
inline double integrate(const DensityGrid& grid, double a, double b) {
  if (a > b) throw ConfigError("integrate: a must not exceed b");
  if (a == b) return 0.0;
  const std::size_t first = detail::panel_count(grid.t0(), a, grid.step());
  const std::size_t last = detail::panel_count(grid.t0(), b, grid.step());
  if (last > grid.size()) throw ConfigError("integrate: upper limit beyond grid end");
  auto at = [&](std::size_t i) { return i == 0 ? grid.start_value() : grid[i - 1]; };
  double sum = 0.0;
  if (grid.rule() == Rule::right_rectangle) {
    for (std::size_t i = first + 1; i <= last; ++i) sum += at(i);
  } else {
    sum = 0.5 * (at(first) + at(last));
    for (std::size_t i = first + 1; i < last; ++i) sum += at(i);
  }
  return sum * grid.step();
}

/// Uniform-step rule applied to a callable on [a, b]; (b-a)/step must be integral.
template <class F>
double integrate(F&& f, double a, double b, double step, Rule rule) {
  if (a > b) throw ConfigError("integrate: a must not exceed b");
  if (!(step > 0.0)) throw ConfigError("integrate: step must be > 0");
  if (a == b) return 0.0;
  const std::size_t n = detail::panel_count(a, b, step);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = a + step * static_cast<double>(i);
    const double v = f(t);
    detail::check_finite(v, t);
    sum += (rule == Rule::trapezoid && i == n) ? 0.5 * v : v;
  }
  if (rule == Rule::trapezoid) {
    const double v = f(a);
    detail::check_finite(v, a);
    sum += 0.5 * v;
  }
  return sum * step;
}

/// Gauss-Legendre rule with a fixed order, mapped onto panels of [a, b].
template <int Order = 16>
struct GaussLegendre {
  static const std::array<std::pair<double, double>, Order>& unit() {
    static const auto table = [] {
      using Gauss = boost::math::quadrature::gauss<double, Order>;
      const auto& x = Gauss::abscissa();
      const auto& w = Gauss::weights();
      std::array<std::pair<double, double>, Order> out{};
      std::size_t k = 0;
      for (std::size_t i = x.size(); i-- > 0;) {
        if (x[i] == 0.0) continue;
        out[k++] = {-x[i], w[i]};
      }
      for (std::size_t i = 0; i < x.size(); ++i) out[k++] = {x[i], w[i]};
      return out;
    }();
    return table;
  }

  /// Nodes and weights of the composite rule on [a, b] with `panels` panels.
  static std::vector<std::pair<double, double>> nodes(double a, double b, int panels = 1) {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(panels) * Order);
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + width * p;
      const double half = 0.5 * width;
      const double mid = lo + half;
      for (const auto& [x, w] : unit()) out.emplace_back(mid + half * x, half * w);
    }
    return out;
  }

  template <class F>
  static double integrate(F&& f, double a, double b, int panels = 1) {
    if (b <= a) return 0.0;
    const double width = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double half = 0.5 * width;
      const double mid = a + width * p + half;
      double part = 0.0;
      for (const auto& [x, w] : unit()) {
        const double t = mid + half * x;
        const double v = f(t);
        detail::check_finite(v, t);
        part += w * v;
      }
      sum += half * part;
    }
    return sum;
  }
};

using Gauss16 = GaussLegendre<16>;

/// Envelope C * exp(-rate*t) * t^power used to bound integrand tails.
struct Envelope {
  double scale = 1.0;
  double rate = 1.0;
  double power = 0.0;
};

/// Upper bound on the integral of the envelope over [T, inf), via the upper
/// incomplete gamma function.
inline double certify_tail(const Envelope& env, double T) {
  if (!(env.rate > 0.0))
    throw NumericalError(NumericalFailure::truncation, "envelope decay rate must be > 0 to certify a tail");
  if (env.power < 0.0) throw ConfigError("envelope power must be >= 0");
  if (env.scale == 0.0) return 0.0;
  const double x = env.rate * std::max(T, 0.0);
  const double shape = env.power + 1.0;
  const double upper = boost::math::gamma_q(shape, x);
  if (upper == 0.0) return 0.0;
  return env.scale * std::exp(std::log(upper) + std::lgamma(shape) - shape * std::log(env.rate));
}

/// Smallest T >= start (to 1e-6 relative) whose certified tail is below mass.
inline double truncation_point(const Envelope& env, double mass, double start = 0.0) {
  if (certify_tail(env, start) <= mass) return start;
  double lo = start;
  double hi = std::max(1.0, 2.0 * start);
  while (certify_tail(env, hi) > mass) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError(NumericalFailure::truncation, "tail envelope never drops below target mass");
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (certify_tail(env, mid) > mass ? lo : hi) = mid;
  }
  return hi;
}

inline double log_poisson_pmf(double mean, int k) {
  if (k < 0) return -std::numeric_limits<double>::infinity();
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

inline double poisson_pmf(double mean, int k) { return std::exp(log_poisson_pmf(mean, k)); }

/// P(Poisson(mean) <= k).
inline double poisson_cdf(double mean, int k) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return 1.0;
  return boost::math::gamma_q(k + 1.0, mean);
}

/// P(Poisson(mean) > k).
inline double poisson_upper(double mean, int k) {
  if (k < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  return boost::math::gamma_p(k + 1.0, mean);
}

/// Smallest T with P(Poisson(lambda T) <= n) < mass. Paths with N at Parisian
/// ruin equal to n and ruin after T have N(T) <= n, so this bounds the
/// neglected part of every p(n) with n <= n_max.
inline double poisson_horizon(double lambda, int n, double mass) {
  double lo = 0.0, hi = std::max(1.0, 2.0 * n / lambda);
  while (poisson_cdf(lambda * hi, n) >= mass) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw NumericalError(NumericalFailure::truncation, "Poisson horizon does not converge");
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (poisson_cdf(lambda * mid, n) >= mass ? lo : hi) = mid;
  }
  return hi;
}

/// One Richardson step for a second-order rule: fine has step h, coarse 2h,
/// both starting on the same node, so coarse[i] sits on fine[2i].
inline std::vector<double> richardson(std::span<const double> fine, std::span<const double> coarse) {
  if (fine.size() + 1 < 2 * coarse.size()) throw ConfigError("richardson: fine grid too short");
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) out[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
  return out;
}

}  // namespace parisian
