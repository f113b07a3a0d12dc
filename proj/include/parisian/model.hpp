#pragma once

// Surplus-model parameters, claim-size laws and their k-fold convolutions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "parisian/errors.hpp"
#include "parisian/numerics.hpp"

namespace parisian {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// A measure on the half-line: finitely many atoms plus a density part.
class AtomDensity {
 public:
  AtomDensity(std::vector<Atom> atoms, std::function<double(double)> density)
      : atoms_(std::move(atoms)), density_(std::move(density)) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!(atoms_[i].location >= 0.0)) throw ConfigError("atom location must be >= 0");
      if (!(atoms_[i].mass >= 0.0)) throw ConfigError("atom mass must be >= 0");
      for (std::size_t j = 0; j < i; ++j)
        if (atoms_[j].location == atoms_[i].location) throw ConfigError("atom locations must be distinct");
    }
  }

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  double density(double t) const { return density_ ? density_(t) : 0.0; }
  bool has_density() const noexcept { return static_cast<bool>(density_); }

  /// Mass of [a, b]: atoms inside plus the density part by composite Gauss-Legendre.
  double mass(double a, double b, int panels = 64) const {
    double total = 0.0;
    for (const auto& atom : atoms_)
      if (atom.location >= a && atom.location <= b) total += atom.mass;
    if (density_) total += Gauss16::integrate(density_, a, b, panels);
    return total;
  }

 private:
  std::vector<Atom> atoms_;
  std::function<double(double)> density_;
};

struct TabulatedOptions {
  int max_order = 24;   // highest convolution power kept
  double range = 0.0;   // right end of the convolution grid; 0 picks one from mean and order
};

/// Claim-size law: exponential (closed forms throughout) or a density tabulated
/// on a uniform grid starting at 0, with convolution powers precomputed by the
/// trapezoid rule on the same grid.
class ClaimDistribution {
 public:
  enum class Kind { exponential, tabulated };

  static ClaimDistribution exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("exponential claim rate mu must be > 0");
    ClaimDistribution out;
    out.kind_ = Kind::exponential;
    out.rate_ = rate;
    return out;
  }

  /// Density values at x_i = i*step, i = 0..n-1. Renormalized to unit mass
  /// (trapezoid); rejected if the raw mass is off by more than 1e-3.
  static ClaimDistribution tabulated(double step, std::vector<double> density, TabulatedOptions opts = {}) {
    if (!(step > 0.0)) throw ConfigError("tabulated claim grid step must be > 0");
    if (density.size() < 2) throw ConfigError("tabulated claim density needs at least two points");
    if (opts.max_order < 1) throw ConfigError("tabulated max_order must be >= 1");
    for (double v : density)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("tabulated claim density must be finite and >= 0");
    const double mass = trapezoid(density, step);
    if (std::abs(mass - 1.0) > 1e-3) {
      std::ostringstream msg;
      msg << "tabulated claim density integrates to " << mass << ", expected 1";
      throw ConfigError(msg.str());
    }
    for (double& v : density) v /= mass;

    auto tab = std::make_shared<Table>();
    tab->step = step;
    tab->support_end = step * static_cast<double>(density.size() - 1);
    tab->mean = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) tab->mean += weight(i, density.size()) * step * static_cast<double>(i) * density[i];
    tab->mean *= step;
    tab->sup = *std::max_element(density.begin(), density.end());

    double range = opts.range;
    if (range <= 0.0) {
      const double k = opts.max_order;
      range = std::max(tab->support_end, tab->mean * (k + 8.0 * std::sqrt(k) + 8.0));
    }
    const auto points = static_cast<std::size_t>(std::ceil(range / step - 1e-9)) + 1;
    density.resize(std::max(points, density.size()), 0.0);
    const std::size_t n = density.size();

    tab->conv.resize(static_cast<std::size_t>(opts.max_order));
    tab->cum.resize(static_cast<std::size_t>(opts.max_order));
    tab->conv[0] = std::move(density);
    for (std::size_t k = 1; k < tab->conv.size(); ++k) {
      const auto& prev = tab->conv[k - 1];
      const auto& f = tab->conv[0];
      std::vector<double> next(n, 0.0);
      for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.5 * (f[0] * prev[i] + f[i] * prev[0]);
        for (std::size_t j = 1; j < i; ++j) acc += f[j] * prev[i - j];
        next[i] = acc * step;
      }
      tab->conv[k] = std::move(next);
    }
    for (std::size_t k = 0; k < tab->conv.size(); ++k) {
      const auto& g = tab->conv[k];
      std::vector<double> cum(n, 0.0);
      for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * step * (g[i - 1] + g[i]);
      tab->cum[k] = std::move(cum);
    }

    ClaimDistribution out;
    out.kind_ = Kind::tabulated;
    out.table_ = std::move(tab);
    return out;
  }

  /// Samples a density callable onto a grid of the given step, truncated once
  /// half the mass is behind and x * f(x) drops below `tail`.
  template <class Pdf>
  static ClaimDistribution sampled(Pdf&& pdf, double step, double tail = 1e-12, TabulatedOptions opts = {}) {
    std::vector<double> values;
    double cum = 0.0;
    for (std::size_t i = 0;; ++i) {
      const double x = step * static_cast<double>(i);
      values.push_back(pdf(x));
      if (i > 0) cum += 0.5 * step * (values[i - 1] + values[i]);
      if (cum > 0.5 && values.back() * std::max(1.0, x) < tail) break;
      if (i > 100000000) throw ConfigError("sampled claim density does not decay");
    }
    return tabulated(step, std::move(values), opts);
  }

  /// Two-column CSV (x, f(x)): strictly increasing, uniformly spaced x >= 0.
  /// A leading non-numeric line is treated as a header.
  static ClaimDistribution from_csv(std::istream& in, TabulatedOptions opts = {}) {
    std::vector<double> xs, fs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      for (char& ch : line)
        if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
      std::istringstream row(line);
      double x = 0.0, f = 0.0;
      if (!(row >> x >> f)) {
        if (xs.empty() && lineno == 1) continue;
        throw ConfigError("claim CSV line " + std::to_string(lineno) + ": expected two numbers");
      }
      xs.push_back(x);
      fs.push_back(f);
    }
    if (xs.size() < 2) throw ConfigError("claim CSV needs at least two rows");
    if (xs.front() < 0.0) throw ConfigError("claim CSV x values must be >= 0");
    const double step = xs[1] - xs[0];
    if (!(step > 0.0)) throw ConfigError("claim CSV x values must be strictly increasing");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double gap = xs[i] - xs[i - 1];
      if (!(gap > 0.0)) throw ConfigError("claim CSV x values must be strictly increasing");
      if (std::abs(gap - step) > 1e-6 * step) throw ConfigError("claim CSV x values must be uniformly spaced");
    }
    const double offset = xs.front() / step;
    if (std::abs(offset - std::round(offset)) > 1e-6)
      throw ConfigError("claim CSV first x must be a multiple of the spacing");
    std::vector<double> values(static_cast<std::size_t>(std::round(offset)), 0.0);
    values.insert(values.end(), fs.begin(), fs.end());
    return tabulated(step, std::move(values), opts);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_exponential() const noexcept { return kind_ == Kind::exponential; }

  /// Exponential rate mu; only meaningful for the exponential kind.
  double rate() const {
    if (!is_exponential()) throw ConfigError("rate() requires exponential claims");
    return rate_;
  }

  /// Highest available convolution power.
  int max_order() const noexcept {
    return is_exponential() ? std::numeric_limits<int>::max() : static_cast<int>(table_->conv.size());
  }

  double grid_step() const { return is_exponential() ? 0.0 : table_->step; }
  double grid_range() const {
    return is_exponential() ? std::numeric_limits<double>::infinity()
                            : table_->step * static_cast<double>(table_->conv[0].size() - 1);
  }

  /// Right end of the claim support (infinite for exponential claims).
  double support_end() const {
    return is_exponential() ? std::numeric_limits<double>::infinity() : table_->support_end;
  }

  /// Normalized density at x_i = i*step up to the support end (tabulated only).
  std::span<const double> node_values() const {
    if (is_exponential()) throw ConfigError("node_values() requires tabulated claims");
    const auto count = static_cast<std::size_t>(std::llround(table_->support_end / table_->step)) + 1;
    return std::span<const double>(table_->conv[0].data(), count);
  }

  double pdf(double x) const { return conv_density(1, x); }
  double cdf(double x) const { return 1.0 - tail(x); }
  double tail(double x) const { return conv_tail(1, x); }

  double mean() const { return is_exponential() ? 1.0 / rate_ : table_->mean; }
  double sup_density() const { return is_exponential() ? rate_ : table_->sup; }

  /// Laplace transform of the claim density, E[exp(-s X)].
  double laplace(double s) const {
    if (is_exponential()) return rate_ / (rate_ + s);
    const auto& f = table_->conv[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      acc += weight(i, f.size()) * f[i] * std::exp(-s * table_->step * static_cast<double>(i));
    return acc * table_->step;
  }

  /// Density of X_1 + ... + X_k at x for k >= 1. The k = 0 law is the unit atom
  /// at 0 (see conv_law); its density part is identically 0.
  double conv_density(int k, double x) const {
    if (k < 0) throw ConfigError("convolution order must be >= 0");
    if (k == 0 || x < 0.0) return 0.0;
    if (is_exponential()) {
      if (k == 1) return rate_ * std::exp(-rate_ * x);
      if (x == 0.0) return 0.0;
      return std::exp(k * std::log(rate_) + (k - 1) * std::log(x) - rate_ * x - std::lgamma(static_cast<double>(k)));
    }
    return interpolate(order(k).first, x);
  }

  /// P(X_1 + ... + X_k > x); for k = 0 this is 1 when x < 0 and 0 otherwise.
  double conv_tail(int k, double x) const {
    if (k < 0) throw ConfigError("convolution order must be >= 0");
    if (k == 0) return x < 0.0 ? 1.0 : 0.0;
    if (x <= 0.0) return 1.0;
    if (is_exponential()) return boost::math::gamma_q(static_cast<double>(k), rate_ * x);
    const auto& cum = order(k).second;
    return std::clamp(1.0 - interpolate(cum, x, cum.back()), 0.0, 1.0);
  }

  /// The full law of X_1 + ... + X_k, atom included.
  AtomDensity conv_law(int k) const {
    if (k < 0) throw ConfigError("convolution order must be >= 0");
    if (k == 0) return AtomDensity({Atom{0.0, 1.0}}, {});
    auto self = *this;
    return AtomDensity({}, [self, k](double x) { return self.conv_density(k, x); });
  }

 private:
  struct Table {
    double step = 0.0;
    double support_end = 0.0;
    double mean = 0.0;
    double sup = 0.0;
    std::vector<std::vector<double>> conv;  // conv[k-1] = f^{k*} on x_i = i*step
    std::vector<std::vector<double>> cum;   // running integral of conv[k-1]
  };

  ClaimDistribution() = default;

  static double weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

  static double trapezoid(const std::vector<double>& v, double step) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += weight(i, v.size()) * v[i];
    return acc * step;
  }

  std::pair<const std::vector<double>&, const std::vector<double>&> order(int k) const {
    if (k > max_order()) {
      std::ostringstream msg;
      msg << "convolution power " << k << " exceeds precomputed max_order " << max_order();
      throw NumericalError(NumericalFailure::truncation, msg.str());
    }
    const auto idx = static_cast<std::size_t>(k - 1);
    return {table_->conv[idx], table_->cum[idx]};
  }

  double interpolate(const std::vector<double>& v, double x, double beyond = 0.0) const {
    const double pos = x / table_->step;
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return lo + 1 == v.size() && pos == static_cast<double>(lo) ? v[lo] : beyond;
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
  }

  Kind kind_ = Kind::exponential;
  double rate_ = 1.0;
  std::shared_ptr<const Table> table_;
};

/// Parameters of U(t) = u + c t - (compound Poisson claims) with Parisian delay d.
class ModelParams {
 public:
  ModelParams(double u, double c, double lambda, ClaimDistribution claims, double d)
      : u_(u), c_(c), lambda_(lambda), claims_(std::move(claims)), d_(d) {
    if (!(u_ >= 0.0) || !std::isfinite(u_)) throw ConfigError("initial reserve u must be >= 0");
    if (!(c_ > 0.0) || !std::isfinite(c_)) throw ConfigError("premium rate c must be > 0");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw ConfigError("claim intensity lambda must be > 0");
    if (!(d_ >= 0.0) || !std::isfinite(d_)) throw ConfigError("Parisian delay d must be >= 0");
    if (!(c_ > lambda_ * claims_.mean() + 1e-9)) {
      std::ostringstream msg;
      msg << "net profit condition violated: c=" << c_ << " must exceed lambda*E[X]=" << lambda_ * claims_.mean();
      throw ConfigError(msg.str());
    }
  }

  double u() const noexcept { return u_; }
  double c() const noexcept { return c_; }
  double lambda() const noexcept { return lambda_; }
  double d() const noexcept { return d_; }
  const ClaimDistribution& claims() const noexcept { return claims_; }

  ModelParams with_reserve(double u) const { return {u, c_, lambda_, claims_, d_}; }
  ModelParams with_delay(double d) const { return {u_, c_, lambda_, claims_, d}; }

 private:
  double u_, c_, lambda_;
  ClaimDistribution claims_;
  double d_;
};

/// Nonnegative root of lambda + delta - c s = lambda r fhat(s).
inline double solve_lundberg(const ClaimDistribution& claims, double c, double lambda, double delta, double r) {
  if (!(delta >= 0.0)) throw ConfigError("discount delta must be >= 0");
  if (!(r > 0.0 && r <= 1.0)) throw ConfigError("weight r must lie in (0, 1]");
  if (!(c > 0.0) || !(lambda > 0.0)) throw ConfigError("c and lambda must be > 0");
  if (delta == 0.0 && r == 1.0) return 0.0;

  if (claims.is_exponential()) {
    // (lambda + delta - c s)(mu + s) = lambda r mu, i.e. c s^2 + b s + q = 0.
    const double mu = claims.rate();
    const double b = c * mu - lambda - delta;
    const double q = -mu * (lambda + delta - lambda * r);
    const double root = std::sqrt(b * b - 4.0 * c * q);
    return b >= 0.0 ? -2.0 * q / (b + root) : (-b + root) / (2.0 * c);
  }

  auto gap = [&](double s) { return lambda + delta - c * s - lambda * r * claims.laplace(s); };
  const double lo = 0.0;
  const double hi = (lambda + delta) / c;
  const double glo = gap(lo);
  const double ghi = gap(hi);
  if (!(glo > 0.0 && ghi < 0.0)) {
    std::ostringstream msg;
    msg << "Lundberg equation not bracketed on [0, " << hi << "]: values " << glo << ", " << ghi;
    throw NumericalError(NumericalFailure::root_not_bracketed, msg.str());
  }
  auto done = [](double a, double b) { return std::abs(b - a) < 1e-12; };
  const auto [a, b] = boost::math::tools::bisect(gap, lo, hi, done);
  return 0.5 * (a + b);
}

}  // namespace parisian
