#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hkl2/core/error.hpp"

namespace hkl2::quadrature {

struct Settings {
  double rel_tol = 1e-12;
  unsigned max_depth = 15;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 31-point Gauss-Kronrod on [a, b]; either bound may be infinite.
/// Throws ConvergenceError if the error estimate stays above tolerance.
template <typename F>
Result integrate(F&& f, double a, double b, const Settings& s = {}) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0, l1 = 0.0;
  const double value = GK::integrate(f, a, b, s.max_depth, s.rel_tol, &err, &l1);
  if (!std::isfinite(value) || err > std::max(std::max(100.0 * s.rel_tol, 1e-10) * l1, 1e-300))
    throw ConvergenceError("adaptive quadrature did not reach tolerance");
  return {value, err};
}

/// Integral of f over [lo + eps, hi] with the substitution t = log(x - lo),
/// which resolves power laws at the lower endpoint.
template <typename F>
Result integrate_log_lower(F&& f, double lo, double eps, double hi, const Settings& s = {}) {
  if (!(eps > 0.0) || !(lo + eps < hi)) throw DomainError("integrate_log_lower: empty interval");
  auto g = [&](double t) {
    const double d = std::exp(t);
    return f(lo + d) * d;
  };
  return integrate(g, std::log(eps), std::log(hi - lo), s);
}

/// Integral of f over [lo, hi] with t = log x (lo > 0); suited to power-law tails.
template <typename F>
Result integrate_log(F&& f, double lo, double hi, const Settings& s = {}) {
  if (!(lo > 0.0) || !(lo < hi)) throw DomainError("integrate_log: need 0 < lo < hi");
  auto g = [&](double t) {
    const double x = std::exp(t);
    return f(x) * x;
  };
  return integrate(g, std::log(lo), std::log(hi), s);
}

/// Composite Simpson rule on a uniform grid with an odd number of nodes.
inline double simpson(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 3 || n % 2 == 0) throw DimensionMismatch("simpson: need an odd number (>= 3) of nodes");
  double acc = y[0] + y[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * y[i];
  return acc * h / 3.0;
}

/// Running integral x -> int_{x0}^{x} g, tabulated adaptively on a node set.
/// Between nodes a fixed Gauss rule from the left node is blended linearly with
/// the tabulated panel value, so the result is continuous in x.
class CumulativeIntegral {
public:
  CumulativeIntegral() = default;

  /// nodes must be strictly increasing and contain x0.
  CumulativeIntegral(std::function<double(double)> g, std::vector<double> nodes, double x0,
                     Settings s = {})
      : g_(std::move(g)), nodes_(std::move(nodes)) {
    values_.assign(nodes_.size(), 0.0);
    defects_.assign(nodes_.size(), 0.0);
    std::size_t anchor = 0;
    while (anchor < nodes_.size() && nodes_[anchor] < x0) ++anchor;
    if (anchor == nodes_.size() || nodes_[anchor] != x0)
      throw DomainError("CumulativeIntegral: reference point must be a node");
    std::vector<double> panels(nodes_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      panels[i] = integrate(g_, nodes_[i], nodes_[i + 1], s).value;
      defects_[i] = panels[i] - fixed(nodes_[i], nodes_[i + 1]);
    }
    for (std::size_t i = anchor + 1; i < nodes_.size(); ++i) values_[i] = values_[i - 1] + panels[i - 1];
    for (std::size_t i = anchor; i-- > 0;) values_[i] = values_[i + 1] - panels[i];
  }

  double operator()(double x) const {
    if (x < nodes_.front() || x > nodes_.back())
      throw DomainError("CumulativeIntegral: argument outside tabulated range");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    i = i == 0 ? 0 : i - 1;
    if (i + 1 == nodes_.size()) return values_[i];
    if (nodes_[i] == x) return values_[i];
    const double frac = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
    return values_[i] + fixed(nodes_[i], x) + frac * defects_[i];
  }

  double lower() const { return nodes_.front(); }
  double upper() const { return nodes_.back(); }

private:
  std::function<double(double)> g_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> defects_;

  double fixed(double a, double b) const { return boost::math::quadrature::gauss<double, 30>::integrate(g_, a, b); }
};

} // namespace hkl2::quadrature
