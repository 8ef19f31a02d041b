#pragma once

// Panel quadrature shared by the probes and the analytic fields: adaptive
// Gauss-Kronrod on each panel, panels summed in a fixed order.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracfield/errors.hpp"

namespace fracfield::detail {

struct QuadSum {
  double value = 0.0;
  double error = 0.0;

  QuadSum& operator+=(const QuadSum& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

// GK21 on [a, b], bisected until the Kronrod error estimate meets
// max(rel_tol |value|, abs_tol) or the depth budget is spent.
template <class F>
QuadSum gk_panel(const F& f, double a, double b, int max_depth, double rel_tol, double abs_tol = 0.0) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
  if (!std::isfinite(v)) throw QuadratureError("non-finite panel integral");
  if (err <= std::max(rel_tol * std::fabs(v), abs_tol) || max_depth <= 0) return {v, err};
  const double m = 0.5 * (a + b);
  QuadSum left = gk_panel(f, a, m, max_depth - 1, rel_tol, 0.5 * abs_tol);
  left += gk_panel(f, m, b, max_depth - 1, rel_tol, 0.5 * abs_tol);
  return left;
}

/// Edges lo = e_0 < ... < e_m = hi with `per_decade` panels per factor of ten.
inline std::vector<double> geometric_edges(double lo, double hi, int per_decade) {
  std::vector<double> e{lo};
  const double ratio = std::pow(10.0, 1.0 / per_decade);
  for (double x = lo * ratio; x < hi * (1.0 - 1e-12); x *= ratio) e.push_back(x);
  e.push_back(hi);
  return e;
}

template <class F>
QuadSum integrate_edges(const F& f, const std::vector<double>& edges, int max_depth, double tol,
                        double abs_tol = 0.0) {
  QuadSum total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += gk_panel(f, edges[i], edges[i + 1], max_depth, tol, abs_tol);
  }
  return total;
}

/// int_0^hi f with a first panel [0, lo] and geometric panels on [lo, hi].
template <class F>
QuadSum integrate_from_zero(const F& f, double lo, double hi, int per_decade, int max_depth, double tol,
                            double abs_tol = 0.0) {
  if (hi <= lo) return gk_panel(f, 0.0, hi, max_depth, tol, abs_tol);
  std::vector<double> edges = geometric_edges(lo, hi, per_decade);
  edges.insert(edges.begin(), 0.0);
  return integrate_edges(f, edges, max_depth, tol, abs_tol);
}

}  // namespace fracfield::detail
