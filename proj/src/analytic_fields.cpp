#include "fracfield/analytic_fields.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fracfield/parallel.hpp"
#include "quadrature.hpp"

namespace fracfield {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(what) + ": t must be positive");
}

void require_positive_lambda(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError(std::string(what) + ": lambda must be positive");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void VarianceSeriesSpec::validate() const {
  if (max_terms < 5) throw DomainError("VarianceSeriesSpec: max_terms must be at least 5");
  if (!(resonance_guard > 0.0)) throw DomainError("VarianceSeriesSpec: resonance_guard must be positive");
}

void Profile::validate() const {
  if (values.size() != times.size() * positions.size()) throw DomainError("profile: value matrix has wrong size");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DomainError("profile: times must increase");
  }
  for (std::size_t j = 1; j < positions.size(); ++j) {
    if (!(positions[j] > positions[j - 1])) throw DomainError("profile: positions must increase");
  }
}

Profile make_profile(const std::vector<double>& times, const std::vector<double>& positions,
                     const std::string& method, const std::function<double(double, double)>& f) {
  Profile p;
  p.times = times;
  p.positions = positions;
  p.method = method;
  p.values.assign(times.size() * positions.size(), 0.0);
  p.validate();
  const std::size_t nx = positions.size();
  parallel_for(p.values.size(), worker_count(),
               [&](std::size_t k) { p.values[k] = f(times[k / nx], positions[k % nx]); });
  return p;
}

void write_profile_csv(std::ostream& os, const Profile& p) {
  p.validate();
  os << "t,x,value,method\n";
  for (std::size_t i = 0; i < p.times.size(); ++i) {
    for (std::size_t j = 0; j < p.positions.size(); ++j) {
      os << format_double(p.times[i]) << ',' << format_double(p.positions[j]) << ','
         << format_double(p.at(i, j)) << ',' << p.method << '\n';
    }
  }
}

Profile read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x,value,method") throw ConfigError("profile CSV: bad header");
  std::vector<double> ts, xs, vs;
  Profile p;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c, m;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
        !std::getline(ss, m)) {
      throw ConfigError("profile CSV: malformed row '" + line + "'");
    }
    try {
      ts.push_back(std::stod(a));
      xs.push_back(std::stod(b));
      vs.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ConfigError("profile CSV: non-numeric field in '" + line + "'");
    }
    p.method = m;
  }
  // Rows are time-major; recover the axes.
  for (double t : ts) {
    if (p.times.empty() || t != p.times.back()) {
      if (!p.times.empty() && t < p.times.back()) throw ConfigError("profile CSV: rows not time-major");
      if (p.times.empty() || t > p.times.back()) p.times.push_back(t);
    }
  }
  if (p.times.empty()) throw ConfigError("profile CSV: no rows");
  const std::size_t nx = ts.size() / p.times.size();
  if (nx * p.times.size() != ts.size()) throw ConfigError("profile CSV: ragged grid");
  p.positions.assign(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(nx));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] != p.positions[k % nx] || ts[k] != p.times[k / nx]) throw ConfigError("profile CSV: ragged grid");
  }
  p.values = vs;
  p.validate();
  return p;
}

std::vector<CrossCheckRow> cross_check(const Profile& a, const Profile& b) {
  if (a.times != b.times || a.positions != b.positions) {
    throw GridMismatchError("cross-check needs two profiles on the same grid");
  }
  std::vector<CrossCheckRow> rows;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    for (std::size_t j = 0; j < a.positions.size(); ++j) {
      const double va = a.at(i, j), vb = b.at(i, j);
      rows.push_back({a.times[i], a.positions[j], a.method, va, b.method, vb, va / vb});
    }
  }
  return rows;
}

void write_cross_check_csv(std::ostream& os, const std::vector<CrossCheckRow>& rows) {
  os << "t,x,method_a,value_a,method_b,value_b,ratio\n";
  for (const CrossCheckRow& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.x) << ',' << r.method_a << ',' << format_double(r.value_a)
       << ',' << r.method_b << ',' << format_double(r.value_b) << ',' << format_double(r.ratio) << '\n';
  }
}

double heat_kernel(double t, double x, double lambda) {
  require_positive_time(t, "heat_kernel");
  require_positive_lambda(lambda, "heat_kernel");
  return std::exp(-x * x / (4.0 * lambda * t)) / std::sqrt(4.0 * kPi * lambda * t);
}

FourierValue mean_fourier_detailed(const DiffusionParams& p, const KernelSpec& kernel, double t, double x,
                                   const QuadSpec& quad) {
  p.validate();
  quad.validate();
  require_positive_time(t, "mean_fourier");
  if (p.dim != 1) throw DomainError("mean_fourier is implemented for N = 1");
  if (p.lambda == 0.0) {
    throw NonIntegrableError("mean_fourier: lambda = 0 leaves a(xi) bounded, E_alpha(-a t^alpha) is not integrable");
  }

  const double alpha = p.alpha;
  const double ta = std::pow(t, alpha);
  const double lt = p.lambda * ta;
  const MittagLeffler e_a({alpha, 1.0});

  // E_alpha(-X) = X^{-1}/Gamma(1-alpha) - X^{-2}/Gamma(1-2 alpha) + ..., X ~ lambda t^alpha (k^2 + mu/lambda).
  // Written over u = k^2 + b^2 with b^2 = mu/lambda + 1/(lambda t^alpha) > 0 the two leading terms are
  // c1/u + c2/u^2 up to O(u^{-3}).
  const double A = rgamma(1.0 - alpha);
  const double B = rgamma(1.0 - 2.0 * alpha);
  const double b2 = p.mu / p.lambda + 1.0 / lt;
  const double b = std::sqrt(b2);
  const double c1 = A / lt;
  const double c2 = (A - B) / (lt * lt);

  auto remainder = [&](double k) {
    const double u = k * k + b2;
    return e_a(-ta * symbol_a_radial(p, kernel, k)) - c1 / u - c2 / (u * u);
  };
  auto integrand = [&](double k) { return std::cos(k * x) * remainder(k); };

  const double scale = 1.0 / std::sqrt(lt);
  const double K = std::max(quad.freq_cutoff, 40.0 * scale);
  const double width = std::min(kPi / std::max(std::fabs(x), 1.0), 0.5 * scale);
  const auto n_panels = static_cast<std::size_t>(std::ceil(K / width));

  // Remainder integrals are O(scale); the absolute floor keeps roundoff-level panels from bisecting forever.
  const double abs_tol = 1e-3 * quad.rel_tol * scale / static_cast<double>(n_panels);
  detail::QuadSum q;
  for (std::size_t i = 0; i < n_panels; ++i) {
    const double a = K * static_cast<double>(i) / static_cast<double>(n_panels);
    const double c = K * static_cast<double>(i + 1) / static_cast<double>(n_panels);
    q += detail::gk_panel(integrand, a, c, quad.max_refinements, quad.rel_tol, abs_tol);
  }

  const double ax = std::fabs(x);
  const double e = std::exp(-b * ax);
  const double tail_closed = c1 * e / (2.0 * b) + c2 * (1.0 + b * ax) * e / (4.0 * b2 * b);
  const double value = q.value / kPi + tail_closed;
  // Remainder decays like k^{-6} (faster for alpha = 1): int_K^inf ~ K |r(K)| / 5.
  const double trunc = K * std::fabs(remainder(K)) / (5.0 * kPi);
  return {value, trunc, q.error / kPi};
}

double mean_fourier(const DiffusionParams& p, const KernelSpec& kernel, double t, double x, const QuadSpec& quad) {
  return mean_fourier_detailed(p, kernel, t, x, quad).value;
}

double mean_mainardi(double t, double x, double alpha, double lambda, const EvalPolicy& policy) {
  require_positive_time(t, "mean_mainardi");
  require_positive_lambda(lambda, "mean_mainardi");
  const double lt = lambda * std::pow(t, alpha);
  return mainardi_series(alpha, std::fabs(x) / std::sqrt(lt), policy) / std::sqrt(4.0 * kPi * lt);
}

double mean_half_closed(double t, double x, double lambda) {
  require_positive_time(t, "mean_half_closed");
  require_positive_lambda(lambda, "mean_half_closed");
  const double l = 4.0 * lambda * std::sqrt(t);
  return (1.0 + std::fabs(x) / std::sqrt(l)) * std::exp(-x * x / l) / std::sqrt(kPi * l);
}

double var_classical_quadrature(double t, double x, double lambda, double sigma, const QuadSpec& quad) {
  require_positive_time(t, "var_classical_quadrature");
  require_positive_lambda(lambda, "var_classical_quadrature");
  quad.validate();

  // Inner integral over y, centred at x and scaled by the kernel width sqrt(2 lambda s).
  auto inner = [&](double s) {
    const double w = std::sqrt(2.0 * lambda * s);
    auto f = [&](double u) { return std::exp(-u * u); };
    std::vector<double> edges;
    for (int i = -10; i <= 10; ++i) edges.push_back(i);
    const detail::QuadSum q = detail::integrate_edges(f, edges, quad.max_refinements, quad.rel_tol);
    return w * q.value / (4.0 * kPi * lambda * s);
  };
  // s = t - tau = v^2 removes the s^{-1/2} endpoint behaviour.
  auto outer = [&](double v) { return 2.0 * v * inner(v * v); };
  const double v_max = std::sqrt(t);
  std::vector<double> edges;
  for (int i = 0; i <= quad.panels; ++i) edges.push_back(v_max * i / quad.panels);
  edges.back() = v_max;
  const detail::QuadSum q = detail::integrate_edges(outer, edges, quad.max_refinements, quad.rel_tol);
  (void)x;  // the centred inner integral does not see x
  return sigma * sigma * q.value;
}

double var_classical_closed(double t, double x, double lambda, double sigma) {
  require_positive_time(t, "var_classical_closed");
  require_positive_lambda(lambda, "var_classical_closed");
  return sigma * sigma / (4.0 * lambda * std::sqrt(kPi * t)) * fracfield::erfc(std::fabs(x) / (4.0 * std::sqrt(lambda * t)));
}

double fluct_kernel_frac(double t, double t1, double x, double x1, double alpha, double lambda, double sigma) {
  if (!(t > t1) || !(t1 >= 0.0)) throw DomainError("fluct_kernel_frac requires t > t1 >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("fluct_kernel_frac requires 0 < alpha <= 1");
  require_positive_lambda(lambda, "fluct_kernel_frac");
  const double l = 4.0 * lambda * std::pow(t - t1, alpha);
  const double d = x - x1;
  return sigma / std::sqrt(kPi * l) * ml_eval({alpha, alpha}, -d * d / l);
}

double var_frac_quadrature(double t, double x, double alpha, double lambda, double sigma, const QuadSpec& quad) {
  require_positive_time(t, "var_frac_quadrature");
  require_positive_lambda(lambda, "var_frac_quadrature");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("var_frac_quadrature requires 0 < alpha < 1");
  quad.validate();
  const double ax = std::fabs(x);
  if (ax == 0.0) return 0.0;

  const MittagLeffler e_aa({alpha, alpha});
  const int per_decade = std::max(4, quad.panels / 2);
  const int inner_per_decade = std::max(4, quad.panels / 4);
  // The outer rule sees the inner one's adaptive noise, so the inner integral runs tighter.
  const double inner_tol = std::max(1e-2 * quad.rel_tol, 1e-15);

  // G(s) = int_0^|x| E_{alpha,alpha}(-u^2/(4 lambda s^alpha))^2 du; the integrand lives on u ~ 2 sqrt(lambda) s^{alpha/2}.
  auto G = [&](double s) {
    const double l = 4.0 * lambda * std::pow(s, alpha);
    auto f = [&](double u) {
      const double v = e_aa(-u * u / l);
      return v * v;
    };
    const double width = std::sqrt(l);
    // G is of order min(|x|, width); far-tail panels only need to be accurate relative to that.
    const double floor = 1e-3 * inner_tol * std::min(ax, width);
    if (width >= ax) return detail::gk_panel(f, 0.0, ax, quad.max_refinements, inner_tol, floor).value;
    std::vector<double> edges = detail::geometric_edges(width, ax, inner_per_decade);
    edges.insert(edges.begin(), 0.0);
    return detail::integrate_edges(f, edges, quad.max_refinements, inner_tol, floor / edges.size()).value;
  };
  // s^{-alpha} G(s) ~ s^{-alpha/2} at s -> 0; s = r^p with p = 2/(2 - alpha) makes the integrand bounded.
  const double p = 2.0 / (2.0 - alpha);
  auto outer = [&](double r) {
    const double s = std::pow(r, p);
    return p * std::pow(r, p - 1.0) * std::pow(s, -alpha) * G(s);
  };
  const double r_max = std::pow(t, 1.0 / p);
  const double r_lo = 1e-6 * r_max;
  const detail::QuadSum rough = detail::integrate_from_zero(outer, r_lo, r_max, per_decade, 0, quad.rel_tol);
  const double n_edges = std::log10(r_max / r_lo) * per_decade + 2.0;
  const detail::QuadSum q = detail::integrate_from_zero(outer, r_lo, r_max, per_decade, quad.max_refinements,
                                                        quad.rel_tol, 1e-2 * quad.rel_tol * std::fabs(rough.value) / n_edges);
  return sigma * sigma / (4.0 * kPi * lambda) * q.value;
}

double beta_coeff(int m, double alpha) {
  if (m < 0) throw DomainError("beta_coeff: m must be non-negative");
  if (!(alpha > 0.0)) throw DomainError("beta_coeff: alpha must be positive");
  double s = 0.0;
  for (int k = 0; k <= m; ++k) s += rgamma(m - k + 1.0) * rgamma(alpha * (k + 1.0));
  return s;
}

std::vector<int> resonance_set(double alpha, int max_m, double guard) {
  std::vector<int> out;
  for (int m = 0; m <= max_m; ++m) {
    if (std::fabs(alpha - 1.0 / (m + 1.0)) <= guard) out.push_back(m);
  }
  return out;
}

SeriesValue var_series(double t, double x, double alpha, double lambda, double sigma, const VarianceSeriesSpec& spec) {
  require_positive_time(t, "var_series");
  require_positive_lambda(lambda, "var_series");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("var_series requires 0 < alpha < 1");
  spec.validate();
  const std::vector<int> res = resonance_set(alpha, spec.max_terms - 1, spec.resonance_guard);
  if (!res.empty()) {
    throw ResonanceError(res.front(), "variance series resonance at m=" + std::to_string(res.front()) +
                                          ": alpha = 1/(m+1), the variance diverges");
  }
  const double ax = std::fabs(x);
  if (ax == 0.0) return {0.0, 0.0, spec.max_terms};

  double sum = 0.0;
  double last = 0.0;
  for (int m = 0; m < spec.max_terms; ++m) {
    const double e = 1.0 - (m + 1.0) * alpha;
    // |x|^{2m+1} t^{1-(m+1) alpha} / 4^m in log form to stay finite for large m.
    const double log_mag = (2.0 * m + 1.0) * std::log(ax) + e * std::log(t) - m * std::log(4.0);
    const double term = (m % 2 == 0 ? 1.0 : -1.0) * beta_coeff(m, alpha) * std::exp(log_mag) / ((2.0 * m + 1.0) * e);
    sum += term;
    last = std::fabs(term);
  }
  const double pref = sigma * sigma / (4.0 * kPi * lambda);
  return {pref * sum, pref * last, spec.max_terms};
}

}  // namespace fracfield
