#include "fracfield/mildness.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "quadrature.hpp"

namespace fracfield {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;

// Surface measure of the unit sphere in R^N (2 for N = 1).
double sphere_area(int dim) {
  const double h = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

std::string describe(const DiffusionParams& p) {
  std::ostringstream os;
  os << "alpha=" << p.alpha << ", N=" << p.dim << ", lambda=" << p.lambda << ", mu=" << p.mu;
  return os.str();
}

void require_probe_inputs(const DiffusionParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("probe time must be positive");
  if (p.lambda == 0.0 && p.mu == 0.0) throw DegenerateParamsError("lambda = mu = 0: no spatial operator");
}

// Radial frequency integral omega_N int_0^K r^{N-1} g(r) dr on geometric panels
// anchored at the symbol's natural scale r_star.
template <class G>
detail::QuadSum radial_integral(const G& g, int dim, double K, double r_star, int per_decade,
                                const QuadSpec& quad) {
  const double omega = sphere_area(dim);
  auto f = [&](double r) { return omega * std::pow(r, dim - 1) * g(r); };
  const double lo = std::min(1e-3 * r_star, 0.5 * K);
  return detail::integrate_from_zero(f, lo, K, per_decade, quad.max_refinements, quad.rel_tol);
}

// Frequency where t^alpha a(xi) reaches one; bounded so panels stay sensible when lambda = 0.
double symbol_scale(const DiffusionParams& p, double ta) {
  if (p.lambda > 0.0) return 1.0 / std::sqrt(p.lambda * ta);
  return 1.0;
}

std::vector<double> increments(const std::vector<double>& v) {
  std::vector<double> d;
  for (std::size_t i = 1; i < v.size(); ++i) d.push_back(v[i] - v[i - 1]);
  return d;
}

ProbeReport::Outcome judge(const std::vector<double>& values, const std::vector<double>& scale, double tol,
                           double* slope) {
  const std::size_t k = values.size();
  if (k < 3) throw DomainError("refinement schedule needs at least three entries");
  const std::vector<double> d = increments(values);

  // Least-squares slope of log|increment| against log(refinement variable).
  if (slope != nullptr) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] == 0.0) continue;
      const double x = std::log(scale[i + 1]);
      const double y = std::log(std::fabs(d[i]));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
      ++n;
    }
    *slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  }

  const double d_last = d[k - 2];
  const double d_prev = d[k - 3];
  const double rel_last = std::fabs(d_last) / std::max(std::fabs(values[k - 1]), 1e-300);
  const double rel_prev = std::fabs(d_prev) / std::max(std::fabs(values[k - 2]), 1e-300);
  if (d_last == 0.0 && d_prev == 0.0) return ProbeReport::Outcome::converges;
  const double ratio = d_prev == 0.0 ? INFINITY : std::fabs(d_last) / std::fabs(d_prev);

  // Growth in magnitude: the last two increments share the sign of the current value.
  const bool growing = d_last * d_prev > 0.0 && d_last * values[k - 1] > 0.0;
  if (growing && rel_last > tol && rel_prev > tol && ratio >= 1.0 - tol) {
    return ProbeReport::Outcome::diverges;
  }
  if (ratio < 1.0 - tol || (rel_last < 0.1 * tol && rel_prev < 0.1 * tol)) {
    return ProbeReport::Outcome::converges;
  }
  return ProbeReport::Outcome::inconclusive;
}

void finish(ProbeReport& r, const std::vector<double>& scale, const std::string& what) {
  r.outcome = judge(r.values, scale, r.tol_used, &r.tail_exponent_fit);
  r.diverges = r.outcome == ProbeReport::Outcome::diverges;
  r.detail = what + ": " + to_string(r.outcome) +
             " under refinement (numerical evidence from truncated integrals, not a proof)";
}

void check_schedule(const ProbeSchedule& s, bool with_eps) {
  if (s.K.size() < 3) throw DomainError("probe schedule needs at least three cutoffs");
  for (std::size_t i = 1; i < s.K.size(); ++i) {
    if (!(s.K[i] > s.K[i - 1])) throw DomainError("frequency cutoffs must increase");
  }
  if (with_eps) {
    if (s.eps.size() != s.K.size()) throw DomainError("time floors must pair with frequency cutoffs");
    for (std::size_t i = 1; i < s.eps.size(); ++i) {
      if (!(s.eps[i] < s.eps[i - 1]) || !(s.eps[i] > 0.0)) {
        throw DomainError("time floors must decrease and stay positive");
      }
    }
  }
  if (!(s.tol > 0.0 && s.tol < 1.0)) throw DomainError("probe tolerance must lie in (0, 1)");
}

}  // namespace

std::string to_string(MildnessVerdict::Rule r) {
  switch (r) {
    case MildnessVerdict::Rule::LambdaZeroNotMild: return "LambdaZeroNotMild";
    case MildnessVerdict::Rule::AlphaOneN1: return "AlphaOneN1";
    case MildnessVerdict::Rule::SubdiffusiveN1AlphaAboveTwoThirds: return "SubdiffusiveN1AlphaAboveTwoThirds";
    case MildnessVerdict::Rule::SuperdiffusiveN12: return "SuperdiffusiveN12";
    case MildnessVerdict::Rule::NotMildOtherwise: return "NotMildOtherwise";
  }
  return "?";
}

std::string to_string(ProbeReport::Quantity q) {
  return q == ProbeReport::Quantity::M1_L1_tail ? "M1_L1_tail" : "M2_spacetime";
}

std::string to_string(ProbeReport::Outcome o) {
  switch (o) {
    case ProbeReport::Outcome::converges: return "converges";
    case ProbeReport::Outcome::diverges: return "diverges";
    case ProbeReport::Outcome::inconclusive: return "inconclusive";
  }
  return "?";
}

MildnessVerdict classify(const DiffusionParams& params) {
  params.validate();
  const double a = params.alpha;
  const int n = params.dim;
  if (params.lambda == 0.0 && params.mu == 0.0) {
    throw DegenerateParamsError("lambda = mu = 0: no spatial operator to classify");
  }
  using Rule = MildnessVerdict::Rule;
  if (params.lambda == 0.0) {
    return {false, Rule::LambdaZeroNotMild,
            describe(params) + ": a(xi) -> mu as |xi| -> infinity, so E_alpha(-a t^alpha) is not integrable"};
  }
  if (a == 1.0) {
    if (n == 1) return {true, Rule::AlphaOneN1, describe(params) + ": classical case, mild iff N = 1"};
    return {false, Rule::NotMildOtherwise, describe(params) + ": alpha = 1 requires N = 1"};
  }
  if (a < 1.0) {
    if (n == 1 && a > kTwoThirds) {
      return {true, Rule::SubdiffusiveN1AlphaAboveTwoThirds, describe(params) + ": N = 1 and alpha > 2/3"};
    }
    return {false, Rule::NotMildOtherwise, describe(params) + ": subdiffusive case needs N = 1 and alpha > 2/3"};
  }
  if (n == 1 || n == 2) return {true, Rule::SuperdiffusiveN12, describe(params) + ": 1 < alpha < 2 with N in {1, 2}"};
  return {false, Rule::NotMildOtherwise, describe(params) + ": 1 < alpha < 2 needs N in {1, 2}"};
}

bool lemma_lp_condition(double alpha, int dim, double p, MLMap which) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("lemma_lp_condition: alpha must lie in (0, 2)");
  if (dim < 1 || !(p >= 1.0)) throw DomainError("lemma_lp_condition: need N >= 1 and p >= 1");
  if (alpha >= 1.0) return true;
  return which == MLMap::E_alpha ? dim < 2.0 * p : dim < 4.0 * p;
}

bool lemma_b_condition(double alpha, int dim) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("lemma_b_condition: alpha must lie in (0, 1)");
  return dim == 1 && alpha > kTwoThirds;
}

bool prop_superdiffusive_condition(double alpha, int dim) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("prop_superdiffusive_condition: alpha must lie in (1, 2)");
  return dim < 4.0 - 2.0 / alpha;
}

ProbeReport::Outcome judge_refinement(const std::vector<double>& values, double tol, double* slope) {
  std::vector<double> scale(values.size());
  for (std::size_t i = 0; i < scale.size(); ++i) scale[i] = std::pow(10.0, static_cast<double>(i));
  return judge(values, scale, tol, slope);
}

ProbeReport probe_m1(const DiffusionParams& params, const KernelSpec& kernel, double t,
                     const ProbeSchedule& schedule, const QuadSpec& quad) {
  require_probe_inputs(params, t);
  check_schedule(schedule, false);
  quad.validate();

  const double ta = std::pow(t, params.alpha);
  const MittagLeffler e_a({params.alpha, 1.0});
  auto g = [&](double r) { return e_a(-ta * symbol_a_radial(params, kernel, r)); };
  const int per_decade = std::max(4, quad.panels);

  ProbeReport r;
  r.quantity = ProbeReport::Quantity::M1_L1_tail;
  r.tol_used = schedule.tol;
  for (double K : schedule.K) {
    const detail::QuadSum q = radial_integral(g, params.dim, K, symbol_scale(params, ta), per_decade, quad);
    r.cutoffs.emplace_back(K, 0.0);
    r.values.push_back(q.value);
  }
  finish(r, schedule.K, "M1 in K");
  return r;
}

ProbeReport probe_m2(const DiffusionParams& params, const KernelSpec& kernel, double t,
                     const ProbeSchedule& schedule, const QuadSpec& quad) {
  require_probe_inputs(params, t);
  check_schedule(schedule, true);
  quad.validate();
  if (schedule.eps.front() >= t) throw DomainError("time floors must lie below t");

  const double alpha = params.alpha;
  const MittagLeffler e_aa({alpha, alpha});
  const double prefactor = params.sigma * params.sigma / std::pow(2.0 * std::numbers::pi, params.dim);
  const int inner_per_decade = std::max(4, quad.panels / 4);
  const int outer_per_decade = std::max(4, quad.panels / 4);

  ProbeReport r;
  r.quantity = ProbeReport::Quantity::M2_spacetime;
  r.tol_used = schedule.tol;
  std::vector<double> refinement;
  for (std::size_t i = 0; i < schedule.K.size(); ++i) {
    const double K = schedule.K[i];
    const double eps = schedule.eps[i];
    auto outer = [&](double s) {
      const double sa = std::pow(s, alpha);
      auto g = [&](double rr) {
        const double v = e_aa(-sa * symbol_a_radial(params, kernel, rr));
        return v * v;
      };
      const detail::QuadSum inner =
          radial_integral(g, params.dim, K, symbol_scale(params, sa), inner_per_decade, quad);
      return std::pow(s, 2.0 * alpha - 2.0) * inner.value;
    };
    const std::vector<double> edges = detail::geometric_edges(eps, t, outer_per_decade);
    const detail::QuadSum q = detail::integrate_edges(outer, edges, 3, 1e-6);
    r.cutoffs.emplace_back(K, eps);
    r.values.push_back(prefactor * q.value);
    refinement.push_back(std::max(K, 1.0 / eps));
  }
  finish(r, refinement, "M2 in (K, eps)");
  return r;
}

nlohmann::json to_json(const MildnessVerdict& v) {
  return {{"mild", v.mild}, {"rule", to_string(v.rule)}, {"detail", v.detail}};
}

nlohmann::json to_json(const ProbeReport& r) {
  nlohmann::json cut = nlohmann::json::array();
  for (const auto& [K, eps] : r.cutoffs) {
    if (r.quantity == ProbeReport::Quantity::M1_L1_tail) {
      cut.push_back(K);
    } else {
      cut.push_back(nlohmann::json::array({K, eps}));
    }
  }
  return {{"quantity", to_string(r.quantity)},
          {"cutoffs", cut},
          {"values", r.values},
          {"diverges", r.diverges},
          {"outcome", to_string(r.outcome)},
          {"tail_exponent_fit", r.tail_exponent_fit},
          {"tol_used", r.tol_used},
          {"detail", r.detail}};
}

}  // namespace fracfield
