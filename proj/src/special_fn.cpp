#include "fracfield/special_fn.hpp"

#include <quadmath.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "double_double.hpp"

namespace fracfield {

using detail::DoubleDouble;

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

std::string fmt(double v) { return std::to_string(v); }

// 1/Gamma(z) as a double-double, evaluated in binary128 and rounded twice.
DoubleDouble rgamma_dd(__float128 z) {
  __float128 r;
  if (z < 1700) {
    r = 1 / tgammaq(z);
  } else {
    r = expq(-lgammaq(z));
  }
  const double hi = static_cast<double>(r);
  const double lo = static_cast<double>(r - static_cast<__float128>(hi));
  return {hi, lo};
}

// Number of series coefficients needed so that the tail is negligible at the
// largest |x| routed to the series, i.e. |x|^{1/alpha} = y_max.
std::size_t series_length(const MLOrder& o, double y_max) {
  const double log_x = o.alpha * std::log(std::max(y_max, 1.0));
  std::size_t k = 1;
  for (;; ++k) {
    const double a = o.alpha * static_cast<double>(k) + o.beta;
    const double log_term = static_cast<double>(k) * log_x - std::lgamma(a);
    if (a > y_max + 2.0 && log_term < -90.0) break;
  }
  return k + 8;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

void MLOrder::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("Mittag-Leffler orders must be positive: alpha=" + fmt(alpha) +
                      ", beta=" + fmt(beta));
  }
}

void EvalPolicy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("EvalPolicy: rel_tol must lie in (0,1)");
  if (max_terms < 10) throw DomainError("EvalPolicy: max_terms must be >= 10");
  if (!(asymptotic_switch > 1.0)) throw DomainError("EvalPolicy: asymptotic_switch must exceed 1");
}

double gamma_fn(double x) {
  if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
  if (is_nonpositive_integer(x)) throw DomainError("gamma_fn: pole at " + fmt(x));
  return boost::math::tgamma(x);
}

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return std::exp(-std::lgamma(x));
  if (x < -170.0) {
    // Reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi.
    const double s = boost::math::sin_pi(x);
    return std::copysign(std::exp(std::lgamma(1.0 - x) + std::log(std::fabs(s)) - std::log(kPi)), s);
  }
  return 1.0 / boost::math::tgamma(x);
}

double erfc(double x) { return std::erfc(x); }

double ml_series(const MLOrder& order, double z, const EvalPolicy& policy) {
  order.validate();
  policy.validate();
  if (z == 0.0) return rgamma(order.beta);

  const double log_abs_z = std::log(std::fabs(z));
  CompensatedSum acc;
  acc.add(rgamma(order.beta));
  int small_run = 0;
  for (int k = 1; k < policy.max_terms; ++k) {
    const double a = order.alpha * k + order.beta;
    double term;
    if (a < 150.0) {
      term = std::pow(z, k) * rgamma(a);
    } else {
      const double mag = std::exp(k * log_abs_z - std::lgamma(a));
      term = (z < 0.0 && (k % 2 == 1)) ? -mag : mag;
    }
    acc.add(term);
    if (std::fabs(term) <= policy.rel_tol * std::fabs(acc.value())) {
      if (++small_run == 3) return acc.value();
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("ml_series: no convergence within " + std::to_string(policy.max_terms) +
                         " terms at z=" + fmt(z));
}

double ml_asymptotic_neg(const MLOrder& order, double x, const EvalPolicy& policy) {
  order.validate();
  policy.validate();
  const double a = order.alpha;
  const double b = order.beta;
  if (!(a < 2.0)) throw DomainError("ml_asymptotic_neg: alpha must be < 2");
  if (a == 1.0) throw DomainError("ml_asymptotic_neg: alpha = 1 is exp, no algebraic leading term");
  const bool beta_one = (b == 1.0);
  const bool beta_alpha = (b == a);
  if (!beta_one && !beta_alpha) throw DomainError("ml_asymptotic_neg: beta must be 1 or alpha");
  if (!(x > 0.0)) throw DomainError("ml_asymptotic_neg: x must be positive");

  if (a < 1.0) {
    if (beta_one) return 1.0 / (x * gamma_fn(1.0 - a));
    return kappa_alpha(a) / (x * x);
  }
  const double y = std::pow(x, 1.0 / a);
  const double phase = kPi * (1.0 - b) / a;
  return (2.0 / a) * std::pow(x, (1.0 - b) / a) * std::exp(y * std::cos(kPi / a)) *
         std::cos(y * std::sin(kPi / a) + phase);
}

double ml_asymptotic_envelope(const MLOrder& order, double x) {
  order.validate();
  const double a = order.alpha;
  if (!(a >= 1.0 && a < 2.0)) throw DomainError("ml_asymptotic_envelope: alpha must lie in [1,2)");
  if (!(x > 0.0)) throw DomainError("ml_asymptotic_envelope: x must be positive");
  return std::pow(x, (1.0 - order.beta) / a) / a * std::exp(std::pow(x, 1.0 / a) * std::cos(kPi / a));
}

double ml_asymptotic_expansion(const MLOrder& order, double x) {
  order.validate();
  if (!(x > 0.0)) throw DomainError("ml_asymptotic_expansion: x must be positive");
  const double a = order.alpha;
  const double b = order.beta;
  const double log_x = std::log(x);

  double saddle = 0.0;
  if (a > 1.0) {
    const double y = std::exp(log_x / a);
    saddle = (2.0 / a) * std::exp((1.0 - b) / a * log_x + y * std::cos(kPi / a)) *
             std::cos(y * std::sin(kPi / a) + kPi * (1.0 - b) / a);
  } else if (a == 1.0) {
    // One real saddle: x^{1-beta} e^{-x} cos(pi (1-beta)).
    saddle = std::exp((1.0 - b) * log_x - x) * std::cos(kPi * (1.0 - b));
  }

  // Algebraic part. Truncation follows the smooth envelope Gamma(1 - arg) x^{-k} / pi
  // (|sin| dropped) so that dips of 1/Gamma near its poles do not stop the sum early.
  CompensatedSum acc;
  double last_env = std::numeric_limits<double>::infinity();
  int small_run = 0;
  for (int k = 1; k < 100000; ++k) {
    const double arg = b - a * k;
    double log_env;
    if (arg > 0.0) {
      log_env = -std::lgamma(arg) - k * log_x;
    } else {
      log_env = std::lgamma(1.0 - arg) - std::log(kPi) - k * log_x;
    }
    const double env = std::exp(log_env);
    if (arg < -1.0 && env > last_env) break;
    last_env = env;

    if (!is_nonpositive_integer(arg)) {
      double rg;
      if (arg > 0.0) {
        rg = std::exp(-std::lgamma(arg) - k * log_x);
      } else {
        rg = env * boost::math::sin_pi(arg);
      }
      // -(-1)^k x^{-k} / Gamma(arg)
      acc.add((k % 2 == 0) ? -rg : rg);
    }
    const double scale = std::max(std::fabs(acc.value()), std::fabs(saddle));
    if (env <= 1e-17 * scale) {
      if (++small_run == 3) break;
    } else {
      small_run = 0;
    }
  }
  return saddle + acc.value();
}

// ---------------------------------------------------------------------------
// MittagLeffler

MittagLeffler::MittagLeffler(MLOrder order, EvalPolicy policy)
    : order_(order), policy_(policy) {
  order_.validate();
  policy_.validate();
  if (order_.alpha == 1.0 && order_.beta == 1.0) {
    shortcut_ = Shortcut::exp;
    return;
  }
  if (order_.alpha == 2.0 && order_.beta == 1.0) {
    shortcut_ = Shortcut::cosh;
    return;
  }
  const std::size_t n = series_length(order_, policy_.asymptotic_switch);
  coeffs_.reserve(n);
  const __float128 qa = order_.alpha;
  const __float128 qb = order_.beta;
  for (std::size_t k = 0; k < n; ++k) {
    coeffs_.push_back(rgamma_dd(qa * static_cast<__float128>(k) + qb));
  }
}

MittagLeffler::~MittagLeffler() = default;
MittagLeffler::MittagLeffler(const MittagLeffler&) = default;
MittagLeffler& MittagLeffler::operator=(const MittagLeffler&) = default;
MittagLeffler::MittagLeffler(MittagLeffler&&) noexcept = default;
MittagLeffler& MittagLeffler::operator=(MittagLeffler&&) noexcept = default;

double MittagLeffler::series_branch(double x) const {
  if (x == 0.0) return coeffs_.empty() ? rgamma(order_.beta) : coeffs_[0].to_double();
  if (coeffs_.empty()) return ml_series(order_, x, policy_);

  DoubleDouble sum = coeffs_[0];
  DoubleDouble power(1.0);
  int small_run = 0;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    power = power * x;
    const DoubleDouble term = power * coeffs_[k];
    sum = sum + term;
    if (abs_hi(term) <= 1e-33 * abs_hi(sum)) {
      if (++small_run == 3) return sum.to_double();
    } else {
      small_run = 0;
    }
  }
  // Table too short: only reachable for large positive arguments.
  EvalPolicy wide = policy_;
  wide.max_terms = std::max(policy_.max_terms, 20000);
  return ml_series(order_, x, wide);
}

double MittagLeffler::asymptotic_branch(double x) const {
  if (!(x < 0.0)) throw DomainError("asymptotic branch is defined for negative arguments only");
  return ml_asymptotic_expansion(order_, -x);
}

double MittagLeffler::operator()(double x) const {
  if (std::isnan(x)) throw DomainError("Mittag-Leffler: NaN argument");
  switch (shortcut_) {
    case Shortcut::exp:
      return std::exp(x);
    case Shortcut::cosh:
      return x >= 0.0 ? std::cosh(std::sqrt(x)) : std::cos(std::sqrt(-x));
    case Shortcut::none:
      break;
  }
  if (x < 0.0 && std::pow(-x, 1.0 / order_.alpha) > policy_.asymptotic_switch) {
    return asymptotic_branch(x);
  }
  return series_branch(x);
}

double ml_eval(const MLOrder& order, double x, const EvalPolicy& policy) {
  // Per-thread memo of coefficient tables; evaluation itself is pure.
  struct Entry {
    double alpha, beta, rel_tol, sw;
    int max_terms;
    MittagLeffler fn;
  };
  thread_local std::vector<Entry> cache;
  for (const Entry& e : cache) {
    if (e.alpha == order.alpha && e.beta == order.beta && e.rel_tol == policy.rel_tol &&
        e.sw == policy.asymptotic_switch && e.max_terms == policy.max_terms) {
      return e.fn(x);
    }
  }
  MittagLeffler fn(order, policy);
  if (cache.size() >= 32) cache.erase(cache.begin());
  cache.push_back(Entry{order.alpha, order.beta, policy.rel_tol, policy.asymptotic_switch,
                        policy.max_terms, fn});
  return cache.back().fn(x);
}

// ---------------------------------------------------------------------------
// Bounds, kappa, dominant identity

Bracket ml_bounds(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ml_bounds: alpha must lie in (0,1)");
  if (!(x >= 0.0)) throw DomainError("ml_bounds: x must be >= 0");
  return {1.0 / (1.0 + gamma_fn(1.0 - alpha) * x), 1.0 / (1.0 + x / gamma_fn(1.0 + alpha))};
}

Bracket ml_bounds_alpha_alpha(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ml_bounds_alpha_alpha: alpha must lie in (0,1)");
  if (!(x >= 0.0)) throw DomainError("ml_bounds_alpha_alpha: x must be >= 0");
  const double cl = std::sqrt(gamma_fn(1.0 - alpha) / gamma_fn(1.0 + alpha));
  // Upper constant matches the Taylor slope at 0: Gamma(a) E_{a,a}(-x) = 1 - 2 x Gamma(1+a)/Gamma(1+2a) + O(x^2).
  // Its square root would give a bracket that the function leaves for small x.
  const double cu = gamma_fn(1.0 + alpha) / gamma_fn(1.0 + 2.0 * alpha);
  const double dl = 1.0 + cl * x;
  const double du = 1.0 + cu * x;
  return {1.0 / (dl * dl), 1.0 / (du * du)};
}

Bracket ml_bounds_beta(double alpha, double beta, double x) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("ml_bounds_beta: alpha must lie in (0,1]");
  if (!(beta > alpha)) throw DomainError("ml_bounds_beta: beta must exceed alpha");
  if (!(x >= 0.0)) throw DomainError("ml_bounds_beta: x must be >= 0");
  const double gb = gamma_fn(beta);
  return {1.0 / (1.0 + gamma_fn(beta - alpha) / gb * x), 1.0 / (1.0 + gb / gamma_fn(beta + alpha) * x)};
}

double kappa_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("kappa_alpha: alpha must lie in (0,2)");
  return boost::math::sin_pi(alpha) * gamma_fn(1.0 + alpha) / kPi;
}

double e_alpha(double alpha, double z) {
  const double kappa = kappa_alpha(alpha);
  if (z >= 0.0) return z * std::exp(std::pow(z, 1.0 / alpha)) - kappa;
  const double x = -z;
  if (alpha < 1.0) return -kappa;
  if (alpha == 1.0) return z * std::exp(z);
  const double y = std::pow(x, 1.0 / alpha);
  return 2.0 * z * std::exp(y * std::cos(kPi / alpha)) * std::cos(y * std::sin(kPi / alpha)) - kappa;
}

double ml_dominant_identity_residual(double alpha, double z, const EvalPolicy& policy) {
  return alpha * z * ml_eval({alpha, 1.0}, z, policy) - e_alpha(alpha, z);
}

// ---------------------------------------------------------------------------
// Zeros

ZeroList ml_real_zeros(double alpha, double x_min, double zero_tol, double scan_step) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("ml_real_zeros: alpha must lie in (0,2]");
  if (!(x_min < 0.0)) throw DomainError("ml_real_zeros: x_min must be negative");
  if (!(zero_tol > 0.0) || !(scan_step > 0.0)) throw DomainError("ml_real_zeros: tolerances must be positive");

  ZeroList out;
  out.alpha = alpha;
  out.x_min = x_min;
  out.x_max = 0.0;
  if (alpha <= 1.0) return out;

  const MittagLeffler e({alpha, 1.0});
  const auto n_steps = static_cast<std::size_t>(std::ceil(-x_min / scan_step));
  double left = x_min;
  double f_left = e(left);
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double right = std::min(0.0, x_min + static_cast<double>(i) * scan_step);
    const double f_right = e(right);
    if (f_left == 0.0) {
      out.zeros.push_back(left);
    } else if ((f_left < 0.0) != (f_right < 0.0) && f_right != 0.0) {
      double lo = left;
      double hi = right;
      double f_lo = f_left;
      for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(lo); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = e(mid);
        if (f_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      const double f_lo_end = e(lo);
      const double f_hi_end = e(hi);
      const double z = std::fabs(f_lo_end) <= std::fabs(f_hi_end) ? lo : hi;
      if (std::fabs(e(z)) <= zero_tol) out.zeros.push_back(z);
    }
    left = right;
    f_left = f_right;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mainardi

double mainardi_series(double alpha, double u, const EvalPolicy& policy) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("mainardi_series: alpha must lie in (0,1)");
  if (!(u >= 0.0)) throw DomainError("mainardi_series: u must be >= 0");
  policy.validate();
  // Gamma argument alpha (n-1) + 1 is 1 - alpha > 0 at n = 0 and >= 1 beyond: no poles.
  if (u == 0.0) return rgamma(1.0 - alpha);

  const double log_u = std::log(u);
  CompensatedSum acc;
  int small_run = 0;
  for (int n = 0; n < policy.max_terms; ++n) {
    const double log_mag = 2.0 * n * log_u - std::lgamma(2.0 * n + 1.0) - std::lgamma(alpha * (n - 1) + 1.0);
    const double term = (n % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag);
    acc.add(term);
    if (std::fabs(term) <= policy.rel_tol * std::fabs(acc.value())) {
      if (++small_run == 3) return acc.value();
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("mainardi_series: no convergence within " + std::to_string(policy.max_terms) +
                         " terms at u=" + fmt(u));
}

double mainardi_half_closed(double u) {
  if (!(u >= 0.0)) throw DomainError("mainardi_half_closed: u must be >= 0");
  return (1.0 + u) * std::exp(-0.25 * u * u) / std::sqrt(kPi);
}

}  // namespace fracfield
