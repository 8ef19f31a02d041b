#pragma once

// Real-line special functions for the fractional diffusion model: Gamma, erfc,
// the one- and two-parameter Mittag-Leffler functions, kappa_alpha, the
// Mainardi series and the real zeros of E_alpha.

#include <cstddef>
#include <vector>

#include "fracfield/errors.hpp"

namespace fracfield {

namespace detail {
struct DoubleDouble;
}

/// Orders of E_{alpha,beta}. Both must be positive.
struct MLOrder {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
};

/// Precision contract for series / asymptotic evaluation.
///
/// `asymptotic_switch` is applied to the scaled argument |x|^{1/alpha}: on the
/// negative axis the series is summed in double-double arithmetic while
/// |x|^{1/alpha} <= asymptotic_switch and the asymptotic expansion is used
/// beyond. Both branches have exponentially small error in |x|^{1/alpha}, so
/// the hand-off is independent of alpha in that variable.
struct EvalPolicy {
  double rel_tol = 1e-12;
  int max_terms = 500;
  double asymptotic_switch = 35.0;

  void validate() const;
};

double gamma_fn(double x);

/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

double erfc(double x);

/// Plain double-precision partial sum of sum_k z^k / Gamma(alpha k + beta).
/// Stops once |term| <= rel_tol |sum| for three consecutive terms.
double ml_series(const MLOrder& order, double z, const EvalPolicy& policy = {});

/// Leading-order large-x behaviour of E_{alpha,beta}(-x) for beta in {1, alpha}.
///
///  - 0 < alpha < 1, beta = 1:      x^{-1} / Gamma(1 - alpha)
///  - 0 < alpha < 1, beta = alpha:  kappa_alpha x^{-2}
///  - 1 < alpha < 2:                (2/alpha) x^{(1-beta)/alpha} e^{x^{1/alpha} cos(pi/alpha)}
///                                  * cos(x^{1/alpha} sin(pi/alpha) + pi (1-beta)/alpha)
/// alpha = 1 is E_1 = exp and is rejected here (Gamma(1 - alpha) pole).
double ml_asymptotic_neg(const MLOrder& order, double x, const EvalPolicy& policy = {});

/// Magnitude envelope (1/alpha) x^{(1-beta)/alpha} exp(x^{1/alpha} cos(pi/alpha)) for 1 <= alpha < 2.
double ml_asymptotic_envelope(const MLOrder& order, double x);

/// Full asymptotic expansion of E_{alpha,beta}(-x), x > 0: exponential saddle
/// contributions (alpha >= 1) plus the optimally truncated algebraic series
/// -sum_{k>=1} (-x)^{-k} / Gamma(beta - alpha k).
double ml_asymptotic_expansion(const MLOrder& order, double x);

/// E_{alpha,beta}(x) with precomputed double-double series coefficients.
/// Immutable after construction; safe to share across threads.
class MittagLeffler {
 public:
  explicit MittagLeffler(MLOrder order, EvalPolicy policy = {});
  ~MittagLeffler();
  MittagLeffler(const MittagLeffler&);
  MittagLeffler& operator=(const MittagLeffler&);
  MittagLeffler(MittagLeffler&&) noexcept;
  MittagLeffler& operator=(MittagLeffler&&) noexcept;

  double operator()(double x) const;

  const MLOrder& order() const noexcept { return order_; }
  const EvalPolicy& policy() const noexcept { return policy_; }

  /// The two branches of the dispatcher, exposed for continuity checks.
  double series_branch(double x) const;
  double asymptotic_branch(double x) const;

 private:
  enum class Shortcut { none, exp, cosh };

  MLOrder order_;
  EvalPolicy policy_;
  Shortcut shortcut_ = Shortcut::none;
  std::vector<detail::DoubleDouble> coeffs_;
};

/// Regime dispatcher: E_{alpha,beta}(x) for any real x with a convergent route.
/// alpha = beta = 1 is exp(x); alpha = 2, beta = 1 is cosh(sqrt(x)) / cos(sqrt(-x)).
double ml_eval(const MLOrder& order, double x, const EvalPolicy& policy = {});

struct Bracket {
  double lower;
  double upper;
};

/// Two-sided bracket for E_alpha(-x), 0 < alpha < 1, x >= 0.
Bracket ml_bounds(double alpha, double x);

/// Two-sided bracket for Gamma(alpha) E_{alpha,alpha}(-x), 0 < alpha < 1, x >= 0.
Bracket ml_bounds_alpha_alpha(double alpha, double x);

/// Two-sided bracket for Gamma(beta) E_{alpha,beta}(-x), 0 < alpha <= 1, beta > alpha, x >= 0.
Bracket ml_bounds_beta(double alpha, double beta, double x);

/// kappa_alpha = sin(pi alpha) Gamma(1 + alpha) / pi.
double kappa_alpha(double alpha);

/// Dominant part of alpha z E_alpha(z) for real z. On the negative axis only the
/// saddle contributions lying on the principal sheet are kept (none for alpha < 1).
double e_alpha(double alpha, double z);

/// alpha z E_alpha(z) - e_alpha(z); O(1/|z|) for large |z|.
double ml_dominant_identity_residual(double alpha, double z, const EvalPolicy& policy = {});

struct ZeroList {
  double alpha = 0.0;
  std::vector<double> zeros;  // strictly increasing, all < 0
  double x_min = 0.0;
  double x_max = 0.0;
};

/// Real zeros of E_alpha on [x_min, 0] by sign-change scan and bisection.
/// Empty (without scanning) for alpha <= 1, where E_alpha(-x) is completely monotone.
ZeroList ml_real_zeros(double alpha, double x_min, double zero_tol = 1e-10,
                       double scan_step = 0.05);

/// sum_n (-1)^n u^{2n} / ((2n)! Gamma(alpha n - alpha + 1)), 0 < alpha < 1.
double mainardi_series(double alpha, double u, const EvalPolicy& policy = {});

/// (1 + u) e^{-u^2/4} / sqrt(pi).
double mainardi_half_closed(double u);

}  // namespace fracfield
