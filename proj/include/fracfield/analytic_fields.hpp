#pragma once

// Mean field Z0(t, x) and pointwise variance of the one-dimensional model by
// Fourier inversion, closed forms, direct quadrature and the beta_m series.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracfield/quad_spec.hpp"
#include "fracfield/special_fn.hpp"
#include "fracfield/symbol.hpp"

namespace fracfield {

struct VarianceSeriesSpec {
  int max_terms = 30;             // M: terms m = 0 .. M-1
  double resonance_guard = 1e-9;  // |alpha - 1/(m+1)| <= guard counts as resonant

  void validate() const;
};

/// Sampled (t, x) field. values is row-major: values[i * positions.size() + j] at (times[i], positions[j]).
struct Profile {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> values;
  std::string method;  // fourier, mainardi, heat_kernel, var_quadrature, var_series, var_closed, mc_ensemble_*
  nlohmann::json meta = nlohmann::json::object();

  double at(std::size_t i, std::size_t j) const { return values[i * positions.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * positions.size() + j]; }
  void validate() const;
};

/// Evaluates f(t, x) on the grid (parallel over grid points, deterministic).
Profile make_profile(const std::vector<double>& times, const std::vector<double>& positions,
                     const std::string& method, const std::function<double(double, double)>& f);

/// CSV `t,x,value,method`, 17 significant digits.
void write_profile_csv(std::ostream& os, const Profile& p);
Profile read_profile_csv(std::istream& is);

struct CrossCheckRow {
  double t, x;
  std::string method_a;
  double value_a;
  std::string method_b;
  double value_b;
  double ratio;  // value_a / value_b
};

/// Pairs two profiles on the same grid.
std::vector<CrossCheckRow> cross_check(const Profile& a, const Profile& b);
/// CSV `t,x,method_a,value_a,method_b,value_b,ratio`.
void write_cross_check_csv(std::ostream& os, const std::vector<CrossCheckRow>& rows);

/// (4 pi lambda t)^{-1/2} exp(-x^2 / (4 lambda t)).
double heat_kernel(double t, double x, double lambda);

struct FourierValue {
  double value;
  double truncation_bound;  // estimate of the neglected |k| > K contribution
  double quad_error;        // summed panel error estimates
};

/// Z0(t, x) = (1/pi) int_0^infinity cos(k x) E_alpha(-a(k) t^alpha) dk, N = 1.
/// The algebraic tail c1/(k^2+b^2) + c2/(k^2+b^2)^2 of the integrand is inverted
/// in closed form; the remainder is integrated to K on half-period panels.
FourierValue mean_fourier_detailed(const DiffusionParams& p, const KernelSpec& kernel, double t, double x,
                                   const QuadSpec& quad = {});
double mean_fourier(const DiffusionParams& p, const KernelSpec& kernel, double t, double x,
                    const QuadSpec& quad = {});

/// (4 pi lambda t^alpha)^{-1/2} M_alpha(|x| / sqrt(lambda t^alpha)), with M_alpha = mainardi_series.
double mean_mainardi(double t, double x, double alpha, double lambda, const EvalPolicy& policy = {});

/// (4 pi lambda t^{1/2})^{-1/2} (1 + |x|/sqrt(4 lambda t^{1/2})) exp(-x^2/(4 lambda t^{1/2})).
double mean_half_closed(double t, double x, double lambda);

/// sigma^2 int_0^t int_R (4 pi lambda (t-tau))^{-1} exp(-(x-y)^2/(2 lambda (t-tau))) dy dtau.
double var_classical_quadrature(double t, double x, double lambda, double sigma, const QuadSpec& quad = {});

/// sigma^2/(4 lambda sqrt(pi t)) erfc(|x|/(4 sqrt(lambda t))).
double var_classical_closed(double t, double x, double lambda, double sigma);

/// sigma (4 pi lambda (t-t1)^alpha)^{-1/2} E_{alpha,alpha}(-(x-x1)^2/(4 lambda (t-t1)^alpha)).
double fluct_kernel_frac(double t, double t1, double x, double x1, double alpha, double lambda, double sigma);

/// sigma^2/(4 pi lambda) int_0^t int_0^|x| (t-tau)^{-alpha} E_{alpha,alpha}(-(x-y)^2/(4 lambda (t-tau)^alpha))^2 dy dtau.
/// Zero at x = 0; even in x.
double var_frac_quadrature(double t, double x, double alpha, double lambda, double sigma,
                           const QuadSpec& quad = {});

/// beta_m = sum_{k=0}^m 1/(Gamma(m-k+1) Gamma(alpha (k+1))).
double beta_coeff(int m, double alpha);

struct SeriesValue {
  double value;
  double last_term;  // magnitude of the m = M-1 term
  int terms;
};

/// sigma^2/(4 pi lambda) sum_{m<M} (-1)^m beta_m |x|^{2m+1} t^{1-(m+1) alpha} / (4^m (2m+1) (1-(m+1) alpha)).
/// Throws ResonanceError naming the first resonant m.
SeriesValue var_series(double t, double x, double alpha, double lambda, double sigma,
                       const VarianceSeriesSpec& spec = {});

/// All m <= max_m with |alpha - 1/(m+1)| <= guard.
std::vector<int> resonance_set(double alpha, int max_m, double guard = 1e-9);

}  // namespace fracfield
