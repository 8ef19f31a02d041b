#pragma once

// Fourier-side description of the spatial generator lambda*Laplacian + mu*(J* - I).
//
// Fourier convention: f^(xi) = int e^{-i x.xi} f(x) dx, inverse carries (2 pi)^{-N}.

#include <span>
#include <string>

#include "json.hpp"

#include "fracfield/errors.hpp"
#include "fracfield/special_fn.hpp"

namespace fracfield {

/// Radial probability density J with a closed-form transform.
///   gaussian: J^(xi) = exp(-s^2 |xi|^2 / 2), any dimension
///   uniform:  J = 1/(2r) on [-r, r], J^(xi) = sin(r xi)/(r xi), N = 1 only
struct KernelSpec {
  enum class Type { gaussian, uniform };

  Type type = Type::gaussian;
  double width = 1.0;  // scale s or half-width r

  static KernelSpec gaussian(double scale) { return {Type::gaussian, scale}; }
  static KernelSpec uniform(double half_width) { return {Type::uniform, half_width}; }

  void validate() const;
};

struct DiffusionParams {
  double alpha = 1.0;
  double lambda = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  int dim = 1;

  void validate() const;
};

/// J^ at a frequency vector; xi.size() is the spatial dimension.
double j_hat(const KernelSpec& kernel, std::span<const double> xi);
/// J^ as a function of |xi| in dimension `dim`.
double j_hat_radial(const KernelSpec& kernel, double xi_norm, int dim = 1);

/// a(xi) = lambda |xi|^2 + mu (1 - J^(xi)).
double symbol_a(const DiffusionParams& p, const KernelSpec& kernel, std::span<const double> xi);
double symbol_a_radial(const DiffusionParams& p, const KernelSpec& kernel, double xi_norm);
/// a(xi_i) for a batch of one-dimensional frequencies (params.dim must be 1).
void symbol_a_batch(const DiffusionParams& p, const KernelSpec& kernel, std::span<const double> xi,
                    std::span<double> out);

/// Lambda(t, xi) = t^{alpha-1} E_{alpha,alpha}(-t^alpha a(xi)), t > 0.
double lambda_kernel(const DiffusionParams& p, const KernelSpec& kernel, double t,
                     std::span<const double> xi);
double lambda_kernel_from_symbol(double alpha, double t, double a);

/// Transform of the deterministic part with a Dirac datum: E_alpha(-a(xi) t^alpha).
double mean_hat(const DiffusionParams& p, const KernelSpec& kernel, double t,
                std::span<const double> xi);
double mean_hat_from_symbol(double alpha, double t, double a);

nlohmann::json to_json(const KernelSpec& kernel);
KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DiffusionParams& p);
DiffusionParams params_from_json(const nlohmann::json& j);

std::string to_string(KernelSpec::Type t);

}  // namespace fracfield
