#include "fracfield/symbol.hpp"

#include <cmath>
#include <string>

#include "json_util.hpp"

namespace fracfield {

void KernelSpec::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw DomainError("kernel width must be positive and finite");
  }
}

void DiffusionParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
  if (!(lambda >= 0.0) || !(mu >= 0.0)) throw DomainError("lambda and mu must be non-negative");
  if (!std::isfinite(lambda) || !std::isfinite(mu) || !std::isfinite(sigma)) {
    throw DomainError("diffusion parameters must be finite");
  }
  if (dim < 1) throw DomainError("dimension must be at least 1");
}

double j_hat_radial(const KernelSpec& kernel, double xi_norm, int dim) {
  kernel.validate();
  switch (kernel.type) {
    case KernelSpec::Type::gaussian: {
      const double u = kernel.width * xi_norm;
      return std::exp(-0.5 * u * u);
    }
    case KernelSpec::Type::uniform: {
      if (dim != 1) throw DomainError("uniform kernel is only defined in dimension 1");
      const double u = kernel.width * xi_norm;
      // sin(u)/u loses nothing near zero in double, but 0/0 must still give 1.
      return u == 0.0 ? 1.0 : std::sin(u) / u;
    }
  }
  return 0.0;
}

double j_hat(const KernelSpec& kernel, std::span<const double> xi) {
  if (xi.empty()) throw DomainError("frequency vector is empty");
  double r2 = 0.0;
  for (double v : xi) r2 += v * v;
  if (kernel.type == KernelSpec::Type::uniform) {
    if (xi.size() != 1) throw DomainError("uniform kernel is only defined in dimension 1");
    return j_hat_radial(kernel, xi[0], 1);
  }
  return j_hat_radial(kernel, std::sqrt(r2), static_cast<int>(xi.size()));
}

double symbol_a_radial(const DiffusionParams& p, const KernelSpec& kernel, double xi_norm) {
  double a = p.lambda * xi_norm * xi_norm;
  if (p.mu != 0.0) a += p.mu * (1.0 - j_hat_radial(kernel, xi_norm, p.dim));
  return a;
}

double symbol_a(const DiffusionParams& p, const KernelSpec& kernel, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != p.dim) {
    throw DomainError("frequency vector has dimension " + std::to_string(xi.size()) +
                      ", parameters have " + std::to_string(p.dim));
  }
  if (xi.size() == 1) return symbol_a_radial(p, kernel, std::fabs(xi[0]));
  double r2 = 0.0;
  for (double v : xi) r2 += v * v;
  double a = p.lambda * r2;
  if (p.mu != 0.0) a += p.mu * (1.0 - j_hat(kernel, xi));
  return a;
}

void symbol_a_batch(const DiffusionParams& p, const KernelSpec& kernel, std::span<const double> xi,
                    std::span<double> out) {
  if (p.dim != 1) throw DomainError("batch symbol evaluation is one-dimensional");
  if (out.size() != xi.size()) throw DomainError("batch output size mismatch");
  kernel.validate();
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = symbol_a_radial(p, kernel, std::fabs(xi[i]));
}

double lambda_kernel_from_symbol(double alpha, double t, double a) {
  if (!(t > 0.0)) throw DomainError("lambda_kernel requires t > 0");
  const double ta = std::pow(t, alpha);
  if (alpha == 1.0) return std::exp(-a * t);
  return ta / t * ml_eval({alpha, alpha}, -ta * a);
}

double lambda_kernel(const DiffusionParams& p, const KernelSpec& kernel, double t,
                     std::span<const double> xi) {
  return lambda_kernel_from_symbol(p.alpha, t, symbol_a(p, kernel, xi));
}

double mean_hat_from_symbol(double alpha, double t, double a) {
  if (!(t >= 0.0)) throw DomainError("mean_hat requires t >= 0");
  if (t == 0.0) return 1.0;
  if (alpha == 1.0) return std::exp(-a * t);
  return ml_eval({alpha, 1.0}, -a * std::pow(t, alpha));
}

double mean_hat(const DiffusionParams& p, const KernelSpec& kernel, double t,
                std::span<const double> xi) {
  return mean_hat_from_symbol(p.alpha, t, symbol_a(p, kernel, xi));
}

std::string to_string(KernelSpec::Type t) {
  return t == KernelSpec::Type::gaussian ? "gaussian" : "uniform";
}

nlohmann::json to_json(const KernelSpec& kernel) {
  if (kernel.type == KernelSpec::Type::gaussian) return {{"type", "gaussian"}, {"scale", kernel.width}};
  return {{"type", "uniform"}, {"half_width", kernel.width}};
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  detail::require_object(j, "kernel");
  const std::string type = detail::get_or<std::string>(j, "type", "", "kernel");
  KernelSpec k;
  if (type == "gaussian") {
    detail::reject_unknown_keys(j, "kernel", {"type", "scale"});
    k = KernelSpec::gaussian(detail::get_or<double>(j, "scale", 1.0, "kernel"));
  } else if (type == "uniform") {
    detail::reject_unknown_keys(j, "kernel", {"type", "half_width"});
    k = KernelSpec::uniform(detail::get_or<double>(j, "half_width", 1.0, "kernel"));
  } else {
    throw ConfigError("kernel.type must be \"gaussian\" or \"uniform\"");
  }
  try {
    k.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  return k;
}

nlohmann::json to_json(const DiffusionParams& p) {
  return {{"alpha", p.alpha}, {"lambda", p.lambda}, {"mu", p.mu}, {"sigma", p.sigma}, {"dim", p.dim}};
}

DiffusionParams params_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, "params", {"alpha", "lambda", "mu", "sigma", "dim"});
  DiffusionParams p;
  p.alpha = detail::get_or<double>(j, "alpha", p.alpha, "params");
  p.lambda = detail::get_or<double>(j, "lambda", p.lambda, "params");
  p.mu = detail::get_or<double>(j, "mu", p.mu, "params");
  p.sigma = detail::get_or<double>(j, "sigma", p.sigma, "params");
  p.dim = detail::get_or<int>(j, "dim", p.dim, "params");
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  return p;
}

}  // namespace fracfield
