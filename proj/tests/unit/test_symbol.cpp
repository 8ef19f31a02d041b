#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fracfield/symbol.hpp"
#include "test_util.hpp"

using namespace fracfield;
using fracfield::testing::rel_err;

namespace {
constexpr double kPi = std::numbers::pi;

double one(double v) { return v; }
}  // namespace

TEST_CASE("j_hat closed forms") {
  const KernelSpec g = KernelSpec::gaussian(1.0);
  const double zero[] = {0.0};
  CHECK(j_hat(g, zero) == 1.0);

  const double two[] = {2.0};
  CHECK(rel_err(j_hat(g, two), std::exp(-2.0)) < 1e-15);
  // Independent oracle: int cos(x xi) J(x) dx with J the unit Gaussian density.
  const double q = fracfield::testing::gauss5(
      [](double x) { return std::cos(2.0 * x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }, -12.0, 12.0,
      2000);
  CHECK(rel_err(j_hat(g, two), q) < 1e-12);

  const double r2[] = {1.2, -1.6};  // |xi| = 2
  CHECK(rel_err(j_hat(g, r2), std::exp(-2.0)) < 1e-15);

  const KernelSpec u = KernelSpec::uniform(kPi);
  const double xi1[] = {1.0};
  CHECK(std::fabs(j_hat(u, xi1)) < 1e-15);
  CHECK(j_hat(u, zero) == 1.0);
  const double q_u = fracfield::testing::gauss5([](double x) { return std::cos(0.7 * x) / (2.0 * kPi); }, -kPi,
                                                kPi, 200);
  const double xi07[] = {0.7};
  CHECK(rel_err(j_hat(u, xi07), q_u) < 1e-12);
  CHECK_THROWS_AS(j_hat(u, r2), DomainError);
}

TEST_CASE("j_hat stays in [-1, 1] and is radial") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = d(rng), b = d(rng);
    const double xi[] = {a, b};
    const double v = j_hat(KernelSpec::gaussian(0.3), xi);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    const double rot[] = {std::hypot(a, b), 0.0};
    CHECK(rel_err(v, j_hat(KernelSpec::gaussian(0.3), rot)) < 1e-12);
    const double x1[] = {a};
    const double w = j_hat(KernelSpec::uniform(0.9), x1);
    CHECK(std::fabs(w) <= 1.0);
    const double xm[] = {-a};
    CHECK(w == j_hat(KernelSpec::uniform(0.9), xm));
  }
}

TEST_CASE("symbol_a examples and limits") {
  const KernelSpec g = KernelSpec::gaussian(1.0);
  DiffusionParams lap{1.0, 1.0, 0.0, 1.0, 1};
  const double two[] = {2.0};
  CHECK(symbol_a(lap, g, two) == 4.0);

  DiffusionParams nonlocal{1.0, 0.0, 3.0, 1.0, 1};
  const double zero[] = {0.0};
  CHECK(symbol_a(nonlocal, g, zero) == 0.0);
  const double ten[] = {10.0};
  CHECK(rel_err(symbol_a(nonlocal, g, ten), 3.0 * (1.0 - std::exp(-50.0))) < 1e-15);

  const double big[] = {1e3};
  CHECK(symbol_a(nonlocal, g, big) >= 0.99 * 3.0);
  CHECK(symbol_a(nonlocal, g, big) <= 3.0);
  for (double mu : {0.0, 1.0, 10.0}) {
    DiffusionParams p{0.7, 2.0, mu, 1.0, 1};
    CHECK(one(symbol_a(p, g, big) / (2.0 * 1e6)) >= 0.99);
    CHECK(one(symbol_a(p, g, big) / (2.0 * 1e6)) <= 1.01);
    CHECK(one(symbol_a(p, KernelSpec::uniform(0.5), big) / (2.0 * 1e6)) <= 1.01);
  }
  CHECK_THROWS_AS(symbol_a(lap, g, std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("symbol_a is non-negative for random admissible parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const int dim = 1 + static_cast<int>(u01(rng) * 3.0);
    DiffusionParams p{0.05 + 1.9 * u01(rng), 5.0 * u01(rng), 10.0 * u01(rng), 1.0, dim};
    const KernelSpec k = (dim == 1 && u01(rng) < 0.5) ? KernelSpec::uniform(0.1 + 3.0 * u01(rng))
                                                      : KernelSpec::gaussian(0.1 + 3.0 * u01(rng));
    std::vector<double> xi(dim);
    for (double& v : xi) v = 40.0 * (u01(rng) - 0.5);
    CHECK(symbol_a(p, k, xi) >= 0.0);
  }
}

TEST_CASE("batch symbol agrees with the pointwise form") {
  DiffusionParams p{0.8, 1.5, 2.0, 1.0, 1};
  const KernelSpec k = KernelSpec::uniform(1.3);
  std::vector<double> xi, out(41);
  for (int i = -20; i <= 20; ++i) xi.push_back(0.37 * i);
  symbol_a_batch(p, k, xi, out);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const double one_xi[] = {xi[i]};
    CHECK(out[i] == symbol_a(p, k, one_xi));
  }
}

TEST_CASE("lambda_kernel") {
  CHECK(rel_err(lambda_kernel_from_symbol(0.5, 1.0, 0.0), 1.0 / std::sqrt(kPi)) < 1e-14);
  // Leading large-argument term kappa_{1/2} a^{-2} = Gamma(3/2)/pi * 1e-8.
  CHECK(rel_err(lambda_kernel_from_symbol(0.5, 1.0, 1e4), std::tgamma(1.5) / kPi * 1e-8) < 1e-4);

  double worst = 0.0;
  for (double t : {0.01, 0.3, 1.0, 4.0}) {
    for (double a : {0.0, 0.5, 3.0, 40.0}) {
      worst = std::max(worst, rel_err(lambda_kernel_from_symbol(1.0, t, a), std::exp(-a * t)));
    }
  }
  CHECK(worst <= 1e-12);

  DiffusionParams p{0.7, 1.0, 1.0, 1.0, 1};
  const double xi[] = {2.0};
  const double a = symbol_a(p, KernelSpec::gaussian(1.0), xi);
  CHECK(lambda_kernel(p, KernelSpec::gaussian(1.0), 0.5, xi) == lambda_kernel_from_symbol(0.7, 0.5, a));
  CHECK_THROWS_AS(lambda_kernel_from_symbol(0.7, 0.0, 1.0), DomainError);
  CHECK(std::isfinite(lambda_kernel_from_symbol(0.3, 1e-12, 1e6)));
}

TEST_CASE("mean_hat") {
  DiffusionParams p{0.5, 1.0, 0.0, 1.0, 1};
  const KernelSpec g = KernelSpec::gaussian(1.0);
  const double hundred[] = {100.0};
  CHECK(mean_hat(p, g, 0.0, hundred) == 1.0);
  CHECK(rel_err(mean_hat(p, g, 1.0, hundred), 1.0 / (std::sqrt(kPi) * 1e4)) < 1e-3);

  DiffusionParams heat{1.0, 1.0, 0.0, 1.0, 1};
  const double xi1[] = {1.0};
  CHECK(rel_err(mean_hat(heat, g, 2.0, xi1), std::exp(-2.0)) < 1e-15);
}

TEST_CASE("kernel and params JSON round trip, strict keys") {
  const KernelSpec k = kernel_from_json(nlohmann::json::parse(R"({"type":"uniform","half_width":2.5})"));
  CHECK(k.type == KernelSpec::Type::uniform);
  CHECK(k.width == 2.5);
  CHECK(kernel_from_json(to_json(k)).width == 2.5);
  CHECK(kernel_from_json(to_json(KernelSpec::gaussian(0.4))).type == KernelSpec::Type::gaussian);
  CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(R"({"type":"gaussian","half_width":1})")), ConfigError);
  CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(R"({"type":"cauchy","scale":1})")), ConfigError);
  CHECK_THROWS_AS(kernel_from_json(nlohmann::json::parse(R"({"type":"gaussian","scale":-1})")), ConfigError);

  const DiffusionParams p = params_from_json(nlohmann::json::parse(R"({"alpha":0.8,"lambda":1,"mu":2,"dim":1})"));
  CHECK(p.alpha == 0.8);
  CHECK(p.mu == 2.0);
  CHECK(params_from_json(to_json(p)).lambda == 1.0);
  CHECK_THROWS_AS(params_from_json(nlohmann::json::parse(R"({"alpha":0.8,"nu":1})")), ConfigError);
  CHECK_THROWS_AS(params_from_json(nlohmann::json::parse(R"({"alpha":2.5})")), ConfigError);
}
