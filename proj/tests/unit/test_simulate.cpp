#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fracfield/simulate.hpp"
#include "test_util.hpp"

using namespace fracfield;
using fracfield::testing::rel_err;
using cplx = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;
const KernelSpec kGauss = KernelSpec::gaussian(1.0);

GridSpec small_grid(GridSpec::InitialCondition ic) {
  GridSpec g;
  g.half_length = 10.0;
  g.n_points = 64;
  g.n_steps = 32;
  g.t_end = 1.0;
  g.ic = ic;
  return g;
}

// Frequency of FFT-ordered entry k.
double xi_of(const GridSpec& g, int k) {
  const int n = g.n_points;
  return kPi / g.half_length * (k < n / 2 ? k : k - n);
}

// Z(x_j) = (2L)^{-1} sum_k e^{i xi_k x_j} Z^_k by direct summation.
std::vector<cplx> direct_inverse(const GridSpec& g, const std::vector<cplx>& spec) {
  std::vector<cplx> out(g.n_points);
  for (int j = 0; j < g.n_points; ++j) {
    cplx s = 0.0;
    for (int k = 0; k < g.n_points; ++k) s += std::polar(1.0, xi_of(g, k) * g.position(j)) * spec[k];
    out[j] = s / (2.0 * g.half_length);
  }
  return out;
}
}  // namespace

TEST_CASE("grid spec") {
  GridSpec g;
  CHECK_NOTHROW(g.validate());
  CHECK(g.dx() == 40.0 / 1024);
  CHECK(g.snapshot_steps() == std::vector<int>{32, 64, 96, 128, 160, 192, 224, 256});
  g.n_steps = 16;
  g.n_snapshots = 40;
  CHECK(g.snapshot_steps().size() == 16);
  CHECK(g.snapshot_steps().back() == 16);

  GridSpec bad;
  bad.n_points = 96;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = GridSpec{};
  bad.n_steps = 8;
  CHECK_THROWS_AS(bad.validate(), DomainError);

  const GridSpec back = grid_from_json(to_json(small_grid(GridSpec::InitialCondition::zero)));
  CHECK(back.n_points == 64);
  CHECK(back.ic == GridSpec::InitialCondition::zero);
  CHECK_THROWS_AS(grid_from_json({{"n_points", 64}, {"dt", 0.1}}), ConfigError);
  CHECK_THROWS_AS(grid_from_json({{"ic", "gaussian"}}), ConfigError);
  CHECK_THROWS_AS(grid_from_json({{"n_points", 100}}), ConfigError);

  CHECK(domain_is_adequate({1.0, 1.0, 0.0, 1.0, 1}, GridSpec{}));
  CHECK_FALSE(domain_is_adequate({1.0, 9.0, 0.0, 1.0, 1}, GridSpec{}));
}

TEST_CASE("seed mixing") {
  // First splitmix64 output from state 0.
  CHECK(mix_seed(0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(mix_seed(42, 0) != mix_seed(42, 1));
  CHECK(mix_seed(42, 7) == mix_seed(42, 7));
}

TEST_CASE("noise increments") {
  const GridSpec g = small_grid(GridSpec::InitialCondition::zero);
  const int n = g.n_points;
  const auto w = noise_increments(g, 5, 3);
  REQUIRE(w.size() == static_cast<std::size_t>(n));
  for (int k = 1; k < n; ++k) {
    CHECK(w[n - k].real() == w[k].real());
    CHECK(w[n - k].imag() == -w[k].imag());
  }
  CHECK(w[0].imag() == 0.0);
  CHECK(noise_increments(g, 5, 3) == w);
  CHECK(noise_increments(g, 5, 4) != w);

  // Moments over 10^4 draws at a few frequencies.
  const int draws = 10000;
  const double expected = n * g.dt() * g.dx();
  const int ks[] = {0, 1, 7, 32};
  cplx sum[4] = {};
  double power[4] = {};
  for (int d = 0; d < draws; ++d) {
    const auto v = noise_increments(g, 1000 + d / g.n_steps, d % g.n_steps);
    for (int i = 0; i < 4; ++i) {
      sum[i] += v[ks[i]];
      power[i] += std::norm(v[ks[i]]);
    }
  }
  for (int i = 0; i < 4; ++i) {
    CAPTURE(ks[i]);
    const double se = std::sqrt(expected / draws);
    CHECK(std::abs(sum[i] / double(draws)) < 4.0 * se);
    CHECK(std::fabs(power[i] / draws / expected - 1.0) < 0.05);
  }
  CHECK_THROWS_AS(noise_increments(g, 1, g.n_steps), DomainError);
}

TEST_CASE("deterministic part reproduces the heat kernel") {
  GridSpec g;
  g.t_end = 0.5;
  g.n_steps = 16;
  g.ic = GridSpec::InitialCondition::dirac_spectral;
  const SamplePath path = simulate_path({1.0, 1.0, 0.0, 0.0, 1}, kGauss, g, 1);
  const Snapshot& s = path.snapshots.back();
  CHECK(s.t == 0.5);
  double worst = 0.0;
  for (int j = 0; j < g.n_points; ++j) {
    const double x = g.position(j);
    if (std::fabs(x) <= 6.0) worst = std::max(worst, rel_err(s.values[j], heat_kernel(0.5, x, 1.0)));
  }
  CHECK(worst < 1e-6);

  const SamplePath zero = simulate_path({0.8, 1.0, 0.0, 0.0, 1}, kGauss, small_grid(GridSpec::InitialCondition::zero), 1);
  for (const Snapshot& z : zero.snapshots) {
    for (double v : z.values) CHECK(v == 0.0);
  }
}

TEST_CASE("sample paths: determinism and linearity in sigma") {
  const GridSpec g = small_grid(GridSpec::InitialCondition::zero);
  const DiffusionParams p1{0.8, 1.0, 0.5, 1.0, 1};
  DiffusionParams p2 = p1;
  p2.sigma = 2.0;
  const SamplePath a = simulate_path(p1, kGauss, g, 99);
  const SamplePath b = simulate_path(p1, kGauss, g, 99);
  const SamplePath c = simulate_path(p2, kGauss, g, 99);
  const SamplePath d = simulate_path(p1, kGauss, g, 100);
  REQUIRE(a.snapshots.size() == 8);
  bool differs = false;
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
    CHECK(a.snapshots[s].values == b.snapshots[s].values);
    for (int j = 0; j < g.n_points; ++j) CHECK(c.snapshots[s].values[j] == 2.0 * a.snapshots[s].values[j]);
    differs = differs || a.snapshots[s].values != d.snapshots[s].values;
  }
  CHECK(differs);
}

TEST_CASE("alpha = 1 matches an exponential-Euler recursion on the same noise") {
  // Y_{m+1} = e^{-a dt} Y_m + (1 - e^{-a dt}) / (a dt) dW_m per frequency, then a direct
  // inverse sum; the imaginary part of that sum measures the Hermitian symmetry.
  const GridSpec g = small_grid(GridSpec::InitialCondition::dirac_spectral);
  const DiffusionParams p{1.0, 0.7, 0.4, 1.3, 1};
  const std::uint64_t seed = 2024;
  const int n = g.n_points;
  const double dt = g.dt();

  std::vector<double> a(n);
  for (int k = 0; k < n; ++k) a[k] = p.lambda * xi_of(g, k) * xi_of(g, k) + p.mu * (1.0 - std::exp(-0.5 * xi_of(g, k) * xi_of(g, k)));
  std::vector<cplx> y(n, 0.0);
  for (int m = 0; m < g.n_steps; ++m) {
    const auto dw = noise_increments(g, seed, m);
    for (int k = 0; k < n; ++k) {
      const double ad = a[k] * dt;
      const double w = ad == 0.0 ? 1.0 : -std::expm1(-ad) / ad;
      y[k] = std::exp(-ad) * y[k] + p.sigma * w * dw[k];
    }
  }
  for (int k = 0; k < n; ++k) y[k] += std::exp(-a[k] * g.t_end);
  const std::vector<cplx> field = direct_inverse(g, y);

  const SamplePath path = simulate_path(p, kGauss, g, seed);
  const std::vector<double>& sim = path.snapshots.back().values;
  double scale = 0.0, diff = 0.0, imag = 0.0;
  for (int j = 0; j < n; ++j) {
    scale = std::max(scale, std::fabs(field[j].real()));
    diff = std::max(diff, std::fabs(field[j].real() - sim[j]));
    imag = std::max(imag, std::fabs(field[j].imag()));
  }
  CHECK(diff < 1e-10 * scale);
  CHECK(imag < 1e-10 * scale);
}

TEST_CASE("mildness gate") {
  const GridSpec g = small_grid(GridSpec::InitialCondition::zero);
  CHECK_THROWS_AS(simulate_path({0.5, 1.0, 0.0, 1.0, 1}, kGauss, g, 1), NotMildError);
  const SamplePath forced = simulate_path({0.6, 1.0, 0.0, 1.0, 1}, kGauss, g, 1, true);
  CHECK(forced.forced);
  CHECK_FALSE(simulate_path({0.8, 1.0, 0.0, 1.0, 1}, kGauss, g, 1).forced);
  CHECK_THROWS_AS(simulate_path({1.0, 1.0, 0.0, 1.0, 2}, kGauss, g, 1), DomainError);
  CHECK_THROWS_AS(simulate_path({1.0, 0.0, 0.0, 1.0, 1}, kGauss, g, 1), DegenerateParamsError);
  CHECK_THROWS_AS(ensemble_stats({1.0, 1.0, 0.0, 1.0, 1}, kGauss, g, 1, 1), DomainError);
}

TEST_CASE("ensemble statistics") {
  const GridSpec g = small_grid(GridSpec::InitialCondition::zero);
  const DiffusionParams p{1.0, 1.0, 0.0, 1.0, 1};
  setenv("FRACFIELD_THREADS", "1", 1);
  const EnsembleStats a = ensemble_stats(p, kGauss, g, 300, 42);
  setenv("FRACFIELD_THREADS", "4", 1);
  const EnsembleStats b = ensemble_stats(p, kGauss, g, 300, 42);
  unsetenv("FRACFIELD_THREADS");
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  CHECK(a.times.size() == 8);

  // Zero-mean stochastic convolution.
  int outside = 0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    for (int j = 0; j < g.n_points; ++j) {
      CHECK(a.variance_at(i, j) >= 0.0);
      if (std::fabs(a.mean_at(i, j)) > 4.0 * std::sqrt(a.variance_at(i, j) / a.n_samples)) ++outside;
    }
  }
  CHECK(outside == 0);

  // A single-block ensemble agrees with the two-pass formulas over the same sample paths.
  const int n = 40;
  const EnsembleStats small = ensemble_stats(p, kGauss, g, n, 9);
  std::vector<double> s1(g.n_points, 0.0), s2(g.n_points, 0.0);
  std::vector<std::vector<double>> last;
  for (int i = 0; i < n; ++i) last.push_back(simulate_path(p, kGauss, g, mix_seed(9, i)).snapshots.back().values);
  for (const auto& v : last) for (int j = 0; j < g.n_points; ++j) s1[j] += v[j] / n;
  for (const auto& v : last) for (int j = 0; j < g.n_points; ++j) s2[j] += (v[j] - s1[j]) * (v[j] - s1[j]) / (n - 1);
  for (int j = 0; j < g.n_points; ++j) {
    CHECK(std::fabs(small.mean_at(7, j) - s1[j]) < 1e-13);
    CHECK(rel_err(small.variance_at(7, j), s2[j]) < 1e-10);
  }
}

TEST_CASE("variance grows in time") {
  for (double alpha : {0.8, 1.0, 1.5}) {
    CAPTURE(alpha);
    GridSpec g = small_grid(GridSpec::InitialCondition::zero);
    g.n_points = 128;
    const EnsembleStats st = ensemble_stats({alpha, 1.0, 0.0, 1.0, 1}, kGauss, g, 256, 3);
    // Spatial averages over the box; each has a relative spread of about sqrt(2/256)/sqrt(#independent cells).
    double prev = 0.0;
    for (std::size_t i = 0; i < st.times.size(); ++i) {
      double v = 0.0;
      for (int j = 0; j < g.n_points; ++j) v += st.variance_at(i, j) / g.n_points;
      CHECK(std::isfinite(v));
      CHECK(v > prev * 0.97);
      prev = v;
    }
  }
}

TEST_CASE("comparison against analytic profiles") {
  GridSpec g = small_grid(GridSpec::InitialCondition::dirac_spectral);
  g.n_points = 128;
  const DiffusionParams p{1.0, 1.0, 0.0, 0.05, 1};
  const EnsembleStats st = ensemble_stats(p, kGauss, g, 200, 11);

  std::vector<double> xs;
  for (int j = 32; j <= 96; j += 4) xs.push_back(g.position(j));
  const Profile right = make_profile({1.0}, xs, "heat_kernel", [](double t, double x) { return heat_kernel(t, x, 1.0); });
  const Profile wrong = make_profile({1.0}, xs, "heat_kernel", [](double t, double x) { return heat_kernel(t, x, 2.0); });
  const ComparisonReport ok = compare_to_analytic(st, right, Moment::mean);
  CHECK(ok.rows.size() == xs.size());
  CHECK(ok.max_abs_z < 4.0);
  CHECK(compare_to_analytic(st, wrong, Moment::mean).max_abs_z > 10.0);

  // Self-comparison: the estimate exported as a profile has z = 0 everywhere.
  const ComparisonReport self = compare_to_analytic(st, to_profile(st, Moment::variance), Moment::variance);
  CHECK(self.max_abs_z == 0.0);
  CHECK(self.rows.size() == st.times.size() * g.n_points);

  const Profile off_time = make_profile({0.3}, xs, "x", [](double, double) { return 0.0; });
  const Profile off_grid = make_profile({1.0}, {0.01}, "x", [](double, double) { return 0.0; });
  CHECK_THROWS_AS(compare_to_analytic(st, off_time, Moment::mean), GridMismatchError);
  CHECK_THROWS_AS(compare_to_analytic(st, off_grid, Moment::mean), GridMismatchError);

  std::stringstream ss;
  write_comparison_csv(ss, ok);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t,x,estimate,reference,std_error,z");
  CHECK(summary_json(ok).at("points") == xs.size());

  std::stringstream ps;
  write_profile_csv(ps, to_profile(st, Moment::mean));
  const Profile back = read_profile_csv(ps);
  CHECK(back.method == "mc_ensemble_mean");
  CHECK(back.values == st.mean);
}
