#pragma once

// Spectral Monte Carlo for the one-dimensional stochastic equation on a
// periodic box [-L, L]: the Dirac mean is propagated exactly in Fourier space
// and the stochastic convolution is a discretized Wiener integral against the
// kernel Lambda(s, xi) = s^{alpha-1} E_{alpha,alpha}(-a(xi) s^alpha).

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "fracfield/analytic_fields.hpp"
#include "fracfield/symbol.hpp"

namespace fracfield {

struct GridSpec {
  enum class InitialCondition { dirac_spectral, zero };

  double half_length = 20.0;  // L
  int n_points = 1024;        // power of two >= 64
  int n_steps = 256;          // >= 16
  double t_end = 1.0;
  InitialCondition ic = InitialCondition::dirac_spectral;
  int n_snapshots = 8;  // output times t_end * j / n_snapshots, j = 1..n_snapshots, rounded to steps

  void validate() const;

  double dx() const { return 2.0 * half_length / n_points; }
  double dt() const { return t_end / n_steps; }
  /// x_j = -L + j dx, j = 0..n_points-1.
  double position(int j) const { return -half_length + j * dx(); }
  std::vector<double> positions() const;
  /// Distinct step indices n (1..n_steps) at which snapshots are taken, increasing.
  std::vector<int> snapshot_steps() const;
};

std::string to_string(GridSpec::InitialCondition ic);
nlohmann::json to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);

/// The box is wide enough when L >= 10 sqrt(lambda t_end^alpha); below that the
/// periodic images of the Dirac mean are no longer negligible.
bool domain_is_adequate(const DiffusionParams& p, const GridSpec& g);

/// Per-sample seed derivation (splitmix64 finaliser of master + golden-ratio * (index + 1)).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Fourier transform of the real-space cell increments of step n:
/// dW_k = sum_j exp(-i xi_k x_j) dB_j with dB_j ~ N(0, dt dx) i.i.d.
/// Entry k holds frequency xi_k = pi k / L for k < n/2 and xi_{k-n} otherwise
/// (FFT order); entries k and n-k are exact conjugates.
std::vector<std::complex<double>> noise_increments(const GridSpec& grid, std::uint64_t seed, int step);

struct Snapshot {
  double t;
  std::vector<double> values;  // n_points entries at positions()
};

struct SamplePath {
  GridSpec grid;
  std::vector<Snapshot> snapshots;
  std::uint64_t seed = 0;
  bool forced = false;  // simulated although the parameters are not mild
};

/// Throws NotMildError for non-mild parameters unless force is set; dim must be 1.
SamplePath simulate_path(const DiffusionParams& params, const KernelSpec& kernel, const GridSpec& grid,
                         std::uint64_t seed, bool force = false);

struct EnsembleStats {
  GridSpec grid;
  int n_samples = 0;
  std::vector<double> times;     // snapshot times
  std::vector<double> mean;      // row-major snapshot x position
  std::vector<double> variance;  // unbiased
  std::uint64_t master_seed = 0;
  bool forced = false;

  double mean_at(std::size_t i, std::size_t j) const { return mean[i * grid.n_points + j]; }
  double variance_at(std::size_t i, std::size_t j) const { return variance[i * grid.n_points + j]; }
};

/// Sample i uses mix_seed(master_seed, i). Samples are reduced in blocks of 64
/// combined along a fixed pairwise tree, so the result does not depend on the
/// number of workers.
EnsembleStats ensemble_stats(const DiffusionParams& params, const KernelSpec& kernel, const GridSpec& grid,
                             int n_samples, std::uint64_t master_seed, bool force = false);

enum class Moment { mean, variance };

/// Profiles with method mc_sample, mc_ensemble_mean or mc_ensemble_var.
Profile to_profile(const SamplePath& path);
Profile to_profile(const EnsembleStats& stats, Moment which);

struct ZScoreRow {
  double t, x;
  double estimate, reference, std_error, z;
};

struct ComparisonReport {
  Moment moment = Moment::mean;
  std::vector<ZScoreRow> rows;
  double max_abs_z = 0.0;
  double mean_abs_z = 0.0;
};

/// z = (estimate - reference) / standard error at every reference point. The
/// standard error is sqrt(var / n) for the mean and var sqrt(2 / (n - 1)) for
/// the variance (Gaussian field). Reference times must be snapshot times and
/// reference positions grid positions; GridMismatchError otherwise.
ComparisonReport compare_to_analytic(const EnsembleStats& stats, const Profile& reference, Moment which);

/// CSV `t,x,estimate,reference,std_error,z`.
void write_comparison_csv(std::ostream& os, const ComparisonReport& report);
nlohmann::json summary_json(const ComparisonReport& report);

}  // namespace fracfield
