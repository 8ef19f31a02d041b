#include "fracfield/simulate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>

#include "fracfield/mildness.hpp"
#include "fracfield/parallel.hpp"
#include "fracfield/special_fn.hpp"
#include "json_util.hpp"

namespace fracfield {

namespace {

// The FFTW planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fill_cell_noise(const GridSpec& g, std::uint64_t seed, int step, double* out) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(step)));
  std::normal_distribution<double> normal(0.0, std::sqrt(g.dt() * g.dx()));
  for (int j = 0; j < g.n_points; ++j) out[j] = normal(rng);
}

class SpectralEngine {
 public:
  SpectralEngine(const DiffusionParams& p, const KernelSpec& kernel, const GridSpec& g)
      : grid_(g), sigma_(p.sigma), n_(g.n_points), h_(g.n_points / 2 + 1), steps_(g.snapshot_steps()) {
    std::vector<double> xi(h_), a(h_);
    for (int k = 0; k < h_; ++k) xi[k] = xi_step() * k;
    symbol_a_batch(p, kernel, xi, a);

    // Cell-averaged kernel: (1/dt) int_{(l-1)dt}^{l dt} Lambda(s) ds = (F(l dt) - F((l-1) dt)) / dt
    // with F(s) = s^alpha E_{alpha,alpha+1}(-a s^alpha). For alpha = 1 this is the
    // exponential-Euler weight e^{-a(l-1)dt} (1 - e^{-a dt}) / (a dt).
    const int L = g.n_steps;
    const double dt = g.dt();
    table_.assign(static_cast<std::size_t>(L) * h_, 0.0);
    const double alpha = p.alpha;
    parallel_for(static_cast<std::size_t>(h_), worker_count(), [&](std::size_t k) {
      const double ak = a[k];
      if (alpha == 1.0) {
        const double first = ak * dt == 0.0 ? 1.0 : -std::expm1(-ak * dt) / (ak * dt);
        for (int l = 1; l <= L; ++l) table_[(l - 1) * h_ + k] = std::exp(-ak * (l - 1) * dt) * first;
        return;
      }
      const MittagLeffler e({alpha, alpha + 1.0});
      double f_prev = 0.0;
      for (int l = 1; l <= L; ++l) {
        const double sa = std::pow(l * dt, alpha);
        const double f = sa * e(-ak * sa);
        table_[(l - 1) * h_ + k] = (f - f_prev) / dt;
        f_prev = f;
      }
    });

    dirac_.assign(steps_.size() * h_, 0.0);
    if (g.ic == GridSpec::InitialCondition::dirac_spectral) {
      for (std::size_t s = 0; s < steps_.size(); ++s) {
        const double t = steps_[s] * dt;
        // (-1)^k moves the origin of the DFT from x_0 = -L to x = 0.
        for (int k = 0; k < h_; ++k) dirac_[s * h_ + k] = (k % 2 ? -1.0 : 1.0) * mean_hat_from_symbol(alpha, t, a[k]);
      }
    }

    std::lock_guard<std::mutex> lock(planner_mutex());
    auto r = fftw_buffer<double>(n_);
    auto c = fftw_buffer<fftw_complex>(h_);
    forward_ = fftw_plan_dft_r2c_1d(n_, r.get(), c.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(n_, c.get(), r.get(), FFTW_ESTIMATE);
  }

  ~SpectralEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  struct Workspace {
    FftwBuffer<double> real;
    FftwBuffer<fftw_complex> spec;
    std::vector<std::complex<double>> history;  // raw r2c of the cell noise, step-major
    std::vector<std::complex<double>> acc;
  };

  Workspace workspace() const {
    return {fftw_buffer<double>(n_), fftw_buffer<fftw_complex>(h_),
            std::vector<std::complex<double>>(static_cast<std::size_t>(grid_.n_steps) * h_),
            std::vector<std::complex<double>>(h_)};
  }

  const std::vector<int>& steps() const { return steps_; }

  /// Fills out[s] (n_points values) for every snapshot step.
  void run(std::uint64_t seed, Workspace& ws, std::vector<std::vector<double>>& out) const {
    const int last = steps_.empty() ? 0 : steps_.back();
    if (sigma_ != 0.0) {
      for (int m = 0; m < last; ++m) {
        fill_cell_noise(grid_, seed, m, ws.real.get());
        fftw_execute_dft_r2c(forward_, ws.real.get(), ws.spec.get());
        std::complex<double>* row = ws.history.data() + static_cast<std::size_t>(m) * h_;
        for (int k = 0; k < h_; ++k) row[k] = {ws.spec[k][0], ws.spec[k][1]};
      }
    }
    // Inverse transform of the field: Z(x_j) = (2L)^{-1} sum_k e^{i xi_k x_j} Z^(xi_k), the
    // Riemann sum of (2 pi)^{-1} int e^{i xi x} Z^(xi) d xi with d xi = pi / L. The noise
    // transform carries the same (-1)^k phase as e^{i xi_k x_j}, so the two cancel.
    const double scale = 1.0 / (2.0 * grid_.half_length);
    out.resize(steps_.size());
    for (std::size_t s = 0; s < steps_.size(); ++s) {
      const int n = steps_[s];
      std::fill(ws.acc.begin(), ws.acc.end(), std::complex<double>(0.0, 0.0));
      if (sigma_ != 0.0) {
        for (int m = 0; m < n; ++m) {
          const double* w = table_.data() + static_cast<std::size_t>(n - m - 1) * h_;
          const std::complex<double>* dw = ws.history.data() + static_cast<std::size_t>(m) * h_;
          for (int k = 0; k < h_; ++k) ws.acc[k] += w[k] * dw[k];
        }
      }
      for (int k = 0; k < h_; ++k) {
        const std::complex<double> v = (sigma_ * ws.acc[k] + dirac_[s * h_ + k]) * scale;
        ws.spec[k][0] = v.real();
        ws.spec[k][1] = v.imag();
      }
      fftw_execute_dft_c2r(backward_, ws.spec.get(), ws.real.get());
      out[s].assign(ws.real.get(), ws.real.get() + n_);
    }
  }

 private:
  double xi_step() const { return std::numbers::pi / grid_.half_length; }

  GridSpec grid_;
  double sigma_;
  int n_, h_;
  std::vector<int> steps_;
  std::vector<double> table_;  // (lag - 1) * h + k
  std::vector<double> dirac_;  // snapshot * h + k
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

void check_simulable(const DiffusionParams& params, const KernelSpec& kernel, const GridSpec& grid, bool force) {
  params.validate();
  kernel.validate();
  grid.validate();
  if (params.dim != 1) throw DomainError("simulation is one-dimensional: dim must be 1");
  const MildnessVerdict v = classify(params);
  if (!v.mild && !force) throw NotMildError("parameters are not mild (" + to_string(v.rule) + "); use force to simulate anyway");
}

// Running moments of one block of samples; combined with Chan et al.'s pairwise update.
struct Moments {
  double n = 0.0;
  std::vector<double> mean, m2;

  void add(const std::vector<std::vector<double>>& snaps) {
    n += 1.0;
    std::size_t i = 0;
    for (const auto& row : snaps) {
      for (double v : row) {
        const double d = v - mean[i];
        mean[i] += d / n;
        m2[i] += d * (v - mean[i]);
        ++i;
      }
    }
  }
};

Moments combine(const Moments& a, const Moments& b) {
  if (a.n == 0.0) return b;
  if (b.n == 0.0) return a;
  Moments r;
  r.n = a.n + b.n;
  r.mean.resize(a.mean.size());
  r.m2.resize(a.m2.size());
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    const double d = b.mean[i] - a.mean[i];
    r.mean[i] = a.mean[i] + d * (b.n / r.n);
    r.m2[i] = a.m2[i] + b.m2[i] + d * d * (a.n * b.n / r.n);
  }
  return r;
}

constexpr int kBlock = 64;

}  // namespace

void GridSpec::validate() const {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw DomainError("grid: half_length must be positive");
  if (n_points < 64 || !is_power_of_two(n_points)) throw DomainError("grid: n_points must be a power of two >= 64");
  if (n_steps < 16) throw DomainError("grid: n_steps must be >= 16");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("grid: t_end must be positive");
  if (n_snapshots < 1) throw DomainError("grid: n_snapshots must be >= 1");
}

std::vector<double> GridSpec::positions() const {
  std::vector<double> x(n_points);
  for (int j = 0; j < n_points; ++j) x[j] = position(j);
  return x;
}

std::vector<int> GridSpec::snapshot_steps() const {
  std::vector<int> steps;
  for (int j = 1; j <= n_snapshots; ++j) {
    const int n = std::max(1, static_cast<int>(std::lround(static_cast<double>(n_steps) * j / n_snapshots)));
    if (steps.empty() || n > steps.back()) steps.push_back(n);
  }
  return steps;
}

std::string to_string(GridSpec::InitialCondition ic) {
  return ic == GridSpec::InitialCondition::dirac_spectral ? "dirac_spectral" : "zero";
}

nlohmann::json to_json(const GridSpec& g) {
  return {{"half_length", g.half_length}, {"n_points", g.n_points}, {"n_steps", g.n_steps},
          {"t_end", g.t_end},             {"ic", to_string(g.ic)},  {"n_snapshots", g.n_snapshots}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
  using detail::get_or;
  detail::reject_unknown_keys(j, "grid", {"half_length", "n_points", "n_steps", "t_end", "ic", "n_snapshots"});
  GridSpec g;
  g.half_length = get_or(j, "half_length", g.half_length, "grid");
  g.n_points = get_or(j, "n_points", g.n_points, "grid");
  g.n_steps = get_or(j, "n_steps", g.n_steps, "grid");
  g.t_end = get_or(j, "t_end", g.t_end, "grid");
  g.n_snapshots = get_or(j, "n_snapshots", g.n_snapshots, "grid");
  const std::string ic = get_or<std::string>(j, "ic", to_string(g.ic), "grid");
  if (ic == "dirac_spectral") {
    g.ic = GridSpec::InitialCondition::dirac_spectral;
  } else if (ic == "zero") {
    g.ic = GridSpec::InitialCondition::zero;
  } else {
    throw ConfigError("grid.ic: expected \"dirac_spectral\" or \"zero\"");
  }
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return g;
}

bool domain_is_adequate(const DiffusionParams& p, const GridSpec& g) {
  return g.half_length >= 10.0 * std::sqrt(std::max(p.lambda, 1e-300) * std::pow(g.t_end, p.alpha));
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::complex<double>> noise_increments(const GridSpec& grid, std::uint64_t seed, int step) {
  grid.validate();
  if (step < 0 || step >= grid.n_steps) throw DomainError("noise_increments: step out of range");
  const int n = grid.n_points;
  const int h = n / 2 + 1;
  auto r = fftw_buffer<double>(n);
  auto c = fftw_buffer<fftw_complex>(h);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, r.get(), c.get(), FFTW_ESTIMATE);
  }
  fill_cell_noise(grid, seed, step, r.get());
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<std::complex<double>> out(n);
  for (int k = 0; k < h; ++k) {
    // sum_j e^{-i xi_k x_j} = (-1)^k sum_j e^{-2 pi i jk/n} because xi_k x_0 = -pi k.
    const double sign = k % 2 ? -1.0 : 1.0;
    out[k] = {sign * c[k][0], sign * c[k][1]};
  }
  for (int k = h; k < n; ++k) out[k] = std::conj(out[n - k]);
  return out;
}

SamplePath simulate_path(const DiffusionParams& params, const KernelSpec& kernel, const GridSpec& grid,
                         std::uint64_t seed, bool force) {
  check_simulable(params, kernel, grid, force);
  const SpectralEngine engine(params, kernel, grid);
  auto ws = engine.workspace();
  std::vector<std::vector<double>> fields;
  engine.run(seed, ws, fields);
  SamplePath path{grid, {}, seed, !classify(params).mild};
  for (std::size_t s = 0; s < fields.size(); ++s) {
    path.snapshots.push_back({engine.steps()[s] * grid.dt(), std::move(fields[s])});
  }
  return path;
}

EnsembleStats ensemble_stats(const DiffusionParams& params, const KernelSpec& kernel, const GridSpec& grid,
                             int n_samples, std::uint64_t master_seed, bool force) {
  if (n_samples < 2) throw DomainError("ensemble_stats requires at least 2 samples");
  check_simulable(params, kernel, grid, force);
  const SpectralEngine engine(params, kernel, grid);
  const std::size_t width = engine.steps().size() * grid.n_points;
  const std::size_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<Moments> blocks(n_blocks);

  parallel_for(n_blocks, worker_count(), [&](std::size_t b) {
    auto ws = engine.workspace();
    Moments& acc = blocks[b];
    acc.mean.assign(width, 0.0);
    acc.m2.assign(width, 0.0);
    std::vector<std::vector<double>> fields;
    const int end = std::min<int>(n_samples, static_cast<int>((b + 1) * kBlock));
    for (int i = static_cast<int>(b * kBlock); i < end; ++i) {
      engine.run(mix_seed(master_seed, static_cast<std::uint64_t>(i)), ws, fields);
      acc.add(fields);
    }
  });

  while (blocks.size() > 1) {
    std::vector<Moments> next;
    for (std::size_t i = 0; i + 1 < blocks.size(); i += 2) next.push_back(combine(blocks[i], blocks[i + 1]));
    if (blocks.size() % 2) next.push_back(std::move(blocks.back()));
    blocks = std::move(next);
  }

  EnsembleStats st;
  st.grid = grid;
  st.n_samples = n_samples;
  st.master_seed = master_seed;
  st.forced = !classify(params).mild;
  for (int n : engine.steps()) st.times.push_back(n * grid.dt());
  st.mean = std::move(blocks.front().mean);
  st.variance = std::move(blocks.front().m2);
  for (double& v : st.variance) v = std::max(0.0, v / (n_samples - 1));
  return st;
}

Profile to_profile(const SamplePath& path) {
  Profile p;
  p.positions = path.grid.positions();
  p.method = "mc_sample";
  for (const Snapshot& s : path.snapshots) {
    p.times.push_back(s.t);
    p.values.insert(p.values.end(), s.values.begin(), s.values.end());
  }
  p.meta = {{"seed", path.seed}, {"forced", path.forced}};
  return p;
}

Profile to_profile(const EnsembleStats& stats, Moment which) {
  Profile p;
  p.times = stats.times;
  p.positions = stats.grid.positions();
  p.method = which == Moment::mean ? "mc_ensemble_mean" : "mc_ensemble_var";
  p.values = which == Moment::mean ? stats.mean : stats.variance;
  p.meta = {{"n_samples", stats.n_samples}, {"master_seed", stats.master_seed}, {"forced", stats.forced}};
  return p;
}

ComparisonReport compare_to_analytic(const EnsembleStats& stats, const Profile& reference, Moment which) {
  const GridSpec& g = stats.grid;
  std::vector<std::size_t> snap;
  for (double t : reference.times) {
    std::size_t found = stats.times.size();
    for (std::size_t s = 0; s < stats.times.size(); ++s) {
      if (std::fabs(stats.times[s] - t) <= 1e-9 * std::max(1.0, t)) found = s;
    }
    if (found == stats.times.size()) throw GridMismatchError("reference time " + std::to_string(t) + " is not a snapshot time");
    snap.push_back(found);
  }
  std::vector<int> col;
  for (double x : reference.positions) {
    const long j = std::lround((x + g.half_length) / g.dx());
    if (j < 0 || j >= g.n_points || std::fabs(g.position(static_cast<int>(j)) - x) > 1e-9 * g.dx()) {
      throw GridMismatchError("reference position " + std::to_string(x) + " is not a grid point");
    }
    col.push_back(static_cast<int>(j));
  }

  ComparisonReport rep;
  rep.moment = which;
  const double n = stats.n_samples;
  double sum = 0.0;
  for (std::size_t i = 0; i < snap.size(); ++i) {
    for (std::size_t j = 0; j < col.size(); ++j) {
      const double var = stats.variance_at(snap[i], col[j]);
      const double est = which == Moment::mean ? stats.mean_at(snap[i], col[j]) : var;
      const double se = which == Moment::mean ? std::sqrt(var / n) : var * std::sqrt(2.0 / (n - 1.0));
      const double ref = reference.at(i, j);
      const double diff = est - ref;
      double z = 0.0;
      if (se > 0.0) {
        z = diff / se;
      } else if (diff != 0.0) {
        z = std::copysign(std::numeric_limits<double>::infinity(), diff);
      }
      rep.rows.push_back({reference.times[i], reference.positions[j], est, ref, se, z});
      rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(z));
      sum += std::fabs(z);
    }
  }
  if (!rep.rows.empty()) rep.mean_abs_z = sum / rep.rows.size();
  return rep;
}

void write_comparison_csv(std::ostream& os, const ComparisonReport& report) {
  os << "t,x,estimate,reference,std_error,z\n";
  char buf[160];
  for (const ZScoreRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.x, r.estimate, r.reference,
                  r.std_error, r.z);
    os << buf;
  }
}

nlohmann::json summary_json(const ComparisonReport& report) {
  return {{"moment", report.moment == Moment::mean ? "mean" : "variance"},
          {"points", report.rows.size()},
          {"max_abs_z", report.max_abs_z},
          {"mean_abs_z", report.mean_abs_z}};
}

}  // namespace fracfield
