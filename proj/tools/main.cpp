#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace fracfield::cli;

namespace {

void add_param_flags(CLI::App* app, ParamFlags& f) {
  app->add_option("--config", f.config_path, "JSON run configuration (\"version\": 1)");
  app->add_option("--alpha", f.alpha, "time-fractional order, 0 < alpha < 2");
  app->add_option("--lambda", f.lambda, "local diffusion coefficient");
  app->add_option("--mu", f.mu, "nonlocal jump rate");
  app->add_option("--sigma", f.sigma, "noise amplitude");
  app->add_option("--dim", f.dim, "spatial dimension");
  app->add_option("--kernel", f.kernel, "jump kernel: gaussian or uniform");
  app->add_option("--kernel-width", f.kernel_width, "gaussian scale or uniform half-width");
  app->add_option("--out", f.out, "output file (default stdout)");
  app->add_option("--format", f.format, "csv or json");
}

void add_profile_flags(CLI::App* app, ProfileOptions& o) {
  add_param_flags(app, o.flags);
  app->add_option("--method", o.method, "evaluation route");
  app->add_option("--t", o.t, "single time");
  app->add_option("--t-list", o.t_list, "comma-separated times");
  app->add_option("--x", o.x, "single position");
  app->add_option("--x-range", o.x_range, "positions a:b:n");
  app->add_option("--preset", o.preset, "figure grid preset");
  app->add_option("--cross-check", o.cross_check, "write a cross-check CSV against --cross-method here");
  app->add_option("--cross-method", o.cross_method, "second route for the cross-check");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional stochastic diffusion: special functions, mildness, analytic fields, Monte Carlo"};
  app.require_subcommand(1);

  MlOptions ml;
  auto* c_ml = app.add_subcommand("ml", "evaluate E_{alpha,beta} on a grid, with optional bounds, asymptotics or zeros");
  c_ml->add_option("--alpha", ml.alpha, "order alpha > 0")->required();
  c_ml->add_option("--beta", ml.beta, "order beta > 0")->capture_default_str();
  c_ml->add_option("--x-range", ml.x_range, "arguments a:b:n");
  c_ml->add_flag("--bounds", ml.bounds, "add the two-sided bracket on the negative axis");
  c_ml->add_flag("--asymptotic", ml.asymptotic, "add the leading large-|x| form on the negative axis");
  c_ml->add_flag("--zeros", ml.zeros, "list the real zeros of E_alpha instead");
  c_ml->add_option("--interval", ml.interval, "zero search interval a:b")->capture_default_str();
  c_ml->add_option("--zero-tol", ml.zero_tol, "bisection tolerance")->capture_default_str();
  c_ml->add_option("--out", ml.out, "output file (default stdout)");

  MildOptions mild;
  auto* c_mild = app.add_subcommand("mild", "classify mildness; exit 0 mild, 3 not mild");
  add_param_flags(c_mild, mild.flags);
  c_mild->add_flag("--probe", mild.probe, "also run the numerical integrability probes");
  c_mild->add_option("--t", mild.t, "probe time")->capture_default_str();
  c_mild->add_option("--k-list", mild.k_list, "frequency cutoffs, comma-separated");
  c_mild->add_option("--eps-list", mild.eps_list, "lower time cutoffs, comma-separated");
  c_mild->add_option("--tol", mild.tol, "relative refinement tolerance")->capture_default_str();

  ProfileOptions mean;
  auto* c_mean = app.add_subcommand("mean", "mean field profile (methods: fourier, mainardi, heat_kernel, half_closed)");
  add_profile_flags(c_mean, mean);

  ProfileOptions var;
  auto* c_var = app.add_subcommand("variance", "variance profile (methods: quadrature, series, closed)");
  add_profile_flags(c_var, var);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "spectral Monte Carlo; writes snapshots.csv, stats.csv, metadata.json");
  add_param_flags(c_sim, sim.flags);
  c_sim->add_option("--half-length", sim.half_length, "box half-length L");
  c_sim->add_option("--n-points", sim.n_points, "grid points (power of two)");
  c_sim->add_option("--n-steps", sim.n_steps, "time steps");
  c_sim->add_option("--t-end", sim.t_end, "final time");
  c_sim->add_option("--snapshots", sim.snapshots, "number of output times");
  c_sim->add_option("--ic", sim.ic, "dirac_spectral or zero");
  c_sim->add_option("--seed", sim.seed, "64-bit seed");
  c_sim->add_option("--samples", sim.samples, "ensemble size (0: single path only)")->capture_default_str();
  c_sim->add_flag("--force", sim.force, "simulate non-mild parameters (labelled in the metadata)");
  c_sim->add_flag("--compare", sim.compare, "compare the ensemble with the analytic mean (and variance at alpha = 1)");
  c_sim->add_option("--out-dir", sim.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  if (c_ml->parsed()) return cmd_ml(ml, std::cout, std::cerr);
  if (c_mild->parsed()) return cmd_mild(mild, std::cout, std::cerr);
  if (c_mean->parsed()) return cmd_mean(mean, std::cout, std::cerr);
  if (c_var->parsed()) return cmd_variance(var, std::cout, std::cerr);
  if (c_sim->parsed()) return cmd_simulate(sim, std::cout, std::cerr);
  return kUsage;
}
