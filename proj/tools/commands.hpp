#pragma once

// Subcommand implementations behind the `fracfield` executable. Each returns the
// process exit code; diagnostics go to the error stream as a single line.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace fracfield::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNotMild = 3, kResonance = 4 };

/// "a:b:n" -> n equally spaced points from a to b (n = 1 gives {a}).
std::vector<double> parse_range(const std::string& spec);
/// "0.5,1,2" -> {0.5, 1, 2}.
std::vector<double> parse_list(const std::string& spec);

/// Command-line overrides of the run configuration; unset fields keep the config value.
struct ParamFlags {
  std::string config_path;
  std::optional<double> alpha, lambda, mu, sigma;
  std::optional<int> dim;
  std::optional<std::string> kernel;
  std::optional<double> kernel_width;
  std::optional<std::string> out, format;

  RunConfig resolve() const;
};

struct MlOptions {
  double alpha = 1.0;
  double beta = 1.0;
  std::string x_range;
  bool bounds = false;
  bool asymptotic = false;
  bool zeros = false;
  std::string interval = "-30:0";
  double zero_tol = 1e-10;
  std::string out;
};
int cmd_ml(const MlOptions& o, std::ostream& out, std::ostream& err);

struct MildOptions {
  ParamFlags flags;
  bool probe = false;
  double t = 1.0;
  std::string k_list, eps_list;
  double tol = 0.05;
};
int cmd_mild(const MildOptions& o, std::ostream& out, std::ostream& err);

struct ProfileOptions {
  ParamFlags flags;
  std::string method;
  std::string t_list, x_range;
  std::optional<double> t, x;
  std::string preset;
  std::string cross_check;   // path for the cross-check CSV
  std::string cross_method;  // method to compare against
};
int cmd_mean(const ProfileOptions& o, std::ostream& out, std::ostream& err);
int cmd_variance(const ProfileOptions& o, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  ParamFlags flags;
  std::optional<double> half_length, t_end;
  std::optional<int> n_points, n_steps, snapshots;
  std::optional<std::string> ic;
  std::optional<std::uint64_t> seed;
  int samples = 0;
  bool force = false;
  bool compare = false;
  std::string out_dir = ".";
};
int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);

}  // namespace fracfield::cli
