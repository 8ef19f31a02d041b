#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "fracfield/analytic_fields.hpp"
#include "fracfield/errors.hpp"
#include "fracfield/mildness.hpp"
#include "fracfield/parallel.hpp"
#include "fracfield/simulate.hpp"
#include "fracfield/special_fn.hpp"

namespace fracfield::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

// Writes to the named file, or to `fallback` when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

nlohmann::json profile_json(const Profile& p) {
  return {{"method", p.method}, {"times", p.times}, {"positions", p.positions}, {"values", p.values}, {"meta", p.meta}};
}

void write_profile(const Profile& p, const RunConfig& cfg, std::ostream& out) {
  Sink sink(cfg.output.path, out);
  if (cfg.output.format == "json") {
    *sink << profile_json(p).dump(2) << "\n";
  } else {
    write_profile_csv(*sink, p);
  }
}

// Maps library exceptions onto exit codes with a one-line diagnostic.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ResonanceError& e) {
    err << "error: " << e.what() << "\n";
    return kResonance;
  } catch (const NotMildError& e) {
    err << "error: " << e.what() << "\n";
    return kNotMild;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

void apply_flags(const ParamFlags& f, RunConfig& c) {
  if (f.alpha) c.params.alpha = *f.alpha;
  if (f.lambda) c.params.lambda = *f.lambda;
  if (f.mu) c.params.mu = *f.mu;
  if (f.sigma) c.params.sigma = *f.sigma;
  if (f.dim) c.params.dim = *f.dim;
  if (f.kernel || f.kernel_width) {
    const std::string type = f.kernel.value_or(to_string(c.kernel.type));
    const double width = f.kernel_width.value_or(c.kernel.width);
    if (type == "gaussian") {
      c.kernel = KernelSpec::gaussian(width);
    } else if (type == "uniform") {
      c.kernel = KernelSpec::uniform(width);
    } else {
      throw ConfigError("--kernel must be gaussian or uniform");
    }
  }
  if (f.out) c.output.path = *f.out;
  if (f.format) c.output.format = *f.format;
}

RunConfig base_config(const ParamFlags& f) { return f.config_path.empty() ? RunConfig{} : load_config(f.config_path); }

struct ProfileGrid {
  std::vector<double> times, positions;
};

ProfileGrid profile_grid(const ProfileOptions& o, ProfileGrid defaults) {
  ProfileGrid g = std::move(defaults);
  if (o.t) g.times = {*o.t};
  if (!o.t_list.empty()) g.times = parse_list(o.t_list);
  if (o.x) g.positions = {*o.x};
  if (!o.x_range.empty()) g.positions = parse_range(o.x_range);
  if (g.times.empty()) throw ConfigError("no times given (use --t or --t-list)");
  if (g.positions.empty()) throw ConfigError("no positions given (use --x or --x-range)");
  return g;
}

const std::vector<double> kFigureTimes = {0.25, 0.5, 1.0, 2.0};

std::function<double(double, double)> mean_method(const std::string& m, const RunConfig& c) {
  const DiffusionParams p = c.params;
  const KernelSpec k = c.kernel;
  const QuadSpec q = c.quad;
  if (m == "fourier") return [=](double t, double x) { return mean_fourier(p, k, t, x, q); };
  if (m == "mainardi") return [=](double t, double x) { return mean_mainardi(t, x, p.alpha, p.lambda); };
  if (m == "heat_kernel") return [=](double t, double x) { return heat_kernel(t, x, p.lambda); };
  if (m == "half_closed") return [=](double t, double x) { return mean_half_closed(t, x, p.lambda); };
  throw ConfigError("unknown mean method '" + m + "' (fourier, mainardi, heat_kernel, half_closed)");
}

std::pair<std::string, std::function<double(double, double)>> variance_method(const std::string& m, const RunConfig& c) {
  const DiffusionParams p = c.params;
  const QuadSpec q = c.quad;
  const VarianceSeriesSpec s = c.series;
  if (m == "quadrature") {
    if (p.mu != 0.0) throw DomainError("variance quadrature is implemented for mu = 0");
    if (p.alpha == 1.0) {
      return {"var_quadrature", [=](double t, double x) { return var_classical_quadrature(t, x, p.lambda, p.sigma, q); }};
    }
    return {"var_quadrature", [=](double t, double x) { return var_frac_quadrature(t, x, p.alpha, p.lambda, p.sigma, q); }};
  }
  if (m == "series") {
    return {"var_series", [=](double t, double x) { return var_series(t, x, p.alpha, p.lambda, p.sigma, s).value; }};
  }
  if (m == "closed") {
    if (p.alpha != 1.0) throw DomainError("the closed-form variance is the alpha = 1 case");
    return {"var_closed", [=](double t, double x) { return var_classical_closed(t, x, p.lambda, p.sigma); }};
  }
  throw ConfigError("unknown variance method '" + m + "' (quadrature, series, closed)");
}

void emit_cross_check(const ProfileOptions& o, const Profile& main, const ProfileGrid& g,
                      const std::string& label, const std::function<double(double, double)>& f) {
  if (o.cross_check.empty()) return;
  const Profile other = make_profile(g.times, g.positions, label, f);
  std::ofstream os(o.cross_check);
  if (!os) throw ConfigError("cannot write '" + o.cross_check + "'");
  write_cross_check_csv(os, cross_check(main, other));
}

}  // namespace

std::vector<double> parse_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ConfigError("range '" + spec + "' must look like a:b:n");
  const double a = parse_number(parts[0], "range start");
  const double b = parse_number(parts[1], "range end");
  const double nd = parse_number(parts[2], "range count");
  if (!(nd >= 1.0) || nd != std::floor(nd)) throw ConfigError("range count must be a positive integer");
  const int n = static_cast<int>(nd);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  if (n > 1) v.back() = b;
  return v;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> v;
  for (const std::string& s : split(spec, ',')) v.push_back(parse_number(s, "list entry"));
  if (v.empty()) throw ConfigError("empty list");
  return v;
}

RunConfig ParamFlags::resolve() const {
  RunConfig c = base_config(*this);
  apply_flags(*this, c);
  c.validate();
  return c;
}

int cmd_ml(const MlOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MLOrder order{o.alpha, o.beta};
    order.validate();
    Sink sink(o.out, out);
    if (o.zeros) {
      const auto iv = split(o.interval, ':');
      if (iv.size() != 2) throw ConfigError("--interval must look like a:b");
      const double lo = parse_number(iv[0], "interval start");
      const double hi = parse_number(iv[1], "interval end");
      if (!(lo < hi)) throw ConfigError("--interval needs a < b");
      const ZeroList z = ml_real_zeros(o.alpha, lo, o.zero_tol);
      *sink << "index,zero\n";
      int i = 0;
      for (double r : z.zeros) {
        if (r <= hi) *sink << i++ << "," << fmt(r) << "\n";
      }
      return int(kOk);
    }
    if (o.x_range.empty()) throw ConfigError("--x-range is required unless --zeros is given");
    const std::vector<double> xs = parse_range(o.x_range);

    // Brackets are stated for E_alpha, Gamma(alpha) E_{alpha,alpha} and Gamma(beta) E_{alpha,beta} on the negative axis.
    std::function<Bracket(double)> bracket;
    if (o.bounds) {
      if (o.beta == 1.0) {
        bracket = [&](double x) { return ml_bounds(o.alpha, x); };
      } else if (o.beta == o.alpha) {
        const double g = gamma_fn(o.alpha);
        bracket = [&, g](double x) { auto b = ml_bounds_alpha_alpha(o.alpha, x); return Bracket{b.lower / g, b.upper / g}; };
      } else {
        const double g = gamma_fn(o.beta);
        bracket = [&, g](double x) { auto b = ml_bounds_beta(o.alpha, o.beta, x); return Bracket{b.lower / g, b.upper / g}; };
      }
      bracket(0.0);  // surfaces a domain error before any output
    }
    if (o.asymptotic && o.alpha == 1.0) throw DomainError("no algebraic asymptotic form at alpha = 1 (E_1 = exp)");

    const MittagLeffler e(order);
    *sink << "x,value" << (o.bounds ? ",lower,upper" : "") << (o.asymptotic ? ",asymptotic" : "") << "\n";
    for (double x : xs) {
      *sink << fmt(x) << "," << fmt(e(x));
      if (o.bounds) {
        if (x <= 0.0) {
          const Bracket b = bracket(-x);
          *sink << "," << fmt(b.lower) << "," << fmt(b.upper);
        } else {
          *sink << ",,";
        }
      }
      if (o.asymptotic) {
        *sink << ",";
        if (x < 0.0) *sink << fmt(ml_asymptotic_neg(order, -x));
      }
      *sink << "\n";
    }
    return int(kOk);
  });
}

int cmd_mild(const MildOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = o.flags.resolve();
    const MildnessVerdict v = classify(c.params);
    nlohmann::json doc = {{"params", to_json(c.params)}, {"verdict", to_json(v)}};
    if (o.probe) {
      ProbeSchedule sched;
      if (!o.k_list.empty()) sched.K = parse_list(o.k_list);
      if (!o.eps_list.empty()) sched.eps = parse_list(o.eps_list);
      sched.tol = o.tol;
      doc["kernel"] = to_json(c.kernel);
      doc["probe_t"] = o.t;
      doc["probes"] = {{"m1", to_json(probe_m1(c.params, c.kernel, o.t, sched, c.quad))},
                       {"m2", to_json(probe_m2(c.params, c.kernel, o.t, sched, c.quad))}};
    }
    Sink sink(c.output.path, out);
    *sink << doc.dump(2) << "\n";
    return int(v.mild ? kOk : kNotMild);
  });
}

int cmd_mean(const ProfileOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig c = base_config(o.flags);
    ProfileGrid defaults;
    std::string method = "fourier";
    std::string cross = o.cross_method;
    if (o.preset == "fig1" || o.preset == "fig3") {
      c.params = {o.preset == "fig1" ? 1.0 : 0.6, 1.0, 0.0, 1.0, 1};
      defaults = {kFigureTimes, parse_range("-5:5:101")};
      if (cross.empty()) cross = o.preset == "fig1" ? "heat_kernel" : "mainardi";
    } else if (!o.preset.empty()) {
      throw ConfigError("mean presets are fig1 (alpha = 1) and fig3 (alpha = 0.6)");
    }
    if (!o.method.empty()) method = o.method;
    apply_flags(o.flags, c);
    c.validate();
    const ProfileGrid g = profile_grid(o, defaults);
    Profile p = make_profile(g.times, g.positions, method, mean_method(method, c));
    p.meta = {{"params", to_json(c.params)}, {"kernel", to_json(c.kernel)}};
    if (!o.preset.empty()) p.meta["preset"] = o.preset;
    if (!cross.empty()) emit_cross_check(o, p, g, cross, mean_method(cross, c));
    write_profile(p, c, out);
    return int(kOk);
  });
}

int cmd_variance(const ProfileOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig c = base_config(o.flags);
    ProfileGrid defaults;
    std::string method = "quadrature";
    std::string cross = o.cross_method;
    if (o.preset == "fig4") {
      c.params.alpha = 0.6;
      apply_flags(o.flags, c);
      c.validate();
      Sink sink(c.output.path, out);
      *sink << "m,beta_m\n";
      for (int m = 0; m <= 30; ++m) *sink << m << "," << fmt(beta_coeff(m, c.params.alpha)) << "\n";
      return int(kOk);
    }
    if (o.preset == "fig2") {
      c.params = {1.0, 1.0, 0.0, 1.0, 1};
      defaults = {kFigureTimes, parse_range("-5:5:41")};
      if (cross.empty()) cross = "closed";
    } else if (o.preset == "fig5") {
      c.params = {0.6, 1.0, 0.0, 1.0, 1};
      defaults = {{0.5, 1.0, 2.0}, parse_range("0:3:7")};
      if (cross.empty()) cross = "series";
    } else if (!o.preset.empty()) {
      throw ConfigError("variance presets are fig2, fig4 and fig5");
    }
    if (!o.method.empty()) method = o.method;
    apply_flags(o.flags, c);
    c.validate();
    const ProfileGrid g = profile_grid(o, defaults);
    auto [label, f] = variance_method(method, c);
    Profile p = make_profile(g.times, g.positions, label, f);
    p.meta = {{"params", to_json(c.params)}};
    if (!o.preset.empty()) p.meta["preset"] = o.preset;
    if (!cross.empty()) {
      auto [cross_label, cf] = variance_method(cross, c);
      emit_cross_check(o, p, g, cross_label, cf);
    }
    write_profile(p, c, out);
    return int(kOk);
  });
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig c = base_config(o.flags);
    apply_flags(o.flags, c);
    if (o.half_length) c.grid.half_length = *o.half_length;
    if (o.t_end) c.grid.t_end = *o.t_end;
    if (o.n_points) c.grid.n_points = *o.n_points;
    if (o.n_steps) c.grid.n_steps = *o.n_steps;
    if (o.snapshots) c.grid.n_snapshots = *o.snapshots;
    if (o.ic) {
      if (*o.ic == "dirac_spectral") {
        c.grid.ic = GridSpec::InitialCondition::dirac_spectral;
      } else if (*o.ic == "zero") {
        c.grid.ic = GridSpec::InitialCondition::zero;
      } else {
        throw ConfigError("--ic must be dirac_spectral or zero");
      }
    }
    if (o.seed) c.seed = *o.seed;
    c.validate();
    if (o.samples == 1 || o.samples < 0) throw ConfigError("--samples must be 0 (single path) or at least 2");

    const MildnessVerdict verdict = classify(c.params);
    if (!verdict.mild && !o.force) {
      throw NotMildError("parameters are not mild (" + to_string(verdict.rule) + "); pass --force to simulate anyway");
    }
    const std::filesystem::path dir = o.out_dir;
    std::filesystem::create_directories(dir);
    auto open = [&](const std::string& name) {
      std::ofstream os(dir / name);
      if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
      return os;
    };

    const auto start = std::chrono::steady_clock::now();
    const SamplePath path = simulate_path(c.params, c.kernel, c.grid, c.seed, o.force);
    {
      auto os = open("snapshots.csv");
      write_profile_csv(os, to_profile(path));
    }

    nlohmann::json meta = {{"config", to_json(c)},
                           {"verdict", to_json(verdict)},
                           {"forced", path.forced},
                           {"domain_adequate", domain_is_adequate(c.params, c.grid)},
                           {"sample_seed", c.seed},
                           {"snapshot_times", nlohmann::json::array()}};
    for (const Snapshot& s : path.snapshots) meta["snapshot_times"].push_back(s.t);

    if (o.samples >= 2) {
      const EnsembleStats st = ensemble_stats(c.params, c.kernel, c.grid, o.samples, c.seed, o.force);
      {
        auto os = open("stats.csv");
        write_profile_csv(os, to_profile(st, Moment::mean));
        // Second block without a repeated header so the file stays one table.
        std::stringstream var;
        write_profile_csv(var, to_profile(st, Moment::variance));
        std::string line;
        std::getline(var, line);
        os << var.rdbuf();
      }
      meta["ensemble"] = {{"n_samples", st.n_samples},
                          {"master_seed", st.master_seed},
                          {"sample_seeds", "mix_seed(master_seed, i), splitmix64 finaliser"}};

      if (o.compare) {
        // Final snapshot, every fourth grid point with |x| <= L/2.
        std::vector<double> xs;
        for (int j = 0; j < c.grid.n_points; j += 4) {
          if (std::fabs(c.grid.position(j)) <= 0.5 * c.grid.half_length) xs.push_back(c.grid.position(j));
        }
        const std::vector<double> tf = {st.times.back()};
        const bool dirac = c.grid.ic == GridSpec::InitialCondition::dirac_spectral;
        const Profile mean_ref = make_profile(tf, xs, dirac ? "fourier" : "zero", [&](double t, double x) {
          return dirac ? mean_fourier(c.params, c.kernel, t, x, c.quad) : 0.0;
        });
        const ComparisonReport rm = compare_to_analytic(st, mean_ref, Moment::mean);
        auto os = open("compare_mean.csv");
        write_comparison_csv(os, rm);
        meta["comparison"]["mean"] = summary_json(rm);
        if (c.params.alpha == 1.0 && c.params.mu == 0.0) {
          const Profile var_ref = make_profile(tf, xs, "var_quadrature", [&](double t, double x) {
            return var_classical_quadrature(t, x, c.params.lambda, c.params.sigma, c.quad);
          });
          const ComparisonReport rv = compare_to_analytic(st, var_ref, Moment::variance);
          auto vs = open("compare_var.csv");
          write_comparison_csv(vs, rv);
          meta["comparison"]["variance"] = summary_json(rv);
        } else {
          meta["comparison"]["variance"] = "no analytic reference for these parameters";
        }
      }
    }
    meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    meta["workers"] = worker_count();
    {
      auto os = open("metadata.json");
      os << meta.dump(2) << "\n";
    }
    out << "wrote " << (dir / "snapshots.csv").string();
    if (o.samples >= 2) out << ", " << (dir / "stats.csv").string();
    out << ", " << (dir / "metadata.json").string() << "\n";
    return int(kOk);
  });
}

}  // namespace fracfield::cli
