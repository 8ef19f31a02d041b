#include "run_config.hpp"

#include <fstream>

#include "fracfield/errors.hpp"

namespace fracfield::cli {

namespace {

void reject_unknown(const nlohmann::json& j, const std::string& where, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& field, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

QuadSpec quad_from_json(const nlohmann::json& j) {
  reject_unknown(j, "quad", {"freq_cutoff", "panels", "rel_tol", "max_refinements"});
  QuadSpec q;
  read(j, "freq_cutoff", q.freq_cutoff, "quad");
  read(j, "panels", q.panels, "quad");
  read(j, "rel_tol", q.rel_tol, "quad");
  read(j, "max_refinements", q.max_refinements, "quad");
  return q;
}

VarianceSeriesSpec series_from_json(const nlohmann::json& j) {
  reject_unknown(j, "series", {"max_terms", "resonance_guard"});
  VarianceSeriesSpec s;
  read(j, "max_terms", s.max_terms, "series");
  read(j, "resonance_guard", s.resonance_guard, "series");
  return s;
}

OutputSpec output_from_json(const nlohmann::json& j) {
  reject_unknown(j, "output", {"path", "format"});
  OutputSpec o;
  read(j, "path", o.path, "output");
  read(j, "format", o.format, "output");
  return o;
}

}  // namespace

void RunConfig::validate() const {
  // Sub-spec validators raise DomainError; a bad config is a ConfigError.
  try {
    params.validate();
    kernel.validate();
    grid.validate();
    quad.validate();
    series.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (output.format != "csv" && output.format != "json") throw ConfigError("output.format must be \"csv\" or \"json\"");
}

RunConfig config_from_json(const nlohmann::json& j) {
  reject_unknown(j, "config", {"version", "params", "kernel", "grid", "quad", "series", "output", "seed"});
  if (!j.contains("version")) throw ConfigError("config: missing \"version\"");
  if (!j.at("version").is_number_integer() || j.at("version").get<int>() != 1) {
    throw ConfigError("config: unsupported version (expected 1)");
  }
  RunConfig c;
  if (j.contains("params")) c.params = params_from_json(j.at("params"));
  if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  if (j.contains("quad")) c.quad = quad_from_json(j.at("quad"));
  if (j.contains("series")) c.series = series_from_json(j.at("series"));
  if (j.contains("output")) c.output = output_from_json(j.at("output"));
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config.seed: expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json to_json(const QuadSpec& q) {
  return {{"freq_cutoff", q.freq_cutoff}, {"panels", q.panels}, {"rel_tol", q.rel_tol},
          {"max_refinements", q.max_refinements}};
}

nlohmann::json to_json(const VarianceSeriesSpec& s) {
  return {{"max_terms", s.max_terms}, {"resonance_guard", s.resonance_guard}};
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"version", 1},
          {"params", fracfield::to_json(c.params)},
          {"kernel", fracfield::to_json(c.kernel)},
          {"grid", fracfield::to_json(c.grid)},
          {"quad", to_json(c.quad)},
          {"series", to_json(c.series)},
          {"output", {{"path", c.output.path}, {"format", c.output.format}}},
          {"seed", c.seed}};
}

}  // namespace fracfield::cli
