#pragma once

// Versioned JSON run configuration shared by every subcommand.

#include <cstdint>
#include <string>

#include "json.hpp"

#include "fracfield/analytic_fields.hpp"
#include "fracfield/quad_spec.hpp"
#include "fracfield/simulate.hpp"
#include "fracfield/symbol.hpp"

namespace fracfield::cli {

struct OutputSpec {
  std::string path;            // empty: stdout (tables) or the working directory (simulate)
  std::string format = "csv";  // csv | json
};

struct RunConfig {
  DiffusionParams params;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  GridSpec grid;
  QuadSpec quad;
  VarianceSeriesSpec series;
  OutputSpec output;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Strict parse: "version" must be 1, unknown keys are rejected, every section is optional.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

nlohmann::json to_json(const QuadSpec& q);
nlohmann::json to_json(const VarianceSeriesSpec& s);

}  // namespace fracfield::cli
