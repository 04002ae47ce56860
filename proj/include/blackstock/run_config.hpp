#pragma once

#include "blackstock/decay_experiments.hpp"
#include "blackstock/inequality_lab.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace blackstock {

struct IntegratorSettings {
  StepConfig step{};
  double final_time = 1.0;
  int sample_every = 10;
  int checkpoint_every = 0;  // steps; 0 writes only the final checkpoint
};

struct FitSettings {
  // Default (T/4, 3T/4) of the series.
  std::optional<std::pair<double, double>> window;
  // CSV series to fit; when empty the configured run is simulated first.
  std::filesystem::path series;
};

struct ThresholdSettings {
  double lo = 0.01;
  double hi = 100.0;
  int iters = 12;
  ProbeSettings probe{};
};

struct InequalitySettings {
  std::vector<int> dims{1};
  int max_mode = 32;
  std::size_t samples = 10000;
  std::size_t scale_samples = 200;
  int gronwall_draws = 100;
  double gronwall_horizon = 10.0;
  double gronwall_dt = 1e-4;
};

struct SweepAxis {
  std::string pointer;  // JSON pointer into the config document, e.g. "/medium/k"
  std::vector<nlohmann::json> values;
};

struct RunConfig {
  Grid grid = Grid::cube(1, 64);
  MediumParams medium{};
  InitialDataSpec psi0{};
  InitialDataSpec psi1{};
  IntegratorSettings integrator{};
  GammaWeights gammas{};
  bool calibrate_gammas = false;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> resume_from;

  FitSettings fit{};
  ThresholdSettings threshold{};
  RegularitySettings weighted_study{};
  InequalitySettings inequalities{};
  std::vector<SweepAxis> sweep;

  // The document as read, before defaults; sweeps patch and re-parse it.
  nlohmann::json document;
};

// Throws ConfigError. Relative paths inside the file stay relative to the
// working directory.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);
// Also applies BLACKSTOCK_SEED when set.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const InitialDataSpec& spec);

}  // namespace blackstock
