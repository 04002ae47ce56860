#pragma once

#include "blackstock/time_integrator.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blackstock {

enum class DecayClass { decays, stagnates, diverges };
std::string to_string(DecayClass c);

// Classification thresholds of fit_decay.
inline constexpr double kDecayRateFloor = 1e-3;
inline constexpr double kDecayMinRSquared = 0.99;

struct DecayFit {
  double zeta = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double r_squared = 0.0;
  // e^{intercept} / E(0): the constant C in E(t) <= C E(0) e^{-zeta t} of the fitted line.
  double prefactor = 0.0;
  std::size_t points = 0;
  DecayClass classification = DecayClass::stagnates;
};

// Least-squares line through log E(t) on samples with t in [t_start, t_end].
DecayFit fit_decay(const TimeSeries& series, std::pair<double, double> window);
// Window (T/4, 3T/4) of the series' time span.
DecayFit fit_decay(const TimeSeries& series);

// Settings of one probe run in the threshold and regularity experiments.
struct ProbeSettings {
  // Long enough that the modal oscillation of log E averages out of the fit.
  double final_time = 40.0;
  StepConfig step{};
  int sample_every = 10;
  // Fit window; default (T/4, 3T/4).
  std::optional<std::pair<double, double>> window;
};

struct ProbeResult {
  double amplitude = 0.0;
  DecayClass classification = DecayClass::stagnates;
  double zeta = 0.0;
  double termination_time = 0.0;
};

ProbeResult classify_amplitude(const MediumParams& p, const Grid& grid, const InitialDataSpec& psi0,
                               const InitialDataSpec& psi1, double amplitude, const ProbeSettings& settings);

struct ThresholdReport {
  MediumParams params;
  std::vector<int> modes;
  double amplitude_lo = 0.0;
  double amplitude_hi = 0.0;
  double delta_star = 0.0;
  // ||psi0||_{H^2} + ||psi1||_{H^1} of the data at delta_star.
  double data_norm_at_delta_star = 0.0;
  std::vector<ProbeResult> runs;
};

// Geometric bisection on the amplitude multiplier applied to both shapes.
// Probes that do not decay move the upper end. Throws PreconditionError
// unless lo decays and hi diverges.
ThresholdReport threshold_bisection(const MediumParams& p, const Grid& grid, const InitialDataSpec& psi0,
                                    const InitialDataSpec& psi1, double lo, double hi, int iters,
                                    const ProbeSettings& settings = {});

struct RegularityRow {
  int modes = 0;
  double initial_lap = 0.0;     // ||Lap psi1||
  double sup_unweighted = 0.0;  // sup_t ||Lap psi_t||
  double sup_weighted = 0.0;    // sup_t sqrt(t) ||Lap psi_t||
  double argmax_weighted = 0.0;
};

struct RegularityStudy {
  std::vector<RegularityRow> rows;
  double unweighted_growth = 0.0;  // last / first resolution
  double weighted_ratio = 0.0;    // last / first resolution
  bool passes = false;
};

inline constexpr double kMinUnweightedGrowth = 1.5;
inline constexpr double kMaxWeightedChange = 0.1;

struct RegularitySettings {
  std::vector<int> resolutions{64, 128, 256};
  double final_time = 1.0;
  double dt = 1e-3;
  // Backward Euler damps the stiff modes of rough data monotonically.
  Scheme scheme = Scheme::imex1;
  double exponent = 2.0;
  double amplitude = 0.01;
};

// psi0 = 0, psi1 = power_law(exponent, amplitude) in one dimension on (0, pi)
// unless `extents` is given. Throws PreconditionError if any run diverges.
RegularityStudy weighted_regularity_study(const MediumParams& p, const RegularitySettings& settings,
                                          std::vector<double> extents = {});

}  // namespace blackstock
