#pragma once

// Time stepping of the first-order system
//   psi' = v,  v' = c^2 Lap psi + b Lap v + f(psi, v).
// The linear part is diagonal in the sine basis and is always treated
// implicitly, one 2x2 solve per mode.

#include "blackstock/energy_diagnostics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blackstock {

enum class Scheme { imex1, imex2, picard };

Scheme parse_scheme(std::string_view name);
std::string to_string(Scheme scheme);

struct StepConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::imex2;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;

  void validate() const;
};

// E above this value is treated as blow-up.
inline constexpr double kDivergenceEnergy = 1e12;

enum class Termination { completed, diverged, picard_failed };
std::string to_string(Termination t);

// Everything needed to continue a run bit-for-bit.
struct Checkpoint {
  SimState state;
  std::uint64_t step = 0;
  double start_time = 0.0;
  std::optional<SpectralField> previous_source;  // f at the previous step (imex2)
  double d_cum = 0.0;
  double grad_ptt_cum = 0.0;
};

// Backward Euler (imex1) or trapezoidal (imex2, picard) solve of the linear
// part with a given explicit source, modewise.
SimState implicit_linear_step(const SimState& state, const SpectralField& source, double dt,
                              const MediumParams& p, bool trapezoidal);

// Single steps without history. imex2 starts with a predictor-corrector
// source average in place of the Adams-Bashforth extrapolation.
SimState step_imex(const SimState& state, const StepConfig& cfg, const MediumParams& p);
SimState step_picard(const SimState& state, const StepConfig& cfg, const MediumParams& p,
                     int* iterations = nullptr);

class Simulator {
 public:
  Simulator(SimState initial, StepConfig cfg, MediumParams p, GammaWeights g = {});
  static Simulator resume(Checkpoint checkpoint, StepConfig cfg, MediumParams p, GammaWeights g = {});

  const SimState& state() const { return state_; }
  std::uint64_t step_count() const { return step_; }
  double time() const { return state_.time; }
  double start_time() const { return start_time_; }
  int last_picard_iterations() const { return last_iterations_; }

  // Throws DivergenceError or PicardFailure; the simulator is unchanged then.
  void advance();

  const EnergySample& sample() const { return sample_; }
  const SpectralField& source() const { return f_; }
  const SpectralField& acceleration() const { return accel_; }
  Checkpoint checkpoint() const;

 private:
  Simulator(Checkpoint checkpoint, StepConfig cfg, MediumParams p, GammaWeights g);
  void refresh();

  SimState state_;
  StepConfig cfg_;
  MediumParams p_;
  GammaWeights g_;
  std::uint64_t step_ = 0;
  double start_time_ = 0.0;
  SpectralField f_;
  SpectralField accel_;
  std::optional<SpectralField> f_prev_;
  double d_cum_ = 0.0;
  double grad_ptt_cum_ = 0.0;
  double d_rate_ = 0.0;
  double grad_ptt_rate_ = 0.0;
  int last_iterations_ = 0;
  EnergySample sample_;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<EnergySample> samples;
  std::vector<SimState> snapshots;
  std::vector<int> picard_iterations;  // per step, picard scheme only
  Termination termination = Termination::completed;
  double termination_time = 0.0;
  std::string message;
  // State after the last accepted step.
  std::optional<Checkpoint> last_checkpoint;

  bool completed() const { return termination == Termination::completed; }
};

struct SimulateOptions {
  GammaWeights gammas{};
  // 0 disables snapshots.
  int snapshot_every = 0;
  // Called every checkpoint_every accepted steps when both are set.
  int checkpoint_every = 0;
  std::function<void(const Checkpoint&)> on_checkpoint;
};

TimeSeries simulate(const SimState& initial, double final_time, const StepConfig& cfg,
                    const MediumParams& p, int sample_every, const SimulateOptions& options = {});

// Continues a checkpointed run up to final_time.
TimeSeries simulate_from(const Checkpoint& checkpoint, double final_time, const StepConfig& cfg,
                         const MediumParams& p, int sample_every, const SimulateOptions& options = {});

ResidualReport identity_residual(const TimeSeries& series, const MediumParams& p);

}  // namespace blackstock
