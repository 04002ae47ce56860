#include "blackstock/time_integrator.hpp"

#include "blackstock/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace blackstock {

Scheme parse_scheme(std::string_view name) {
  if (name == "imex1") return Scheme::imex1;
  if (name == "imex2") return Scheme::imex2;
  if (name == "picard") return Scheme::picard;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::imex1: return "imex1";
    case Scheme::imex2: return "imex2";
    case Scheme::picard: return "picard";
  }
  return "unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::diverged: return "diverged";
    case Termination::picard_failed: return "picard_failed";
  }
  return "unknown";
}

void StepConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("picard tolerance must be positive");
  if (picard_max_iter < 1) throw std::invalid_argument("picard iteration limit must be positive");
}

SimState implicit_linear_step(const SimState& state, const SpectralField& source, double dt,
                              const MediumParams& p, bool trapezoidal) {
  const auto& lambda = state.grid().symbols();
  const double c2 = p.c * p.c;
  SimState next = state;
  next.time = state.time + dt;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double l = lambda[i];
    const double psi0 = state.psi[i];
    const double v0 = state.v[i];
    double v1;
    if (trapezoidal) {
      const double a = 0.5 * dt * p.b * l + 0.25 * dt * dt * c2 * l;
      v1 = (v0 * (1.0 + a) + dt * c2 * l * psi0 + dt * source[i]) / (1.0 - a);
      next.psi[i] = psi0 + 0.5 * dt * (v0 + v1);
    } else {
      v1 = (v0 + dt * c2 * l * psi0 + dt * source[i]) / (1.0 - dt * p.b * l - dt * dt * c2 * l);
      next.psi[i] = psi0 + dt * v1;
    }
    next.v[i] = v1;
  }
  return next;
}

namespace {

SimState difference(const SimState& a, const SimState& b) {
  return SimState(a.psi - b.psi, a.v - b.v, 0.0);
}

SimState heun_step(const SimState& state, const SpectralField& f_now, double dt, const MediumParams& p) {
  const SimState predicted = implicit_linear_step(state, f_now, dt, p, true);
  SpectralField avg = f_now;
  avg += assemble_f(predicted, p);
  avg *= 0.5;
  return implicit_linear_step(state, avg, dt, p, true);
}

SimState picard_solve(const SimState& state, const SpectralField& f_now, const StepConfig& cfg,
                      const MediumParams& p, int& iterations) {
  SimState iterate = implicit_linear_step(state, f_now, cfg.dt, p, true);
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    SimState next = iterate;
    try {
      // Frozen coefficient alpha = current iterate's psi_t.
      SpectralField source = frozen_source(iterate.psi, iterate.v, p);
      source += f_now;
      source *= 0.5;
      next = implicit_linear_step(state, source, cfg.dt, p, true);
    } catch (const DivergenceError&) {
      throw PicardFailure("picard iterate became non-finite", it);
    }
    const double scale = state_norm(next);
    const double update = state_norm(difference(next, iterate));
    iterate = std::move(next);
    if (!std::isfinite(update) || !iterate.is_finite()) {
      throw PicardFailure("picard iterate became non-finite", it);
    }
    if (update <= cfg.picard_tol * scale) {
      iterations = it;
      return iterate;
    }
  }
  throw PicardFailure("picard iteration did not converge in " + std::to_string(cfg.picard_max_iter) +
                          " iterations",
                      cfg.picard_max_iter);
}

}  // namespace

SimState step_imex(const SimState& state, const StepConfig& cfg, const MediumParams& p) {
  const SpectralField f_now = assemble_f(state, p);
  SimState next = cfg.scheme == Scheme::imex1 ? implicit_linear_step(state, f_now, cfg.dt, p, false)
                                              : heun_step(state, f_now, cfg.dt, p);
  if (!next.is_finite()) throw DivergenceError("non-finite state");
  return next;
}

SimState step_picard(const SimState& state, const StepConfig& cfg, const MediumParams& p, int* iterations) {
  int it = 0;
  SimState next = picard_solve(state, assemble_f(state, p), cfg, p, it);
  if (iterations != nullptr) *iterations = it;
  return next;
}

Simulator::Simulator(SimState initial, StepConfig cfg, MediumParams p, GammaWeights g)
    : Simulator(Checkpoint{std::move(initial), 0, 0.0, std::nullopt, 0.0, 0.0}, cfg, p, g) {
  start_time_ = state_.time;
}

Simulator Simulator::resume(Checkpoint checkpoint, StepConfig cfg, MediumParams p, GammaWeights g) {
  return Simulator(std::move(checkpoint), cfg, p, g);
}

Simulator::Simulator(Checkpoint checkpoint, StepConfig cfg, MediumParams p, GammaWeights g)
    : state_(std::move(checkpoint.state)),
      cfg_(cfg),
      p_(p),
      g_(g),
      step_(checkpoint.step),
      start_time_(checkpoint.start_time),
      f_(state_.grid()),
      accel_(state_.grid()),
      f_prev_(std::move(checkpoint.previous_source)),
      d_cum_(checkpoint.d_cum),
      grad_ptt_cum_(checkpoint.grad_ptt_cum) {
  cfg_.validate();
  p_.validate();
  if (!state_.is_finite()) throw DivergenceError("initial state is not finite");
  refresh();
  if (!(sample_.E <= kDivergenceEnergy)) throw DivergenceError("initial energy above divergence cutoff");
}

void Simulator::refresh() {
  f_ = assemble_f(state_, p_);
  accel_ = linear_acceleration(state_, p_);
  accel_ += f_;
  if (!accel_.is_finite()) throw DivergenceError("non-finite acceleration");
  d_rate_ = dissipation_integrand(state_, accel_);
  double grad_accel = 0.0;
  const auto& lambda = state_.grid().symbols();
  for (std::size_t i = 0; i < accel_.size(); ++i) grad_accel -= lambda[i] * accel_[i] * accel_[i];
  grad_ptt_rate_ = state_.time * grad_accel * state_.grid().mode_weight();
  sample_ = make_sample(state_, p_, g_, f_, accel_, d_cum_, grad_ptt_cum_);
}

void Simulator::advance() {
  const double dt = cfg_.dt;
  SimState next = state_;
  int iterations = 0;
  switch (cfg_.scheme) {
    case Scheme::imex1:
      next = implicit_linear_step(state_, f_, dt, p_, false);
      break;
    case Scheme::imex2:
      if (f_prev_) {
        SpectralField extrapolated = f_;
        extrapolated *= 1.5;
        extrapolated.axpy(-0.5, *f_prev_);
        next = implicit_linear_step(state_, extrapolated, dt, p_, true);
      } else {
        next = heun_step(state_, f_, dt, p_);
      }
      break;
    case Scheme::picard:
      next = picard_solve(state_, f_, cfg_, p_, iterations);
      break;
  }
  next.time = start_time_ + static_cast<double>(step_ + 1) * dt;
  if (!next.is_finite()) throw DivergenceError("non-finite state at t = " + std::to_string(next.time));

  // Commit only after the new diagnostics are known to be finite.
  Simulator trial = *this;
  trial.f_prev_ = f_;
  trial.state_ = std::move(next);
  trial.step_ = step_ + 1;
  trial.last_iterations_ = iterations;
  const double old_d_rate = d_rate_;
  const double old_grad_rate = grad_ptt_rate_;
  trial.refresh();
  trial.d_cum_ = d_cum_ + 0.5 * dt * (old_d_rate + trial.d_rate_);
  trial.grad_ptt_cum_ = grad_ptt_cum_ + 0.5 * dt * (old_grad_rate + trial.grad_ptt_rate_);
  trial.sample_.D_cum = trial.d_cum_;
  trial.sample_.w_grad_ptt = trial.grad_ptt_cum_;
  if (!std::isfinite(trial.sample_.E) || trial.sample_.E > kDivergenceEnergy) {
    throw DivergenceError("energy exceeded cutoff at t = " + std::to_string(trial.state_.time));
  }
  *this = std::move(trial);
}

Checkpoint Simulator::checkpoint() const {
  return Checkpoint{state_, step_, start_time_, f_prev_, d_cum_, grad_ptt_cum_};
}

namespace {

TimeSeries run(Simulator sim, double final_time, const StepConfig& cfg, int sample_every,
               const SimulateOptions& options) {
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  if (sample_every < 1) throw std::invalid_argument("sample_every must be positive");
  TimeSeries series;
  auto record = [&] {
    series.times.push_back(sim.time());
    series.samples.push_back(sim.sample());
  };
  const auto total_steps = static_cast<std::uint64_t>(std::llround((final_time - sim.start_time()) / cfg.dt));
  record();
  if (options.snapshot_every > 0) series.snapshots.push_back(sim.state());
  while (sim.step_count() < total_steps) {
    try {
      sim.advance();
    } catch (const PicardFailure& e) {
      series.termination = Termination::picard_failed;
      series.termination_time = sim.time() + cfg.dt;
      series.message = e.what();
      series.last_checkpoint = sim.checkpoint();
      return series;
    } catch (const DivergenceError& e) {
      series.termination = Termination::diverged;
      series.termination_time = sim.time() + cfg.dt;
      series.message = e.what();
      series.last_checkpoint = sim.checkpoint();
      return series;
    }
    if (cfg.scheme == Scheme::picard) series.picard_iterations.push_back(sim.last_picard_iterations());
    const auto n = sim.step_count();
    if (n % sample_every == 0 || n == total_steps) record();
    if (options.snapshot_every > 0 && (n % options.snapshot_every == 0 || n == total_steps)) {
      series.snapshots.push_back(sim.state());
    }
    if (options.checkpoint_every > 0 && options.on_checkpoint && n % options.checkpoint_every == 0) {
      options.on_checkpoint(sim.checkpoint());
    }
  }
  series.termination_time = sim.time();
  series.last_checkpoint = sim.checkpoint();
  return series;
}

}  // namespace

TimeSeries simulate(const SimState& initial, double final_time, const StepConfig& cfg,
                    const MediumParams& p, int sample_every, const SimulateOptions& options) {
  try {
    return run(Simulator(initial, cfg, p, options.gammas), final_time, cfg, sample_every, options);
  } catch (const DivergenceError& e) {
    TimeSeries series;
    series.termination = Termination::diverged;
    series.termination_time = initial.time;
    series.message = e.what();
    return series;
  }
}

TimeSeries simulate_from(const Checkpoint& checkpoint, double final_time, const StepConfig& cfg,
                         const MediumParams& p, int sample_every, const SimulateOptions& options) {
  return run(Simulator::resume(checkpoint, cfg, p, options.gammas), final_time, cfg, sample_every, options);
}

ResidualReport identity_residual(const TimeSeries& series, const MediumParams&) {
  return identity_residual(std::span<const EnergySample>(series.samples));
}

}  // namespace blackstock
