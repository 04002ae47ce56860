#include "blackstock/errors.hpp"
#include "blackstock/time_integrator.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace blackstock;

namespace {

constexpr double pi = std::numbers::pi;

// psi'' + psi' + psi = 0 with psi(0) = 1, psi'(0) = 0.
double modal_w(double t) {
  const double w = std::sqrt(3.0) / 2.0;
  return std::exp(-t / 2.0) * (std::cos(w * t) + std::sin(w * t) / std::sqrt(3.0));
}

double modal_dw(double t) {
  const double w = std::sqrt(3.0) / 2.0;
  return -2.0 / std::sqrt(3.0) * std::exp(-t / 2.0) * std::sin(w * t);
}

SimState unit_mode(int n = 16) {
  const Grid g = Grid::cube(1, n);
  return build_initial(InitialDataSpec::single_mode({1}, 1.0), InitialDataSpec::zero(), g);
}

double linear_error(Scheme scheme, double dt) {
  const TimeSeries s = simulate(unit_mode(), 1.0, StepConfig{dt, scheme}, MediumParams{}, 1000000);
  return std::abs(s.last_checkpoint->state.psi[0] - modal_w(1.0));
}

SimState small_data(double amplitude, int n = 64) {
  const auto spec = InitialDataSpec::single_mode({1}, amplitude);
  return build_initial(spec, spec, Grid::cube(1, n));
}

const MediumParams kNonlinear{1.0, 1.0, 1.0, 1.0};

}  // namespace

TEST(StepConfigTest, Validation) {
  EXPECT_THROW((StepConfig{0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StepConfig{1e-3, Scheme::picard, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((StepConfig{1e-3, Scheme::picard, 1e-10, 0}.validate()), std::invalid_argument);
  EXPECT_EQ(parse_scheme("imex1"), Scheme::imex1);
  EXPECT_EQ(parse_scheme("picard"), Scheme::picard);
  EXPECT_THROW(parse_scheme("rk4"), std::invalid_argument);
  EXPECT_EQ(to_string(Scheme::imex2), "imex2");
}

TEST(StepTest, ZeroStateIsFixedPoint) {
  const SimState zero = SimState::zero(Grid::cube(2, 6));
  for (Scheme scheme : {Scheme::imex1, Scheme::imex2}) {
    for (double dt : {1e-3, 0.5, 10.0}) {
      const SimState next = step_imex(zero, StepConfig{dt, scheme}, kNonlinear);
      for (std::size_t i = 0; i < next.psi.size(); ++i) {
        EXPECT_EQ(next.psi[i], 0.0);
        EXPECT_EQ(next.v[i], 0.0);
      }
    }
  }
  int iterations = 0;
  const SimState next = step_picard(zero, StepConfig{0.1, Scheme::picard}, kNonlinear, &iterations);
  EXPECT_EQ(iterations, 1);
  EXPECT_EQ(state_norm(next), 0.0);
}

TEST(StepTest, Imex2MatchesClosedForm) {
  const double w1 = linear_error(Scheme::imex2, 1e-3);
  EXPECT_NEAR(modal_w(1.0), 0.6597, 1e-4);
  EXPECT_LE(w1 / modal_w(1.0), 1e-5);
}

TEST(StepTest, Imex1FirstOrder) {
  const double e1 = linear_error(Scheme::imex1, 1e-2);
  const double e2 = linear_error(Scheme::imex1, 5e-3);
  EXPECT_NEAR(e1 / e2, 2.0, 0.2);
}

TEST(StepTest, Imex2SecondOrder) {
  const double e1 = linear_error(Scheme::imex2, 1e-2);
  const double e2 = linear_error(Scheme::imex2, 5e-3);
  const double e3 = linear_error(Scheme::imex2, 2.5e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
  EXPECT_NEAR(e2 / e3, 4.0, 0.4);
}

TEST(StepTest, PicardSecondOrderOnLinearProblem) {
  const double e1 = linear_error(Scheme::picard, 1e-2);
  const double e2 = linear_error(Scheme::picard, 5e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(StepTest, PicardLinearConvergesInOneIteration) {
  std::mt19937_64 rng(8);
  const SimState s = testutil::random_state(Grid::cube(1, 16), rng);
  int iterations = 0;
  step_picard(s, StepConfig{1e-2, Scheme::picard}, MediumParams{}, &iterations);
  EXPECT_EQ(iterations, 1);
}

TEST(StepTest, PicardSmallDataIterations) {
  const TimeSeries s = simulate(small_data(0.01), 2.0, StepConfig{1e-3, Scheme::picard}, kNonlinear, 100);
  ASSERT_TRUE(s.completed());
  ASSERT_EQ(s.picard_iterations.size(), 2000u);
  for (int it : s.picard_iterations) EXPECT_LE(it, 5);
}

TEST(StepTest, PicardFailsForLargeData) {
  const TimeSeries s = simulate(small_data(50.0), 1.0, StepConfig{1e-3, Scheme::picard}, kNonlinear, 10);
  EXPECT_EQ(s.termination, Termination::picard_failed);
  EXPECT_FALSE(s.message.empty());
  EXPECT_THROW(step_picard(small_data(50.0), StepConfig{1e-3, Scheme::picard}, kNonlinear), PicardFailure);
}

TEST(StepTest, LinearStabilityEnergyNonincreasing) {
  std::mt19937_64 rng(9);
  const Grid g = Grid::cube(1, 64);
  const MediumParams p{2.0, 0.3, 0.0, 0.0};
  for (Scheme scheme : {Scheme::imex1, Scheme::imex2}) {
    for (double dt : {1e-3, 0.1, 10.0}) {
      SimState s = testutil::random_state(g, rng);
      double e = functionals(s, p).E1;
      for (int n = 0; n < 20; ++n) {
        s = step_imex(s, StepConfig{dt, scheme}, p);
        const double next = functionals(s, p).E1;
        EXPECT_LE(next, e * (1.0 + 1e-13));
        e = next;
      }
    }
  }
}

TEST(SimulateTest, ZeroDataSeries) {
  const TimeSeries s = simulate(SimState::zero(Grid::cube(1, 16)), 1.0, StepConfig{}, kNonlinear, 10);
  ASSERT_TRUE(s.completed());
  EXPECT_EQ(s.samples.size(), 101u);
  for (const auto& e : s.samples) {
    EXPECT_EQ(e.E, 0.0);
    EXPECT_EQ(e.L, 0.0);
    EXPECT_EQ(e.D_cum, 0.0);
  }
  EXPECT_NEAR(s.termination_time, 1.0, 1e-12);
}

TEST(SimulateTest, TimesStrictlyIncreasingAndAligned) {
  const TimeSeries s = simulate(small_data(0.1), 1.05, StepConfig{1e-2}, kNonlinear, 7);
  ASSERT_EQ(s.times.size(), s.samples.size());
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    EXPECT_LT(s.times[i - 1], s.times[i]);
    EXPECT_EQ(s.times[i], s.samples[i].t);
  }
  EXPECT_NEAR(s.times.back(), 1.05, 1e-12);
}

TEST(SimulateTest, LinearEnergyMatchesClosedForm) {
  const TimeSeries s = simulate(unit_mode(32), 5.0, StepConfig{1e-3}, MediumParams{}, 50);
  ASSERT_TRUE(s.completed());
  for (const auto& e : s.samples) {
    const double w = modal_w(e.t), dw = modal_dw(e.t);
    EXPECT_NEAR(e.E, pi / 2.0 * (w * w + 1.5 * dw * dw), 1e-4) << "t = " << e.t;
  }
}

TEST(SimulateTest, SmallDataNonlinearRunDecays) {
  const StepConfig cfg{1e-3};
  const TimeSeries s = simulate(small_data(0.01), 20.0, cfg, kNonlinear, 100);
  ASSERT_TRUE(s.completed());
  // A run with dt/10 serves as reference.
  const TimeSeries ref = simulate(small_data(0.01), 20.0, StepConfig{1e-4}, kNonlinear, 1000);
  ASSERT_EQ(ref.samples.size(), s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    EXPECT_NEAR(s.samples[i].E, ref.samples[i].E, 1e-5 * s.samples[0].E);
  }
  // E oscillates with the mode; over one oscillation period it must drop.
  const double period = 2.0 * pi / std::sqrt(3.0);
  const std::size_t lag = static_cast<std::size_t>(std::ceil(period / 0.1));
  for (std::size_t i = 10; i + lag < s.samples.size(); ++i) EXPECT_LT(s.samples[i + lag].E, s.samples[i].E);
  for (std::size_t i = 11; i < s.samples.size(); ++i) EXPECT_LE(s.samples[i].L, s.samples[i - 1].L);
  EXPECT_LT(s.samples.back().E, 1e-7 * s.samples.front().E);
}

TEST(SimulateTest, SchemesAgreeToSecondOrder) {
  auto gap = [](double dt) {
    const TimeSeries a = simulate(small_data(0.5, 32), 1.0, StepConfig{dt, Scheme::imex2}, kNonlinear, 1000000);
    const TimeSeries b = simulate(small_data(0.5, 32), 1.0, StepConfig{dt, Scheme::picard}, kNonlinear, 1000000);
    const SimState& x = a.last_checkpoint->state;
    const SimState& y = b.last_checkpoint->state;
    return state_norm(SimState(x.psi - y.psi, x.v - y.v));
  };
  const double g1 = gap(1e-2), g2 = gap(5e-3);
  EXPECT_LT(g1, 1e-3);
  EXPECT_NEAR(g1 / g2, 4.0, 1.0);
}

TEST(SimulateTest, DivergenceIsReported) {
  const TimeSeries s = simulate(small_data(100.0), 5.0, StepConfig{1e-3}, kNonlinear, 10);
  EXPECT_EQ(s.termination, Termination::diverged);
  EXPECT_GT(s.termination_time, 0.0);
  EXPECT_LT(s.termination_time, 5.0);
  for (const auto& e : s.samples) EXPECT_LE(e.E, kDivergenceEnergy);
}

TEST(SimulatorTest, FailedStepLeavesStateUnchanged) {
  Simulator sim(small_data(50.0), StepConfig{1e-3, Scheme::picard}, kNonlinear);
  const SimState before = sim.state();
  EXPECT_THROW(sim.advance(), PicardFailure);
  EXPECT_EQ(sim.step_count(), 0u);
  for (std::size_t i = 0; i < before.psi.size(); ++i) {
    EXPECT_EQ(sim.state().psi[i], before.psi[i]);
    EXPECT_EQ(sim.state().v[i], before.v[i]);
  }
}

TEST(SimulatorTest, ResumeMatchesUninterruptedRun) {
  for (Scheme scheme : {Scheme::imex1, Scheme::imex2, Scheme::picard}) {
    const StepConfig cfg{1e-3, scheme};
    Simulator full(small_data(0.3), cfg, kNonlinear);
    Simulator first(small_data(0.3), cfg, kNonlinear);
    for (int n = 0; n < 300; ++n) first.advance();
    Simulator second = Simulator::resume(first.checkpoint(), cfg, kNonlinear);
    for (int n = 0; n < 600; ++n) full.advance();
    for (int n = 0; n < 300; ++n) second.advance();
    EXPECT_EQ(second.step_count(), 600u);
    EXPECT_NEAR(second.time(), full.time(), 1e-15);
    for (std::size_t i = 0; i < full.state().psi.size(); ++i) {
      EXPECT_NEAR(second.state().psi[i], full.state().psi[i], 1e-12);
      EXPECT_NEAR(second.state().v[i], full.state().v[i], 1e-12);
    }
    EXPECT_NEAR(second.sample().D_cum, full.sample().D_cum, 1e-12);
  }
}

TEST(SimulatorTest, SimulateFromCheckpointFinishesAtFinalTime) {
  const StepConfig cfg{1e-3};
  Simulator sim(small_data(0.3), cfg, kNonlinear);
  for (int n = 0; n < 250; ++n) sim.advance();
  const TimeSeries tail = simulate_from(sim.checkpoint(), 1.0, cfg, kNonlinear, 50);
  const TimeSeries whole = simulate(small_data(0.3), 1.0, cfg, kNonlinear, 50);
  ASSERT_TRUE(tail.completed());
  EXPECT_NEAR(tail.samples.front().t, 0.25, 1e-15);
  EXPECT_NEAR(tail.samples.back().t, 1.0, 1e-12);
  EXPECT_NEAR(tail.samples.back().E, whole.samples.back().E, 1e-14);
}

TEST(SimulateTest, SnapshotsAndCheckpointCallback) {
  SimulateOptions opts;
  opts.snapshot_every = 100;
  opts.checkpoint_every = 200;
  int calls = 0;
  opts.on_checkpoint = [&](const Checkpoint& cp) {
    ++calls;
    EXPECT_EQ(cp.step % 200, 0u);
  };
  const TimeSeries s = simulate(small_data(0.01), 1.0, StepConfig{}, kNonlinear, 10, opts);
  EXPECT_EQ(s.snapshots.size(), 11u);
  EXPECT_EQ(calls, 5);
}

TEST(SimulateTest, RejectsBadArguments) {
  EXPECT_THROW(simulate(small_data(0.01), 0.0, StepConfig{}, kNonlinear, 10), std::invalid_argument);
  EXPECT_THROW(simulate(small_data(0.01), 1.0, StepConfig{}, kNonlinear, 0), std::invalid_argument);
  EXPECT_THROW(simulate(small_data(0.01), 1.0, StepConfig{}, MediumParams{1.0, 0.0}, 1), std::invalid_argument);
}
