#include "blackstock/energy_diagnostics.hpp"
#include "blackstock/time_integrator.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace blackstock;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField sin_x(int n = 16, double a = 1.0) {
  const std::vector<int> m{1};
  return SpectralField::mode(Grid::cube(1, n), m, a);
}

SimState sin_both() { return SimState(sin_x(), sin_x()); }

double modal_dw(double t) {
  return -2.0 / std::sqrt(3.0) * std::exp(-t / 2.0) * std::sin(std::sqrt(3.0) / 2.0 * t);
}

double max_residual(Scheme scheme, double dt) {
  const Grid g = Grid::cube(1, 16);
  const SimState s0 = build_initial(InitialDataSpec::single_mode({1}, 1.0), InitialDataSpec::zero(), g);
  const TimeSeries s = simulate(s0, 1.0, StepConfig{dt, scheme}, MediumParams{}, 1);
  return identity_residual(s, MediumParams{}).max_abs;
}

}  // namespace

TEST(EnergyTest, Examples) {
  const MediumParams p{};
  EXPECT_EQ(energy_E(SimState::zero(Grid::cube(2, 6)), p), 0.0);
  EXPECT_NEAR(energy_E(SimState(sin_x(), SpectralField(Grid::cube(1, 16))), p), pi / 2.0, 1e-14);
  EXPECT_NEAR(energy_E(SimState(SpectralField(Grid::cube(1, 16)), sin_x(16, 2.0)), p), 3.0 * pi, 1e-13);
  EXPECT_NEAR(3.0 * pi, 9.4248, 1e-4);
}

TEST(FunctionalsTest, SinBoth) {
  const Functionals f = functionals(sin_both(), MediumParams{});
  EXPECT_NEAR(f.E1, pi / 2.0, 1e-14);
  EXPECT_NEAR(f.E2, pi / 4.0, 1e-14);
  EXPECT_NEAR(f.F1, 3.0 * pi / 4.0, 1e-14);
  EXPECT_NEAR(f.F2, 3.0 * pi / 4.0, 1e-14);
  EXPECT_NEAR(f.F3, 3.0 * pi / 4.0, 1e-14);
  EXPECT_NEAR(f.F1, 2.3562, 1e-4);
}

TEST(FunctionalsTest, ParameterDependence) {
  // c = 2, b = 3 on psi = v = sin x.
  const Functionals f = functionals(sin_both(), MediumParams{2.0, 3.0, 0.0, 0.0});
  const double q = pi / 2.0;
  EXPECT_NEAR(f.E1, 0.5 * q + 2.0 * q, 1e-13);
  EXPECT_NEAR(f.E2, 4.0 / 6.0 * q, 1e-13);
  EXPECT_NEAR(f.F1, q + 1.5 * q, 1e-13);
  EXPECT_NEAR(f.F2, q + 1.5 * q, 1e-13);
  EXPECT_NEAR(f.F3, 4.0 * q + 1.5 * q, 1e-13);
}

TEST(LyapunovTest, Examples) {
  const MediumParams p{};
  EXPECT_EQ(lyapunov_L(SimState::zero(Grid::cube(1, 8)), p, GammaWeights{}), 0.0);
  // pi/2 + 0.1 pi/4 + 0.01 (3pi/4 + 3pi/4) + 0.05 (3pi/4)
  const double expected = pi * (0.5 + 0.025 + 0.015 + 0.0375);
  EXPECT_NEAR(lyapunov_L(sin_both(), p, GammaWeights{}), expected, 1e-14);
  EXPECT_NEAR(expected, 1.8143, 1e-4);
  const Functionals f = functionals(sin_both(), p);
  EXPECT_EQ(lyapunov_L(f, GammaWeights{0.0, 0.0, 0.0}), f.E1);
}

TEST(LyapunovTest, WeightValidation) {
  EXPECT_NO_THROW(GammaWeights{}.validate());
  EXPECT_THROW((GammaWeights{0.0, 0.01, 0.05}.validate()), std::invalid_argument);
  EXPECT_THROW((GammaWeights{0.1, -0.01, 0.05}.validate()), std::invalid_argument);
}

TEST(EnergyPropertyTest, DecompositionAndLinearity) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g = trial % 2 ? Grid::cube(1, 12) : Grid({1.0, 2.0}, {5, 7});
    const SimState s = testutil::random_state(g, rng);
    const MediumParams p{0.5 + 0.1 * trial, 0.2 + 0.05 * trial, 0.0, 0.0};
    const Functionals f = functionals(s, p);
    const double grad_v = norm(s.v, NormKind::H1semi);
    const double e = energy_E(s, p);
    EXPECT_NEAR(e, f.E1 + f.E2 + grad_v * grad_v, 1e-12 * e);
    EXPECT_GE(f.E2, 0.0);
    const GammaWeights w{0.3, 0.02, 0.07};
    EXPECT_NEAR(lyapunov_L(s, p, w), f.E1 + w.gamma1 * f.E2 + w.gamma2 * (f.F1 + f.F2) + w.gamma3 * f.F3,
                1e-12 * e);
  }
}

TEST(EquivalenceTest, DefaultsAdmissible) {
  const MediumParams p{};
  const Grid g = Grid::cube(1, 32);
  const auto probes = modal_probe_states(g, p, 32, 360);
  const EquivalenceConstants c = equivalence_constants(p, GammaWeights{}, probes);
  EXPECT_GT(c.c1_hat, 0.0);
  EXPECT_TRUE(c.admissible);
  EXPECT_GE(c.c2_hat, c.c1_hat);
}

TEST(EquivalenceTest, OrderedByExhaustiveScan) {
  // Independent scan: every probe ratio must lie in [c1_hat, c2_hat].
  const MediumParams p{1.3, 0.6, 0.0, 0.0};
  const Grid g = Grid::cube(1, 8);
  const auto probes = modal_probe_states(g, p, 8, 90);
  const EquivalenceConstants c = equivalence_constants(p, GammaWeights{}, probes);
  double lo = 1e300, hi = -1e300;
  for (const SimState& s : probes) {
    const double r = lyapunov_L(s, p, GammaWeights{}) / energy_E(s, p);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_DOUBLE_EQ(c.c1_hat, lo);
  EXPECT_DOUBLE_EQ(c.c2_hat, hi);
}

TEST(EquivalenceTest, HugeGammaBreaksEquivalence) {
  const MediumParams p{};
  const Grid g = Grid::cube(1, 16);
  const auto probes = modal_probe_states(g, p, 16, 360);
  const EquivalenceConstants c = equivalence_constants(p, GammaWeights{0.1, 10.0, 0.05}, probes);
  EXPECT_LE(c.c1_hat, 0.0);
  EXPECT_FALSE(c.admissible);
}

TEST(EquivalenceTest, ScaleInvariant) {
  const MediumParams p{};
  const Grid g = Grid::cube(1, 8);
  auto probes = modal_probe_states(g, p, 8, 36);
  const EquivalenceConstants a = equivalence_constants(p, GammaWeights{}, probes);
  for (SimState& s : probes) s = SimState(7.0 * s.psi, 7.0 * s.v);
  const EquivalenceConstants b = equivalence_constants(p, GammaWeights{}, probes);
  EXPECT_NEAR(a.c1_hat, b.c1_hat, 1e-14);
  EXPECT_NEAR(a.c2_hat, b.c2_hat, 1e-14);
}

TEST(EquivalenceTest, Errors) {
  const std::vector<SimState> none;
  EXPECT_THROW(equivalence_constants(MediumParams{}, GammaWeights{}, none), std::invalid_argument);
  const std::vector<SimState> zero{SimState::zero(Grid::cube(1, 4))};
  EXPECT_THROW(equivalence_constants(MediumParams{}, GammaWeights{}, zero), std::invalid_argument);
}

TEST(EquivalenceTest, RandomStatesBracketedByModalScan) {
  // All functionals are diagonal, so random multi-mode states stay inside the modal bracket.
  std::mt19937_64 rng(32);
  const MediumParams p{};
  const Grid g = Grid::cube(1, 12);
  const EquivalenceConstants c = equivalence_constants(p, GammaWeights{}, modal_probe_states(g, p, 12, 720));
  for (int trial = 0; trial < 200; ++trial) {
    const SimState s = testutil::random_state(g, rng);
    const double r = lyapunov_L(s, p, GammaWeights{}) / energy_E(s, p);
    EXPECT_GE(r, c.c1_hat - 1e-4);
    EXPECT_LE(r, c.c2_hat + 1e-4);
  }
}

TEST(CalibrationTest, ProducesAdmissibleWeights) {
  for (const MediumParams& p : {MediumParams{}, MediumParams{3.0, 0.2, 0.0, 0.0}, MediumParams{0.5, 5.0, 1.0, 1.0}}) {
    const Grid g = Grid::cube(1, 16);
    const GammaWeights w = calibrate_gammas(p, g);
    EXPECT_TRUE(linear_rate_negative(p, w, g));
    EXPECT_TRUE(equivalence_constants(p, w, modal_probe_states(g, p, 16)).admissible);
  }
}

TEST(CalibrationTest, LinearRateMatchesFiniteDifference) {
  // dL/dt along the exact modal flow, by central differences of L.
  const MediumParams p{1.4, 0.7, 0.0, 0.0};
  const GammaWeights w{};
  const double mu = 4.0;
  const auto [xx, xy, yy] = linear_lyapunov_rate(p, w, mu);
  const Grid g = Grid::cube(1, 4);
  auto modal_L = [&](double a, double b) {
    SpectralField psi(g), v(g);
    psi[1] = a;
    v[1] = b;
    return lyapunov_L(SimState(psi, v), p, w) / (pi / 2.0);
  };
  const double a = 0.3, b = -0.8, h = 1e-6;
  const double acc = -p.c * p.c * mu * a - p.b * mu * b;
  const double fd = (modal_L(a + h * b, b + h * acc) - modal_L(a - h * b, b - h * acc)) / (2.0 * h);
  EXPECT_NEAR(xx * a * a + xy * a * b + yy * b * b, fd, 1e-6);
}

TEST(WeightedNormsTest, VanishAtTimeZero) {
  std::mt19937_64 rng(33);
  const SimState s = testutil::random_state(Grid::cube(1, 8), rng);
  const auto [a, b] = weighted_norms(s, nonlinear_acceleration(s, MediumParams{}));
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(WeightedNormsTest, LinearModeAtTimeOne) {
  const Grid g = Grid::cube(1, 16);
  const SimState s0 = build_initial(InitialDataSpec::single_mode({1}, 1.0), InitialDataSpec::zero(), g);
  const TimeSeries s = simulate(s0, 1.0, StepConfig{1e-4}, MediumParams{}, 10000);
  ASSERT_TRUE(s.completed());
  EXPECT_NEAR(modal_dw(1.0), -0.5335, 1e-4);
  EXPECT_NEAR(s.samples.back().w_lap_vt, std::abs(modal_dw(1.0)) * std::sqrt(pi / 2.0), 1e-6);
}

TEST(WeightedNormsTest, Homogeneous) {
  std::mt19937_64 rng(34);
  const Grid g = Grid::cube(1, 8);
  SimState s = testutil::random_state(g, rng);
  s.time = 2.0;
  const MediumParams p{};
  const auto [a, b] = weighted_norms(s, linear_acceleration(s, p));
  SimState scaled(-3.0 * s.psi, -3.0 * s.v, 2.0);
  const auto [a3, b3] = weighted_norms(scaled, linear_acceleration(scaled, p));
  EXPECT_NEAR(a3, 3.0 * a, 1e-12 * a);
  EXPECT_NEAR(b3, 3.0 * b, 1e-12 * b);
}

TEST(IdentityResidualTest, LinearRunSmall) { EXPECT_LE(max_residual(Scheme::imex2, 1e-3), 1e-5); }

TEST(IdentityResidualTest, ZeroRun) {
  const TimeSeries s = simulate(SimState::zero(Grid::cube(1, 8)), 0.1, StepConfig{}, MediumParams{}, 1);
  const ResidualReport r = identity_residual(s, MediumParams{});
  EXPECT_EQ(r.residuals.size(), s.samples.size() - 1);
  for (double x : r.residuals) EXPECT_EQ(x, 0.0);
}

TEST(IdentityResidualTest, SecondOrderUnderRefinement) {
  const double r1 = max_residual(Scheme::imex2, 2e-3);
  const double r2 = max_residual(Scheme::imex2, 1e-3);
  EXPECT_NEAR(r1 / r2, 4.0, 0.5);
}

TEST(IdentityResidualTest, NonlinearRunConverges) {
  const auto spec = InitialDataSpec::single_mode({1}, 0.3);
  const SimState s0 = build_initial(spec, spec, Grid::cube(1, 32));
  const MediumParams p{1.0, 1.0, 1.0, 1.0};
  auto r = [&](double dt) { return identity_residual(simulate(s0, 0.5, StepConfig{dt}, p, 1), p).max_abs; };
  const double r1 = r(2e-3), r2 = r(1e-3);
  EXPECT_LT(r2, r1 / 3.0);
}

TEST(IdentityResidualTest, Errors) {
  const std::vector<EnergySample> two(2);
  EXPECT_THROW(identity_residual(two), std::invalid_argument);
  std::vector<EnergySample> uneven(3);
  uneven[1].t = 0.1;
  uneven[2].t = 0.3;
  EXPECT_THROW(identity_residual(uneven), std::invalid_argument);
}

TEST(SeriesPropertyTest, DissipationNondecreasing) {
  const auto spec = InitialDataSpec::single_mode({2}, 0.2);
  const SimState s0 = build_initial(spec, spec, Grid::cube(1, 32));
  const TimeSeries s = simulate(s0, 3.0, StepConfig{}, MediumParams{1.0, 0.5, 1.0, 1.0}, 10);
  ASSERT_TRUE(s.completed());
  for (std::size_t i = 1; i < s.samples.size(); ++i) {
    EXPECT_GE(s.samples[i].D_cum, s.samples[i - 1].D_cum);
    EXPECT_GE(s.samples[i].w_grad_ptt, s.samples[i - 1].w_grad_ptt);
    EXPECT_GE(s.samples[i].E, 0.0);
  }
}
