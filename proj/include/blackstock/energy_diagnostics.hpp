#pragma once

#include "blackstock/dynamics.hpp"

#include <array>
#include <span>
#include <utility>
#include <vector>

namespace blackstock {

struct GammaWeights {
  double gamma1 = 0.1;
  double gamma2 = 0.01;
  double gamma3 = 0.05;

  void validate() const;
};

// One time point of the diagnostics. The first block is the CSV row; the
// trailing fields feed the energy-identity residual and the regularity study.
struct EnergySample {
  double t = 0.0;
  double E = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
  double F3 = 0.0;
  double L = 0.0;
  double D_cum = 0.0;
  double w_ptt = 0.0;
  double w_lap_vt = 0.0;
  double w_grad_ptt = 0.0;

  double dissipation_rate = 0.0;  // b ||grad v||^2
  double source_power = 0.0;      // int f v
  double lap_vt = 0.0;            // ||Lap v||
};

struct Functionals {
  double E1 = 0.0;
  double E2 = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
  double F3 = 0.0;
};

double energy_E(const SimState& state, const MediumParams& p);
Functionals functionals(const SimState& state, const MediumParams& p);
double lyapunov_L(const Functionals& f, const GammaWeights& g);
double lyapunov_L(const SimState& state, const MediumParams& p, const GammaWeights& g);

// Integrand of the cumulative dissipation D(t):
// ||grad v||^2 + ||Lap v||^2 + ||grad psi||^2 + ||Lap psi||^2 + ||psi_tt||^2.
double dissipation_integrand(const SimState& state, const SpectralField& accel);

// (sqrt(t) ||psi_tt||, sqrt(t) ||Lap v||) with psi_tt = accel.
std::pair<double, double> weighted_norms(const SimState& state, const SpectralField& accel);

// Diagnostics at one state given its source f and acceleration. Cumulative
// quantities are supplied by the caller.
EnergySample make_sample(const SimState& state, const MediumParams& p, const GammaWeights& g,
                         const SpectralField& f, const SpectralField& accel, double d_cum,
                         double grad_ptt_cum);

struct EquivalenceConstants {
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  bool admissible = false;
};

// min / max of L/E over the probes.
EquivalenceConstants equivalence_constants(const MediumParams& p, const GammaWeights& g,
                                           std::span<const SimState> probes);

// Every functional is diagonal in the mode index, so L/E over arbitrary
// states is bracketed by its values on single modes. The probes cover
// every mode with |m|_inf <= max_mode at `angles` directions in the
// (psi_m, v_m) plane, normalized to unit energy.
std::vector<SimState> modal_probe_states(const Grid& grid, const MediumParams& p, int max_mode,
                                         int angles = 360);

// Coefficients (xx, xy, yy) of dL/dt = xx psi_m^2 + xy psi_m v_m + yy v_m^2
// for the linear dynamics of a mode with -Laplacian eigenvalue mu.
std::array<double, 3> linear_lyapunov_rate(const MediumParams& p, const GammaWeights& g, double mu);
// dL/dt negative definite on every mode of the grid for the linear dynamics.
bool linear_rate_negative(const MediumParams& p, const GammaWeights& g, const Grid& grid);

// Starting from `start`, halves gamma2 and gamma3 (and gamma1 with them)
// until the equivalence scan is admissible and the linear rate is negative.
GammaWeights calibrate_gammas(const MediumParams& p, const Grid& grid, GammaWeights start = {});

struct ResidualReport {
  std::vector<double> residuals;
  double max_abs = 0.0;
};

// residual_j = (E1_{j+1} - E1_j)/dt + b||grad v||^2 - int f v, the last two
// averaged over the interval endpoints.
ResidualReport identity_residual(std::span<const EnergySample> samples);

}  // namespace blackstock
