#pragma once

// Right-hand sides of the Blackstock equation
//   psi_tt - c^2 (1 - 2k psi_t) Lap psi - b Lap psi_t + 2 sigma grad psi . grad psi_t = 0
// written as psi_tt = c^2 Lap psi + b Lap v + f with v = psi_t and the quadratic source
//   f = -2 k c^2 v Lap psi - 2 sigma grad psi . grad v.

#include "blackstock/field_state.hpp"

namespace blackstock {

struct MediumParams {
  double c = 1.0;
  double b = 1.0;
  double k = 0.0;
  double sigma = 0.0;

  void validate() const;
  bool is_linear() const { return k == 0.0 && sigma == 0.0; }
};

// c^2 Lap psi + b Lap v, modewise.
SpectralField linear_acceleration(const SimState& state, const MediumParams& p);

// -2 k c^2 alpha Lap psi - 2 sigma grad psi . grad alpha, projected onto the sine modes.
SpectralField frozen_source(const SpectralField& psi, const SpectralField& alpha, const MediumParams& p);

SpectralField assemble_f(const SimState& state, const MediumParams& p);

SpectralField nonlinear_acceleration(const SimState& state, const MediumParams& p);

SpectralField linearized_acceleration(const SimState& state, const SpectralField& alpha,
                                      const SpectralField& ftilde, const MediumParams& p);

}  // namespace blackstock
