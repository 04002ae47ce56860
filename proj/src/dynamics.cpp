#include "blackstock/dynamics.hpp"

#include "blackstock/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace blackstock {

void MediumParams::validate() const {
  if (!std::isfinite(c) || !std::isfinite(b) || !std::isfinite(k) || !std::isfinite(sigma)) {
    throw std::invalid_argument("medium parameters must be finite");
  }
  if (!(c > 0.0)) throw std::invalid_argument("sound speed must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("sound diffusivity must be positive");
}

SpectralField linear_acceleration(const SimState& state, const MediumParams& p) {
  const auto& lambda = state.grid().symbols();
  SpectralField out(state.grid());
  const double c2 = p.c * p.c;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = lambda[i] * (c2 * state.psi[i] + p.b * state.v[i]);
  }
  return out;
}

SpectralField frozen_source(const SpectralField& psi, const SpectralField& alpha, const MediumParams& p) {
  const Grid& grid = psi.grid();
  if (!(grid == alpha.grid())) throw std::invalid_argument("frozen_source: grid mismatch");
  if (p.is_linear()) return SpectralField(grid);

  Samples acc{grid, Layout::padded, {}};
  if (p.k != 0.0) {
    const Samples a = evaluate(alpha, Layout::padded);
    const Samples lap = evaluate(psi.laplacian(), Layout::padded);
    const double scale = -2.0 * p.k * p.c * p.c;
    acc.values.resize(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) acc.values[i] = scale * a.values[i] * lap.values[i];
  }
  if (p.sigma != 0.0) {
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const Samples dpsi = evaluate_derivative(psi, axis, Layout::padded);
      const Samples dalpha = evaluate_derivative(alpha, axis, Layout::padded);
      if (acc.values.empty()) acc.values.assign(dpsi.values.size(), 0.0);
      for (std::size_t i = 0; i < dpsi.values.size(); ++i) {
        acc.values[i] -= 2.0 * p.sigma * dpsi.values[i] * dalpha.values[i];
      }
    }
  }
  SpectralField out = project_padded(acc);
  if (!out.is_finite()) throw DivergenceError("non-finite nonlinear source");
  return out;
}

SpectralField assemble_f(const SimState& state, const MediumParams& p) {
  return frozen_source(state.psi, state.v, p);
}

SpectralField nonlinear_acceleration(const SimState& state, const MediumParams& p) {
  SpectralField out = linear_acceleration(state, p);
  out += assemble_f(state, p);
  if (!out.is_finite()) throw DivergenceError("non-finite acceleration");
  return out;
}

SpectralField linearized_acceleration(const SimState& state, const SpectralField& alpha,
                                      const SpectralField& ftilde, const MediumParams& p) {
  if (!(alpha.grid() == state.grid()) || !(ftilde.grid() == state.grid())) {
    throw std::invalid_argument("linearized_acceleration: grid mismatch");
  }
  SpectralField out = linear_acceleration(state, p);
  out += frozen_source(state.psi, alpha, p);
  out += ftilde;
  return out;
}

}  // namespace blackstock
