#include "blackstock/energy_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace blackstock {

void GammaWeights::validate() const {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !(gamma3 > 0.0)) {
    throw std::invalid_argument("Lyapunov weights must be positive");
  }
}

namespace {

// Modewise sums weighted by powers of mu = -lambda, times ||phi_m||^2.
struct ModalSums {
  double v2 = 0.0;        // ||v||^2
  double grad_psi2 = 0.0;  // ||grad psi||^2
  double lap_psi2 = 0.0;   // ||Lap psi||^2
  double grad_v2 = 0.0;    // ||grad v||^2
  double lap_v2 = 0.0;     // ||Lap v||^2
  double psi_v = 0.0;      // int psi v
  double grad_psi_v = 0.0;  // int grad psi . grad v = int -Lap psi v
};

ModalSums modal_sums(const SimState& s) {
  const auto& lambda = s.grid().symbols();
  ModalSums m;
  for (std::size_t i = 0; i < s.psi.size(); ++i) {
    const double mu = -lambda[i];
    const double x = s.psi[i];
    const double y = s.v[i];
    m.v2 += y * y;
    m.grad_psi2 += mu * x * x;
    m.lap_psi2 += mu * mu * x * x;
    m.grad_v2 += mu * y * y;
    m.lap_v2 += mu * mu * y * y;
    m.psi_v += x * y;
    m.grad_psi_v += mu * x * y;
  }
  const double w = s.grid().mode_weight();
  m.v2 *= w;
  m.grad_psi2 *= w;
  m.lap_psi2 *= w;
  m.grad_v2 *= w;
  m.lap_v2 *= w;
  m.psi_v *= w;
  m.grad_psi_v *= w;
  return m;
}

double inner(const SpectralField& a, const SpectralField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * a.grid().mode_weight();
}

Functionals from_sums(const ModalSums& m, const MediumParams& p) {
  const double c2 = p.c * p.c;
  Functionals f;
  f.E1 = 0.5 * m.v2 + 0.5 * c2 * m.grad_psi2;
  f.E2 = c2 / (2.0 * p.b) * m.lap_psi2;
  f.F1 = m.psi_v + 0.5 * p.b * m.grad_psi2;
  f.F2 = m.grad_psi_v + 0.5 * p.b * m.lap_psi2;
  f.F3 = c2 * m.grad_psi_v + 0.5 * p.b * m.grad_v2;
  return f;
}

// Per-mode quadratic forms of E and L in (x, y) = (psi_m, v_m), without ||phi_m||^2.
struct ModalForms {
  double ex, ey;          // E = ex x^2 + ey y^2
  double lxx, lxy, lyy;   // L = lxx x^2 + lxy x y + lyy y^2
};

ModalForms modal_forms(const MediumParams& p, const GammaWeights& g, double mu) {
  const double c2 = p.c * p.c;
  ModalForms f{};
  f.ex = 0.5 * c2 * mu + c2 / (2.0 * p.b) * mu * mu;
  f.ey = 0.5 + mu;
  f.lxx = 0.5 * c2 * mu + g.gamma1 * c2 / (2.0 * p.b) * mu * mu + g.gamma2 * 0.5 * p.b * (mu + mu * mu);
  f.lxy = g.gamma2 * (1.0 + mu) + g.gamma3 * c2 * mu;
  f.lyy = 0.5 + g.gamma3 * 0.5 * p.b * mu;
  return f;
}

// Exact extrema of L/E for one mode (2x2 generalized eigenvalues).
std::pair<double, double> modal_ratio_range(const MediumParams& p, const GammaWeights& g, double mu) {
  const ModalForms f = modal_forms(p, g, mu);
  const double a = f.lxx / f.ex;
  const double d = f.lyy / f.ey;
  const double off = 0.5 * f.lxy / std::sqrt(f.ex * f.ey);
  const double mean = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
  return {mean - rad, mean + rad};
}

std::set<double> distinct_mu(const Grid& grid) {
  std::set<double> mus;
  for (double l : grid.symbols()) mus.insert(-l);
  return mus;
}

}  // namespace

double energy_E(const SimState& state, const MediumParams& p) {
  const ModalSums m = modal_sums(state);
  const Functionals f = from_sums(m, p);
  return f.E1 + f.E2 + m.grad_v2;
}

Functionals functionals(const SimState& state, const MediumParams& p) {
  return from_sums(modal_sums(state), p);
}

double lyapunov_L(const Functionals& f, const GammaWeights& g) {
  return f.E1 + g.gamma1 * f.E2 + g.gamma2 * f.F1 + g.gamma2 * f.F2 + g.gamma3 * f.F3;
}

double lyapunov_L(const SimState& state, const MediumParams& p, const GammaWeights& g) {
  return lyapunov_L(functionals(state, p), g);
}

double dissipation_integrand(const SimState& state, const SpectralField& accel) {
  const ModalSums m = modal_sums(state);
  return m.grad_v2 + m.lap_v2 + m.grad_psi2 + m.lap_psi2 + inner(accel, accel);
}

std::pair<double, double> weighted_norms(const SimState& state, const SpectralField& accel) {
  const double w = std::sqrt(state.time);
  return {w * norm(accel, NormKind::L2), w * norm(state.v, NormKind::H2lap)};
}

EnergySample make_sample(const SimState& state, const MediumParams& p, const GammaWeights& g,
                         const SpectralField& f, const SpectralField& accel, double d_cum,
                         double grad_ptt_cum) {
  const ModalSums m = modal_sums(state);
  const Functionals fn = from_sums(m, p);
  EnergySample s;
  s.t = state.time;
  s.E1 = fn.E1;
  s.E2 = fn.E2;
  s.E = fn.E1 + fn.E2 + m.grad_v2;
  s.F1 = fn.F1;
  s.F2 = fn.F2;
  s.F3 = fn.F3;
  s.L = lyapunov_L(fn, g);
  s.D_cum = d_cum;
  const double root_t = std::sqrt(state.time);
  s.w_ptt = root_t * std::sqrt(inner(accel, accel));
  s.lap_vt = std::sqrt(m.lap_v2);
  s.w_lap_vt = root_t * s.lap_vt;
  s.w_grad_ptt = grad_ptt_cum;
  s.dissipation_rate = p.b * m.grad_v2;
  s.source_power = inner(f, state.v);
  return s;
}

EquivalenceConstants equivalence_constants(const MediumParams& p, const GammaWeights& g,
                                           std::span<const SimState> probes) {
  if (probes.empty()) throw std::invalid_argument("equivalence scan needs at least one probe state");
  EquivalenceConstants out;
  out.c1_hat = std::numeric_limits<double>::infinity();
  out.c2_hat = -std::numeric_limits<double>::infinity();
  for (const auto& s : probes) {
    const double e = energy_E(s, p);
    if (!(e > 0.0)) throw std::invalid_argument("equivalence probes must be nonzero");
    const double ratio = lyapunov_L(s, p, g) / e;
    out.c1_hat = std::min(out.c1_hat, ratio);
    out.c2_hat = std::max(out.c2_hat, ratio);
  }
  out.admissible = out.c1_hat > 0.0;
  return out;
}

std::vector<SimState> modal_probe_states(const Grid& grid, const MediumParams& p, int max_mode, int angles) {
  std::vector<int> modes(grid.dim());
  for (int axis = 0; axis < grid.dim(); ++axis) modes[axis] = std::max(kMinModes, std::min(max_mode, grid.modes(axis)));
  const Grid small = grid.with_modes(modes);
  const double w = small.mode_weight();
  const GammaWeights any_weights;
  std::vector<SimState> probes;
  probes.reserve(small.size() * angles);
  for (std::size_t i = 0; i < small.size(); ++i) {
    const ModalForms f = modal_forms(p, any_weights, -small.symbols()[i]);
    for (int a = 0; a < angles; ++a) {
      const double theta = std::numbers::pi * a / angles;
      SpectralField psi(small), v(small);
      psi[i] = std::cos(theta) / std::sqrt(f.ex * w);
      v[i] = std::sin(theta) / std::sqrt(f.ey * w);
      probes.emplace_back(std::move(psi), std::move(v));
    }
  }
  return probes;
}

std::array<double, 3> linear_lyapunov_rate(const MediumParams& p, const GammaWeights& g, double mu) {
  // With y' = -c^2 mu x - b mu y:
  //   dE1 = -b mu y^2,                 dE2 = (c^2/b) mu^2 x y,
  //   dF1 = y^2 - c^2 mu x^2,          dF2 = mu y^2 - c^2 mu^2 x^2,
  //   dF3 = (c^2 mu - b^2 mu^2) y^2 - c^4 mu^2 x^2 - 2 b c^2 mu^2 x y.
  const double c2 = p.c * p.c;
  const double xx = -g.gamma2 * c2 * (mu + mu * mu) - g.gamma3 * c2 * c2 * mu * mu;
  const double xy = g.gamma1 * c2 / p.b * mu * mu - 2.0 * g.gamma3 * p.b * c2 * mu * mu;
  const double yy = -p.b * mu + g.gamma2 * (1.0 + mu) + g.gamma3 * (c2 * mu - p.b * p.b * mu * mu);
  return {xx, xy, yy};
}

bool linear_rate_negative(const MediumParams& p, const GammaWeights& g, const Grid& grid) {
  for (double mu : distinct_mu(grid)) {
    const auto [xx, xy, yy] = linear_lyapunov_rate(p, g, mu);
    if (!(xx < 0.0 && yy < 0.0 && 4.0 * xx * yy > xy * xy)) return false;
  }
  return true;
}

GammaWeights calibrate_gammas(const MediumParams& p, const Grid& grid, GammaWeights start) {
  start.validate();
  const auto mus = distinct_mu(grid);
  auto admissible = [&](const GammaWeights& g) {
    for (double mu : mus) {
      if (!(modal_ratio_range(p, g, mu).first > 0.0)) return false;
    }
    return linear_rate_negative(p, g, grid);
  };
  GammaWeights g = start;
  for (int halvings = 0; halvings < 60; ++halvings) {
    if (admissible(g)) return g;
    g.gamma1 *= 0.5;
    g.gamma2 *= 0.5;
    g.gamma3 *= 0.5;
  }
  throw std::runtime_error("no admissible Lyapunov weights found by halving");
}

ResidualReport identity_residual(std::span<const EnergySample> samples) {
  if (samples.size() < 3) throw std::invalid_argument("identity residual needs at least 3 samples");
  const double dt = samples[1].t - samples[0].t;
  ResidualReport r;
  r.residuals.reserve(samples.size() - 1);
  for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
    const auto& a = samples[j];
    const auto& b = samples[j + 1];
    const double h = b.t - a.t;
    if (!(h > 0.0) || std::abs(h - dt) > 1e-9 * std::max(1.0, dt)) {
      throw std::invalid_argument("identity residual needs uniformly spaced samples");
    }
    const double res = (b.E1 - a.E1) / h + 0.5 * (a.dissipation_rate + b.dissipation_rate) -
                       0.5 * (a.source_power + b.source_power);
    r.residuals.push_back(res);
    r.max_abs = std::max(r.max_abs, std::abs(res));
  }
  return r;
}

}  // namespace blackstock
