#include "blackstock/inequality_lab.hpp"

#include "blackstock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blackstock {

namespace {

void require_nonzero(const SpectralField& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] != 0.0) return;
  }
  throw std::invalid_argument("ratio of a zero field is undefined");
}

}  // namespace

double agmon_ratio(const SpectralField& u) {
  require_nonzero(u);
  const double d = u.grid().dim();
  const double lhs = norm(u, NormKind::Linf);
  return lhs / (std::pow(full_h_norm(u, 2), d / 4.0) * std::pow(norm(u, NormKind::L2), 1.0 - d / 4.0));
}

double interpolation_ratio(const SpectralField& u, int q) {
  if (q != 3 && q != 4) throw std::invalid_argument("interpolation ratio supports q = 3 or 4");
  require_nonzero(u);
  const double d = u.grid().dim();
  const double theta = d / 2.0 - d / q;
  const double lhs = norm(u, q == 3 ? NormKind::L3 : NormKind::L4);
  return lhs / (std::pow(full_h_norm(u, 1), theta) * std::pow(norm(u, NormKind::L2), 1.0 - theta));
}

SpectralField random_trig_polynomial(const Grid& grid, int max_mode, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto m = grid.multi_index(i);
    if (*std::max_element(m.begin(), m.end()) <= max_mode) u[i] = normal(rng);
  }
  return u;
}

std::string to_string(RatioKind kind) {
  switch (kind) {
    case RatioKind::agmon: return "agmon";
    case RatioKind::interpolation3: return "interpolation_q3";
    case RatioKind::interpolation4: return "interpolation_q4";
  }
  return "unknown";
}

double ratio(const SpectralField& u, RatioKind kind) {
  switch (kind) {
    case RatioKind::agmon: return agmon_ratio(u);
    case RatioKind::interpolation3: return interpolation_ratio(u, 3);
    case RatioKind::interpolation4: return interpolation_ratio(u, 4);
  }
  throw std::invalid_argument("unknown ratio kind");
}

EmpiricalConstant empirical_constant(RatioKind kind, const Grid& grid, int max_mode, std::size_t samples,
                                     std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("empirical constant needs at least one sample");
  std::mt19937_64 rng(seed);
  EmpiricalConstant out;
  out.kind = kind;
  out.samples = samples;
  for (std::size_t s = 0; s < 2 * samples; ++s) {
    const double r = ratio(random_trig_polynomial(grid, max_mode, rng), kind);
    out.max_ratio = std::max(out.max_ratio, r);
    if (s + 1 == samples) out.max_base = out.max_ratio;
  }
  out.relative_change = (out.max_ratio - out.max_base) / out.max_base;
  out.constant = kConstantSafety * out.max_ratio;
  out.stable = out.relative_change < kStabilityTolerance;
  return out;
}

std::size_t scale_invariance_violations(RatioKind kind, const Grid& grid, int max_mode, std::size_t samples,
                                        std::uint64_t seed, double rel_tol) {
  std::mt19937_64 rng(seed);
  std::size_t violations = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const SpectralField u = random_trig_polynomial(grid, max_mode, rng);
    const double base = ratio(u, kind);
    for (double factor : {5.0, -2.0, 1e-3}) {
      if (std::abs(ratio(factor * u, kind) - base) > rel_tol * base) {
        ++violations;
        break;
      }
    }
  }
  return violations;
}

void GronwallParams::validate() const {
  if (!(c1 > 1.0)) throw std::invalid_argument("Gronwall parameter c1 must exceed 1");
  if (!(c2 >= 0.0)) throw std::invalid_argument("Gronwall parameter c2 must be nonnegative");
  if (!(kappa > 0.0)) throw std::invalid_argument("Gronwall parameter kappa must be positive");
  if (!(a < 0.0)) throw std::invalid_argument("Gronwall parameter a must be negative");
  if (!(u0 >= 0.0)) throw std::invalid_argument("Gronwall parameter u0 must be nonnegative");
}

double GronwallParams::smallness() const {
  return a + (1.0 + 1.0 / kappa) * c2 * std::pow(2.0 * c1 * u0, kappa);
}

double GronwallParams::bound_coefficient() const {
  const double num = c2 * std::pow(c1 * u0, kappa);
  const double den = a * kappa + (1.0 + kappa) * c2 * std::pow(2.0 * c1 * u0, kappa);
  return num == 0.0 ? c1 : (1.0 + num / den) * c1;
}

double GronwallParams::sign_corrected_coefficient() const {
  const double num = c2 * std::pow(c1 * u0, kappa);
  const double den = -a * kappa - (1.0 + kappa) * c2 * std::pow(2.0 * c1 * u0, kappa);
  return num == 0.0 ? c1 : (1.0 + num / den) * c1;
}

GronwallResult gronwall_verify(const GronwallParams& g, double horizon, double dt, int keep_every) {
  g.validate();
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("horizon and step must be positive");
  if (!g.admissible()) {
    throw PreconditionError("Gronwall smallness condition fails: a + (1+1/kappa) c2 (2 c1 u0)^kappa = " +
                            std::to_string(g.smallness()) + " >= 0");
  }
  keep_every = std::max(keep_every, 1);
  GronwallResult r;
  r.coefficient = g.bound_coefficient();
  r.corrected_coefficient = g.sign_corrected_coefficient();
  r.ok = true;
  r.corrected_ok = true;
  r.max_excess = -std::numeric_limits<double>::infinity();

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double decay = std::exp(g.a * dt);
  double memory = 0.0;  // int_0^t e^{a(t-s)} u(s)^{1+kappa} ds
  double u = g.c1 * g.u0;
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = n * dt;
    const double envelope = std::exp(g.a * t) * g.u0;
    const double bound = r.coefficient * envelope;
    const double excess = u - bound;
    if (excess > r.max_excess) r.max_excess = excess;
    if (excess > kGronwallSlack && r.ok) {
      r.ok = false;
      r.first_violation = t;
    }
    if (u > r.corrected_coefficient * envelope + kGronwallSlack) r.corrected_ok = false;
    if (n % keep_every == 0 || n == steps) {
      r.times.push_back(t);
      r.trace.push_back(u);
      r.bound.push_back(bound);
    }
    memory = decay * (memory + dt * std::pow(u, 1.0 + g.kappa));
    u = g.c1 * std::exp(g.a * (t + dt)) * g.u0 + g.c2 * memory;
  }
  return r;
}

GronwallParams random_admissible_gronwall(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GronwallParams g;
  g.c1 = 1.0 + 3.0 * unit(rng) + 1e-6;
  g.c2 = 2.0 * unit(rng);
  g.kappa = 0.25 + 2.75 * unit(rng);
  g.a = -(0.1 + 2.9 * unit(rng));
  // Choose u0 so that (1 + 1/kappa) c2 (2 c1 u0)^kappa = fraction * |a|.
  const double fraction = 0.05 + 0.9 * unit(rng);
  if (g.c2 == 0.0) {
    g.u0 = unit(rng);
  } else {
    const double target = fraction * -g.a / ((1.0 + 1.0 / g.kappa) * g.c2);
    g.u0 = std::pow(target, 1.0 / g.kappa) / (2.0 * g.c1);
  }
  return g;
}

}  // namespace blackstock
