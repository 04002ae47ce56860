#pragma once

// Numerical probes of the interpolation inequalities and a nonlinear
// Gronwall-type bound.

#include "blackstock/field_state.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace blackstock {

// ||u||_inf / (||u||_{H^2}^{d/4} ||u||_{L^2}^{1-d/4})
double agmon_ratio(const SpectralField& u);

// ||u||_{L^q} / (||u||_{H^1}^{d/2-d/q} ||u||_{L^2}^{1-d/2+d/q}), q in {3, 4}
double interpolation_ratio(const SpectralField& u, int q);

// i.i.d. standard normal coefficients on every mode with max_i m_i <= max_mode.
SpectralField random_trig_polynomial(const Grid& grid, int max_mode, std::mt19937_64& rng);

enum class RatioKind { agmon, interpolation3, interpolation4 };
std::string to_string(RatioKind kind);
double ratio(const SpectralField& u, RatioKind kind);

struct EmpiricalConstant {
  RatioKind kind = RatioKind::agmon;
  std::size_t samples = 0;
  double max_base = 0.0;    // max over the first `samples` draws
  double max_ratio = 0.0;   // max over 2 * samples draws
  double relative_change = 0.0;
  double constant = 0.0;    // calibrated constant: max_ratio * 1.1
  bool stable = false;      // relative_change < 5%
};

inline constexpr double kConstantSafety = 1.1;
inline constexpr double kStabilityTolerance = 0.05;

// Max ratio over `samples` random trig polynomials, compared with the max
// after the same stream is continued to twice as many draws.
EmpiricalConstant empirical_constant(RatioKind kind, const Grid& grid, int max_mode, std::size_t samples,
                                     std::uint64_t seed);

// Draws `samples` random polynomials and counts those whose ratio changes by
// more than rel_tol (relative) under u -> s u for s in {5, -2, 1e-3}.
std::size_t scale_invariance_violations(RatioKind kind, const Grid& grid, int max_mode, std::size_t samples,
                                        std::uint64_t seed, double rel_tol = 1e-12);

struct GronwallParams {
  double c1 = 2.0;
  double c2 = 1.0;
  double kappa = 1.0;
  double a = -1.0;
  double u0 = 0.05;

  void validate() const;
  // a + (1 + 1/kappa) c2 2^kappa c1^kappa u0^kappa; the bound applies iff < 0.
  double smallness() const;
  bool admissible() const { return smallness() < 0.0; }
  // (1 + c2 c1^k u0^k / (a k + (1+k) c2 2^k c1^k u0^k)) c1, as stated.
  double bound_coefficient() const;
  // Same expression with the denominator -a k - (1+k) c2 2^k c1^k u0^k,
  // positive exactly when the smallness condition holds.
  double sign_corrected_coefficient() const;
};

struct GronwallResult {
  std::vector<double> times;
  std::vector<double> trace;   // extremal u: equality in the integral inequality
  std::vector<double> bound;   // bound_coefficient * e^{a t} u0
  double coefficient = 0.0;
  double max_excess = 0.0;     // max_t (trace - bound)
  double first_violation = -1.0;
  bool ok = false;             // trace <= bound + 1e-9 everywhere
  double corrected_coefficient = 0.0;
  bool corrected_ok = false;
};

inline constexpr double kGronwallSlack = 1e-9;

// Left-endpoint quadrature of the Volterra equation
//   u(t) = c1 e^{a t} u0 + c2 int_0^t e^{a (t - s)} u(s)^{1+kappa} ds.
// Throws PreconditionError when the smallness condition fails. Only every
// `keep_every`-th point is stored in the returned trace.
GronwallResult gronwall_verify(const GronwallParams& g, double horizon, double dt = 1e-4, int keep_every = 100);

// Admissible parameters drawn with c1 in (1, 4), c2 in [0, 2), kappa in (0.25, 3),
// a in (-3, -0.1); u0 is chosen so the smallness value lands in (a, 0).
GronwallParams random_admissible_gronwall(std::mt19937_64& rng);

}  // namespace blackstock
