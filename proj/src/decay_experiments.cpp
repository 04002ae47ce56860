#include "blackstock/decay_experiments.hpp"

#include "blackstock/errors.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

namespace blackstock {

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::decays: return "decays";
    case DecayClass::stagnates: return "stagnates";
    case DecayClass::diverges: return "diverges";
  }
  return "unknown";
}

DecayFit fit_decay(const TimeSeries& series, std::pair<double, double> window) {
  const auto [t0, t1] = window;
  if (!(t0 < t1)) throw PreconditionError("fit window must satisfy t_start < t_end");
  DecayFit fit;
  fit.t_start = t0;
  fit.t_end = t1;
  if (!series.completed()) {
    fit.classification = DecayClass::diverges;
    return fit;
  }
  if (series.samples.empty() || t0 < series.samples.front().t - 1e-12 || t1 > series.samples.back().t + 1e-12) {
    throw PreconditionError("fit window lies outside the series");
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t n = 0;
  for (const auto& s : series.samples) {
    if (s.t < t0 - 1e-12 || s.t > t1 + 1e-12) continue;
    if (!(s.E > 0.0)) throw PreconditionError("nonpositive energy inside the fit window");
    const double y = std::log(s.E);
    sx += s.t;
    sy += y;
    sxx += s.t * s.t;
    sxy += s.t * y;
    syy += y * y;
    ++n;
  }
  if (n < 2) throw PreconditionError("fit window contains fewer than two samples");
  const double nn = static_cast<double>(n);
  const double cov = sxy - sx * sy / nn;
  const double var_t = sxx - sx * sx / nn;
  const double var_y = syy - sy * sy / nn;
  const double slope = cov / var_t;
  const double intercept = (sy - slope * sx) / nn;
  fit.points = n;
  // A constant series is fitted exactly by a flat line.
  fit.r_squared = var_y <= 1e-300 * nn ? 1.0 : (cov * cov) / (var_t * var_y);
  fit.zeta = std::max(0.0, -slope);
  fit.prefactor = std::exp(intercept) / series.samples.front().E;
  fit.classification = (fit.zeta > kDecayRateFloor && fit.r_squared > kDecayMinRSquared) ? DecayClass::decays
                                                                                         : DecayClass::stagnates;
  return fit;
}

DecayFit fit_decay(const TimeSeries& series) {
  if (series.samples.empty()) throw PreconditionError("empty series");
  const double start = series.samples.front().t;
  const double span = (series.completed() ? series.samples.back().t : series.termination_time) - start;
  return fit_decay(series, {start + 0.25 * span, start + 0.75 * span});
}

ProbeResult classify_amplitude(const MediumParams& p, const Grid& grid, const InitialDataSpec& psi0,
                               const InitialDataSpec& psi1, double amplitude, const ProbeSettings& settings) {
  const SimState initial = build_initial(psi0.scaled(amplitude), psi1.scaled(amplitude), grid);
  const TimeSeries series = simulate(initial, settings.final_time, settings.step, p, settings.sample_every);
  const auto window = settings.window.value_or(
      std::pair{0.25 * settings.final_time, 0.75 * settings.final_time});
  const DecayFit fit = fit_decay(series, window);
  return ProbeResult{amplitude, fit.classification, fit.zeta, series.termination_time};
}

ThresholdReport threshold_bisection(const MediumParams& p, const Grid& grid, const InitialDataSpec& psi0,
                                    const InitialDataSpec& psi1, double lo, double hi, int iters,
                                    const ProbeSettings& settings) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("threshold bracket needs 0 < lo < hi");
  if (iters < 0) throw std::invalid_argument("bisection iterations must be nonnegative");
  ThresholdReport report;
  report.params = p;
  report.modes = grid.modes();

  // The two bracket probes are independent.
  auto high_probe = std::async(std::launch::async, [&] { return classify_amplitude(p, grid, psi0, psi1, hi, settings); });
  const ProbeResult low = classify_amplitude(p, grid, psi0, psi1, lo, settings);
  const ProbeResult high = high_probe.get();
  report.runs = {low, high};
  if (low.classification == DecayClass::decays && high.classification == DecayClass::decays) {
    throw PreconditionError("threshold not bracketed: both decay (lo = " + std::to_string(lo) +
                            ", hi = " + std::to_string(hi) + ")");
  }
  if (low.classification != DecayClass::decays || high.classification != DecayClass::diverges) {
    throw PreconditionError("threshold not bracketed: lo " + to_string(low.classification) + ", hi " +
                            to_string(high.classification));
  }
  for (int it = 0; it < iters; ++it) {
    const double mid = std::sqrt(lo * hi);
    const ProbeResult probe = classify_amplitude(p, grid, psi0, psi1, mid, settings);
    report.runs.push_back(probe);
    if (probe.classification == DecayClass::decays) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  report.amplitude_lo = lo;
  report.amplitude_hi = hi;
  report.delta_star = std::sqrt(lo * hi);
  const SimState at_star = build_initial(psi0.scaled(report.delta_star), psi1.scaled(report.delta_star), grid);
  report.data_norm_at_delta_star = full_h_norm(at_star.psi, 2) + full_h_norm(at_star.v, 1);
  return report;
}

RegularityStudy weighted_regularity_study(const MediumParams& p, const RegularitySettings& settings,
                                          std::vector<double> extents) {
  if (settings.resolutions.size() < 2) throw std::invalid_argument("regularity study needs two resolutions");
  if (extents.empty()) extents = {std::numbers::pi};
  RegularityStudy study;
  for (int n : settings.resolutions) {
    const Grid grid(extents, std::vector<int>(extents.size(), n));
    const SimState initial = build_initial(InitialDataSpec::zero(),
                                           InitialDataSpec::power_law(settings.exponent, settings.amplitude), grid);
    StepConfig cfg;
    cfg.dt = settings.dt;
    cfg.scheme = settings.scheme;
    const TimeSeries series = simulate(initial, settings.final_time, cfg, p, 1);
    if (!series.completed()) {
      throw PreconditionError("regularity run diverged at N = " + std::to_string(n) + ": " + series.message);
    }
    RegularityRow row;
    row.modes = n;
    row.initial_lap = norm(initial.v, NormKind::H2lap);
    for (const auto& s : series.samples) {
      row.sup_unweighted = std::max(row.sup_unweighted, s.lap_vt);
      if (s.w_lap_vt > row.sup_weighted) {
        row.sup_weighted = s.w_lap_vt;
        row.argmax_weighted = s.t;
      }
    }
    study.rows.push_back(row);
  }
  const auto& first = study.rows.front();
  const auto& last = study.rows.back();
  study.unweighted_growth = last.sup_unweighted / first.sup_unweighted;
  study.weighted_ratio = last.sup_weighted / first.sup_weighted;
  study.passes = study.unweighted_growth >= kMinUnweightedGrowth &&
                 std::abs(study.weighted_ratio - 1.0) <= kMaxWeightedChange;
  return study;
}

}  // namespace blackstock
