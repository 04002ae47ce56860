#include "blackstock/field_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blackstock {

SimState::SimState(SpectralField psi_, SpectralField v_, double time_)
    : psi(std::move(psi_)), v(std::move(v_)), time(time_) {
  if (!(psi.grid() == v.grid())) throw std::invalid_argument("psi and v must share one grid");
  if (time < 0.0) throw std::invalid_argument("state time must be nonnegative");
}

SimState SimState::zero(const Grid& grid) { return SimState(SpectralField(grid), SpectralField(grid)); }

NormKind parse_norm_kind(std::string_view name) {
  if (name == "L2") return NormKind::L2;
  if (name == "H1semi") return NormKind::H1semi;
  if (name == "H2lap") return NormKind::H2lap;
  if (name == "Linf") return NormKind::Linf;
  if (name == "L3") return NormKind::L3;
  if (name == "L4") return NormKind::L4;
  throw std::invalid_argument("unknown norm kind '" + std::string(name) + "'");
}

namespace {

// sum_m |lambda_m|^power a_m^2 * ||phi_m||^2
double weighted_sum(const SpectralField& field, int power) {
  const auto& lambda = field.grid().symbols();
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double a = field[i];
    const double w = power == 0 ? 1.0 : (power == 1 ? -lambda[i] : lambda[i] * lambda[i]);
    sum += w * a * a;
  }
  return sum * field.grid().mode_weight();
}

double refined_lq(const SpectralField& field, double q) {
  const Samples s = evaluate(field, Layout::refined);
  double h = 1.0;
  const Grid& g = field.grid();
  for (int axis = 0; axis < g.dim(); ++axis) h *= g.extent(axis) / (kRefineFactor * (g.modes(axis) + 1.0));
  double sum = 0.0;
  for (double u : s.values) sum += std::pow(std::abs(u), q);
  return std::pow(sum * h, 1.0 / q);
}

}  // namespace

double norm(const SpectralField& field, NormKind kind) {
  switch (kind) {
    case NormKind::L2: return std::sqrt(weighted_sum(field, 0));
    case NormKind::H1semi: return std::sqrt(weighted_sum(field, 1));
    case NormKind::H2lap: return std::sqrt(weighted_sum(field, 2));
    case NormKind::Linf: {
      const Samples s = evaluate(field, Layout::refined);
      double m = 0.0;
      for (double u : s.values) m = std::max(m, std::abs(u));
      return m;
    }
    case NormKind::L3: return refined_lq(field, 3.0);
    case NormKind::L4: return refined_lq(field, 4.0);
  }
  throw std::invalid_argument("unknown norm kind");
}

double full_h_norm(const SpectralField& field, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("full_h_norm order must be 1 or 2");
  double sum = weighted_sum(field, 0) + weighted_sum(field, 1);
  if (order == 2) sum += weighted_sum(field, 2);
  return std::sqrt(sum);
}

double state_norm(const SimState& state) {
  const double h1 = full_h_norm(state.psi, 1);
  const double l2 = norm(state.v, NormKind::L2);
  return std::sqrt(h1 * h1 + l2 * l2);
}

InitialDataSpec InitialDataSpec::zero() { return {}; }

InitialDataSpec InitialDataSpec::single_mode(std::vector<int> mode, double amplitude) {
  InitialDataSpec s;
  s.kind = Kind::single_mode;
  s.terms.push_back({std::move(mode), amplitude});
  return s;
}

InitialDataSpec InitialDataSpec::multi_mode(std::vector<ModeAmplitude> terms) {
  InitialDataSpec s;
  s.kind = Kind::multi_mode;
  s.terms = std::move(terms);
  return s;
}

InitialDataSpec InitialDataSpec::power_law(double exponent, double amplitude) {
  InitialDataSpec s;
  s.kind = Kind::power_law;
  s.exponent = exponent;
  s.amplitude = amplitude;
  return s;
}

InitialDataSpec InitialDataSpec::scaled(double factor) const {
  InitialDataSpec s = *this;
  for (auto& t : s.terms) t.amplitude *= factor;
  s.amplitude *= factor;
  return s;
}

void InitialDataSpec::validate() const {
  for (const auto& t : terms) {
    if (!std::isfinite(t.amplitude)) throw std::invalid_argument("initial-data amplitude must be finite");
  }
  if (!std::isfinite(amplitude)) throw std::invalid_argument("initial-data amplitude must be finite");
  if (kind == Kind::single_mode && terms.size() != 1) {
    throw std::invalid_argument("single_mode needs exactly one mode");
  }
  if (kind == Kind::power_law && !(exponent > 1.5)) {
    throw std::invalid_argument("power_law exponent must exceed 1.5 for H^1 data");
  }
}

std::string to_string(InitialDataSpec::Kind kind) {
  switch (kind) {
    case InitialDataSpec::Kind::zero: return "zero";
    case InitialDataSpec::Kind::single_mode: return "single_mode";
    case InitialDataSpec::Kind::multi_mode: return "multi_mode";
    case InitialDataSpec::Kind::power_law: return "power_law";
  }
  return "unknown";
}

SpectralField build_field(const InitialDataSpec& spec, const Grid& grid) {
  spec.validate();
  SpectralField f(grid);
  switch (spec.kind) {
    case InitialDataSpec::Kind::zero: break;
    case InitialDataSpec::Kind::single_mode:
    case InitialDataSpec::Kind::multi_mode:
      for (const auto& t : spec.terms) f[grid.flat_index(t.mode)] += t.amplitude;
      break;
    case InitialDataSpec::Kind::power_law:
      for (std::size_t i = 0; i < f.size(); ++i) {
        double prod = 1.0;
        for (int m : grid.multi_index(i)) prod *= m;
        f[i] = spec.amplitude * std::pow(prod, -spec.exponent);
      }
      break;
  }
  return f;
}

SimState build_initial(const InitialDataSpec& psi0, const InitialDataSpec& psi1, const Grid& grid) {
  return SimState(build_field(psi0, grid), build_field(psi1, grid), 0.0);
}

}  // namespace blackstock
