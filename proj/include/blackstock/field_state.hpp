#pragma once

#include "blackstock/spectral_grid.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace blackstock {

// Unknowns of the first-order system: potential psi and its rate v = psi_t.
struct SimState {
  SimState(SpectralField psi_, SpectralField v_, double time_ = 0.0);
  static SimState zero(const Grid& grid);

  const Grid& grid() const { return psi.grid(); }
  bool is_finite() const { return psi.is_finite() && v.is_finite(); }

  SpectralField psi;
  SpectralField v;
  double time = 0.0;
};

enum class NormKind { L2, H1semi, H2lap, Linf, L3, L4 };

NormKind parse_norm_kind(std::string_view name);

double norm(const SpectralField& field, NormKind kind);
// order 1: (L2^2 + H1semi^2)^{1/2}; order 2 adds H2lap^2.
double full_h_norm(const SpectralField& field, int order);

// Discrete H^1 x L^2 product norm of a state.
double state_norm(const SimState& state);

struct ModeAmplitude {
  std::vector<int> mode;
  double amplitude = 0.0;
};

struct InitialDataSpec {
  enum class Kind { zero, single_mode, multi_mode, power_law };

  static InitialDataSpec zero();
  static InitialDataSpec single_mode(std::vector<int> mode, double amplitude);
  static InitialDataSpec multi_mode(std::vector<ModeAmplitude> terms);
  // a_m = amplitude * (prod_i m_i)^{-exponent}
  static InitialDataSpec power_law(double exponent, double amplitude);

  InitialDataSpec scaled(double factor) const;
  void validate() const;

  Kind kind = Kind::zero;
  std::vector<ModeAmplitude> terms;
  double exponent = 0.0;
  double amplitude = 0.0;
};

std::string to_string(InitialDataSpec::Kind kind);

SpectralField build_field(const InitialDataSpec& spec, const Grid& grid);
SimState build_initial(const InitialDataSpec& psi0, const InitialDataSpec& psi1, const Grid& grid);

}  // namespace blackstock
