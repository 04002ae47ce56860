#pragma once

#include "blackstock/field_state.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace blackstock::testutil {

inline SpectralField random_field(const Grid& grid, std::mt19937_64& rng, double decay = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double scale = 1.0;
    if (decay > 0.0) {
      for (int m : grid.multi_index(i)) scale *= std::pow(m, -decay);
    }
    u[i] = scale * normal(rng);
  }
  return u;
}

inline SimState random_state(const Grid& grid, std::mt19937_64& rng, double amplitude = 1.0) {
  return SimState(amplitude * random_field(grid, rng, 2.0), amplitude * random_field(grid, rng, 2.0));
}

// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Sine coefficient (2/pi) int_0^pi g(x) sin(m x) dx by quadrature.
inline double sine_coefficient(const std::function<double(double)>& g, int m) {
  return 2.0 / M_PI * simpson([&](double x) { return g(x) * std::sin(m * x); }, 0.0, M_PI);
}

}  // namespace blackstock::testutil
