#pragma once

// Dirichlet sine basis on a box (0,L_1) x ... x (0,L_d), d <= 3.
//
// A field u = sum_m a_m prod_i sin(m_i pi x_i / L_i) is stored by its
// coefficients a_m, m_i = 1..N_i, flattened row-major (last axis fastest).
// Three sample layouts are used:
//   nodal    x_j = j L/(N+1), j = 1..N          (DST-I collocation nodes)
//   padded   x_j = j L/M,     j = 0..M, M = 2(N+1)  (products, DCT-I nodes)
//   refined  x_j = j L/(r(N+1)), j = 1..r(N+1)-1    (sup and L^q quadrature)
// Quadratic products of sine/cosine series are cosine series of degree
// <= 2N in every axis, which the padded layout resolves exactly; their
// Galerkin projection back onto the retained sine modes is exact.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace blackstock {

inline constexpr int kMaxDim = 3;
inline constexpr int kMinModes = 4;
inline constexpr int kRefineFactor = 4;

class Grid {
 public:
  Grid(std::vector<double> extents, std::vector<int> modes);

  // (0, pi)^d with n modes per axis.
  static Grid cube(int dim, int n);

  int dim() const { return static_cast<int>(extents_.size()); }
  double extent(int axis) const { return extents_[axis]; }
  int modes(int axis) const { return modes_[axis]; }
  const std::vector<double>& extents() const { return extents_; }
  const std::vector<int>& modes() const { return modes_; }

  std::size_t size() const { return size_; }
  std::vector<std::size_t> shape() const;
  std::vector<std::size_t> padded_shape() const;
  std::vector<std::size_t> refined_shape() const;

  static int padded_intervals(int n) { return 2 * (n + 1); }

  double node(int axis, int j) const;
  // Trapezoid weight of a nodal sample, prod_i L_i/(N_i+1).
  double quadrature_weight() const;
  // ||phi_m||^2 = prod_i L_i/2.
  double mode_weight() const;

  std::size_t flat_index(std::span<const int> m) const;
  std::vector<int> multi_index(std::size_t flat) const;

  // Dirichlet Laplacian eigenvalue per flat coefficient index (all < 0).
  const std::vector<double>& symbols() const { return *symbols_; }
  // m pi / L along one axis, per flat coefficient index.
  const std::vector<double>& wavenumbers(int axis) const { return (*wavenumbers_)[axis]; }

  // Same grid with every axis' mode count replaced.
  Grid with_modes(std::vector<int> modes) const { return Grid(extents_, std::move(modes)); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.extents_ == b.extents_ && a.modes_ == b.modes_;
  }

 private:
  std::vector<double> extents_;
  std::vector<int> modes_;
  std::size_t size_ = 0;
  std::shared_ptr<const std::vector<double>> symbols_;
  std::shared_ptr<const std::vector<std::vector<double>>> wavenumbers_;
};

double laplacian_symbol(const Grid& grid, std::span<const int> m);

class SpectralField {
 public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, std::vector<double> coeffs);

  static SpectralField mode(const Grid& grid, std::span<const int> m, double amplitude = 1.0);

  const Grid& grid() const { return grid_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  double at(std::span<const int> m) const { return coeffs_[grid_.flat_index(m)]; }
  std::size_t size() const { return coeffs_.size(); }

  bool is_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  // this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  // Coefficient-wise multiplication by the Laplacian symbol.
  SpectralField laplacian() const;

 private:
  Grid grid_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

// Values of a field (or of a derivative) on one of the sample layouts.
enum class Layout { nodal, padded, refined };

struct Samples {
  Grid grid;
  Layout layout;
  std::vector<double> values;
};

std::vector<std::size_t> layout_shape(const Grid& grid, Layout layout);

Samples to_physical(const SpectralField& field);
SpectralField to_spectral(const Grid& grid, std::span<const double> nodal_values);

std::vector<Samples> gradient_physical(const SpectralField& field);

Samples evaluate(const SpectralField& field, Layout layout);
// d/dx_axis of the field on the given layout.
Samples evaluate_derivative(const SpectralField& field, int axis, Layout layout);

// Galerkin sine projection of a function sampled on the padded layout,
// assumed even (cosine series) in every axis, as products of two sine
// series or of two cosine series are.
SpectralField project_padded(const Samples& padded);

SpectralField dealiased_product(const Samples& a, const Samples& b);

}  // namespace blackstock
