#include "blackstock/spectral_grid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blackstock {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense 1-D operators for one axis with n retained modes.
struct AxisOps {
  Eigen::MatrixXd nodal_sine;       // n x n, sin(m pi j/(n+1))
  Eigen::MatrixXd nodal_cos;        // n x n, cos(m pi j/(n+1))
  Eigen::MatrixXd nodal_analysis;   // n x n, inverse of nodal_sine
  Eigen::MatrixXd padded_sine;      // (M+1) x n
  Eigen::MatrixXd padded_cos;       // (M+1) x n
  Eigen::MatrixXd padded_project;   // n x (M+1)
  Eigen::MatrixXd refined_sine;     // (r(n+1)-1) x n
  Eigen::MatrixXd refined_cos;
};

AxisOps build_axis_ops(int n) {
  const double pi = std::numbers::pi;
  AxisOps ops;

  auto fill = [n](Eigen::MatrixXd& mat, int rows, int first_row, double denom, bool cosine) {
    mat.resize(rows, n);
    for (int r = 0; r < rows; ++r) {
      const int j = r + first_row;
      for (int m = 1; m <= n; ++m) {
        const double arg = std::numbers::pi * m * j / denom;
        mat(r, m - 1) = cosine ? std::cos(arg) : std::sin(arg);
      }
    }
  };

  fill(ops.nodal_sine, n, 1, n + 1.0, false);
  fill(ops.nodal_cos, n, 1, n + 1.0, true);
  ops.nodal_analysis = (2.0 / (n + 1.0)) * ops.nodal_sine.transpose();

  const int big_m = Grid::padded_intervals(n);
  fill(ops.padded_sine, big_m + 1, 0, big_m, false);
  fill(ops.padded_cos, big_m + 1, 0, big_m, true);

  const int refined = kRefineFactor * (n + 1);
  fill(ops.refined_sine, refined - 1, 1, refined, false);
  fill(ops.refined_cos, refined - 1, 1, refined, true);

  // DCT-I analysis: values g_j, j = 0..M  ->  cosine coefficients g_k, k = 0..M.
  Eigen::MatrixXd dct(big_m + 1, big_m + 1);
  for (int k = 0; k <= big_m; ++k) {
    const double scale = (k == 0 || k == big_m) ? 1.0 / big_m : 2.0 / big_m;
    for (int j = 0; j <= big_m; ++j) {
      const double edge = (j == 0 || j == big_m) ? 0.5 : 1.0;
      dct(k, j) = scale * edge * std::cos(pi * k * j / big_m);
    }
  }
  // Galerkin sine coefficient of cos(k pi x/L): (2/pi) m (1 - (-1)^{m+k}) / (m^2 - k^2).
  Eigen::MatrixXd cos_to_sine = Eigen::MatrixXd::Zero(n, big_m + 1);
  for (int m = 1; m <= n; ++m) {
    for (int k = 0; k <= big_m; ++k) {
      if ((m + k) % 2 == 0) continue;
      cos_to_sine(m - 1, k) = (2.0 / pi) * 2.0 * m / (static_cast<double>(m) * m - static_cast<double>(k) * k);
    }
  }
  ops.padded_project = cos_to_sine * dct;
  return ops;
}

std::shared_ptr<const AxisOps> axis_ops(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const AxisOps>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_shared<const AxisOps>(build_axis_ops(n))).first;
  }
  return it->second;
}

// out[o, i, k] = sum_j op(i, j) in[o, j, k], where axis is the middle index.
std::vector<double> apply_axis(const Eigen::MatrixXd& op, const std::vector<double>& in,
                               std::vector<std::size_t>& shape, int axis) {
  std::size_t outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  const auto n_in = static_cast<Eigen::Index>(shape[axis]);
  const auto n_out = op.rows();
  std::vector<double> out(outer * n_out * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatrix> x(in.data() + o * n_in * inner, n_in, static_cast<Eigen::Index>(inner));
    Eigen::Map<RowMatrix> y(out.data() + o * n_out * inner, n_out, static_cast<Eigen::Index>(inner));
    y.noalias() = op * x;
  }
  shape[axis] = static_cast<std::size_t>(n_out);
  return out;
}

const Eigen::MatrixXd& sine_op(const AxisOps& ops, Layout layout) {
  switch (layout) {
    case Layout::nodal: return ops.nodal_sine;
    case Layout::padded: return ops.padded_sine;
    case Layout::refined: return ops.refined_sine;
  }
  throw std::logic_error("unknown layout");
}

const Eigen::MatrixXd& cos_op(const AxisOps& ops, Layout layout) {
  switch (layout) {
    case Layout::nodal: return ops.nodal_cos;
    case Layout::padded: return ops.padded_cos;
    case Layout::refined: return ops.refined_cos;
  }
  throw std::logic_error("unknown layout");
}

Samples evaluate_impl(const Grid& grid, std::vector<double> data, Layout layout, int cos_axis) {
  auto shape = grid.shape();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const auto ops = axis_ops(grid.modes(axis));
    const auto& op = axis == cos_axis ? cos_op(*ops, layout) : sine_op(*ops, layout);
    data = apply_axis(op, data, shape, axis);
  }
  return Samples{grid, layout, std::move(data)};
}

}  // namespace

Grid::Grid(std::vector<double> extents, std::vector<int> modes)
    : extents_(std::move(extents)), modes_(std::move(modes)) {
  if (extents_.empty() || static_cast<int>(extents_.size()) > kMaxDim) {
    throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  }
  if (extents_.size() != modes_.size()) {
    throw std::invalid_argument("grid extents and modes must have the same length");
  }
  for (double l : extents_) {
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("grid extents must be positive");
  }
  for (int n : modes_) {
    if (n < kMinModes) {
      throw std::invalid_argument("grid needs at least " + std::to_string(kMinModes) + " modes per axis");
    }
  }
  size_ = 1;
  for (int n : modes_) size_ *= static_cast<std::size_t>(n);

  auto symbols = std::make_shared<std::vector<double>>(size_, 0.0);
  auto wavenumbers = std::make_shared<std::vector<std::vector<double>>>(dim(), std::vector<double>(size_));
  for (std::size_t flat = 0; flat < size_; ++flat) {
    const auto m = multi_index(flat);
    double sum = 0.0;
    for (int axis = 0; axis < dim(); ++axis) {
      const double kappa = m[axis] * std::numbers::pi / extents_[axis];
      (*wavenumbers)[axis][flat] = kappa;
      sum += kappa * kappa;
    }
    (*symbols)[flat] = -sum;
  }
  symbols_ = std::move(symbols);
  wavenumbers_ = std::move(wavenumbers);
}

Grid Grid::cube(int dim, int n) {
  return Grid(std::vector<double>(dim, std::numbers::pi), std::vector<int>(dim, n));
}

std::vector<std::size_t> Grid::shape() const { return layout_shape(*this, Layout::nodal); }
std::vector<std::size_t> Grid::padded_shape() const { return layout_shape(*this, Layout::padded); }
std::vector<std::size_t> Grid::refined_shape() const { return layout_shape(*this, Layout::refined); }

double Grid::node(int axis, int j) const {
  return j * extents_[axis] / (modes_[axis] + 1.0);
}

double Grid::quadrature_weight() const {
  double w = 1.0;
  for (int axis = 0; axis < dim(); ++axis) w *= extents_[axis] / (modes_[axis] + 1.0);
  return w;
}

double Grid::mode_weight() const {
  double w = 1.0;
  for (double l : extents_) w *= 0.5 * l;
  return w;
}

std::size_t Grid::flat_index(std::span<const int> m) const {
  if (static_cast<int>(m.size()) != dim()) throw std::out_of_range("multi-index has wrong dimension");
  std::size_t flat = 0;
  for (int axis = 0; axis < dim(); ++axis) {
    if (m[axis] < 1 || m[axis] > modes_[axis]) {
      throw std::out_of_range("mode index " + std::to_string(m[axis]) + " outside 1.." +
                              std::to_string(modes_[axis]));
    }
    flat = flat * modes_[axis] + static_cast<std::size_t>(m[axis] - 1);
  }
  return flat;
}

std::vector<int> Grid::multi_index(std::size_t flat) const {
  std::vector<int> m(dim());
  for (int axis = dim() - 1; axis >= 0; --axis) {
    m[axis] = static_cast<int>(flat % modes_[axis]) + 1;
    flat /= modes_[axis];
  }
  return m;
}

double laplacian_symbol(const Grid& grid, std::span<const int> m) {
  return grid.symbols()[grid.flat_index(m)];
}

std::vector<std::size_t> layout_shape(const Grid& grid, Layout layout) {
  std::vector<std::size_t> shape(grid.dim());
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const int n = grid.modes(axis);
    switch (layout) {
      case Layout::nodal: shape[axis] = n; break;
      case Layout::padded: shape[axis] = Grid::padded_intervals(n) + 1; break;
      case Layout::refined: shape[axis] = kRefineFactor * (n + 1) - 1; break;
    }
  }
  return shape;
}

SpectralField::SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size(), 0.0) {}

SpectralField::SpectralField(Grid grid, std::vector<double> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw std::invalid_argument("coefficient count does not match grid");
  }
}

SpectralField SpectralField::mode(const Grid& grid, std::span<const int> m, double amplitude) {
  SpectralField f(grid);
  f.coeffs_[grid.flat_index(m)] = amplitude;
  return f;
}

bool SpectralField::is_finite() const {
  for (double a : coeffs_) {
    if (!std::isfinite(a)) return false;
  }
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) { return axpy(1.0, other); }
SpectralField& SpectralField::operator-=(const SpectralField& other) { return axpy(-1.0, other); }

SpectralField& SpectralField::operator*=(double s) {
  for (double& a : coeffs_) a *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * other.coeffs_[i];
  return *this;
}

SpectralField SpectralField::laplacian() const {
  SpectralField out(grid_);
  const auto& lambda = grid_.symbols();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = lambda[i] * coeffs_[i];
  return out;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

Samples to_physical(const SpectralField& field) { return evaluate(field, Layout::nodal); }

SpectralField to_spectral(const Grid& grid, std::span<const double> nodal_values) {
  if (nodal_values.size() != grid.size()) {
    throw std::invalid_argument("expected " + std::to_string(grid.size()) + " samples, got " +
                                std::to_string(nodal_values.size()));
  }
  std::vector<double> data(nodal_values.begin(), nodal_values.end());
  auto shape = grid.shape();
  for (int axis = 0; axis < grid.dim(); ++axis) {
    data = apply_axis(axis_ops(grid.modes(axis))->nodal_analysis, data, shape, axis);
  }
  return SpectralField(grid, std::move(data));
}

Samples evaluate(const SpectralField& field, Layout layout) {
  const auto c = field.coeffs();
  return evaluate_impl(field.grid(), std::vector<double>(c.begin(), c.end()), layout, -1);
}

Samples evaluate_derivative(const SpectralField& field, int axis, Layout layout) {
  const auto& grid = field.grid();
  if (axis < 0 || axis >= grid.dim()) throw std::out_of_range("derivative axis out of range");
  const auto& kappa = grid.wavenumbers(axis);
  std::vector<double> scaled(field.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = kappa[i] * field[i];
  return evaluate_impl(grid, std::move(scaled), layout, axis);
}

std::vector<Samples> gradient_physical(const SpectralField& field) {
  std::vector<Samples> grad;
  grad.reserve(field.grid().dim());
  for (int axis = 0; axis < field.grid().dim(); ++axis) {
    grad.push_back(evaluate_derivative(field, axis, Layout::nodal));
  }
  return grad;
}

SpectralField project_padded(const Samples& padded) {
  const Grid& grid = padded.grid;
  if (padded.layout != Layout::padded) throw std::invalid_argument("projection needs padded samples");
  auto shape = grid.padded_shape();
  std::size_t expected = 1;
  for (auto s : shape) expected *= s;
  if (padded.values.size() != expected) throw std::invalid_argument("padded sample count mismatch");
  std::vector<double> data = padded.values;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    data = apply_axis(axis_ops(grid.modes(axis))->padded_project, data, shape, axis);
  }
  return SpectralField(grid, std::move(data));
}

SpectralField dealiased_product(const Samples& a, const Samples& b) {
  if (!(a.grid == b.grid) || a.layout != Layout::padded || b.layout != Layout::padded ||
      a.values.size() != b.values.size()) {
    throw std::invalid_argument("dealiased_product: grid mismatch");
  }
  Samples prod{a.grid, Layout::padded, std::vector<double>(a.values.size())};
  for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] = a.values[i] * b.values[i];
  return project_padded(prod);
}

}  // namespace blackstock
