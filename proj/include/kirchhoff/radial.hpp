#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace kirchhoff {

/// Uniform radial grid on [0, R] for radially symmetric functions on R^3.
///
/// Nodes sit at cell centres r_i = (i + 1/2) dr, so no node touches the
/// origin and singular potentials like 1/r^2 are finite everywhere. Weights
/// are w_i = 4 pi r_i^2 dr; for smooth even integrands this midpoint rule has
/// no boundary error at r = 0. Face coefficients 4 pi r_i r_{i+1} / dr turn the
/// conservative Laplacian into the second-order stencil for (1/r)(r u)''.
/// The Dirichlet condition is a zero ghost value at r_n = R + dr/2.
class RadialGrid {
public:
  RadialGrid(double radius, std::size_t nodes);

  double radius() const { return radius_; }
  double spacing() const { return dr_; }
  std::size_t size() const { return nodes_.size(); }

  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// 4 pi r_i r_{i+1} / dr for the face between node i and i+1.
  std::span<const double> face_coefficients() const { return faces_; }

private:
  double radius_;
  double dr_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> faces_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double radius, std::size_t nodes);

/// Samples of a radial function on a grid.
class RadialField {
public:
  RadialField() = default;
  explicit RadialField(GridPtr grid);
  RadialField(GridPtr grid, std::vector<double> values);

  const GridPtr& grid_ptr() const { return grid_; }
  const RadialGrid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;

  RadialField& operator+=(const RadialField& other);
  RadialField& operator-=(const RadialField& other);
  RadialField& operator*=(double factor);

private:
  GridPtr grid_;
  std::vector<double> values_;
};

RadialField operator+(RadialField lhs, const RadialField& rhs);
RadialField operator-(RadialField lhs, const RadialField& rhs);
RadialField operator*(double factor, RadialField field);

/// Samples f(r_i) on every node.
template <class F>
RadialField sample(const GridPtr& grid, F&& f) {
  RadialField out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) out[i] = f(grid->node(i));
  return out;
}

/// Weighted L2 inner product, the discrete analogue of the integral of u v.
double inner(const RadialField& u, const RadialField& v);

/// Integral of u^2.
double mass(const RadialField& u);

/// Integral of |grad u|^2 from face differences, with u = 0 past R.
double kinetic(const RadialField& u);

/// Integral of |u|^p.
double lp_integral(const RadialField& u, double p);

/// Integral of f(r) u(r)^2.
template <class F>
double weighted_square_integral(const RadialField& u, F&& f) {
  const auto& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    sum += g.weight(i) * f(g.node(i)) * u[i] * u[i];
  return sum;
}

/// Conservative radial Laplacian. Satisfies <-lap(u), v> = sum over faces of
/// the weighted difference products exactly, so <-lap(u), u> == kinetic(u).
RadialField laplacian_radial(const RadialField& u);

/// Multiplies u so that mass(u) == c. Throws DomainError on a zero field.
RadialField normalize_to(const RadialField& u, double c);

struct ResampleReport {
  /// Mass of u beyond t R, i.e. the part mapped outside the domain when t < 1.
  double lost_mass = 0.0;
};

/// Mass-preserving dilation r -> t^{3/2} u(t r) on the same grid, using a
/// monotonicity-preserving cubic Hermite interpolant. Values past R are zero.
/// Emits a warning when t < 1 pushes more than 1e-8 of the mass out of the
/// truncated domain.
RadialField resample(const RadialField& u, double t, ResampleReport* report = nullptr);

/// Solves the symmetric tridiagonal system (alpha S + beta W) x = W rhs where
/// S is the stiffness matrix behind kinetic() and W the diagonal of weights.
/// That is (alpha (-lap) + beta) x = rhs in operator form.
RadialField solve_shifted_laplacian(const RadialField& rhs, double alpha, double beta);

} // namespace kirchhoff
