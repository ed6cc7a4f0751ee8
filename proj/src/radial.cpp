#include "kirchhoff/radial.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) { std::clog << "warning: " << msg << '\n'; };
  return sink;
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid_ptr() != b.grid_ptr() && (a.size() != b.size() || a.grid().radius() != b.grid().radius()))
    throw std::invalid_argument("fields live on different grids");
}

} // namespace

void set_warning_sink(WarningSink sink) {
  warning_sink() = sink ? std::move(sink) : [](std::string_view) {};
}

void warn(const std::string& message) { warning_sink()(message); }

RadialGrid::RadialGrid(double radius, std::size_t nodes) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("grid radius must be positive");
  if (nodes < 4) throw std::invalid_argument("grid needs at least 4 nodes");
  dr_ = radius / static_cast<double>(nodes);
  nodes_.resize(nodes);
  weights_.resize(nodes);
  faces_.resize(nodes);
  constexpr double four_pi = 4.0 * std::numbers::pi;
  for (std::size_t i = 0; i < nodes; ++i) nodes_[i] = (static_cast<double>(i) + 0.5) * dr_;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double r = nodes_[i];
    const double next = r + dr_; // the last one is the Dirichlet ghost node
    weights_[i] = four_pi * r * r * dr_;
    faces_[i] = four_pi * r * next / dr_;
  }
}

GridPtr make_grid(double radius, std::size_t nodes) { return std::make_shared<const RadialGrid>(radius, nodes); }

RadialField::RadialField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("null grid");
  values_.assign(grid_->size(), 0.0);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("null grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("field size does not match grid");
}

bool RadialField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

RadialField& RadialField::operator+=(const RadialField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RadialField& RadialField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

RadialField operator+(RadialField lhs, const RadialField& rhs) { return lhs += rhs; }
RadialField operator-(RadialField lhs, const RadialField& rhs) { return lhs -= rhs; }
RadialField operator*(double factor, RadialField field) { return field *= factor; }

double inner(const RadialField& u, const RadialField& v) {
  require_same_grid(u, v);
  const auto w = u.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * u[i] * v[i];
  return sum;
}

double mass(const RadialField& u) { return inner(u, u); }

double kinetic(const RadialField& u) {
  const auto f = u.grid().face_coefficients();
  const std::size_t n = u.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? u[i + 1] : 0.0;
    const double diff = next - u[i];
    sum += f[i] * diff * diff;
  }
  return sum;
}

double lp_integral(const RadialField& u, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_integral needs p >= 1");
  const auto w = u.grid().weights();
  double sum = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * u[i] * u[i];
  } else {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (u[i] != 0.0) sum += w[i] * std::pow(std::abs(u[i]), p);
  }
  return sum;
}

RadialField laplacian_radial(const RadialField& u) {
  const auto& g = u.grid();
  const auto f = g.face_coefficients();
  const std::size_t n = u.size();
  RadialField out(u.grid_ptr());
  for (std::size_t i = 0; i < n; ++i) {
    const double next = i + 1 < n ? u[i + 1] : 0.0;
    double flux = f[i] * (next - u[i]);
    if (i > 0) flux -= f[i - 1] * (u[i] - u[i - 1]);
    out[i] = flux / g.weight(i);
  }
  return out;
}

RadialField normalize_to(const RadialField& u, double c) {
  if (!(c > 0.0)) throw DomainError("target mass must be positive");
  const double m = mass(u);
  if (!(m > 0.0)) throw DomainError("cannot normalize a zero field");
  RadialField out = u;
  out *= std::sqrt(c / m);
  return out;
}

namespace {

// Monotone cubic Hermite interpolant of an even radial profile. Node slopes
// come from a fourth-order centred stencil on the mirrored / zero-extended
// samples, then pass through Hyman's monotonicity filter. Below the first node
// the profile is continued as u0 + beta (r^2 - r0^2), which is even in r.
class MonotoneRadialInterpolant {
public:
  explicit MonotoneRadialInterpolant(const RadialField& u)
      : u_(u.values()), h_(u.grid().spacing()), r0_(u.grid().node(0)), n_(u.size()) {
    beta_ = (u_[1] - u_[0]) / (u.grid().node(1) * u.grid().node(1) - r0_ * r0_);
    slopes_.resize(n_ + 1);
    slopes_[0] = 2.0 * beta_ * r0_;
    for (std::size_t k = 1; k <= n_; ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      double d = (ext(kk - 2) - 8.0 * ext(kk - 1) + 8.0 * ext(kk + 1) - ext(kk + 2)) / (12.0 * h_);
      const double left = (ext(kk) - ext(kk - 1)) / h_;
      const double right = (ext(kk + 1) - ext(kk)) / h_;
      if (left * right <= 0.0) {
        d = 0.0;
      } else {
        const double bound = 3.0 * std::min(std::abs(left), std::abs(right));
        d = left > 0.0 ? std::clamp(d, 0.0, bound) : std::clamp(d, -bound, 0.0);
      }
      slopes_[k] = d;
    }
  }

  double operator()(double x) const {
    if (x < r0_) return u_[0] + beta_ * (x * x - r0_ * r0_);
    const double pos = (x - r0_) / h_;
    if (pos >= static_cast<double>(n_)) return 0.0;
    const auto k = static_cast<std::size_t>(pos);
    const double s = pos - static_cast<double>(k);
    const double y0 = u_[k];
    const double y1 = k + 1 < n_ ? u_[k + 1] : 0.0;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * h_ * slopes_[k] + h01 * y1 + h11 * h_ * slopes_[k + 1];
  }

private:
  // Sample k of the even, zero-extended sequence; k = -1 mirrors node 0.
  double ext(std::ptrdiff_t k) const {
    if (k < 0) k = -k - 1;
    return static_cast<std::size_t>(k) < n_ ? u_[static_cast<std::size_t>(k)] : 0.0;
  }

  std::span<const double> u_;
  double h_;
  double r0_;
  std::size_t n_;
  double beta_ = 0.0;
  std::vector<double> slopes_;
};

} // namespace

RadialField resample(const RadialField& u, double t, ResampleReport* report) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("resample needs t > 0");
  if (t == 1.0) {
    if (report) report->lost_mass = 0.0;
    return u;
  }
  const auto& g = u.grid();
  double lost = 0.0;
  if (t < 1.0) {
    const double cut = t * g.radius();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.node(i) > cut) lost += g.weight(i) * u[i] * u[i];
    const double total = mass(u);
    if (lost > 1e-8 * total) {
      std::ostringstream msg;
      msg << "resample(t=" << t << ") pushes " << lost / total << " of the mass past R=" << g.radius();
      warn(msg.str());
    }
  }
  if (report) report->lost_mass = lost;

  const MonotoneRadialInterpolant interp(u);
  const double amplitude = std::pow(t, 1.5);
  RadialField out(u.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = amplitude * interp(t * g.node(i));
  return out;
}

RadialField solve_shifted_laplacian(const RadialField& rhs, double alpha, double beta) {
  const auto& g = rhs.grid();
  const auto f = g.face_coefficients();
  const std::size_t n = rhs.size();
  // Thomas algorithm on the tridiagonal (alpha S + beta W).
  std::vector<double> c_prime(n), d_prime(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lower = i > 0 ? -alpha * f[i - 1] : 0.0;
    const double diag = alpha * (f[i] + (i > 0 ? f[i - 1] : 0.0)) + beta * g.weight(i);
    const double upper = i + 1 < n ? -alpha * f[i] : 0.0;
    const double b = g.weight(i) * rhs[i];
    if (i == 0) {
      c_prime[i] = upper / diag;
      d_prime[i] = b / diag;
    } else {
      const double denom = diag - lower * c_prime[i - 1];
      c_prime[i] = upper / denom;
      d_prime[i] = (b - lower * d_prime[i - 1]) / denom;
    }
  }
  RadialField x(rhs.grid_ptr());
  x[n - 1] = d_prime[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
  return x;
}

} // namespace kirchhoff
