#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/radial.hpp"

namespace kirchhoff {

/// Mass-supercritical window for every exponent: 14/3 < p < 6.
inline constexpr double kSupercriticalExponent = 14.0 / 3.0;
inline constexpr double kCriticalSobolevExponent = 6.0;

struct PowerTerm {
  double coefficient; ///< mu_j > 0
  double exponent;    ///< p_j in (14/3, 6)
};

/// g(s) = sum_j mu_j |s|^{p_j - 2} s, an odd sum of supercritical powers.
class Nonlinearity {
public:
  explicit Nonlinearity(std::vector<PowerTerm> terms);

  const std::vector<PowerTerm>& terms() const { return terms_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double g(double s) const;
  /// Primitive of g vanishing at 0.
  double G(double s) const;
  /// g(s) s / 2 - G(s).
  double Gtilde(double s) const;
  double Gtilde_prime_times_s(double s) const;

  Nonlinearity scaled(double factor) const;

private:
  std::vector<PowerTerm> terms_;
  double alpha_;
  double beta_;
};

struct GrowthReport {
  bool passed = true;
  double min_ratio = 0.0;        ///< min over samples of g(s)s / G(s)
  double max_ratio = 0.0;        ///< max over samples of g(s)s / G(s)
  double min_tilde_ratio = 0.0;  ///< min over samples of Gtilde'(s)s / Gtilde(s)
  double envelope_lower = 0.0;   ///< C1 with C1 min{|s|^alpha, |s|^beta} <= G(s)
  double envelope_upper = 0.0;   ///< C2 with G(s) <= C2 max{|s|^alpha, |s|^beta}
  std::optional<double> violating_s;
};

/// Samples s on a log grid over [1e-6, 1e6] (both signs) and checks the growth
/// windows alpha <= g(s)s/G(s) <= beta and Gtilde'(s)s > 14/3 Gtilde(s).
GrowthReport check_growth(const Nonlinearity& nl, int samples);

enum class PotentialKind { Zero, Hardy, GaussianWell };

/// Nonpositive radial potential V with W = r V'/2 and Upsilon = 4 W + r W'.
class Potential {
public:
  static Potential zero();
  static Potential hardy(double mu);
  static Potential gaussian_well(double depth, double width);

  PotentialKind kind() const { return kind_; }
  std::string name() const;
  double mu() const { return strength_; }
  double depth() const { return strength_; }
  double width() const { return width_; }
  bool is_zero() const { return kind_ == PotentialKind::Zero || strength_ == 0.0; }

  double V(double r) const;
  double W(double r) const;
  /// <grad W(x), x> = r W'(r).
  double r_dW(double r) const;
  double Upsilon(double r) const;

  /// Exponent k with V(r / t) = t^k V(r) (and likewise W, r W'), when V is
  /// homogeneous. Hardy gives 2.
  std::optional<double> homogeneity() const;

  /// Same shape with the amplitude multiplied by factor.
  Potential scaled(double factor) const;

private:
  Potential(PotentialKind kind, double strength, double width) : kind_(kind), strength_(strength), width_(width) {}

  PotentialKind kind_;
  double strength_;
  double width_;
};

struct SigmaBounds {
  double sigma1 = 0.0; ///< |int V u^2| <= sigma1 |grad u|^2
  double sigma2 = 0.0; ///< |int W u^2| <= sigma2 |grad u|^2
  double sigma3 = 0.0; ///< int Upsilon_+ u^2 <= sigma3 |grad u|^2
};

/// Largest discrete Rayleigh quotient sum w f u^2 / kinetic(u) for a
/// nonnegative multiplier f, by power iteration on S^{-1} diag(w f).
double rayleigh_max(const RadialGrid& grid, const std::vector<double>& multiplier, int max_iter = 200000,
                    double tol = 1e-11);

/// Hardy potentials use the sharp constant 4 of the Hardy inequality. Other
/// kinds use the discrete Rayleigh quotients inflated by 5%.
SigmaBounds sigma_bounds(const Potential& pot, const RadialGrid& grid);

/// Same quotients with no inflation and no analytic shortcut.
SigmaBounds numeric_sigma(const Potential& pot, const RadialGrid& grid);

struct AdmissibilityReport {
  SigmaBounds sigma;
  std::array<double, 3> bounds{};  ///< window upper limits for sigma1..3
  std::array<bool, 3> passed{};
  std::array<double, 3> margin{};  ///< bound - sigma
  bool all_passed() const { return passed[0] && passed[1] && passed[2]; }
};

AdmissibilityReport admissibility(double a, const Nonlinearity& nl, const SigmaBounds& sigma);
AdmissibilityReport admissibility(double a, const Nonlinearity& nl, const Potential& pot, const RadialGrid& grid);

} // namespace kirchhoff
