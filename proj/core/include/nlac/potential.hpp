#pragma once

#include <memory>
#include <span>
#include <vector>

namespace nlac {

enum class PotentialKind { quartic, custom };

class ProfileTable;

/// Smooth double-well potential with equal wells at +-1.
///
/// `quartic` is (1 - c^2)^2 / 4 with closed-form derivatives and the tanh
/// optimal profile. `custom` is a polynomial given by ascending coefficients;
/// its profile is integrated numerically once, at construction.
class PotentialSpec {
 public:
  static PotentialSpec quartic();
  /// Throws InvalidArgument unless f(+-1) = f'(+-1) = 0, f''(+-1) > 0, f > 0 on
  /// (-1, 1), and the leading coefficient makes f' change sign only inside
  /// [-R0, R0] (all checked on samples).
  static PotentialSpec custom(std::vector<double> coefficients);

  PotentialKind kind() const noexcept { return kind_; }
  /// Ascending polynomial coefficients (also filled in for the quartic).
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  /// Smallest R0 >= 1 with f' < 0 below -R0 and f' > 0 above R0.
  double r0() const noexcept { return r0_; }
  /// alpha >= 0 with f'' >= -alpha on [-2 R0, 2 R0].
  double alpha() const noexcept { return alpha_; }
  /// max f'' on [-R0, R0]; enters the time-step restriction.
  double fpp_max() const noexcept { return fpp_max_; }
  /// Sampled C in |f'(r)| <= C (1 + |r|^3) on [-2 R0, 2 R0].
  double growth_constant() const noexcept { return growth_; }

  const ProfileTable* profile_table() const noexcept { return profile_.get(); }

 private:
  PotentialSpec() = default;

  PotentialKind kind_ = PotentialKind::quartic;
  std::vector<double> coeffs_;
  double r0_ = 1.0;
  double alpha_ = 1.0;
  double fpp_max_ = 2.0;
  double growth_ = 1.0;
  std::shared_ptr<const ProfileTable> profile_;
};

/// f^(order)(c) for order 0..4. Throws InvalidArgument for other orders.
double f_eval(const PotentialSpec& spec, double c, int order);

/// Heteroclinic solution of -theta'' + f'(theta) = 0 with theta(0) = 0 and
/// theta(+-inf) = +-1.
double optimal_profile(const PotentialSpec& spec, double rho);

/// Numerically integrated optimal profile on [-40, 40], interpolated with
/// C2 quintic Hermite pieces. Saturates to +-1 outside that window.
class ProfileTable {
 public:
  /// Integrates theta' = sqrt(2 f(theta)) from theta(0) = 0 with an adaptive
  /// Dormand-Prince stepper at absolute tolerance 1e-12.
  ProfileTable(std::span<const double> coefficients);

  double operator()(double rho) const;

  static constexpr double kHalfWidth = 40.0;
  static constexpr double kNodeSpacing = 0.01;

 private:
  std::vector<double> coeffs_;
  std::vector<double> value_;
  std::vector<double> slope_;
  std::vector<double> curvature_;
};

}  // namespace nlac
