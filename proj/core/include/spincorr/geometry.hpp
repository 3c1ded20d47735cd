#pragma once

#include <array>
#include <optional>

namespace spincorr {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Degrees to radians, exact at the common right-angle multiples
/// (d/180 is an exact double for d in {0, 45, 90, 135, 180}).
inline double deg_to_rad(double deg) noexcept { return (deg / 180.0) * kPi; }

inline double rad_to_deg(double rad) noexcept { return (rad / kPi) * 180.0; }

/// Validates a relative angle against [0, pi], absorbing up to 1e-9 of rounding
/// from upstream conversions; returns the value clamped into the interval.
double require_theta(double theta);

/// An analyzer direction: a 3-component unit vector.
///
/// The planar factory keeps the originating angle so that serialization can
/// reproduce it digit-for-digit instead of re-deriving it through atan2.
class Setting {
public:
  /// Throws validation_error unless (x, y, z) has unit norm within 1e-12.
  Setting(double x, double y, double z);

  /// (cos(angle), sin(angle), 0); angle is wrapped into [0, 2*pi).
  static Setting from_planar_angle(double angle_rad);

  double x() const noexcept { return v_[0]; }
  double y() const noexcept { return v_[1]; }
  double z() const noexcept { return v_[2]; }

  double dot(const Setting& other) const noexcept {
    return v_[0] * other.v_[0] + v_[1] * other.v_[1] + v_[2] * other.v_[2];
  }

  /// The in-plane angle in [0, 2*pi). Exact for planar-constructed settings;
  /// otherwise derived via atan2 provided |z| <= 1e-12 (throws validation_error
  /// for out-of-plane directions).
  double planar_angle() const;

private:
  Setting(const std::array<double, 3>& v, double angle) : v_(v), angle_(angle) {}

  std::array<double, 3> v_{};
  std::optional<double> angle_;
};

/// arccos(a . b) in [0, pi]; the dot product is clamped into [-1, 1] first.
double relative_angle(const Setting& a, const Setting& b);

/// Component-wise agreement within tol (used to match accumulator setting pairs).
bool approx_equal(const Setting& a, const Setting& b, double tol = 1e-12) noexcept;

}  // namespace spincorr
