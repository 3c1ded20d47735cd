#include "spincorr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spincorr/errors.hpp"

namespace spincorr {

namespace {
constexpr double kThetaSlack = 1e-9;
constexpr double kUnitNormTol = 1e-12;
constexpr double kPlanarZTol = 1e-12;
}  // namespace

double require_theta(double theta) {
  if (!(theta >= -kThetaSlack && theta <= kPi + kThetaSlack)) {
    std::ostringstream msg;
    msg << "relative angle " << theta << " outside [0, pi]";
    throw validation_error(msg.str());
  }
  return std::clamp(theta, 0.0, kPi);
}

Setting::Setting(double x, double y, double z) : v_{x, y, z} {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(std::abs(norm - 1.0) <= kUnitNormTol)) {
    std::ostringstream msg;
    msg << "setting (" << x << ", " << y << ", " << z << ") is not a unit vector (norm " << norm
        << ")";
    throw validation_error(msg.str());
  }
}

Setting Setting::from_planar_angle(double angle_rad) {
  if (!std::isfinite(angle_rad)) throw validation_error("planar angle must be finite");
  double a = angle_rad;
  if (a < 0.0 || a >= 2.0 * kPi) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
  }
  return Setting({std::cos(a), std::sin(a), 0.0}, a);
}

double Setting::planar_angle() const {
  if (angle_) return *angle_;
  if (std::abs(v_[2]) > kPlanarZTol) {
    throw validation_error("setting is not in the analyzer plane (|z| > 1e-12)");
  }
  double a = std::atan2(v_[1], v_[0]);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double relative_angle(const Setting& a, const Setting& b) {
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  return std::acos(c);
}

bool approx_equal(const Setting& a, const Setting& b, double tol) noexcept {
  return std::abs(a.x() - b.x()) <= tol && std::abs(a.y() - b.y()) <= tol &&
         std::abs(a.z() - b.z()) <= tol;
}

}  // namespace spincorr
