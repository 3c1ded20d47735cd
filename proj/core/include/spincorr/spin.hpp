#pragma once

namespace spincorr {

class Outcome;

/// Spin magnitude stored as the integer 2S, so half-integer spins stay exact.
class SpinMagnitude {
public:
  /// Throws validation_error unless two_s >= 1.
  explicit SpinMagnitude(int two_s);

  static SpinMagnitude half() noexcept;  // S = 1/2

  int two_s() const noexcept { return two_s_; }
  double value() const noexcept { return two_s_ / 2.0; }  // S
  /// S^2, computed exactly from the doubled representation.
  double value_squared() const noexcept { return static_cast<double>(two_s_) * two_s_ / 4.0; }
  /// Number of projection values, 2S+1.
  int multiplicity() const noexcept { return two_s_ + 1; }

  /// Projection at lattice index 0..2S, running from -S up to +S.
  Outcome projection(int index) const;
  /// Inverse of projection(); throws validation_error for off-lattice outcomes.
  int index_of(Outcome m) const;
  bool contains(Outcome m) const noexcept;

  bool operator==(const SpinMagnitude& other) const noexcept { return two_s_ == other.two_s_; }

private:
  int two_s_;
};

/// A measured projection stored as the integer 2m (in units of hbar).
class Outcome {
public:
  Outcome() noexcept : two_m_(0) {}
  explicit Outcome(int two_m) noexcept : two_m_(two_m) {}

  int two_m() const noexcept { return two_m_; }
  double value() const noexcept { return two_m_ / 2.0; }  // m

  bool operator==(const Outcome& other) const noexcept { return two_m_ == other.two_m_; }

private:
  int two_m_;
};

}  // namespace spincorr
