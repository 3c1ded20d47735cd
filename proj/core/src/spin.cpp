#include "spincorr/spin.hpp"

#include <sstream>

#include "spincorr/errors.hpp"

namespace spincorr {

SpinMagnitude::SpinMagnitude(int two_s) : two_s_(two_s) {
  if (two_s < 1) {
    std::ostringstream msg;
    msg << "spin requires 2S >= 1, got " << two_s;
    throw validation_error(msg.str());
  }
}

SpinMagnitude SpinMagnitude::half() noexcept { return SpinMagnitude(1); }

Outcome SpinMagnitude::projection(int index) const {
  if (index < 0 || index > two_s_) {
    std::ostringstream msg;
    msg << "projection index " << index << " outside 0.." << two_s_;
    throw validation_error(msg.str());
  }
  return Outcome(-two_s_ + 2 * index);
}

int SpinMagnitude::index_of(Outcome m) const {
  if (!contains(m)) {
    std::ostringstream msg;
    msg << "outcome 2m=" << m.two_m() << " is not a projection of spin 2S=" << two_s_;
    throw validation_error(msg.str());
  }
  return (m.two_m() + two_s_) / 2;
}

bool SpinMagnitude::contains(Outcome m) const noexcept {
  const int two_m = m.two_m();
  if (two_m < -two_s_ || two_m > two_s_) return false;
  // projections run from -S to +S in steps of 1: 2m and 2S share parity
  return ((two_m - two_s_) % 2) == 0;
}

}  // namespace spincorr
