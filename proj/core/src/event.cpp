#include "spincorr/event.hpp"

#include <sstream>

#include "spincorr/errors.hpp"

namespace spincorr {

ModelSpec ModelSpec::qm_singlet_half() {
  return ModelSpec(ModelVariant::qm_singlet_half, SpinMagnitude::half(), ConditionalKind::extremal);
}

ModelSpec ModelSpec::lhv_linear() {
  return ModelSpec(ModelVariant::lhv_linear, SpinMagnitude::half(), ConditionalKind::extremal);
}

ModelSpec ModelSpec::conservation(SpinMagnitude spin, ConditionalKind kind) {
  return ModelSpec(ModelVariant::conservation_spin, spin, kind);
}

std::string ModelSpec::descriptor() const {
  switch (variant_) {
    case ModelVariant::qm_singlet_half:
      return "qm";
    case ModelVariant::lhv_linear:
      return "lhv";
    case ModelVariant::conservation_spin:
      return kind_ == ConditionalKind::extremal ? "conservation/extremal"
                                                : "conservation/adjacent";
  }
  throw validation_error("unknown model variant");
}

ModelSpec ModelSpec::from_descriptor(const std::string& descriptor, SpinMagnitude spin) {
  if (descriptor == "qm" || descriptor == "lhv") {
    if (spin.two_s() != 1) {
      std::ostringstream msg;
      msg << "model '" << descriptor << "' is spin-1/2 only, got 2S=" << spin.two_s();
      throw validation_error(msg.str());
    }
    return descriptor == "qm" ? qm_singlet_half() : lhv_linear();
  }
  if (descriptor == "conservation/extremal")
    return conservation(spin, ConditionalKind::extremal);
  if (descriptor == "conservation/adjacent")
    return conservation(spin, ConditionalKind::adjacent);
  throw validation_error("unknown model descriptor '" + descriptor + "'");
}

bool ModelSpec::operator==(const ModelSpec& other) const noexcept {
  if (variant_ != other.variant_ || !(spin_ == other.spin_)) return false;
  if (variant_ == ModelVariant::conservation_spin && kind_ != other.kind_) return false;
  return true;
}

void validate_event(const EventRecord& event, SpinMagnitude spin) {
  if (!spin.contains(event.outcome_a) || !spin.contains(event.outcome_b)) {
    std::ostringstream msg;
    msg << "event seq=" << event.seq << ": outcomes (2m_a=" << event.outcome_a.two_m()
        << ", 2m_b=" << event.outcome_b.two_m() << ") off the lattice of spin 2S="
        << spin.two_s();
    throw validation_error(msg.str());
  }
}

}  // namespace spincorr
