#pragma once

#include <cstdint>
#include <string>

#include "spincorr/geometry.hpp"
#include "spincorr/spin.hpp"

namespace spincorr {

enum class ModelVariant { qm_singlet_half, lhv_linear, conservation_spin };

/// Which concrete two-point conditional realizes the conservation-mandated mean.
enum class ConditionalKind { extremal, adjacent };

/// Selects the sampling theory generating events, plus its parameters.
/// The qm and lhv variants are spin-1/2 by construction (outcomes 2m = +-1).
class ModelSpec {
public:
  ModelSpec() : ModelSpec(qm_singlet_half()) {}

  static ModelSpec qm_singlet_half();
  static ModelSpec lhv_linear();
  static ModelSpec conservation(SpinMagnitude spin, ConditionalKind kind);

  ModelVariant variant() const noexcept { return variant_; }
  SpinMagnitude spin() const noexcept { return spin_; }
  ConditionalKind kind() const noexcept { return kind_; }

  /// "qm", "lhv", "conservation/extremal" or "conservation/adjacent".
  std::string descriptor() const;
  /// Inverse of descriptor(); the spin comes from the file header. Throws
  /// validation_error for unknown descriptors or a non-1/2 spin with qm/lhv.
  static ModelSpec from_descriptor(const std::string& descriptor, SpinMagnitude spin);

  bool operator==(const ModelSpec& other) const noexcept;

private:
  ModelSpec(ModelVariant variant, SpinMagnitude spin, ConditionalKind kind)
      : variant_(variant), spin_(spin), kind_(kind) {}

  ModelVariant variant_;
  SpinMagnitude spin_;
  ConditionalKind kind_;
};

/// One joint measurement: two settings, two projections, a sequence id.
struct EventRecord {
  std::uint64_t seq{};
  Setting setting_a;
  Setting setting_b;
  Outcome outcome_a;
  Outcome outcome_b;
};

/// Checks the outcome-lattice membership of both sides (which bounds the
/// product m_a*m_b by S^2); throws validation_error naming the seq on failure.
void validate_event(const EventRecord& event, SpinMagnitude spin);

}  // namespace spincorr
