#pragma once

#include <cstdint>
#include <vector>

#include "spincorr/event.hpp"

namespace spincorr {

/// Mergeable streaming sufficient statistics for one (setting_a, setting_b) pair.
///
/// Everything is accumulated as integers in doubled-projection units
/// (products carry a factor 4, squared products 16), so accumulation order and
/// merge topology cannot change any derived estimate: merge is exactly
/// associative and commutative. Physical-unit accessors divide by the exact
/// powers of two.
class AccumulatorState {
public:
  AccumulatorState(const Setting& a, const Setting& b, SpinMagnitude spin);

  /// Validates the record (settings match this pair within 1e-12, outcomes on
  /// the spin lattice) and folds it in.
  void add(const EventRecord& event);

  /// Sums all fields; throws validation_error when the pairs or spins differ.
  void merge(const AccumulatorState& other);

  const Setting& setting_a() const noexcept { return a_; }
  const Setting& setting_b() const noexcept { return b_; }
  SpinMagnitude spin() const noexcept { return spin_; }
  /// Relative angle of the pair (cached at construction).
  double theta() const noexcept { return theta_; }

  std::int64_t count() const noexcept { return n_; }
  /// Sum of m_a*m_b (hbar^2); exact.
  double sum_products() const noexcept { return static_cast<double>(sum_prod_4x_) / 4.0; }
  /// Sum of (m_a*m_b)^2 (hbar^4); exact.
  double sum_products_squared() const noexcept {
    return static_cast<double>(sum_prod_sq_16x_) / 16.0;
  }

  /// Per-group statistics, keyed by the lattice index of m_a (0 .. 2S).
  std::int64_t group_count(int index) const { return groups_.at(index).n; }
  /// Sum of m_b within the group (hbar); exact.
  double group_sum_b(int index) const { return static_cast<double>(groups_.at(index).sum_2mb) / 2.0; }
  /// Sum of m_b^2 within the group (hbar^2); exact.
  double group_sum_b_squared(int index) const {
    return static_cast<double>(groups_.at(index).sum_2mb_sq) / 4.0;
  }

private:
  struct GroupStats {
    std::int64_t n{};
    std::int64_t sum_2mb{};
    std::int64_t sum_2mb_sq{};
  };

  Setting a_;
  Setting b_;
  SpinMagnitude spin_;
  double theta_;
  std::int64_t n_{};
  std::int64_t sum_prod_4x_{};
  std::int64_t sum_prod_sq_16x_{};
  std::vector<GroupStats> groups_;
};

/// Folds a range of events into a fresh accumulator for the given pair.
AccumulatorState accumulate(const Setting& a, const Setting& b, SpinMagnitude spin,
                            const std::vector<EventRecord>& events);

}  // namespace spincorr
