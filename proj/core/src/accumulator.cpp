#include "spincorr/accumulator.hpp"

#include <sstream>

#include "spincorr/errors.hpp"

namespace spincorr {

AccumulatorState::AccumulatorState(const Setting& a, const Setting& b, SpinMagnitude spin)
    : a_(a), b_(b), spin_(spin), theta_(relative_angle(a, b)),
      groups_(static_cast<std::size_t>(spin.multiplicity())) {}

void AccumulatorState::add(const EventRecord& event) {
  if (!approx_equal(event.setting_a, a_) || !approx_equal(event.setting_b, b_)) {
    std::ostringstream msg;
    msg << "event seq=" << event.seq << " has settings differing from the accumulated pair";
    throw validation_error(msg.str());
  }
  validate_event(event, spin_);

  const std::int64_t two_ma = event.outcome_a.two_m();
  const std::int64_t two_mb = event.outcome_b.two_m();
  ++n_;
  const std::int64_t prod4 = two_ma * two_mb;
  sum_prod_4x_ += prod4;
  sum_prod_sq_16x_ += prod4 * prod4;

  GroupStats& g = groups_[static_cast<std::size_t>(spin_.index_of(event.outcome_a))];
  ++g.n;
  g.sum_2mb += two_mb;
  g.sum_2mb_sq += two_mb * two_mb;
}

void AccumulatorState::merge(const AccumulatorState& other) {
  if (!(spin_ == other.spin_)) {
    throw validation_error("cannot merge accumulators of different spins");
  }
  if (!approx_equal(a_, other.a_) || !approx_equal(b_, other.b_)) {
    throw validation_error("cannot merge accumulators for different setting pairs");
  }
  n_ += other.n_;
  sum_prod_4x_ += other.sum_prod_4x_;
  sum_prod_sq_16x_ += other.sum_prod_sq_16x_;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    groups_[i].n += other.groups_[i].n;
    groups_[i].sum_2mb += other.groups_[i].sum_2mb;
    groups_[i].sum_2mb_sq += other.groups_[i].sum_2mb_sq;
  }
}

AccumulatorState accumulate(const Setting& a, const Setting& b, SpinMagnitude spin,
                            const std::vector<EventRecord>& events) {
  AccumulatorState acc(a, b, spin);
  for (const EventRecord& e : events) acc.add(e);
  return acc;
}

}  // namespace spincorr
