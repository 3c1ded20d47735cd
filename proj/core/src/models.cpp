#include "spincorr/models.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "spincorr/errors.hpp"

namespace spincorr {

namespace {

int require_sign_outcome(int outcome, const char* side) {
  if (outcome != 1 && outcome != -1) {
    std::ostringstream msg;
    msg << side << " outcome must be +1 or -1, got " << outcome;
    throw validation_error(msg.str());
  }
  return outcome;
}

}  // namespace

double qm_joint_prob(double theta, int outcome_a, int outcome_b) {
  const double t = require_theta(theta);
  require_sign_outcome(outcome_a, "A");
  require_sign_outcome(outcome_b, "B");
  return (1.0 - outcome_a * outcome_b * std::cos(t)) / 4.0;
}

double lhv_linear_corr(double theta) {
  const double t = require_theta(theta);
  return -1.0 + 2.0 * t / kPi;
}

OutcomeDistribution OutcomeDistribution::point_mass(Outcome m) {
  OutcomeDistribution d;
  d.entries_[0] = {m, 1.0};
  d.size_ = 1;
  return d;
}

OutcomeDistribution OutcomeDistribution::two_point(Outcome lo, double p_lo, Outcome hi,
                                                   double p_hi) {
  if (p_lo == 0.0) return point_mass(hi);
  if (p_hi == 0.0) return point_mass(lo);
  OutcomeDistribution d;
  d.entries_[0] = {lo, p_lo};
  d.entries_[1] = {hi, p_hi};
  d.size_ = 2;
  return d;
}

double OutcomeDistribution::probability_of(Outcome m) const noexcept {
  for (int i = 0; i < size_; ++i) {
    if (entries_[i].value == m) return entries_[i].prob;
  }
  return 0.0;
}

double OutcomeDistribution::mean() const noexcept {
  double acc = 0.0;
  for (int i = 0; i < size_; ++i) acc += entries_[i].prob * entries_[i].value.value();
  return acc;
}

Outcome OutcomeDistribution::sample(RngStream& rng) const noexcept {
  if (size_ == 1) return entries_[0].value;
  return rng.next_double() < entries_[0].prob ? entries_[0].value : entries_[1].value;
}

OutcomeDistribution conservation_conditional(Outcome m_a, double theta, SpinMagnitude spin,
                                             ConditionalKind kind) {
  const double t = require_theta(theta);
  if (!spin.contains(m_a)) {
    std::ostringstream msg;
    msg << "outcome 2m=" << m_a.two_m() << " invalid for spin 2S=" << spin.two_s();
    throw validation_error(msg.str());
  }
  const double s = spin.value();
  const int top = spin.two_s();  // lattice index of +S

  if (kind == ConditionalKind::extremal) {
    // p(+S) - p(-S) = -(m_a/S) cos(theta) pins the mean at -m_a cos(theta).
    const double ratio = m_a.value() / s;
    double p_hi = 0.5 * (1.0 - ratio * std::cos(t));
    if (p_hi < 0.0) p_hi = 0.0;
    if (p_hi > 1.0) p_hi = 1.0;
    return OutcomeDistribution::two_point(spin.projection(0), 1.0 - p_hi, spin.projection(top),
                                          p_hi);
  }

  // adjacent: bracket the target mean between neighbouring lattice values
  const double target = -m_a.value() * std::cos(t);
  double offset = target + s;  // in [0, 2S]
  if (offset < 0.0) offset = 0.0;
  if (offset > top) offset = top;
  int k = static_cast<int>(std::floor(offset));
  if (k >= top) k = top;
  const double frac = offset - k;  // exact: both operands share the lattice scale
  if (frac == 0.0 || k == top) return OutcomeDistribution::point_mass(spin.projection(k));
  return OutcomeDistribution::two_point(spin.projection(k), 1.0 - frac, spin.projection(k + 1),
                                        frac);
}

std::pair<Outcome, Outcome> sample_qm_pair(double theta, RngStream& rng) {
  const double t = require_theta(theta);
  const double c = std::cos(t);
  const int oa = rng.next_double() < 0.5 ? 1 : -1;
  // P(ob = +1 | oa) = (1 - oa cos(theta)) / 2
  const double p_plus = 0.5 * (1.0 - oa * c);
  const int ob = rng.next_double() < p_plus ? 1 : -1;
  return {Outcome(oa), Outcome(ob)};
}

std::pair<Outcome, Outcome> sample_lhv_pair(const Setting& a, const Setting& b, RngStream& rng) {
  for (;;) {
    const double x = rng.next_normal();
    const double y = rng.next_normal();
    const double z = rng.next_normal();
    const double norm_sq = x * x + y * y + z * z;
    if (norm_sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm_sq);
    const double hx = x * inv, hy = y * inv, hz = z * inv;
    const double da = a.x() * hx + a.y() * hy + a.z() * hz;
    const double db = b.x() * hx + b.y() * hy + b.z() * hz;
    if (da == 0.0 || db == 0.0) continue;  // measure-zero tie: redraw
    const int oa = da > 0.0 ? 1 : -1;
    const int ob = db > 0.0 ? -1 : 1;
    return {Outcome(oa), Outcome(ob)};
  }
}

std::pair<Outcome, Outcome> sample_conservation_pair(double theta, SpinMagnitude spin,
                                                     ConditionalKind kind, RngStream& rng) {
  const double t = require_theta(theta);
  // uniform marginal over the 2S+1 projections (rotational invariance)
  const int idx = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spin.multiplicity())));
  const Outcome m_a = spin.projection(idx);
  const Outcome m_b = conservation_conditional(m_a, t, spin, kind).sample(rng);
  return {m_a, m_b};
}

double spin_s_corr(SpinMagnitude spin, double theta) {
  const double t = require_theta(theta);
  const std::int64_t two_s = spin.two_s();
  const std::int64_t num = two_s * (two_s + 2);  // 4 S (S+1)
  return -std::cos(t) * (static_cast<double>(num) / 12.0);
}

double normalized_corr(double value, SpinMagnitude spin) {
  return value / spin.value_squared();
}

double model_corr(const ModelSpec& model, double theta) {
  switch (model.variant()) {
    case ModelVariant::qm_singlet_half:
      return spin_s_corr(SpinMagnitude::half(), theta);
    case ModelVariant::lhv_linear:
      // +-1-unit linear law scaled onto the m = +-1/2 products
      return lhv_linear_corr(theta) / 4.0;
    case ModelVariant::conservation_spin:
      return spin_s_corr(model.spin(), theta);
  }
  throw validation_error("unknown model variant");
}

double model_corr_normalized(const ModelSpec& model, double theta) {
  return normalized_corr(model_corr(model, theta), model.spin());
}

namespace {

std::pair<Outcome, Outcome> sample_outcomes(const ModelSpec& model, const Setting& a,
                                            const Setting& b, double theta, RngStream& rng) {
  switch (model.variant()) {
    case ModelVariant::qm_singlet_half:
      return sample_qm_pair(theta, rng);
    case ModelVariant::lhv_linear:
      return sample_lhv_pair(a, b, rng);
    case ModelVariant::conservation_spin:
      return sample_conservation_pair(theta, model.spin(), model.kind(), rng);
  }
  throw validation_error("unknown model variant");
}

}  // namespace

EventRecord sample_event(const ModelSpec& model, const Setting& a, const Setting& b,
                         std::uint64_t seed, std::uint64_t seq) {
  const double theta = relative_angle(a, b);
  RngStream rng(seed, seq);
  const auto [oa, ob] = sample_outcomes(model, a, b, theta, rng);
  return EventRecord{seq, a, b, oa, ob};
}

std::vector<EventRecord> generate_events(const ModelSpec& model, const Setting& a,
                                         const Setting& b, std::uint64_t count,
                                         std::uint64_t seed, std::uint64_t first_seq,
                                         unsigned threads) {
  const double theta = relative_angle(a, b);
  std::vector<EventRecord> out(count, EventRecord{0, a, b, Outcome(), Outcome()});

  const auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t seq = first_seq + i;
      RngStream rng(seed, seq);
      const auto [oa, ob] = sample_outcomes(model, a, b, theta, rng);
      out[i].seq = seq;
      out[i].outcome_a = oa;
      out[i].outcome_b = ob;
    }
  };

  if (threads <= 1 || count < 2) {
    fill(0, count);
    return out;
  }

  const unsigned n_workers = std::min<std::uint64_t>(threads, count);
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  const std::uint64_t chunk = count / n_workers;
  const std::uint64_t rem = count % n_workers;
  std::uint64_t lo = 0;
  for (unsigned w = 0; w < n_workers; ++w) {
    const std::uint64_t hi = lo + chunk + (w < rem ? 1 : 0);
    workers.emplace_back(fill, lo, hi);
    lo = hi;
  }
  for (auto& t : workers) t.join();
  return out;
}

}  // namespace spincorr
