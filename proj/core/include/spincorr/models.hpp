#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "spincorr/event.hpp"
#include "spincorr/rng.hpp"

namespace spincorr {

/// Joint probability (1 - oa*ob*cos(theta))/4 of the spin-1/2 singlet for
/// outcomes oa, ob in {-1, +1}. The four cells sum to 1, both marginals are
/// 1/2, and the implied expectation of oa*ob is -cos(theta).
double qm_joint_prob(double theta, int outcome_a, int outcome_b);

/// The linear hidden-variable correlation -1 + 2*theta/pi (+-1 units).
double lhv_linear_corr(double theta);

/// Discrete distribution over projections with one or two support points.
class OutcomeDistribution {
public:
  static OutcomeDistribution point_mass(Outcome m);
  static OutcomeDistribution two_point(Outcome lo, double p_lo, Outcome hi, double p_hi);

  int support_size() const noexcept { return size_; }
  Outcome outcome(int i) const noexcept { return entries_[i].value; }
  double probability(int i) const noexcept { return entries_[i].prob; }
  /// Probability of an arbitrary projection; 0 outside the support.
  double probability_of(Outcome m) const noexcept;
  /// Sum of p*m over the support (hbar units).
  double mean() const noexcept;

  Outcome sample(RngStream& rng) const noexcept;

private:
  struct Entry {
    Outcome value{};
    double prob{};
  };
  std::array<Entry, 2> entries_{};
  int size_{0};
};

/// Conditional distribution of the partner projection given m_a, with mean
/// exactly -m_a*cos(theta):
///  - extremal: support {-S, +S} with p(+S) - p(-S) = -(m_a/S)*cos(theta);
///  - adjacent: support on the two lattice values bracketing the target mean
///    (collapsing to a point mass when the target sits on the lattice).
OutcomeDistribution conservation_conditional(Outcome m_a, double theta, SpinMagnitude spin,
                                             ConditionalKind kind);

/// Singlet pair at relative angle theta; outcomes are 2m = +-1.
std::pair<Outcome, Outcome> sample_qm_pair(double theta, RngStream& rng);

/// Hidden-vector pair: h uniform on the unit sphere, oa = sign(a.h),
/// ob = -sign(b.h); h is redrawn on an exactly-zero dot product with either
/// setting. Outcomes are 2m = +-1.
std::pair<Outcome, Outcome> sample_lhv_pair(const Setting& a, const Setting& b, RngStream& rng);

/// Uniform marginal over the 2S+1 projections at A, conservation-constrained
/// conditional at B.
std::pair<Outcome, Outcome> sample_conservation_pair(double theta, SpinMagnitude spin,
                                                     ConditionalKind kind, RngStream& rng);

/// -cos(theta) * S(S+1)/3 in hbar^2 units. S(S+1)/3 is formed as the integer
/// ratio 2S(2S+2)/12 with a single final floating conversion.
double spin_s_corr(SpinMagnitude spin, double theta);

/// value / S^2 : hbar^2 units -> +-1 units.
double normalized_corr(double value, SpinMagnitude spin);

/// Analytic correlation of a model at theta, hbar^2 units.
double model_corr(const ModelSpec& model, double theta);

/// Analytic correlation of a model at theta, +-1 units.
double model_corr_normalized(const ModelSpec& model, double theta);

/// One event as a pure function of (model, settings, seed, seq).
EventRecord sample_event(const ModelSpec& model, const Setting& a, const Setting& b,
                         std::uint64_t seed, std::uint64_t seq);

/// Events seq = first_seq .. first_seq+count-1. The result is identical for
/// every thread count because each event draws from its own (seed, seq)
/// substream.
std::vector<EventRecord> generate_events(const ModelSpec& model, const Setting& a,
                                         const Setting& b, std::uint64_t count,
                                         std::uint64_t seed, std::uint64_t first_seq = 0,
                                         unsigned threads = 1);

}  // namespace spincorr
