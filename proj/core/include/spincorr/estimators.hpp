#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spincorr/accumulator.hpp"
#include "spincorr/models.hpp"

namespace spincorr {

/// A correlation estimate in hbar^2 units with its sample standard error.
/// The +-1-unit companion divides by S^2.
struct CorrelationEstimate {
  double value{};  // hbar^2
  double se{};
  std::int64_t n{};
  int two_s{1};

  double value_normalized() const noexcept;
  double se_normalized() const noexcept;
};

/// Sample mean of the products m_a*m_b with its standard error.
/// Requires n >= 2.
CorrelationEstimate plain_correlation(const AccumulatorState& acc);

/// Conditional-average estimator built from fixed-m_a groups.
///
/// Spin-1/2 uses the equal-weight two-group form
///   (1/2) [ mean(B|A=+1) - mean(B|A=-1) ]   (+-1 units),
/// which matches plain_correlation exactly only when the group counts are
/// balanced. General spins weight each group by its realized frequency,
///   sum_m  p_hat(m) * m * mean(m_b | m_a = m).
/// Every group must be populated; an empty one raises insufficient_data_error
/// naming the missing projection.
CorrelationEstimate grouped_correlation(const AccumulatorState& acc);

struct GroupResidual {
  int two_m{};
  std::int64_t count{};
  /// mean(m_b | m_a = m) + m*cos(theta), hbar units; empty when the group has
  /// no events (undefined, never reported as zero).
  std::optional<double> residual;
  /// Standard error of the group mean; empty when count < 2.
  std::optional<double> se;
};

/// Per-group conservation audit of an accumulated pair.
struct ConservationAudit {
  int two_s{1};
  double theta{};
  std::vector<GroupResidual> groups;  // ordered -S .. +S
  /// Max |residual| over populated groups (hbar units); empty if none.
  std::optional<double> max_abs_residual;
  /// Same, divided by S (+-1 units).
  std::optional<double> max_abs_residual_normalized;
};

/// A sampler conserves angular momentum on average exactly when every defined
/// residual is statistically consistent with zero.
ConservationAudit conservation_residual(const AccumulatorState& acc, double theta);

/// |p_ab - p_abp| + |p_apbp + p_apb| for normalized correlations.
double chsh(double p_ab, double p_abp, double p_apbp, double p_apb);

struct ChshEstimate {
  double m_value{};
  double se{};  // quadrature of the four estimate SEs
  std::array<CorrelationEstimate, 4> correlations;  // ab, ab', a'b', a'b
};

/// CHSH from four accumulated setting pairs (normalized plain correlations).
/// The accumulators must share settings in the CHSH pattern:
/// (a,b), (a,b'), (a',b'), (a',b); otherwise validation_error.
ChshEstimate chsh_from_events(const AccumulatorState& ab, const AccumulatorState& abp,
                              const AccumulatorState& apbp, const AccumulatorState& apb);

struct CurvePoint {
  double theta{};
  CorrelationEstimate estimate;  // hbar^2
  double analytic{};             // hbar^2, from the model's closed form
};

/// Simulates events_per_point events at each grid angle and pairs the plain
/// estimate with the model's analytic value. Point i draws from the seq range
/// [i*events_per_point, (i+1)*events_per_point), so the table is deterministic
/// in (model, grid, seed) and independent of the thread count.
std::vector<CurvePoint> correlation_curve(const ModelSpec& model, std::span<const double> thetas,
                                          std::int64_t events_per_point, std::uint64_t seed,
                                          unsigned threads = 1);

}  // namespace spincorr
