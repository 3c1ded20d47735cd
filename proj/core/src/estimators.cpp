#include "spincorr/estimators.hpp"

#include <cmath>
#include <sstream>

#include "spincorr/errors.hpp"

namespace spincorr {

namespace {

double spin_squared(int two_s) { return static_cast<double>(two_s) * two_s / 4.0; }

// Sample variance from a raw sum and sum of squares; 0 when n < 2.
double sample_variance(double sum, double sum_sq, std::int64_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  return var > 0.0 ? var : 0.0;
}

double product_se(const AccumulatorState& acc) {
  const double var =
      sample_variance(acc.sum_products(), acc.sum_products_squared(), acc.count());
  return std::sqrt(var / static_cast<double>(acc.count()));
}

void require_populated_groups(const AccumulatorState& acc) {
  const int two_s = acc.spin().two_s();
  for (int idx = 0; idx <= two_s; ++idx) {
    if (acc.group_count(idx) == 0) {
      std::ostringstream msg;
      msg << "group for projection 2m=" << (-two_s + 2 * idx)
          << " has no events; grouped estimator undefined";
      throw insufficient_data_error(msg.str());
    }
  }
}

}  // namespace

double CorrelationEstimate::value_normalized() const noexcept {
  return value / spin_squared(two_s);
}

double CorrelationEstimate::se_normalized() const noexcept { return se / spin_squared(two_s); }

CorrelationEstimate plain_correlation(const AccumulatorState& acc) {
  const std::int64_t n = acc.count();
  if (n < 2) {
    std::ostringstream msg;
    msg << "plain correlation requires at least 2 events, have " << n;
    throw insufficient_data_error(msg.str());
  }
  CorrelationEstimate est;
  est.n = n;
  est.two_s = acc.spin().two_s();
  est.value = acc.sum_products() / static_cast<double>(n);
  est.se = product_se(acc);
  return est;
}

CorrelationEstimate grouped_correlation(const AccumulatorState& acc) {
  require_populated_groups(acc);
  const int two_s = acc.spin().two_s();
  const std::int64_t n = acc.count();

  CorrelationEstimate est;
  est.n = n;
  est.two_s = two_s;

  if (two_s == 1) {
    // Equal-weight two-group form; realized counts only enter the group means.
    const std::int64_t n_lo = acc.group_count(0);
    const std::int64_t n_hi = acc.group_count(1);
    const double mean_lo = acc.group_sum_b(0) / static_cast<double>(n_lo);
    const double mean_hi = acc.group_sum_b(1) / static_cast<double>(n_hi);
    est.value = (mean_hi - mean_lo) / 4.0;
    const double var_lo = sample_variance(acc.group_sum_b(0), acc.group_sum_b_squared(0), n_lo);
    const double var_hi = sample_variance(acc.group_sum_b(1), acc.group_sum_b_squared(1), n_hi);
    est.se = std::sqrt((var_hi / static_cast<double>(n_hi) + var_lo / static_cast<double>(n_lo)) /
                       16.0);
    return est;
  }

  // General spin: frequency-weighted conditional means.
  double value = 0.0;
  for (int idx = 0; idx <= two_s; ++idx) {
    const std::int64_t n_g = acc.group_count(idx);
    const double p_hat = static_cast<double>(n_g) / static_cast<double>(n);
    const double m = (-two_s + 2 * idx) / 2.0;
    const double mean_g = acc.group_sum_b(idx) / static_cast<double>(n_g);
    value += p_hat * m * mean_g;
  }
  est.value = value;
  est.se = product_se(acc);
  return est;
}

ConservationAudit conservation_residual(const AccumulatorState& acc, double theta) {
  const double t = require_theta(theta);
  const double c = std::cos(t);
  const int two_s = acc.spin().two_s();
  const double s = acc.spin().value();

  ConservationAudit audit;
  audit.two_s = two_s;
  audit.theta = t;
  audit.groups.reserve(static_cast<std::size_t>(two_s) + 1);

  for (int idx = 0; idx <= two_s; ++idx) {
    GroupResidual g;
    g.two_m = -two_s + 2 * idx;
    g.count = acc.group_count(idx);
    if (g.count >= 1) {
      const double mean_g = acc.group_sum_b(idx) / static_cast<double>(g.count);
      g.residual = mean_g + (g.two_m / 2.0) * c;
      if (g.count >= 2) {
        const double var =
            sample_variance(acc.group_sum_b(idx), acc.group_sum_b_squared(idx), g.count);
        g.se = std::sqrt(var / static_cast<double>(g.count));
      }
      const double abs_r = std::abs(*g.residual);
      if (!audit.max_abs_residual || abs_r > *audit.max_abs_residual) {
        audit.max_abs_residual = abs_r;
      }
    }
    audit.groups.push_back(g);
  }
  if (audit.max_abs_residual) {
    audit.max_abs_residual_normalized = *audit.max_abs_residual / s;
  }
  return audit;
}

double chsh(double p_ab, double p_abp, double p_apbp, double p_apb) {
  return std::abs(p_ab - p_abp) + std::abs(p_apbp + p_apb);
}

ChshEstimate chsh_from_events(const AccumulatorState& ab, const AccumulatorState& abp,
                              const AccumulatorState& apbp, const AccumulatorState& apb) {
  if (!(ab.spin() == abp.spin()) || !(ab.spin() == apbp.spin()) || !(ab.spin() == apb.spin())) {
    throw validation_error("chsh accumulators must share one spin");
  }
  const bool pattern_ok = approx_equal(ab.setting_a(), abp.setting_a()) &&
                          approx_equal(apbp.setting_a(), apb.setting_a()) &&
                          approx_equal(ab.setting_b(), apb.setting_b()) &&
                          approx_equal(abp.setting_b(), apbp.setting_b());
  if (!pattern_ok) {
    throw validation_error(
        "accumulators do not form the CHSH pattern (a,b), (a,b'), (a',b'), (a',b)");
  }

  ChshEstimate out;
  out.correlations = {plain_correlation(ab), plain_correlation(abp), plain_correlation(apbp),
                      plain_correlation(apb)};
  out.m_value = chsh(out.correlations[0].value_normalized(), out.correlations[1].value_normalized(),
                     out.correlations[2].value_normalized(),
                     out.correlations[3].value_normalized());
  double se_sq = 0.0;
  for (const CorrelationEstimate& e : out.correlations) {
    se_sq += e.se_normalized() * e.se_normalized();
  }
  out.se = std::sqrt(se_sq);
  return out;
}

std::vector<CurvePoint> correlation_curve(const ModelSpec& model, std::span<const double> thetas,
                                          std::int64_t events_per_point, std::uint64_t seed,
                                          unsigned threads) {
  if (events_per_point < 2) {
    throw validation_error("correlation curve needs at least 2 events per point");
  }
  std::vector<CurvePoint> table;
  table.reserve(thetas.size());
  const Setting a = Setting::from_planar_angle(0.0);
  std::uint64_t first_seq = 0;
  for (const double theta_raw : thetas) {
    const double theta = require_theta(theta_raw);
    const Setting b = Setting::from_planar_angle(theta);
    const auto events = generate_events(model, a, b, static_cast<std::uint64_t>(events_per_point),
                                        seed, first_seq, threads);
    first_seq += static_cast<std::uint64_t>(events_per_point);
    const AccumulatorState acc = accumulate(a, b, model.spin(), events);
    CurvePoint point;
    point.theta = theta;
    point.estimate = plain_correlation(acc);
    point.analytic = model_corr(model, theta);
    table.push_back(point);
  }
  return table;
}

}  // namespace spincorr
