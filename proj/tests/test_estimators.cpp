#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "spincorr/errors.hpp"
#include "spincorr/estimators.hpp"

using namespace spincorr;

namespace {

EventRecord make_event(std::uint64_t seq, const Setting& a, const Setting& b, int two_ma,
                       int two_mb) {
  return EventRecord{seq, a, b, Outcome(two_ma), Outcome(two_mb)};
}

AccumulatorState qm_accumulator(double theta, std::uint64_t n, std::uint64_t seed) {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(theta);
  const auto model = ModelSpec::qm_singlet_half();
  return accumulate(a, b, model.spin(), generate_events(model, a, b, n, seed));
}

AccumulatorState lhv_accumulator(double theta, std::uint64_t n, std::uint64_t seed) {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(theta);
  const auto model = ModelSpec::lhv_linear();
  return accumulate(a, b, model.spin(), generate_events(model, a, b, n, seed));
}

}  // namespace

TEST_CASE("plain_correlation on tiny hand-built sets") {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(kPi / 3.0);
  const SpinMagnitude half = SpinMagnitude::half();

  AccumulatorState acc(a, b, half);
  acc.add(make_event(0, a, b, 1, -1));
  acc.add(make_event(1, a, b, -1, 1));
  const auto est = plain_correlation(acc);
  CHECK(est.value_normalized() == -1.0);
  CHECK(est.value == -0.25);  // hbar^2 units
  CHECK(est.se == 0.0);
  CHECK(est.n == 2);

  AccumulatorState acc2(a, b, half);
  acc2.add(make_event(0, a, b, 1, 1));
  acc2.add(make_event(1, a, b, 1, -1));
  CHECK(plain_correlation(acc2).value_normalized() == 0.0);
  CHECK(plain_correlation(acc2).se > 0.0);

  AccumulatorState acc3(a, b, half);
  CHECK_THROWS_AS(plain_correlation(acc3), insufficient_data_error);
  acc3.add(make_event(0, a, b, 1, -1));
  CHECK_THROWS_AS(plain_correlation(acc3), insufficient_data_error);
}

TEST_CASE("plain_correlation recovers the singlet value at pi/4") {
  const auto est = plain_correlation(qm_accumulator(kPi / 4.0, 1000000, 8));
  CHECK(std::abs(est.value_normalized() - (-std::cos(kPi / 4.0))) <= 0.004);
  CHECK(est.se_normalized() == doctest::Approx(0.0007).epsilon(0.3));
}

TEST_CASE("grouped_correlation on hand-built and balanced synthetic sets") {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(kPi / 3.0);
  const SpinMagnitude half = SpinMagnitude::half();

  AccumulatorState acc(a, b, half);
  acc.add(make_event(0, a, b, 1, -1));
  acc.add(make_event(1, a, b, -1, 1));
  CHECK(grouped_correlation(acc).value_normalized() == -1.0);

  // Balanced synthetic set with conditional means -c and +c for c = 1/2:
  // each group of 4 has B-values mixed 3:1, so mean(B|A=+1) = -1/2 and
  // mean(B|A=-1) = +1/2 in +-1 units; the grouped estimator returns -c.
  AccumulatorState bal(a, b, half);
  std::uint64_t seq = 0;
  for (int i = 0; i < 3; ++i) bal.add(make_event(seq++, a, b, 1, -1));
  bal.add(make_event(seq++, a, b, 1, 1));
  for (int i = 0; i < 3; ++i) bal.add(make_event(seq++, a, b, -1, 1));
  bal.add(make_event(seq++, a, b, -1, -1));
  const auto gest = grouped_correlation(bal);
  CHECK(gest.value_normalized() == doctest::Approx(-0.5).epsilon(1e-12));
  // balanced counts: grouped equals plain exactly
  CHECK(gest.value == doctest::Approx(plain_correlation(bal).value).epsilon(1e-12));

  // all events in one group: the other group is required and empty
  AccumulatorState lop(a, b, half);
  lop.add(make_event(0, a, b, 1, -1));
  lop.add(make_event(1, a, b, 1, 1));
  CHECK_THROWS_WITH_AS(grouped_correlation(lop), doctest::Contains("2m=-1"),
                       insufficient_data_error);
}

TEST_CASE("grouped vs plain: close on large samples, different when unbalanced") {
  const auto acc = qm_accumulator(kPi / 3.0, 1000000, 9);
  const double grouped = grouped_correlation(acc).value_normalized();
  const double plain = plain_correlation(acc).value_normalized();
  CHECK(std::abs(grouped - plain) < 2e-3);
  CHECK(std::abs(grouped - (-0.5)) < 0.01);

  // spin-1/2 grouped keeps equal group weights, so an unbalanced set
  // separates the two estimators
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(0.5);
  AccumulatorState lop(a, b, SpinMagnitude::half());
  lop.add(make_event(0, a, b, 1, 1));
  lop.add(make_event(1, a, b, 1, 1));
  lop.add(make_event(2, a, b, 1, 1));
  lop.add(make_event(3, a, b, -1, 1));
  CHECK(grouped_correlation(lop).value_normalized() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(plain_correlation(lop).value_normalized() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("grouped_correlation at higher spin uses realized frequencies") {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(1.0);
  const SpinMagnitude one(2);

  AccumulatorState acc(a, b, one);
  std::uint64_t seq = 0;
  // deliberately unbalanced groups; the frequency-weighted form still equals
  // the plain estimator algebraically
  for (int i = 0; i < 5; ++i) acc.add(make_event(seq++, a, b, 2, -2));
  for (int i = 0; i < 3; ++i) acc.add(make_event(seq++, a, b, 0, 2));
  for (int i = 0; i < 2; ++i) acc.add(make_event(seq++, a, b, -2, 0));
  acc.add(make_event(seq++, a, b, -2, 2));
  CHECK(grouped_correlation(acc).value ==
        doctest::Approx(plain_correlation(acc).value).epsilon(1e-12));

  AccumulatorState missing(a, b, one);
  missing.add(make_event(0, a, b, 2, -2));
  missing.add(make_event(1, a, b, -2, 2));
  CHECK_THROWS_WITH_AS(grouped_correlation(missing), doctest::Contains("2m=0"),
                       insufficient_data_error);
}

TEST_CASE("conservation_residual: QM passes, LHV fails away from special angles") {
  // QM at pi/3: residuals are pure Monte Carlo noise
  const auto qm = conservation_residual(qm_accumulator(kPi / 3.0, 1000000, 10), kPi / 3.0);
  REQUIRE(qm.max_abs_residual_normalized.has_value());
  CHECK(*qm.max_abs_residual_normalized < 0.005);
  for (const auto& g : qm.groups) {
    REQUIRE(g.residual.has_value());
    REQUIRE(g.se.has_value());
    CHECK(std::abs(*g.residual) <= 4.0 * *g.se);
  }

  // LHV at pi/3: the +1/2 group misses the conservation mean by
  // cos(theta) - 1 + 2 theta/pi = 1/6 in +-1 units
  const auto lhv = conservation_residual(lhv_accumulator(kPi / 3.0, 1000000, 11), kPi / 3.0);
  const auto& plus = lhv.groups.at(1);
  REQUIRE(plus.two_m == 1);
  REQUIRE(plus.residual.has_value());
  const double plus_normalized = *plus.residual / 0.5;
  CHECK(std::abs(plus_normalized - 1.0 / 6.0) <= 0.01);

  // LHV at theta=0: perfect conservation at the special angle, identically
  const auto zero = conservation_residual(lhv_accumulator(0.0, 20000, 12), 0.0);
  REQUIRE(zero.groups.at(1).residual.has_value());
  CHECK(*zero.groups.at(1).residual == 0.0);
}

TEST_CASE("conservation audit is null for conservation samplers at every spin") {
  const Setting a = Setting::from_planar_angle(0.0);
  std::uint64_t seed = 7000;
  for (const int two_s : {2, 3, 4}) {
    const SpinMagnitude spin(two_s);
    for (const auto kind : {ConditionalKind::extremal, ConditionalKind::adjacent}) {
      const auto model = ModelSpec::conservation(spin, kind);
      for (const double theta : {0.0, 0.3, 0.9, kPi / 2.0, 2.2, kPi}) {
        const Setting b = Setting::from_planar_angle(theta);
        const auto events = generate_events(model, a, b, 200000, seed++);
        const auto audit = conservation_residual(accumulate(a, b, spin, events), theta);
        for (const auto& g : audit.groups) {
          REQUIRE(g.residual.has_value());
          // 1e-12 floor covers degenerate groups whose one realized support
          // point leaves se = 0 while the residual is machine dust
          const double band = (g.se ? 4.0 * *g.se : 0.0) + 1e-12;
          REQUIRE(std::abs(*g.residual) <= band);
        }
      }
    }
  }
}

TEST_CASE("conservation_residual reports empty groups as undefined") {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(0.7);
  AccumulatorState acc(a, b, SpinMagnitude(2));
  acc.add(make_event(0, a, b, 2, -2));
  acc.add(make_event(1, a, b, 2, 0));
  const auto audit = conservation_residual(acc, 0.7);
  CHECK_FALSE(audit.groups.at(0).residual.has_value());  // m=-1 empty
  CHECK_FALSE(audit.groups.at(1).residual.has_value());  // m=0 empty
  REQUIRE(audit.groups.at(2).residual.has_value());
  CHECK(audit.groups.at(2).se.has_value());
  // max over defined groups only
  CHECK(*audit.max_abs_residual == std::abs(*audit.groups.at(2).residual));

  AccumulatorState single(a, b, SpinMagnitude(2));
  single.add(make_event(0, a, b, 2, -2));
  const auto one_event = conservation_residual(single, 0.7);
  REQUIRE(one_event.groups.at(2).residual.has_value());
  CHECK_FALSE(one_event.groups.at(2).se.has_value());  // se needs two events
}

TEST_CASE("chsh combination arithmetic") {
  CHECK(chsh(-1.0, -1.0, -1.0, -1.0) == 2.0);
  CHECK(chsh(0.0, 0.0, 0.0, 0.0) == 0.0);

  // QM at a=0, a'=pi/2, b=pi/4, b'=3pi/4
  const double c = [](double t) { return -std::cos(t); }(kPi / 4.0);
  const double cp = -std::cos(3.0 * kPi / 4.0);
  const double m = chsh(c, cp, c, c);
  CHECK(std::abs(m - 2.0 * std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("chsh_from_events discriminates the two models at the optimal angles") {
  const auto qm = ModelSpec::qm_singlet_half();
  const auto lhv = ModelSpec::lhv_linear();
  const double angles[4][2] = {
      {0.0, kPi / 4.0}, {0.0, 3.0 * kPi / 4.0}, {kPi / 2.0, 3.0 * kPi / 4.0}, {kPi / 2.0, kPi / 4.0}};

  const auto batch = [&](const ModelSpec& model, int k, std::uint64_t n) {
    const Setting sa = Setting::from_planar_angle(angles[k][0]);
    const Setting sb = Setting::from_planar_angle(angles[k][1]);
    const auto events =
        generate_events(model, sa, sb, n, 2025, static_cast<std::uint64_t>(k) * n);
    return accumulate(sa, sb, model.spin(), events);
  };

  const std::uint64_t n = 1000000;
  const auto qm_est =
      chsh_from_events(batch(qm, 0, n), batch(qm, 1, n), batch(qm, 2, n), batch(qm, 3, n));
  CHECK(std::abs(qm_est.m_value - 2.828) <= 0.01);
  CHECK(qm_est.se < 0.005);

  const auto lhv_est =
      chsh_from_events(batch(lhv, 0, n), batch(lhv, 1, n), batch(lhv, 2, n), batch(lhv, 3, n));
  CHECK(lhv_est.m_value <= 2.02);
  CHECK(lhv_est.m_value >= 1.98);
}

TEST_CASE("chsh_from_events: perfect anticorrelation everywhere gives exactly 2") {
  const auto qm = ModelSpec::qm_singlet_half();
  const Setting s0 = Setting::from_planar_angle(0.0);
  const auto batch = [&](int k) {
    const auto events = generate_events(qm, s0, s0, 1000, 3, static_cast<std::uint64_t>(k) * 1000);
    return accumulate(s0, s0, qm.spin(), events);
  };
  const auto est = chsh_from_events(batch(0), batch(1), batch(2), batch(3));
  CHECK(est.m_value == 2.0);
  CHECK(est.se == 0.0);
}

TEST_CASE("chsh_from_events rejects accumulators off the CHSH pattern") {
  const auto qm = ModelSpec::qm_singlet_half();
  const Setting s0 = Setting::from_planar_angle(0.0);
  const Setting s1 = Setting::from_planar_angle(0.5);
  const Setting s2 = Setting::from_planar_angle(1.0);
  const auto batch = [&](const Setting& x, const Setting& y, int k) {
    const auto events = generate_events(qm, x, y, 10, 3, static_cast<std::uint64_t>(k) * 10);
    return accumulate(x, y, qm.spin(), events);
  };
  // second pair should share setting a with the first
  CHECK_THROWS_AS(
      chsh_from_events(batch(s0, s1, 0), batch(s2, s1, 1), batch(s2, s1, 2), batch(s2, s1, 3)),
      validation_error);
}

TEST_CASE("correlation_curve endpoints match the analytic laws") {
  const std::vector<double> grid = {0.0, kPi / 2.0, kPi};

  const auto qm_curve = correlation_curve(ModelSpec::qm_singlet_half(), grid, 200, 5);
  REQUIRE(qm_curve.size() == 3);
  CHECK(normalized_corr(qm_curve[0].analytic, SpinMagnitude::half()) == -1.0);
  CHECK(std::abs(qm_curve[1].analytic) <= 1e-12);
  CHECK(normalized_corr(qm_curve[2].analytic, SpinMagnitude::half()) == 1.0);
  // perfect anticorrelation at 0: the estimate is exact, not just close
  CHECK(qm_curve[0].estimate.value == qm_curve[0].analytic);

  const auto lhv_curve = correlation_curve(ModelSpec::lhv_linear(), grid, 200, 5);
  CHECK(normalized_corr(lhv_curve[0].analytic, SpinMagnitude::half()) == -1.0);
  CHECK(normalized_corr(lhv_curve[1].analytic, SpinMagnitude::half()) == 0.0);
  CHECK(normalized_corr(lhv_curve[2].analytic, SpinMagnitude::half()) == 1.0);

  const auto cons = ModelSpec::conservation(SpinMagnitude(2), ConditionalKind::extremal);
  const auto cons_curve = correlation_curve(cons, grid, 200, 5);
  CHECK(cons_curve[2].analytic == 2.0 / 3.0);

  // determinism
  const auto again = correlation_curve(ModelSpec::qm_singlet_half(), grid, 200, 5);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(again[i].estimate.value == qm_curve[i].estimate.value);
  }
}

TEST_CASE("merge invariance: any split/merge topology gives the identical state") {
  const Setting a = Setting::from_planar_angle(0.0);
  const Setting b = Setting::from_planar_angle(1.3);
  const auto model = ModelSpec::conservation(SpinMagnitude(3), ConditionalKind::adjacent);
  const auto events = generate_events(model, a, b, 10000, 99);

  const AccumulatorState whole = accumulate(a, b, model.spin(), events);

  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 5; ++rep) {
    // random cut points -> shards -> shuffled pairwise merges
    std::vector<std::size_t> cuts = {0, events.size()};
    std::uniform_int_distribution<std::size_t> pick(1, events.size() - 1);
    for (int c = 0; c < 6; ++c) cuts.push_back(pick(gen));
    std::sort(cuts.begin(), cuts.end());
    std::vector<AccumulatorState> shards;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      std::vector<EventRecord> part(events.begin() + static_cast<std::ptrdiff_t>(cuts[i]),
                                    events.begin() + static_cast<std::ptrdiff_t>(cuts[i + 1]));
      shards.push_back(accumulate(a, b, model.spin(), part));
    }
    std::shuffle(shards.begin(), shards.end(), gen);
    while (shards.size() > 1) {
      shards[shards.size() - 2].merge(shards.back());
      shards.pop_back();
    }
    const AccumulatorState& merged = shards.front();

    REQUIRE(merged.count() == whole.count());
    REQUIRE(merged.sum_products() == whole.sum_products());
    REQUIRE(merged.sum_products_squared() == whole.sum_products_squared());
    for (int g = 0; g <= model.spin().two_s(); ++g) {
      REQUIRE(merged.group_count(g) == whole.group_count(g));
      REQUIRE(merged.group_sum_b(g) == whole.group_sum_b(g));
      REQUIRE(merged.group_sum_b_squared(g) == whole.group_sum_b_squared(g));
    }
    REQUIRE(plain_correlation(merged).value == plain_correlation(whole).value);
    REQUIRE(plain_correlation(merged).se == plain_correlation(whole).se);
  }

  const Setting c = Setting::from_planar_angle(0.4);
  AccumulatorState other(a, c, model.spin());
  AccumulatorState target(a, b, model.spin());
  CHECK_THROWS_AS(target.merge(other), validation_error);
}

TEST_CASE("estimator consistency over 200 seeded replications") {
  const double theta = kPi / 3.0;
  std::vector<double> plains, groupeds;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto acc = qm_accumulator(theta, 10000, 1000 + rep);
    plains.push_back(plain_correlation(acc).value_normalized());
    groupeds.push_back(grouped_correlation(acc).value_normalized());
  }
  const auto check_mean = [](const std::vector<double>& xs) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    var /= (xs.size() - 1);
    const double se_mean = std::sqrt(var / xs.size());
    CHECK(std::abs(mean - (-0.5)) <= 4.0 * se_mean);
  };
  check_mean(plains);
  check_mean(groupeds);
}

TEST_CASE("estimates stay inside the sanity band") {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    for (const double theta : {0.0, 0.9, kPi / 2.0, 2.5, kPi}) {
      const auto acc = qm_accumulator(theta, 5000, seed);
      for (const auto& est : {plain_correlation(acc), grouped_correlation(acc)}) {
        CHECK(est.se >= 0.0);
        CHECK(std::abs(est.value_normalized()) <= 1.0 + 5.0 * est.se_normalized());
      }
    }
  }
}
