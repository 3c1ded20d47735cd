#include "spincorr/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "spincorr/errors.hpp"
#include "spincorr/geometry.hpp"

namespace spincorr {

namespace {

constexpr double kMaxGridStep = kPi / 36.0;  // 5 degrees
constexpr double kMinRefineStep = 1e-9;      // radians

double fold_angle(double x) {
  double d = std::fmod(std::abs(x), 2.0 * kPi);
  if (d > kPi) d = 2.0 * kPi - d;
  return d;
}

double eval_corr(const CorrelationFn& corr, double theta) {
  const double v = corr(theta);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "correlation function returned a non-finite value at theta=" << theta;
    throw evaluation_error(msg.str());
  }
  return v;
}

struct GridBest {
  double m = -1.0;
  int ia = 0, ib = 0, ibp = 0;
  std::uint64_t violating = 0;
};

// Correlation value per index difference on the circular grid, folded into
// [0, pi] via the evenness of the correlation function.
std::vector<double> diff_table(const CorrelationFn& corr, int n, double step) {
  const int half = n / 2;
  std::vector<double> folded(static_cast<std::size_t>(half) + 1);
  for (int k = 0; k <= half; ++k) {
    folded[static_cast<std::size_t>(k)] = eval_corr(corr, std::min(k * step, kPi));
  }
  std::vector<double> by_diff(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    by_diff[static_cast<std::size_t>(d)] = folded[static_cast<std::size_t>(std::min(d, n - d))];
  }
  return by_diff;
}

// Lexicographic scan over one contiguous a'-slice [ia_lo, ia_hi).
GridBest scan_slice(const std::vector<double>& td, int n, int ia_lo, int ia_hi) {
  GridBest best;
  const double violation_bar = 2.0 + kChshViolationMargin;
  for (int ia = ia_lo; ia < ia_hi; ++ia) {
    for (int ib = 0; ib < n; ++ib) {
      int j_apb = ia - ib;
      if (j_apb < 0) j_apb += n;
      const double c_apb = td[static_cast<std::size_t>(j_apb)];
      const double c_ab = td[static_cast<std::size_t>(ib)];
      int j_apbp = ia;  // ia - ibp for ibp = 0
      for (int ibp = 0; ibp < n; ++ibp) {
        const double m = std::abs(c_ab - td[static_cast<std::size_t>(ibp)]) +
                         std::abs(td[static_cast<std::size_t>(j_apbp)] + c_apb);
        if (m > violation_bar) ++best.violating;
        if (m > best.m) {
          best.m = m;
          best.ia = ia;
          best.ib = ib;
          best.ibp = ibp;
        }
        if (--j_apbp < 0) j_apbp += n;
      }
    }
  }
  return best;
}

struct GridScan {
  int n = 0;
  double step = 0.0;
  GridBest best;
  std::uint64_t total = 0;
};

GridScan scan_grid(const CorrelationFn& corr, double grid_step, unsigned threads) {
  if (!(grid_step > 0.0) || grid_step > kMaxGridStep * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "grid step " << grid_step << " outside (0, 5 degrees]";
    throw validation_error(msg.str());
  }
  GridScan scan;
  // Shrink the step if needed so the circular grid divides 2*pi evenly.
  scan.n = static_cast<int>(std::ceil(2.0 * kPi / grid_step - 1e-9));
  scan.step = 2.0 * kPi / scan.n;
  scan.total = static_cast<std::uint64_t>(scan.n) * scan.n * scan.n;

  const std::vector<double> td = diff_table(corr, scan.n, scan.step);

  const unsigned n_workers =
      std::clamp<unsigned>(threads, 1, static_cast<unsigned>(scan.n));
  if (n_workers == 1) {
    scan.best = scan_slice(td, scan.n, 0, scan.n);
    return scan;
  }

  std::vector<GridBest> partial(n_workers);
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  const int chunk = scan.n / static_cast<int>(n_workers);
  const int rem = scan.n % static_cast<int>(n_workers);
  int lo = 0;
  for (unsigned w = 0; w < n_workers; ++w) {
    const int hi = lo + chunk + (static_cast<int>(w) < rem ? 1 : 0);
    workers.emplace_back(
        [&td, &partial, n = scan.n, w, lo, hi] { partial[w] = scan_slice(td, n, lo, hi); });
    lo = hi;
  }
  for (auto& t : workers) t.join();

  // Deterministic reduction: slices merged in ascending a' order, strict
  // improvement only, so ties resolve to the lexicographically smallest config.
  scan.best = partial[0];
  for (unsigned w = 1; w < n_workers; ++w) {
    scan.best.violating += partial[w].violating;
    if (partial[w].m > scan.best.m) {
      const std::uint64_t violating = scan.best.violating;
      scan.best = partial[w];
      scan.best.violating = violating;
    }
  }
  return scan;
}

}  // namespace

double chsh_at(const CorrelationFn& corr, double a, double a_prime, double b, double b_prime) {
  const double p_ab = eval_corr(corr, fold_angle(a - b));
  const double p_abp = eval_corr(corr, fold_angle(a - b_prime));
  const double p_apbp = eval_corr(corr, fold_angle(a_prime - b_prime));
  const double p_apb = eval_corr(corr, fold_angle(a_prime - b));
  return std::abs(p_ab - p_abp) + std::abs(p_apbp + p_apb);
}

ChshConfiguration maximize_chsh(const CorrelationFn& corr, double grid_step, double refine_tol,
                                unsigned threads) {
  if (!(refine_tol > 0.0)) throw validation_error("refine_tol must be positive");
  const GridScan scan = scan_grid(corr, grid_step, threads);

  std::array<double, 3> angles = {scan.best.ia * scan.step, scan.best.ib * scan.step,
                                  scan.best.ibp * scan.step};
  // Track the objective through chsh_at from here on so the reported value and
  // configuration agree to machine precision.
  double best = std::max(scan.best.m, chsh_at(corr, 0.0, angles[0], angles[1], angles[2]));

  double step = scan.step;
  while (step > kMinRefineStep) {
    for (int sweeps = 0; sweeps < 1000; ++sweeps) {
      const double before = best;
      for (std::size_t coord = 0; coord < angles.size(); ++coord) {
        for (const double delta : {step, -step}) {
          std::array<double, 3> cand = angles;
          cand[coord] += delta;
          const double m = chsh_at(corr, 0.0, cand[0], cand[1], cand[2]);
          if (m > best) {
            best = m;
            angles = cand;
          }
        }
      }
      if (best - before < refine_tol) break;
    }
    step *= 0.5;
  }

  ChshConfiguration config;
  config.a = 0.0;
  config.a_prime = angles[0];
  config.b = angles[1];
  config.b_prime = angles[2];
  config.m_value = best;
  return config;
}

ViolationScan violation_scan(const CorrelationFn& corr, double grid_step, unsigned threads) {
  const GridScan scan = scan_grid(corr, grid_step, threads);
  ViolationScan out;
  out.total = scan.total;
  out.violating = scan.best.violating;
  out.fraction = static_cast<double>(out.violating) / static_cast<double>(out.total);
  out.best.a = 0.0;
  out.best.a_prime = scan.best.ia * scan.step;
  out.best.b = scan.best.ib * scan.step;
  out.best.b_prime = scan.best.ibp * scan.step;
  out.best.m_value =
      chsh_at(corr, 0.0, out.best.a_prime, out.best.b, out.best.b_prime);
  return out;
}

}  // namespace spincorr
