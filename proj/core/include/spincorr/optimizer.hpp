#pragma once

#include <cstdint>
#include <functional>

namespace spincorr {

/// Even correlation function of the relative angle, defined on [0, pi].
using CorrelationFn = std::function<double(double)>;

/// Threshold above which a CHSH value counts as violating the bound of 2;
/// the margin absorbs floating-point rounding in exactly-at-2 plateaus.
inline constexpr double kChshViolationMargin = 1e-9;

/// Four planar settings, a fixed at 0 by rotation invariance, plus the CHSH
/// value they achieve (m_value always equals the combination evaluated at the
/// four relative angles).
struct ChshConfiguration {
  double a{};
  double a_prime{};
  double b{};
  double b_prime{};
  double m_value{};
};

/// M at a planar configuration; angle differences are folded into [0, pi]
/// using the evenness of the correlation function.
double chsh_at(const CorrelationFn& corr, double a, double a_prime, double b, double b_prime);

/// Exhaustive grid over (a', b, b') with a = 0, then derivative-free
/// coordinate-descent refinement with step halving until improvements fall
/// below refine_tol. grid_step must be <= 5 degrees; it is shrunk slightly if
/// needed so the circular grid divides 2*pi evenly. The result is never below
/// the best grid point, and ties on the grid resolve to the lexicographically
/// smallest (a', b, b'). Throws evaluation_error (naming theta) if corr returns
/// a non-finite value.
ChshConfiguration maximize_chsh(const CorrelationFn& corr, double grid_step,
                                double refine_tol = 1e-6, unsigned threads = 1);

struct ViolationScan {
  std::uint64_t total{};
  std::uint64_t violating{};  // configurations with M > 2 + kChshViolationMargin
  double fraction{};
  ChshConfiguration best;     // grid maximum (no refinement)
};

/// Deterministic count of grid configurations exceeding the CHSH bound.
ViolationScan violation_scan(const CorrelationFn& corr, double grid_step, unsigned threads = 1);

}  // namespace spincorr
