#ifndef SMOOTHPO_BOUNDS_HPP
#define SMOOTHPO_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "smoothpo/densities.hpp"
#include "smoothpo/rank.hpp"
#include "smoothpo/rng.hpp"

namespace smoothpo {

/// A bound held as its base-2 logarithm; value() is +inf when it does not
/// fit in a double.
struct BoundValue {
  long double log2 = 0;
  bool overflow() const { return log2 > 1023.0L; }
  double value() const {
    return overflow() ? std::numeric_limits<double>::infinity() : static_cast<double>(std::exp2(log2));
  }
};

/// Probability bound for k linear combinations falling into a fixed side-eps
/// box given m-k others: 2^k n^(n-k) (phi eps)^k for quasiconcave densities,
/// (2n)^(n-k) phi^n eps^k in general.
inline BoundValue log2_box_probability_bound(int n, int k, double phi, double eps, bool quasiconcave) {
  require(n >= 1 && k >= 1 && k <= n, "need 1 <= k <= n");
  require(phi > 0 && eps > 0, "phi and eps must be positive");
  const long double ln = std::log2(static_cast<long double>(n)), lp = std::log2(static_cast<long double>(phi)),
                    le = std::log2(static_cast<long double>(eps));
  if (quasiconcave) return {k + (n - k) * ln + k * lp + k * le};
  return {(n - k) * (1 + ln) + n * lp + k * le};
}

inline double box_probability_bound(int n, int k, double phi, double eps, bool quasiconcave) {
  return log2_box_probability_bound(n, k, phi, eps, quasiconcave).value();
}

enum class BoundVariant { first_moment_qc, moment_qc, moment_general, zp_qc, zp_general };

inline const char* variant_name(BoundVariant v) {
  switch (v) {
    case BoundVariant::first_moment_qc: return "first-moment-qc";
    case BoundVariant::moment_qc: return "moment-c-qc";
    case BoundVariant::moment_general: return "moment-c-general";
    case BoundVariant::zp_qc: return "zp-qc";
    case BoundVariant::zp_general: return "zp-general";
  }
  return "?";
}

/// Explicit upper bounds on the expected number of Pareto-optimal solutions
/// (or its c-th moment):
///   first-moment-qc   2^((d+2)^2) (d+1)^(2d^2) n^(2d) phi^d
///   moment-c-*        4^(c^2 (d+1)^2) (cd(d+1))^(c d^2) n^(2cd) phi^(c beta),
///                     beta = d (qc) or d(d+1) (general)
///   zp-*              2^((d+1)^5 + d) d^(2d+3) n^g s,  g = d^3 + d^2 + d,
///                     s = 2^d g^(g-d) phi^d (qc) or (2g)^(g-d) phi^g (general)
inline BoundValue bound_smoothed_po(double n, int d, double phi, BoundVariant variant, int c = 1) {
  require(n > 0 && d >= 1 && phi > 0 && c >= 1, "bound parameters must be positive");
  using ld = long double;
  const ld D = d, Cc = c, ln = std::log2(static_cast<ld>(n)), lp = std::log2(static_cast<ld>(phi));
  switch (variant) {
    case BoundVariant::first_moment_qc:
      return {(D + 2) * (D + 2) + 2 * D * D * std::log2(D + 1) + 2 * D * ln + D * lp};
    case BoundVariant::moment_qc:
    case BoundVariant::moment_general: {
      const ld beta = variant == BoundVariant::moment_qc ? D : D * (D + 1);
      return {2 * Cc * Cc * (D + 1) * (D + 1) + Cc * D * D * std::log2(Cc * D * (D + 1)) + 2 * Cc * D * ln +
              Cc * beta * lp};
    }
    case BoundVariant::zp_qc:
    case BoundVariant::zp_general: {
      const ld g = D * D * D + D * D + D;
      const ld head = std::pow(D + 1, 5) + D + (2 * D + 3) * std::log2(D) + g * ln;
      const ld s = variant == BoundVariant::zp_qc ? D + (g - D) * std::log2(g) + D * lp
                                                  : (g - D) * std::log2(2 * g) + g * lp;
      return {head + s};
    }
  }
  return {};
}

/// (1/k)^(floor(log_8 k / (2 (d+1)^2)) / 2) in log2 form, for log2 k >= 0.
inline long double log2_concentration_bound(long double log2_k, int d) {
  require(log2_k >= 0 && d >= 1, "need k >= 1 and d >= 1");
  long double e = std::floor(log2_k / 3 / (2.0L * (d + 1) * (d + 1)) + 1e-15L);
  return -0.5L * e * log2_k;
}

inline double concentration_bound(double k, int d) {
  return static_cast<double>(std::exp2(log2_concentration_bound(std::log2(static_cast<long double>(k)), d)));
}

/// Bound 2^(2n+1) d phi eps on the probability that some gap falls below eps.
inline double ok_failure_bound(int n, int d, double phi, double eps) {
  return std::exp2(2.0 * n + 1) * d * phi * eps;
}

/// Binomial proportion with a Wilson score interval.
struct Estimate {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double p = 0;
  double lo = 0;
  double hi = 0;
  double halfwidth() const { return (hi - lo) / 2; }
};

inline constexpr double z99 = 2.5758293035489004;

inline Estimate wilson(std::uint64_t hits, std::uint64_t trials, double z = z99) {
  Estimate e{hits, trials, 0, 0, 1};
  if (trials == 0) return e;
  const double nt = static_cast<double>(trials), p = static_cast<double>(hits) / nt, z2 = z * z;
  const double center = (p + z2 / (2 * nt)) / (1 + z2 / nt);
  const double half = z * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt)) / (1 + z2 / nt);
  e.p = p;
  e.lo = std::max(0.0, center - half);
  e.hi = std::min(1.0, center + half);
  return e;
}

/// Maps (Y_1..Y_{m-k}) to the corner of a side-eps box for (Z_1..Z_k).
using BoxChooser = std::function<std::vector<double>(const std::vector<double>&)>;

inline constexpr std::uint64_t trials_per_block = 1 << 16;

/// Monte-Carlo estimate of Pr[Z in (C(Y), C(Y) + eps]^k] for
/// (Y, Z) = A X with independent X_i. Trials are split into fixed blocks,
/// each with its own derived stream, so the hit count does not depend on
/// the number of workers.
inline Estimate estimate_hypercube_prob(const IntMatrix& A, const std::vector<DensitySpec>& densities, int k,
                                        const BoxChooser& chooser, double eps, std::uint64_t trials,
                                        std::uint64_t seed, int workers = 1) {
  const int m = A.rows, n = A.cols;
  require(static_cast<int>(densities.size()) == n, "one density per variable");
  require(k >= 1 && k <= m && m <= n, "need 1 <= k <= m <= n");
  require(eps >= 0, "eps must be non-negative");
  require(exact_rank(A) == m, "A must have full row rank");
  const std::uint64_t blocks = (trials + trials_per_block - 1) / trials_per_block;
  std::vector<std::uint64_t> hits(blocks, 0);
  auto run_block = [&](std::uint64_t b) {
    Stream rng(derive_seed(seed, {b}));
    const std::uint64_t count = std::min(trials_per_block, trials - b * trials_per_block);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(m - k));
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = densities[static_cast<std::size_t>(j)].sample(rng);
      for (int r = 0; r < m - k; ++r) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += static_cast<double>(A(r, j)) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(r)] = s;
      }
      std::vector<double> corner = chooser(y);
      bool inside = true;
      for (int r = m - k; r < m && inside; ++r) {
        double z = 0;
        for (int j = 0; j < n; ++j) z += static_cast<double>(A(r, j)) * x[static_cast<std::size_t>(j)];
        double c = corner[static_cast<std::size_t>(r - (m - k))];
        inside = c < z && z <= c + eps;
      }
      h += inside ? 1 : 0;
    }
    hits[b] = h;
  };
  workers = std::max(1, workers);
  if (workers == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t b = static_cast<std::uint64_t>(w); b < blocks; b += static_cast<std::uint64_t>(workers))
          run_block(b);
      });
    for (auto& t : pool) t.join();
  }
  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;
  return wilson(total, trials);
}

}  // namespace smoothpo

#endif  // SMOOTHPO_BOUNDS_HPP
