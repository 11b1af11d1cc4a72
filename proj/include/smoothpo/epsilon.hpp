#ifndef SMOOTHPO_EPSILON_HPP
#define SMOOTHPO_EPSILON_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "smoothpo/model.hpp"

namespace smoothpo {

/// Grid of half-open boxes (b, b + eps]^dim with eps = 2^-q and corners
/// that are integral multiples of eps.
class EpsilonGrid {
 public:
  EpsilonGrid(int q, int dim, int n) : q_(q), dim_(dim), n_(n) {
    require(q >= 0 && q <= 1000, "grid exponent must lie in [0, 1000]");
    require(dim >= 1 && n >= 1, "grid needs positive dimension and n");
  }

  int q() const { return q_; }
  int dim() const { return dim_; }
  int n() const { return n_; }
  double eps() const { return std::ldexp(1.0, -q_); }

  /// Number of boxes covering [-n, n]^dim, i.e. (2n/eps)^dim.
  double box_count() const { return std::pow(2.0 * n_ / eps(), dim_); }

  /// Corner b of the box containing v: b_k = eps * (ceil(v_k / eps) - 1).
  std::vector<double> corner(const std::vector<double>& v) const {
    require(v.size() == static_cast<std::size_t>(dim_), "point has the wrong dimension");
    std::vector<double> b(v.size());
    const double e = eps();
    for (std::size_t k = 0; k < v.size(); ++k) {
      require(v[k] >= -n_ && v[k] <= n_, "point lies outside [-n, n]");
      b[k] = e * (std::ceil(v[k] / e) - 1);
    }
    return b;
  }

 private:
  int q_;
  int dim_;
  int n_;
};

inline std::vector<double> epsilon_box(const EpsilonGrid& grid, const std::vector<double>& v) {
  return grid.corner(v);
}

/// Smallest |V^k (y - z)| over objectives k and pairs y, z whose restriction
/// to masks[k] differs. Sorting the values and scanning neighbours suffices:
/// between any close differing pair some adjacent differing pair is closer.
inline double min_gap(const Evaluation& ev, const std::vector<std::uint64_t>& masks) {
  require(masks.size() == static_cast<std::size_t>(ev.d()), "one mask per linear objective");
  double gap = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(ev.size());
  for (int k = 0; k < ev.d(); ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ev.value(a, k) < ev.value(b, k); });
    const std::uint64_t mask = masks[static_cast<std::size_t>(k)];
    for (std::size_t j = 1; j < order.size(); ++j) {
      const Solution& y = ev.solution(order[j - 1]);
      const Solution& z = ev.solution(order[j]);
      if (y.agrees_on(z, mask)) continue;
      gap = std::min(gap, ev.value(order[j], k) - ev.value(order[j - 1], k));
    }
  }
  return gap;
}

inline std::vector<std::uint64_t> full_masks(int d) { return std::vector<std::uint64_t>(static_cast<std::size_t>(d), ~std::uint64_t{0}); }

inline std::vector<std::uint64_t> partition_masks(const std::vector<IndexTuple>& partition) {
  std::vector<std::uint64_t> m;
  for (const IndexTuple& p : partition) m.push_back(p.mask());
  return m;
}

inline void check_partition(const std::vector<IndexTuple>& partition, int n, int d) {
  require(partition.size() == static_cast<std::size_t>(d), "partition needs one class per objective");
  std::uint64_t seen = 0;
  for (const IndexTuple& p : partition)
    for (int i : p) {
      require(i >= 0 && i < n, "partition index out of range");
      require((seen & Solution::bit(i)) == 0, "partition classes overlap");
      seen |= Solution::bit(i);
    }
  require(seen == Solution::prefix_mask(n), "partition does not cover every index");
}

/// Every row has a coefficient of absolute value below one.
inline bool has_small_coefficient(const Instance& inst) {
  for (int k = 0; k < inst.d(); ++k) {
    bool ok = false;
    for (int i = 0; i < inst.n() && !ok; ++i) ok = std::abs(inst.coefficient(k, i)) < 1;
    if (!ok) return false;
  }
  return true;
}

inline bool ok_event(const Evaluation& ev, double eps) {
  return has_small_coefficient(ev.instance()) && min_gap(ev, full_masks(ev.d())) >= eps;
}

inline bool ok_event(const Instance& inst, double eps) { return ok_event(Evaluation(inst), eps); }

inline bool okz_event(const Evaluation& ev, const std::vector<IndexTuple>& partition, double eps) {
  check_partition(partition, ev.n(), ev.d());
  return min_gap(ev, partition_masks(partition)) >= eps;
}

inline bool okz_event(const Instance& inst, const std::vector<IndexTuple>& partition, double eps) {
  return okz_event(Evaluation(inst), partition, eps);
}

/// Exponent q of the largest eps = 2^-q (q >= 0) strictly below gap / 2;
/// empty when the gap is zero (an exact tie).
inline std::optional<int> working_exponent(double gap) {
  if (!(gap > 0)) return std::nullopt;
  if (std::isinf(gap)) return 0;
  int e = 0;
  double m = std::frexp(gap / 2, &e);  // gap/2 = m * 2^e, m in [0.5, 1)
  int p = (m == 0.5) ? e - 2 : e - 1;  // largest 2^p strictly below gap/2
  return std::max(0, -p);
}

}  // namespace smoothpo

#endif  // SMOOTHPO_EPSILON_HPP
