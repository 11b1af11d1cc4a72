#ifndef SMOOTHPO_GENERATORS_HPP
#define SMOOTHPO_GENERATORS_HPP

#include <algorithm>
#include <memory>
#include <set>
#include <vector>

#include "smoothpo/model.hpp"
#include "smoothpo/rank.hpp"

namespace smoothpo {

inline DensityFamily random_family(Stream& rng, bool allow_bimodal = true) {
  int f = rng.integer(0, allow_bimodal ? 3 : 2);
  return static_cast<DensityFamily>(f);
}

/// Spec whose entries mix all density families with phi drawn from [1, 4].
inline PerturbationSpec mixed_spec(int d, int n, Stream& rng) {
  PerturbationSpec spec(d, n);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < n; ++i)
      spec.set(k, i, density_with_phi(random_family(rng), rng.uniform(1, 4), rng.uniform(-1, 1)));
  return spec;
}

/// `count` distinct random vectors of length n in order of generation.
inline std::vector<Solution> random_solutions(int n, std::size_t count, Stream& rng) {
  require(n >= 64 || count <= (std::uint64_t{1} << n), "cannot draw more distinct vectors than 2^n");
  std::set<std::uint64_t> seen;
  std::vector<Solution> out;
  const std::uint64_t mask = Solution::prefix_mask(n);
  while (out.size() < count) {
    Solution x(n, rng.next() & mask);
    if (seen.insert(x.word()).second) out.push_back(x);
  }
  return out;
}

inline std::vector<double> random_adversarial(std::size_t size, Stream& rng) {
  std::vector<double> adv(size);
  for (double& v : adv) v = rng.uniform(-1, 1);
  return adv;
}

/// Knapsack model: hypercube(n), d weight rows with the given density
/// family and phi, and adversarial objective -sum(profit_i x_i) with
/// profits uniform on [0, 1].
inline Model knapsack_model(int n, int d, DensityFamily family, double phi, Stream& rng) {
  auto set = std::make_shared<const SolutionSet>(SolutionSet::hypercube(n));
  PerturbationSpec spec = full_spec(d, n, family, phi, rng);
  std::vector<double> profits(static_cast<std::size_t>(n));
  for (double& p : profits) p = rng.uniform();
  return Model{set, knapsack_adversarial(*set, profits), std::move(spec), profits};
}

/// Model over `set` with an arbitrary (random) adversarial objective.
inline Model random_adversarial_model(std::shared_ptr<const SolutionSet> set, PerturbationSpec spec, Stream& rng) {
  std::vector<double> adv = random_adversarial(set->size(), rng);
  return Model{std::move(set), std::move(adv), std::move(spec), std::nullopt};
}

/// Random {-1,0,1} matrix with full row rank (m <= n).
inline IntMatrix full_rank_matrix(int m, int n, Stream& rng) {
  require(m >= 1 && m <= n, "full row rank needs 1 <= m <= n");
  for (;;) {
    IntMatrix a(m, n);
    for (long long& v : a.data) v = rng.integer(-1, 1);
    if (exact_rank(a) == m) return a;
  }
}

/// Random simple graph on `vertices` vertices with `edges` edges, vertex v
/// in AS (v * as_count / vertices), s = 0 and t = vertices - 1. Edge lengths
/// are uniform in [0, 1].
inline ASGraph random_as_graph(int vertices, int edges, int as_count, Stream& rng) {
  require(vertices >= 2 && as_count >= 1 && as_count <= vertices, "need 2 <= vertices and 1 <= as_count <= vertices");
  require(edges >= 1 && edges <= std::min(64, vertices * (vertices - 1) / 2), "edge count out of range");
  ASGraph g;
  for (int v = 0; v < vertices; ++v) g.vertices.push_back({v, v * as_count / vertices});
  std::set<std::pair<int, int>> seen;
  while (static_cast<int>(g.edges.size()) < edges) {
    int a = rng.integer(0, vertices - 1), b = rng.integer(0, vertices - 1);
    if (a == b || !seen.insert({std::min(a, b), std::max(a, b)}).second) continue;
    g.edges.push_back({a, b, rng.uniform(), std::nullopt});
  }
  g.s = 0;
  g.t = vertices - 1;
  return g;
}

/// Contiguous partition of [n] into d classes of near-equal size.
inline std::vector<IndexTuple> contiguous_partition(int n, int d) {
  std::vector<IndexTuple> p(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    for (int i = n * k / d; i < n * (k + 1) / d; ++i) p[static_cast<std::size_t>(k)].push_back(i);
  return p;
}

/// Zero-preserving normal-form model. Each class P_k gets a small pool of
/// random patterns and every solution combines one pattern per class, so
/// many solutions share their restriction to some P_k. Objective k is
/// perturbed exactly on P_k.
inline Model zp_pooled_model(const std::vector<IndexTuple>& partition, int pool_size, std::size_t set_size,
                             DensityFamily family, double phi, Stream& rng) {
  const int d = static_cast<int>(partition.size());
  int n = 0;
  for (const IndexTuple& p : partition) n += static_cast<int>(p.size());
  std::vector<std::vector<std::uint64_t>> pools(static_cast<std::size_t>(d));
  std::size_t combos = 1;
  for (int k = 0; k < d; ++k) {
    const IndexTuple& cls = partition[static_cast<std::size_t>(k)];
    std::set<std::uint64_t> seen;
    const std::size_t want =
        std::min<std::size_t>(static_cast<std::size_t>(pool_size), std::size_t{1} << std::min<std::size_t>(cls.size(), 20));
    while (seen.size() < want) seen.insert(rng.next() & cls.mask());
    pools[static_cast<std::size_t>(k)].assign(seen.begin(), seen.end());
    combos *= pools[static_cast<std::size_t>(k)].size();
  }
  set_size = std::min(set_size, combos);
  std::set<std::uint64_t> seen;
  std::vector<Solution> members;
  while (members.size() < set_size) {
    std::uint64_t w = 0;
    for (const auto& pool : pools) w |= pool[rng.below(pool.size())];
    if (seen.insert(w).second) members.push_back(Solution(n, w));
  }
  auto set = std::make_shared<const SolutionSet>(SolutionSet::explicit_set(n, std::move(members)));
  PerturbationSpec spec(d, n);
  for (int k = 0; k < d; ++k)
    for (int i : partition[static_cast<std::size_t>(k)]) spec.set(k, i, density_with_phi(family, phi, rng.uniform(-1, 1)));
  return random_adversarial_model(set, std::move(spec), rng);
}

}  // namespace smoothpo

#endif  // SMOOTHPO_GENERATORS_HPP
