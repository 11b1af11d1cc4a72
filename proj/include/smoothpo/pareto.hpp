#ifndef SMOOTHPO_PARETO_HPP
#define SMOOTHPO_PARETO_HPP

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "smoothpo/model.hpp"

namespace smoothpo {

struct ParetoMember {
  Solution x;
  ObjectiveVector objectives;
};

/// Pareto-optimal solutions in enumeration order of their solution set.
struct ParetoSet {
  std::vector<ParetoMember> members;

  std::size_t count() const { return members.size(); }
  std::vector<Solution> solutions() const {
    std::vector<Solution> v;
    for (const auto& m : members) v.push_back(m.x);
    return v;
  }
  bool contains(const Solution& x) const {
    return std::any_of(members.begin(), members.end(), [&](const ParetoMember& m) { return m.x == x; });
  }
};

struct BruteForceOptions {
  std::size_t cap = std::size_t{1} << 20;
  int workers = 1;
};

namespace detail {

/// Non-dominated members of `candidates` (indices into ev). Candidates are
/// visited in lexicographic order of their objective tuple, so every
/// dominator of a point is visited before it and the front seen so far
/// suffices to decide it.
inline std::vector<std::size_t> front_of(const Evaluation& ev, std::vector<std::size_t> candidates) {
  const int d = ev.d();
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    for (int k = 0; k < d; ++k) {
      double va = ev.value(a, k), vb = ev.value(b, k);
      if (va != vb) return va < vb;
    }
    return ev.adversarial_less(a, b);
  });
  std::vector<std::size_t> front;
  for (std::size_t c : candidates) {
    bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t f) { return ev.dominates(f, c); });
    if (!dominated) front.push_back(c);
  }
  std::sort(front.begin(), front.end());
  return front;
}

}  // namespace detail

/// Indices (in enumeration order) of the Pareto-optimal members of S.
/// Splitting S across workers does not change the result: local fronts are
/// merged and filtered once more.
inline std::vector<std::size_t> pareto_indices(const Evaluation& ev, int workers = 1) {
  const std::size_t size = ev.size();
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(size, 1))));
  if (workers == 1) {
    std::vector<std::size_t> all(size);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return detail::front_of(ev, std::move(all));
  }
  std::vector<std::vector<std::size_t>> local(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::size_t lo = size * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
      std::size_t hi = size * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers);
      std::vector<std::size_t> chunk(hi - lo);
      std::iota(chunk.begin(), chunk.end(), lo);
      local[static_cast<std::size_t>(w)] = detail::front_of(ev, std::move(chunk));
    });
  }
  for (auto& t : pool) t.join();
  std::vector<std::size_t> merged;
  for (const auto& l : local) merged.insert(merged.end(), l.begin(), l.end());
  return detail::front_of(ev, std::move(merged));
}

inline ParetoSet pareto_set(const Evaluation& ev, int workers = 1) {
  ParetoSet ps;
  for (std::size_t s : pareto_indices(ev, workers)) ps.members.push_back({ev.solution(s), ev.objectives(s)});
  return ps;
}

inline ParetoSet pareto_bruteforce(const Instance& inst, const BruteForceOptions& opt = {}) {
  if (inst.set().size() > opt.cap) throw cap_exceeded("solution set exceeds the enumeration cap");
  Evaluation ev(inst);
  return pareto_set(ev, opt.workers);
}

/// Nemhauser-Ullmann list algorithm for min weight / max profit over all
/// subsets of n items. Objective vectors are (weight, -profit); ties in
/// -profit are broken by lexicographic subset order, matching the dominance
/// used by pareto_bruteforce.
inline ParetoSet nemhauser_ullmann(const std::vector<double>& weights, const std::vector<double>& profits) {
  const int n = static_cast<int>(weights.size());
  require(n >= 1 && n <= 62, "item count must lie in [1, 62]");
  require(profits.size() == weights.size(), "one profit per item");
  struct Entry {
    double weight;
    double neg_profit;
    Solution subset;
  };
  auto key_less = [](const Entry& a, const Entry& b) {
    return a.neg_profit < b.neg_profit || (a.neg_profit == b.neg_profit && a.subset < b.subset);
  };
  std::vector<Entry> list{{0.0, 0.0, Solution(n)}}, merged, next;
  for (int i = 0; i < n; ++i) {
    std::vector<Entry> extended;
    extended.reserve(list.size());
    for (const Entry& e : list)
      extended.push_back({e.weight + weights[static_cast<std::size_t>(i)],
                          -(-e.neg_profit + profits[static_cast<std::size_t>(i)]), e.subset.with(i, true)});
    // Both lists are sorted by (weight, key); merge, then keep each entry
    // whose key beats every entry before it.
    auto entry_less = [&](const Entry& a, const Entry& b) {
      return a.weight < b.weight || (a.weight == b.weight && key_less(a, b));
    };
    std::sort(extended.begin(), extended.end(), entry_less);
    merged.clear();
    std::merge(list.begin(), list.end(), extended.begin(), extended.end(), std::back_inserter(merged), entry_less);
    next.clear();
    for (const Entry& e : merged)
      if (next.empty() || key_less(e, next.back())) next.push_back(e);
    list.swap(next);
  }
  std::sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) { return a.subset < b.subset; });
  ParetoSet ps;
  for (const Entry& e : list) ps.members.push_back({e.subset, ObjectiveVector{{e.weight}, e.neg_profit}});
  return ps;
}

enum class Engine { bruteforce, nu, automatic };

inline bool nu_applicable(const Instance& inst) {
  return inst.d() == 1 && inst.set().kind() == SetKind::hypercube && inst.profits().has_value();
}

inline std::vector<double> coefficient_row(const Instance& inst, int k) {
  std::vector<double> row(static_cast<std::size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i) row[static_cast<std::size_t>(i)] = inst.coefficient(k, i);
  return row;
}

inline ParetoSet pareto(const Instance& inst, Engine engine, const BruteForceOptions& opt = {}) {
  if (engine == Engine::automatic) engine = nu_applicable(inst) ? Engine::nu : Engine::bruteforce;
  if (engine == Engine::nu) {
    require(nu_applicable(inst),
            "the nu engine needs d = 1, a hypercube solution set and a linear (profit) adversarial objective");
    return nemhauser_ullmann(coefficient_row(inst, 0), *inst.profits());
  }
  return pareto_bruteforce(inst, opt);
}

inline std::size_t pareto_count(const Instance& inst, Engine engine, const BruteForceOptions& opt = {}) {
  return pareto(inst, engine, opt).count();
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with columns bits, V1..Vd, V{d+1}.
inline std::string pareto_csv(const ParetoSet& ps, int d) {
  std::string out = "bits";
  for (int k = 1; k <= d + 1; ++k) out += ",V" + std::to_string(k);
  out += "\n";
  for (const auto& m : ps.members) {
    out += m.x.to_string();
    for (double v : m.objectives.linear) out += "," + format_double(v);
    out += "," + format_double(m.objectives.adversarial) + "\n";
  }
  return out;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_PARETO_HPP
