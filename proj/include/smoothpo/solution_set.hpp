#ifndef SMOOTHPO_SOLUTION_SET_HPP
#define SMOOTHPO_SOLUTION_SET_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "smoothpo/densities.hpp"
#include "smoothpo/solution.hpp"

namespace smoothpo {

/// Undirected graph whose vertices are labelled with autonomous-system
/// numbers 0..k-1. Edge positions are the solution coordinates.
struct ASGraph {
  struct Vertex {
    int id = 0;
    int as = 0;
  };
  struct Edge {
    int u = 0;
    int v = 0;
    double length = 0;                   // used when no density is given
    std::optional<DensitySpec> density;  // per-edge perturbation, if any
  };

  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  int s = 0;
  int t = 0;

  int as_count() const {
    int k = 0;
    for (const Vertex& v : vertices) k = std::max(k, v.as + 1);
    return k;
  }

  int position(int id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].id == id) return static_cast<int>(i);
    return -1;
  }

  int as_of(int id) const { return vertices[static_cast<std::size_t>(position(id))].as; }

  /// Edges with both endpoints in AS `as` (the set E_as).
  std::uint64_t intra_mask(int as) const {
    std::uint64_t m = 0;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (as_of(edges[e].u) == as && as_of(edges[e].v) == as) m |= Solution::bit(static_cast<int>(e));
    return m;
  }

  void validate() const {
    require(!vertices.empty(), "graph has no vertices");
    require(edges.size() <= static_cast<std::size_t>(Solution::max_size), "graph has more than 64 edges");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      require(vertices[i].as >= 0, "AS labels must be non-negative");
      for (std::size_t j = i + 1; j < vertices.size(); ++j)
        require(vertices[i].id != vertices[j].id, "duplicate vertex id");
    }
    for (const Edge& e : edges) {
      require(position(e.u) >= 0 && position(e.v) >= 0, "edge endpoint is not a vertex");
      require(e.u != e.v, "self loops are not allowed");
      require(e.density || (e.length >= 0 && e.length <= 1), "edge lengths must lie in [0, 1]");
    }
    require(position(s) >= 0 && position(t) >= 0, "source or target is not a vertex");
    require(s != t, "source and target must differ");
    require(as_of(s) == 0, "the source must lie in the first AS");
    require(as_of(t) == as_count() - 1, "the target must lie in the last AS");
  }
};

enum class SetKind { explicit_list, hypercube, valid_paths };

/// Feasible set S of 0/1 vectors with a fixed enumeration order:
/// counting order (lexicographic) for the hypercube, insertion order for
/// explicit lists and depth-first order for valid paths.
class SolutionSet {
 public:
  static SolutionSet hypercube(int n) {
    require(n >= 1 && n <= 62, "hypercube dimension must lie in [1, 62]");
    SolutionSet s;
    s.kind_ = SetKind::hypercube;
    s.n_ = n;
    return s;
  }

  static SolutionSet explicit_set(int n, std::vector<Solution> members) {
    require(n >= 1 && n <= Solution::max_size, "solution length must lie in [1, 64]");
    SolutionSet s;
    s.kind_ = SetKind::explicit_list;
    s.n_ = n;
    s.members_ = std::move(members);
    for (std::size_t i = 0; i < s.members_.size(); ++i) {
      require(s.members_[i].size() == n, "explicit solution has the wrong length");
      bool fresh = s.index_.emplace(s.members_[i].word(), i).second;
      require(fresh, "explicit solution set contains a duplicate");
    }
    return s;
  }

  /// Parses newline-separated bit strings; blank lines are skipped.
  static SolutionSet parse_explicit(const std::string& text) {
    std::istringstream in(text);
    std::vector<Solution> members;
    std::string line;
    int n = -1;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.empty()) continue;
      Solution x = Solution::from_string(line);
      require(n < 0 || x.size() == n, "explicit solutions have differing lengths");
      n = x.size();
      members.push_back(x);
    }
    require(n > 0, "explicit solution set is empty");
    return explicit_set(n, std::move(members));
  }

  std::string format_explicit() const {
    std::string out;
    for (std::size_t i = 0; i < size(); ++i) out += at(i).to_string() + "\n";
    return out;
  }

  SetKind kind() const { return kind_; }
  int n() const { return n_; }
  const std::shared_ptr<const ASGraph>& graph() const { return graph_; }

  std::size_t size() const {
    return kind_ == SetKind::hypercube ? (std::size_t{1} << n_) : members_.size();
  }
  bool empty() const { return size() == 0; }

  Solution at(std::size_t idx) const {
    if (kind_ == SetKind::hypercube) return Solution(n_, static_cast<std::uint64_t>(idx) << (64 - n_));
    return members_[idx];
  }

  std::optional<std::size_t> index_of(const Solution& x) const {
    if (x.size() != n_) return std::nullopt;
    if (kind_ == SetKind::hypercube) return static_cast<std::size_t>(x.word() >> (64 - n_));
    auto it = index_.find(x.word());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const Solution& x) const { return index_of(x).has_value(); }

  std::vector<Solution> to_vector() const {
    std::vector<Solution> v;
    v.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) v.push_back(at(i));
    return v;
  }

 private:
  friend SolutionSet valid_paths(const ASGraph& g);

  SetKind kind_ = SetKind::explicit_list;
  int n_ = 0;
  std::vector<Solution> members_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::shared_ptr<const ASGraph> graph_;
};

/// The members agreeing with `y` on every index of `I`, in enumeration order.
inline SolutionSet restrict(const SolutionSet& set, const IndexTuple& I, const Solution& y) {
  for (int i : I) require(i >= 0 && i < set.n(), "restriction index out of range");
  std::uint64_t mask = I.mask();
  std::vector<Solution> kept;
  for (std::size_t s = 0; s < set.size(); ++s) {
    Solution z = set.at(s);
    if (z.agrees_on(y, mask)) kept.push_back(z);
  }
  return SolutionSet::explicit_set(set.n(), std::move(kept));
}

/// Incidence vectors of the simple s-t paths whose AS labels never decrease
/// and step by at most one, so every AS 0..k-1 is visited in order.
/// Enumerated depth-first with edges tried in increasing position.
inline SolutionSet valid_paths(const ASGraph& g) {
  g.validate();
  const int m = static_cast<int>(g.edges.size());
  const int k = g.as_count();
  const int nv = static_cast<int>(g.vertices.size());
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(nv));
  for (int e = 0; e < m; ++e) {
    int a = g.position(g.edges[static_cast<std::size_t>(e)].u);
    int b = g.position(g.edges[static_cast<std::size_t>(e)].v);
    adj[static_cast<std::size_t>(a)].push_back({e, b});
    adj[static_cast<std::size_t>(b)].push_back({e, a});
  }
  const int src = g.position(g.s), dst = g.position(g.t);
  auto label = [&](int v) { return g.vertices[static_cast<std::size_t>(v)].as; };

  std::vector<Solution> paths;
  std::vector<char> on_path(static_cast<std::size_t>(nv), 0);
  std::function<void(int, std::uint64_t)> dfs = [&](int v, std::uint64_t used) {
    for (auto [e, w] : adj[static_cast<std::size_t>(v)]) {
      if (on_path[static_cast<std::size_t>(w)]) continue;
      int step = label(w) - label(v);
      if (step != 0 && step != 1) continue;
      std::uint64_t next = used | Solution::bit(e);
      if (w == dst) {
        if (label(w) == k - 1) paths.push_back(Solution(std::max(m, 1), next));
        continue;
      }
      on_path[static_cast<std::size_t>(w)] = 1;
      dfs(w, next);
      on_path[static_cast<std::size_t>(w)] = 0;
    }
  };
  on_path[static_cast<std::size_t>(src)] = 1;
  dfs(src, 0);

  SolutionSet set = SolutionSet::explicit_set(std::max(m, 1), std::move(paths));
  set.kind_ = SetKind::valid_paths;
  set.graph_ = std::make_shared<const ASGraph>(g);
  return set;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_SOLUTION_SET_HPP
