#ifndef SMOOTHPO_MODEL_HPP
#define SMOOTHPO_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "smoothpo/densities.hpp"
#include "smoothpo/rng.hpp"
#include "smoothpo/solution.hpp"
#include "smoothpo/solution_set.hpp"

namespace smoothpo {

/// Objective values of one solution: d linear values and the adversarial one.
struct ObjectiveVector {
  std::vector<double> linear;
  double adversarial = 0;
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// a <= b in every objective and a < b in at least one (all minimized).
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  require(a.linear.size() == b.linear.size(), "objective vectors differ in dimension");
  bool strict = a.adversarial < b.adversarial;
  if (a.adversarial > b.adversarial) return false;
  for (std::size_t k = 0; k < a.linear.size(); ++k) {
    if (a.linear[k] > b.linear[k]) return false;
    if (a.linear[k] < b.linear[k]) strict = true;
  }
  return strict;
}

/// A realized instance: feasible set S, coefficient matrix V (d x n) and the
/// adversarial objective given as one value per member of S.
class Instance {
 public:
  Instance(std::shared_ptr<const SolutionSet> set, int d, std::vector<double> coefficients,
           std::vector<double> adversarial)
      : set_(std::move(set)), d_(d), coef_(std::move(coefficients)), adv_(std::move(adversarial)) {
    require(set_ != nullptr, "instance needs a solution set");
    require(d_ >= 1, "instance needs d >= 1");
    require(set_->n() >= d_ + 1, "instance needs n >= d + 1");
    require(coef_.size() == static_cast<std::size_t>(d_) * set_->n(), "coefficient matrix has the wrong size");
    require(adv_.size() == set_->size(), "adversarial values must align with the solution set");
    for (double v : coef_) require(v >= -1 && v <= 1, "coefficients must lie in [-1, 1]");
  }

  int n() const { return set_->n(); }
  int d() const { return d_; }
  const SolutionSet& set() const { return *set_; }
  const std::shared_ptr<const SolutionSet>& set_ptr() const { return set_; }
  double coefficient(int k, int i) const { return coef_[static_cast<std::size_t>(k) * n() + i]; }
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<double>& adversarial() const { return adv_; }

  /// Item profits when the adversarial objective is -sum(profit_i * x_i);
  /// enables the Nemhauser-Ullmann engine.
  const std::optional<std::vector<double>>& profits() const { return profits_; }
  void set_profits(std::vector<double> p) {
    require(p.size() == static_cast<std::size_t>(n()), "one profit per item");
    profits_ = std::move(p);
  }

  /// V^k x summed in increasing index order.
  double dot(int k, const Solution& x) const {
    const double* row = coef_.data() + static_cast<std::size_t>(k) * n();
    double s = 0;
    for_each_index(x.word(), [&](int i) { s += row[i]; });
    return s;
  }

  double adversarial_of(const Solution& x) const {
    auto idx = set_->index_of(x);
    require(idx.has_value(), "solution is not a member of the instance's set");
    return adv_[*idx];
  }

  /// Linear part V(x - u) computed as Vx - Vu; adversarial part unshifted.
  ObjectiveVector evaluate(const Solution& x, const std::optional<Solution>& u = std::nullopt) const {
    ObjectiveVector o;
    o.adversarial = adversarial_of(x);
    o.linear.resize(static_cast<std::size_t>(d_));
    for (int k = 0; k < d_; ++k) o.linear[static_cast<std::size_t>(k)] = dot(k, x) - (u ? dot(k, *u) : 0.0);
    return o;
  }

  /// Same set and adversarial objective, different coefficients.
  Instance with_coefficients(std::vector<double> coefficients) const {
    Instance copy(set_, d_, std::move(coefficients), adv_);
    copy.profits_ = profits_;
    return copy;
  }

 private:
  std::shared_ptr<const SolutionSet> set_;
  int d_;
  std::vector<double> coef_;
  std::vector<double> adv_;
  std::optional<std::vector<double>> profits_;
};

/// All objective values of an instance tabulated over S.
class Evaluation {
 public:
  explicit Evaluation(const Instance& inst) : inst_(&inst), d_(inst.d()) {
    const SolutionSet& set = inst.set();
    sols_.reserve(set.size());
    vals_.resize(set.size() * static_cast<std::size_t>(d_ + 1));
    for (std::size_t s = 0; s < set.size(); ++s) {
      Solution x = set.at(s);
      sols_.push_back(x);
      double* row = vals_.data() + s * static_cast<std::size_t>(d_ + 1);
      for (int k = 0; k < d_; ++k) row[k] = inst.dot(k, x);
      row[d_] = inst.adversarial()[s];
    }
  }

  const Instance& instance() const { return *inst_; }
  std::size_t size() const { return sols_.size(); }
  int d() const { return d_; }
  int n() const { return inst_->n(); }
  const Solution& solution(std::size_t s) const { return sols_[s]; }
  const std::vector<Solution>& solutions() const { return sols_; }

  /// Value of objective k (0..d-1 linear, d adversarial).
  double value(std::size_t s, int k) const { return vals_[s * static_cast<std::size_t>(d_ + 1) + k]; }

  /// Order used for the adversarial objective: value, then lexicographic.
  bool adversarial_less(std::size_t a, std::size_t b) const {
    double va = value(a, d_), vb = value(b, d_);
    return va < vb || (va == vb && sols_[a] < sols_[b]);
  }

  /// Strict comparison in objective k; for k = d the adversarial order.
  bool objective_less(int k, std::size_t a, std::size_t b) const {
    return k == d_ ? adversarial_less(a, b) : value(a, k) < value(b, k);
  }

  /// Dominance with the adversarial coordinate compared by
  /// (value, lexicographic order); distinct solutions never tie in it.
  bool dominates(std::size_t a, std::size_t b) const {
    if (a == b || !adversarial_less(a, b)) return false;
    for (int k = 0; k < d_; ++k)
      if (value(a, k) > value(b, k)) return false;
    return true;
  }

  ObjectiveVector objectives(std::size_t s) const {
    ObjectiveVector o;
    for (int k = 0; k < d_; ++k) o.linear.push_back(value(s, k));
    o.adversarial = value(s, d_);
    return o;
  }

  std::optional<std::size_t> index_of(const Solution& x) const { return inst_->set().index_of(x); }

 private:
  const Instance* inst_;
  int d_;
  std::vector<Solution> sols_;
  std::vector<double> vals_;
};

/// The adversary's choices: S, the adversarial objective and one density
/// (or zero) per coefficient. Realizations are drawn with draw().
struct Model {
  std::shared_ptr<const SolutionSet> set;
  std::vector<double> adversarial;
  PerturbationSpec spec;
  std::optional<std::vector<double>> profits;

  int n() const { return set->n(); }
  int d() const { return spec.d(); }
};

/// Samples every perturbed coefficient, row by row, from `rng`.
inline Instance draw(const Model& model, Stream& rng) {
  const PerturbationSpec& spec = model.spec;
  require(spec.n() == model.n(), "perturbation spec and solution set differ in n");
  std::vector<double> coef(static_cast<std::size_t>(spec.d()) * spec.n(), 0.0);
  for (int k = 0; k < spec.d(); ++k)
    for (int i = 0; i < spec.n(); ++i)
      if (const auto& e = spec.at(k, i)) coef[static_cast<std::size_t>(k) * spec.n() + i] = e->sample(rng);
  Instance inst(model.set, spec.d(), std::move(coef), model.adversarial);
  if (model.profits) inst.set_profits(*model.profits);
  return inst;
}

/// Adversarial values -sum(p_i x_i) over the hypercube, summed in index order.
inline std::vector<double> knapsack_adversarial(const SolutionSet& set, const std::vector<double>& profits) {
  std::vector<double> adv(set.size());
  for (std::size_t s = 0; s < set.size(); ++s) {
    double p = 0;
    for_each_index(set.at(s).word(), [&](int i) { p += profits[static_cast<std::size_t>(i)]; });
    adv[s] = -p;
  }
  return adv;
}

namespace detail {

/// Builds an explicit set from transformed solutions, keeping for each
/// transformed vector the preimage with the smallest (adversarial value,
/// original order) and carrying that adversarial value along.
inline std::pair<std::shared_ptr<const SolutionSet>, std::vector<double>> collapse(
    int n, const std::vector<Solution>& originals, const std::vector<Solution>& images,
    const std::vector<double>& adversarial) {
  std::map<std::uint64_t, std::size_t> best;  // image word -> position in `order`
  std::vector<std::size_t> order;            // representative original index per image
  std::vector<Solution> members;
  for (std::size_t s = 0; s < images.size(); ++s) {
    auto [it, fresh] = best.emplace(images[s].word(), order.size());
    if (fresh) {
      order.push_back(s);
      members.push_back(images[s]);
      continue;
    }
    std::size_t& rep = order[it->second];
    if (adversarial[s] < adversarial[rep] || (adversarial[s] == adversarial[rep] && originals[s] < originals[rep]))
      rep = s;
  }
  std::vector<double> adv;
  adv.reserve(order.size());
  for (std::size_t rep : order) adv.push_back(adversarial[rep]);
  return {std::make_shared<const SolutionSet>(SolutionSet::explicit_set(n, std::move(members))), std::move(adv)};
}

}  // namespace detail

/// Rewrites a model with arbitrary zero pattern into one where every column
/// is perturbed in exactly one objective: each solution becomes d copies of
/// itself (block k read only by objective k), then columns that no objective
/// perturbs are dropped and solutions that became equal are merged.
inline Model zp_normal_form(const Model& model) {
  const int d = model.d(), n = model.n();
  std::vector<std::pair<int, int>> columns;  // (objective, original index)
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < n; ++i)
      if (model.spec.at(k, i)) columns.push_back({k, i});
  require(!columns.empty(), "no perturbed coefficient to keep");
  require(columns.size() <= static_cast<std::size_t>(Solution::max_size), "normal form needs more than 64 columns");
  const int m = static_cast<int>(columns.size());

  std::vector<Solution> originals = model.set->to_vector(), images;
  images.reserve(originals.size());
  for (const Solution& x : originals) {
    Solution y(m);
    for (int c = 0; c < m; ++c) y = y.with(c, x[columns[static_cast<std::size_t>(c)].second]);
    images.push_back(y);
  }
  auto [set, adv] = detail::collapse(m, originals, images, model.adversarial);

  Model out{set, std::move(adv), PerturbationSpec(d, m), std::nullopt};
  for (int c = 0; c < m; ++c) {
    auto [k, i] = columns[static_cast<std::size_t>(c)];
    out.spec.set(k, c, model.spec.at(k, i));
  }
  return out;
}

/// Polynomial objectives: objective t is sum_i w_ti * prod_{j in monomial_ti} x_j.
struct MonomialSystem {
  std::vector<std::vector<IndexTuple>> monomials;  // per objective
  std::vector<std::vector<DensitySpec>> weights;   // same shape, densities on [0, 1]

  int d() const { return static_cast<int>(monomials.size()); }

  static bool indicator(const IndexTuple& monomial, const Solution& x) {
    return (x.word() & monomial.mask()) == monomial.mask();
  }
};

/// One new variable per monomial (objective blocks in order); the new
/// feasible set is the set of reachable indicator patterns and the new
/// adversarial value of a pattern is the smallest original value over its
/// preimage.
inline Model linearize_polynomial(const std::shared_ptr<const SolutionSet>& set, const MonomialSystem& sys,
                                  const std::vector<double>& adversarial) {
  const int d = sys.d();
  require(d >= 1, "monomial system needs at least one objective");
  require(sys.weights.size() == sys.monomials.size(), "one weight list per objective");
  require(adversarial.size() == set->size(), "adversarial values must align with the solution set");
  std::vector<std::pair<int, const IndexTuple*>> vars;
  for (int t = 0; t < d; ++t) {
    const auto& mons = sys.monomials[static_cast<std::size_t>(t)];
    require(!mons.empty(), "every objective needs at least one monomial");
    require(sys.weights[static_cast<std::size_t>(t)].size() == mons.size(), "one weight per monomial");
    for (const IndexTuple& mono : mons) {
      for (int j : mono) require(j >= 0 && j < set->n(), "monomial index out of range");
      vars.push_back({t, &mono});
    }
  }
  require(vars.size() <= static_cast<std::size_t>(Solution::max_size), "too many monomials");
  const int m = static_cast<int>(vars.size());

  std::vector<Solution> originals = set->to_vector(), images;
  images.reserve(originals.size());
  for (const Solution& x : originals) {
    Solution y(m);
    for (int c = 0; c < m; ++c) y = y.with(c, MonomialSystem::indicator(*vars[static_cast<std::size_t>(c)].second, x));
    images.push_back(y);
  }
  auto [newset, adv] = detail::collapse(m, originals, images, adversarial);

  Model out{newset, std::move(adv), PerturbationSpec(d, m), std::nullopt};
  int c = 0;
  for (int t = 0; t < d; ++t)
    for (const DensitySpec& w : sys.weights[static_cast<std::size_t>(t)]) out.spec.set(t, c++, w);
  return out;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_MODEL_HPP
