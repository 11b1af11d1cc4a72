#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "smoothpo/smoothpo.hpp"

using namespace smoothpo;

namespace {

std::shared_ptr<const SolutionSet> cube(int n) { return std::make_shared<const SolutionSet>(SolutionSet::hypercube(n)); }

Instance random_instance(int n, int d, Stream& rng) {
  auto set = cube(n);
  std::vector<double> coef(static_cast<std::size_t>(n * d));
  for (double& c : coef) c = rng.uniform(-1, 1);
  return Instance(set, d, coef, random_adversarial(set->size(), rng));
}

}  // namespace

TEST(Solution, LexicographicOrderHasIndexZeroMostSignificant) {
  auto a = Solution::from_string("0111");
  auto b = Solution::from_string("1000");
  EXPECT_LT(a, b);
  EXPECT_EQ(a.to_string(), "0111");
  EXPECT_TRUE(b[0]);
  EXPECT_FALSE(b[3]);
  EXPECT_EQ(a.first_difference(b), 0);
  EXPECT_EQ(Solution::from_string("0110").first_difference(Solution::from_string("0111")), 3);
  EXPECT_EQ(a.count(), 3);
}

TEST(Solution, RejectsBadStrings) {
  EXPECT_THROW(Solution::from_string("01x"), precondition_error);
  EXPECT_THROW(Solution(65), precondition_error);
}

TEST(IndexTuple, TupleCalculus) {
  IndexTuple a{3, 1, 4};
  IndexTuple b{1, 5};
  EXPECT_EQ(a.join(b).values(), (std::vector<int>{3, 1, 4, 5}));  // union keeps first occurrences
  EXPECT_EQ(a.minus(b).values(), (std::vector<int>{3, 4}));
  EXPECT_EQ(a.intersect(b).values(), (std::vector<int>{1}));
  EXPECT_TRUE(IndexTuple({1}).subset_of(a));
  EXPECT_TRUE(a.distinct());
  EXPECT_TRUE(a.join(b).distinct());
  EXPECT_FALSE(IndexTuple({2, 2}).distinct());
  EXPECT_EQ(IndexTuple::range(3).values(), (std::vector<int>{0, 1, 2}));
}

TEST(Dominates, SpecExamples) {
  EXPECT_TRUE(dominates({{1, 2}, 0}, {{2, 3}, 1}));
  EXPECT_FALSE(dominates({{1, 2}, 0}, {{1, 2}, 0}));
  EXPECT_FALSE(dominates({{1, 3}, 0}, {{2, 2}, 0}));
  EXPECT_THROW(dominates({{1}, 0}, {{1, 2}, 0}), precondition_error);
}

TEST(Dominates, IrreflexiveAndAntisymmetric) {
  Stream rng(11);
  for (int trial = 0; trial < 5000; ++trial) {
    ObjectiveVector a{{}, static_cast<double>(rng.integer(0, 2))}, b{{}, static_cast<double>(rng.integer(0, 2))};
    for (int k = 0; k < 2; ++k) {
      a.linear.push_back(rng.integer(0, 2));
      b.linear.push_back(rng.integer(0, 2));
    }
    EXPECT_FALSE(dominates(a, a));
    EXPECT_FALSE(dominates(a, b) && dominates(b, a));
  }
}

TEST(Instance, ValidatesShape) {
  auto set = cube(3);
  std::vector<double> adv(8, 0.0);
  EXPECT_THROW(Instance(set, 3, std::vector<double>(9, 0.0), adv), precondition_error);  // n < d+1
  EXPECT_THROW(Instance(set, 1, std::vector<double>{0, 2, 0}, adv), precondition_error);
  EXPECT_THROW(Instance(set, 1, std::vector<double>{0, 0}, adv), precondition_error);
  EXPECT_THROW(Instance(set, 0, {}, adv), precondition_error);
  EXPECT_NO_THROW(Instance(set, 2, std::vector<double>(6, 0.5), adv));
}

TEST(Evaluate, ZeroRowGivesZero) {
  auto set = cube(3);
  Instance inst(set, 2, {0, 0, 0, 0.5, -0.25, 1}, std::vector<double>(8, 1.0));
  auto o = inst.evaluate(Solution::from_string("111"));
  EXPECT_EQ(o.linear[0], 0.0);
  EXPECT_DOUBLE_EQ(o.linear[1], 1.25);
}

TEST(Evaluate, ShiftByItselfIsZero) {
  Stream rng(3);
  Instance inst = random_instance(4, 2, rng);
  for (std::size_t s = 0; s < inst.set().size(); ++s) {
    Solution x = inst.set().at(s);
    auto o = inst.evaluate(x, x);
    for (double v : o.linear) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(o.adversarial, inst.adversarial()[s]);
  }
}

TEST(Evaluate, ShiftMatchesIndependentDotProducts) {
  Stream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(3, 2, rng);
    Solution u = Solution::from_string("100");
    for (std::size_t s = 0; s < 8; ++s) {
      Solution x = inst.set().at(s);
      auto o = inst.evaluate(x, u);
      for (int k = 0; k < 2; ++k)
        EXPECT_NEAR(o.linear[static_cast<std::size_t>(k)], oracle::dot(inst, k, x) - oracle::dot(inst, k, u), 1e-15);
      EXPECT_EQ(inst.evaluate(x).linear, inst.evaluate(x, Solution(3)).linear);
    }
  }
}

TEST(EpsilonBox, SpecExamples) {
  EpsilonGrid g(1, 1, 2);
  EXPECT_EQ(g.eps(), 0.5);
  EXPECT_EQ(epsilon_box(g, {0.5}), std::vector<double>{0.0});
  EXPECT_EQ(epsilon_box(g, {-0.25}), std::vector<double>{-0.5});
  EXPECT_EQ(g.box_count(), 8.0);
  EXPECT_THROW(epsilon_box(g, {2.5}), precondition_error);
  EXPECT_THROW(epsilon_box(g, {0.1, 0.2}), precondition_error);
}

TEST(EpsilonBox, CornerContainsPoint) {
  Stream rng(17);
  for (int trial = 0; trial < 10000; ++trial) {
    int q = rng.integer(0, 12), n = rng.integer(1, 8);
    EpsilonGrid g(q, 2, n);
    std::vector<double> v{rng.uniform(-n, n), rng.uniform(-n, n)};
    auto b = g.corner(v);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_LT(b[k], v[k]);
      EXPECT_LE(v[k], b[k] + g.eps());
      double steps = b[k] / g.eps();
      EXPECT_EQ(steps, std::round(steps));
    }
  }
}

TEST(OkEvent, SingletonIsVacuous) {
  auto set = std::make_shared<const SolutionSet>(SolutionSet::explicit_set(3, {Solution::from_string("101")}));
  Instance inst(set, 1, {0.1, 0.2, 0.3}, {0.0});
  EXPECT_TRUE(ok_event(inst, 0.5));
  Instance all_ones(set, 1, {1, -1, 1}, {0.0});
  EXPECT_FALSE(ok_event(all_ones, 0.5));  // no coefficient below one in absolute value
}

TEST(OkEvent, SmallGapFails) {
  const double eps = 0.25;
  auto set = std::make_shared<const SolutionSet>(
      SolutionSet::explicit_set(3, {Solution::from_string("000"), Solution::from_string("010")}));
  Instance inst(set, 1, {0, eps / 2, 0}, {0.0, 1.0});
  EXPECT_FALSE(ok_event(inst, eps));
  EXPECT_TRUE(ok_event(inst, eps / 2));
}

double pairwise_gap(const Instance& inst, const std::vector<std::uint64_t>& masks) {
  double g = INFINITY;
  const auto& set = inst.set();
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b)
      for (int k = 0; k < inst.d(); ++k) {
        if (set.at(a).agrees_on(set.at(b), masks[static_cast<std::size_t>(k)])) continue;
        g = std::min(g, std::abs(oracle::dot(inst, k, set.at(a)) - oracle::dot(inst, k, set.at(b))));
      }
  return g;
}

TEST(OkEvent, MinGapMatchesPairScanAndDerivedEpsHolds) {
  Stream rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = random_instance(rng.integer(3, 7), rng.integer(1, 2), rng);
    Evaluation ev(inst);
    double g = pairwise_gap(inst, full_masks(inst.d()));
    EXPECT_EQ(min_gap(ev, full_masks(inst.d())), g);
    EXPECT_TRUE(ok_event(inst, g / 2));
    auto q = working_exponent(g);
    ASSERT_TRUE(q.has_value());
    double eps = std::ldexp(1.0, -*q);
    EXPECT_LT(eps, g / 2);
    EXPECT_GE(2 * eps, g / 2);
    EXPECT_TRUE(ok_event(ev, eps));
  }
}

TEST(OkEvent, MonotoneInEps) {
  Stream rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = random_instance(rng.integer(3, 6), 1, rng);
    Evaluation ev(inst);
    double eps = rng.uniform(0, 0.2);
    if (!ok_event(ev, eps)) continue;
    for (int j = 0; j < 10; ++j) EXPECT_TRUE(ok_event(ev, rng.uniform(0, eps)));
  }
}

TEST(WorkingExponent, PowersOfTwo) {
  EXPECT_EQ(working_exponent(1.0), 2);   // gap/2 = 0.5, largest 2^-q strictly below is 0.25
  EXPECT_EQ(working_exponent(0.75), 2);  // 0.375 -> 0.25
  EXPECT_EQ(working_exponent(8.0), 0);   // capped at eps = 1
  EXPECT_FALSE(working_exponent(0.0).has_value());
}

TEST(OkzEvent, VacuousAndFailing) {
  std::vector<IndexTuple> part{IndexTuple{0, 1}, IndexTuple{2}};
  auto set = std::make_shared<const SolutionSet>(
      SolutionSet::explicit_set(3, {Solution::from_string("000"), Solution::from_string("010")}));
  // objective 1 reads only index 2, where the pair agrees; objective 0 sees a tiny gap
  Instance inst(set, 2, {0, 0.01, 0, 0, 0, 0.7}, {0.0, 1.0});
  EXPECT_FALSE(okz_event(inst, part, 0.125));
  Instance wide(set, 2, {0, 0.5, 0, 0, 0, 0.7}, {0.0, 1.0});
  EXPECT_TRUE(okz_event(wide, part, 0.125));
  auto same = std::make_shared<const SolutionSet>(SolutionSet::explicit_set(3, {Solution::from_string("000")}));
  EXPECT_TRUE(okz_event(Instance(same, 2, {0, 0, 0, 0, 0, 0}, {0.0}), part, 1.0));
  EXPECT_THROW(okz_event(inst, {IndexTuple{0, 1}, IndexTuple{1, 2}}, 0.1), precondition_error);
}

TEST(OkzEvent, MatchesRestrictedPairScan) {
  Stream rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto part = contiguous_partition(8, 2);
    Model m = zp_pooled_model(part, 3, 9, DensityFamily::uniform, 2, rng);
    Instance inst = draw(m, rng);
    double g = pairwise_gap(inst, partition_masks(part));
    EXPECT_EQ(min_gap(Evaluation(inst), partition_masks(part)), g);
    if (std::isfinite(g)) {
      EXPECT_TRUE(okz_event(inst, part, g / 2));
      EXPECT_FALSE(okz_event(inst, part, g * 1.5));
    }
  }
}
