#include <gtest/gtest.h>

#include "oracles.hpp"
#include "suite.hpp"

using namespace smoothpo;

namespace {

std::vector<Solution> pareto_of(const Instance& inst) { return pareto_bruteforce(inst).solutions(); }

// Two members on n = 14 with classes {0..6} and {7..13}. Objective 0 reads
// only the first class, objective 1 only the second.
struct HandExample {
  std::vector<IndexTuple> partition = contiguous_partition(14, 2);
  Solution x{14};
  Solution y = Solution(14).with(3, true);
  Instance inst = make();

  Instance make() const {
    std::vector<double> coef(28, 0.0);
    for (int i = 0; i < 7; ++i) coef[static_cast<std::size_t>(i)] = 0.1;
    coef[3] = -0.5;
    for (int i = 7; i < 14; ++i) coef[static_cast<std::size_t>(14 + i)] = 0.2;
    auto set = std::make_shared<const SolutionSet>(SolutionSet::explicit_set(14, {x, y}));
    return Instance(set, 2, coef, {0.0, 1.0});
  }
};

const Solution& last_vector(const ZPTrace& tr) {
  for (auto it = tr.calls.rbegin(); it != tr.calls.rend(); ++it)
    if (!it->rounds.empty()) return it->rounds.back().vector;
  throw std::logic_error("trace has no rounds");
}

}  // namespace

TEST(WitnessZP, HandTracedRecursion) {
  HandExample ex;
  Evaluation ev(ex.inst);
  EXPECT_EQ(oracle::pareto(ex.inst), (std::set<std::string>{ex.x.to_string(), ex.y.to_string()}));
  ZPTrace tr = witness_zp(ev, ex.partition, ex.x);

  ASSERT_EQ(tr.calls.size(), 3u);
  const ZPCall& c0 = tr.calls[0];
  EXPECT_EQ(c0.objectives, (std::vector<int>{0, 1}));
  ASSERT_EQ(c0.rounds.size(), 2u);
  EXPECT_TRUE(c0.rounds[0].winner_set_empty);  // nobody beats x in both objectives
  EXPECT_EQ(c0.rounds[0].added, (std::vector<int>{0, 7}));
  EXPECT_EQ(c0.rounds[1].vector, ex.y);
  EXPECT_EQ(c0.rounds[1].equal, std::vector<int>{1});  // y agrees with x on the second class
  EXPECT_EQ(c0.rounds[1].added, std::vector<int>{3});
  EXPECT_EQ(c0.last_round, 1);

  const ZPCall& c1 = tr.calls[1];
  EXPECT_EQ(c1.objectives, std::vector<int>{0});
  ASSERT_EQ(c1.rounds.size(), 2u);
  EXPECT_TRUE(c1.rounds[0].winner_set_empty);
  EXPECT_EQ(c1.rounds[0].added, std::vector<int>{1});
  EXPECT_EQ(c1.rounds[1].vector, ex.x);
  EXPECT_EQ(c1.rounds[1].equal, std::vector<int>{0});
  EXPECT_EQ(c1.last_round, 0);

  EXPECT_TRUE(tr.calls[2].objectives.empty());
  EXPECT_EQ(tr.result, std::vector<Solution>{ex.x});
  EXPECT_EQ(tr.last_call, (std::vector<int>{1, 0}));
  EXPECT_EQ(tr.indices.values(), (std::vector<int>{0, 7, 3, 1}));
  EXPECT_EQ(tr.active_calls(), 2u);
  EXPECT_TRUE(tr.restarted_early());

  auto [tr2, cert] = extract_zp_certificate(ev, ex.partition, ex.x);
  EXPECT_EQ(cert.pivots, (std::vector<int>{2, 8}));
  EXPECT_EQ(cert.indices.values(), (std::vector<int>{0, 7, 3, 1, 2, 8}));
  EXPECT_EQ(cert.bookkeeping.column_count(), 4);
  EXPECT_EQ(cert.bookkeeping.column(0, 2), 0);
  EXPECT_EQ(cert.bookkeeping.column(1, 0), 3);
  EXPECT_EQ(cert.bookkeeping.column(0, 0), -1);
  EXPECT_TRUE(has_zp_certificate_form(cert, ex.partition, ex.x));

  Solution u = zp_shift_vector(cert);
  // x is zero, so u is one exactly at the pivots
  EXPECT_EQ(u, Solution(14).with(2, true).with(8, true));
  auto q = working_exponent(min_gap(ev, partition_masks(ex.partition)));
  ASSERT_TRUE(q.has_value());
  EpsilonGrid grid(*q, 2, 14);
  EXPECT_EQ(witness_zp_reconstruct(ev, ex.partition, cert.indices, cert.restricted(), cert.bookkeeping,
                                   box_of(ev, grid, ex.x, u), u),
            std::vector<Solution>{ex.x});
}

TEST(WitnessZP, HandExampleOtherSolution) {
  HandExample ex;
  Evaluation ev(ex.inst);
  ZPTrace tr = witness_zp(ev, ex.partition, ex.y);
  EXPECT_EQ(tr.result, std::vector<Solution>{ex.y});
  EXPECT_EQ(last_vector(tr), ex.y);
}

TEST(WitnessZP, OneObjectiveMatchesPlainWitness) {
  Stream rng(301);
  for (int trial = 0; trial < 60; ++trial) {
    suite::Case c = suite::general_case(rng, 4, 10, 1);
    Evaluation ev(c.inst);
    std::vector<IndexTuple> part{IndexTuple::range(c.inst.n())};
    for (const Solution& x : pareto_of(c.inst)) {
      WitnessTrace w = witness(ev, x, {});
      ZPTrace z = witness_zp(ev, part, x);
      EXPECT_EQ(z.result, std::vector<Solution>{x});
      EXPECT_EQ(z.indices, w.final_indices);
      ASSERT_GE(z.calls.size(), 1u);
      ASSERT_EQ(z.calls[0].rounds.size(), w.rounds.size());
      for (std::size_t r = 0; r < w.rounds.size(); ++r) EXPECT_EQ(z.calls[0].rounds[r].vector, w.rounds[r].vector);
    }
  }
}

TEST(WitnessZP, Preconditions) {
  HandExample ex;
  Evaluation ev(ex.inst);
  // classes of size 6 are too small for d = 2
  std::vector<IndexTuple> small{IndexTuple::range(6), IndexTuple{6, 7, 8, 9, 10, 11, 12, 13}};
  EXPECT_THROW(witness_zp(ev, small, ex.x), precondition_error);
  std::vector<IndexTuple> overlap{IndexTuple::range(8), IndexTuple{7, 8, 9, 10, 11, 12, 13}};
  EXPECT_THROW(witness_zp(ev, overlap, ex.x), precondition_error);
  EXPECT_THROW(witness_zp(ev, {IndexTuple::range(14)}, ex.x), precondition_error);
}

namespace {

struct ZPStats {
  int instances = 0;
  int solutions = 0;
  int recursing = 0;
};

void check_zp_case(const suite::ZPCase& c, ZPStats& stats, Stream& rng, bool mask) {
  Evaluation ev(c.inst);
  EpsilonGrid grid = c.grid();
  bool recursed = false;
  for (const Solution& x : pareto_of(c.inst)) {
    ZPTrace tr = witness_zp(ev, c.partition, x);
    ASSERT_EQ(tr.result, std::vector<Solution>{x});
    EXPECT_EQ(last_vector(tr), x);
    recursed = recursed || tr.restarted_early();
    ZPCertificate cert = zp_certificate(tr, c.partition, c.inst.n());
    EXPECT_TRUE(has_zp_certificate_form(cert, c.partition, x));
    Solution u = zp_shift_vector(cert);
    EXPECT_EQ(u.word() & ~cert.indices.mask(), 0u);
    BitMatrix A = cert.restricted();
    auto corner = box_of(ev, grid, x, u);
    EXPECT_EQ(witness_zp_reconstruct(ev, c.partition, cert.indices, A, cert.bookkeeping, corner, u),
              std::vector<Solution>{x});
    ZPShiftData sd = build_zp_matrices(cert, c.partition, u);
    for (int k = 0; k < c.inst.d(); ++k) {
      IntMatrix m = sd.combined(k);
      EXPECT_EQ(m.rows, m.cols);
      EXPECT_TRUE(rank_full(m));
      EXPECT_EQ(exact_rank(m), oracle::rational_rank(m));
    }
    if (mask) {
      std::vector<IntMatrix> cons;
      for (int k = 0; k < c.inst.d(); ++k) cons.push_back(sd.constraints(k));
      Instance masked = c.inst.with_coefficients(masked_coefficients(c.inst, sd.rows, cons, rng));
      Evaluation mev(masked);
      EXPECT_EQ(witness_zp_reconstruct(mev, c.partition, cert.indices, A, cert.bookkeeping, corner, u),
                std::vector<Solution>{x});
      // coefficients outside each class stay exactly zero
      for (int k = 0; k < c.inst.d(); ++k)
        for (int i = 0; i < c.inst.n(); ++i)
          if (!c.partition[static_cast<std::size_t>(k)].contains(i)) {
            EXPECT_EQ(masked.coefficient(k, i), 0.0);
          }
    }
    ++stats.solutions;
  }
  stats.recursing += recursed ? 1 : 0;
  ++stats.instances;
}

}  // namespace

TEST(WitnessZP, TwoObjectiveSuite) {
  Stream rng(307);
  ZPStats stats;
  for (int trial = 0; trial < 60; ++trial) check_zp_case(suite::zp_case(rng, 2, 7, 36, 6), stats, rng, true);
  EXPECT_GT(stats.recursing, 5);
}

TEST(WitnessZP, ThreeObjectiveSuite) {
  Stream rng(311);
  ZPStats stats;
  for (int trial = 0; trial < 15; ++trial) check_zp_case(suite::zp_case(rng, 3, 13, 120, 5), stats, rng, true);
  EXPECT_GT(stats.recursing, 0);
}

TEST(WitnessZP, BookkeepingColumnIndexing) {
  ZPBookkeeping bk;
  bk.calls = {{{0, 1, 2}, 3, 2}, {{0, 2}, 2, 0}};
  bk.last_call = {1, 0, 1};
  EXPECT_EQ(bk.column_count(), 2 + 3);
  EXPECT_EQ(bk.column(0, 3), 0);
  EXPECT_EQ(bk.column(0, 2), 1);
  EXPECT_EQ(bk.column(0, 1), -1);
  EXPECT_EQ(bk.column(1, 2), 2);
  EXPECT_EQ(bk.column(1, 0), 4);
  EXPECT_EQ(bk.column(2, 0), -1);
}
