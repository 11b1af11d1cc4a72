#ifndef SMOOTHPO_WITNESS_ZP_HPP
#define SMOOTHPO_WITNESS_ZP_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include "smoothpo/witness.hpp"

namespace smoothpo {

/// One round of a zero-preserving witness call.
struct ZPRound {
  int t = 0;
  bool winner_set_empty = false;
  Solution vector;        // x^(r,t)
  std::vector<int> equal;  // objectives k of K with x^(r,t)|P_k = x|P_k
  std::vector<int> added;  // indices appended in this round
};

/// One call of the recursion, working on the objectives K.
struct ZPCall {
  std::vector<int> objectives;  // K (0-based objective numbers)
  int first_round = 0;          // d' = |K|
  int last_round = -1;          // t_r: round at which the call recursed, -1 if it did not
  std::vector<ZPRound> rounds;
};

struct ZPTrace {
  std::vector<ZPCall> calls;        // the final call (K empty) included when reached
  std::vector<int> last_call;       // r_k per objective, -1 if never set
  IndexTuple indices;               // I at termination
  std::vector<Solution> result;     // returned set

  /// Calls with nonempty K, i.e. the ones contributing certificate columns.
  std::size_t active_calls() const {
    return static_cast<std::size_t>(std::count_if(calls.begin(), calls.end(),
                                                  [](const ZPCall& c) { return !c.objectives.empty(); }));
  }
  /// True when some call recursed before its last round or more than one
  /// call with objectives was needed.
  bool restarted_early() const {
    if (active_calls() > 1) return true;
    return std::any_of(calls.begin(), calls.end(), [](const ZPCall& c) { return c.last_round > 0; });
  }
};

/// Call structure stored in a certificate.
struct ZPBookkeeping {
  struct Call {
    std::vector<int> objectives;
    int first_round = 0;  // d'_r
    int last_round = 0;   // t_r
  };
  std::vector<Call> calls;      // calls with nonempty K, in order
  std::vector<int> last_call;   // r_k per objective

  /// Position of column a^(r,t) in the certificate matrix, or -1.
  int column(int r, int t) const {
    int c = 0;
    for (int q = 0; q < static_cast<int>(calls.size()); ++q) {
      const Call& call = calls[static_cast<std::size_t>(q)];
      if (q == r) return (t <= call.first_round && t >= call.last_round) ? c + (call.first_round - t) : -1;
      c += call.first_round - call.last_round + 1;
    }
    return -1;
  }
  int column_count() const {
    int c = 0;
    for (const Call& call : calls) c += call.first_round - call.last_round + 1;
    return c;
  }
};

struct ZPCertificate {
  int d = 0;
  int n = 0;
  IndexTuple indices;             // I* = I followed by i*_1, ..., i*_d
  std::vector<int> pivots;        // i*_k
  ZPBookkeeping bookkeeping;
  std::vector<Solution> columns;  // x^(r,t), calls in order, rounds descending

  BitMatrix restricted() const { return restrict_columns(columns, indices); }
};

namespace detail {

inline std::vector<std::uint64_t> class_masks(const std::vector<IndexTuple>& partition) {
  std::vector<std::uint64_t> m;
  for (const IndexTuple& p : partition) m.push_back(p.mask());
  return m;
}

inline void check_zp_inputs(const Evaluation& ev, const std::vector<IndexTuple>& partition) {
  check_partition(partition, ev.n(), ev.d());
  const int d = ev.d();
  for (const IndexTuple& p : partition)
    require(static_cast<int>(p.size()) > d * (d + 1), "every partition class needs more than d(d+1) indices");
}

}  // namespace detail

/// Witness procedure for zero-preserving instances where objective k only
/// reads the indices P_k. A round whose winner agrees with x on some P_k
/// (k in K) cannot be separated from x in that objective; the call then
/// restarts on the remaining objectives with I kept.
inline ZPTrace witness_zp(const Evaluation& ev, const std::vector<IndexTuple>& partition, const Solution& x) {
  detail::check_zp_inputs(ev, partition);
  const int d = ev.d(), n = ev.n();
  const std::size_t xi = detail::member_index(ev, x);
  const auto pm = detail::class_masks(partition);

  ZPTrace tr;
  tr.last_call.assign(static_cast<std::size_t>(d), -1);
  std::vector<int> K(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) K[static_cast<std::size_t>(k)] = k;
  std::uint64_t imask = 0;
  std::vector<std::size_t> R, C;

  for (int r = 0;; ++r) {
    ZPCall call;
    call.objectives = K;
    call.first_round = static_cast<int>(K.size());
    std::uint64_t fixed = imask;
    for (int k = 0; k < d; ++k)
      if (std::find(K.begin(), K.end(), k) == K.end()) fixed |= pm[static_cast<std::size_t>(k)];
    R.clear();
    for (std::size_t s = 0; s < ev.size(); ++s)
      if (ev.solution(s).agrees_on(x, fixed)) R.push_back(s);
    if (K.empty()) {
      for (std::size_t s : R) tr.result.push_back(ev.solution(s));
      tr.calls.push_back(call);
      break;
    }

    bool recursed = false;
    for (int t = call.first_round; t >= 0; --t) {
      C.clear();
      for (std::size_t z : R) {
        bool beats = true;
        for (int j = 0; j < t && beats; ++j) {
          int k = K[static_cast<std::size_t>(j)];
          beats = ev.value(z, k) < ev.value(xi, k);
        }
        if (beats) C.push_back(z);
      }
      const int obj = (t == call.first_round) ? d : K[static_cast<std::size_t>(t)];
      ZPRound round;
      round.t = t;
      round.winner_set_empty = C.empty();
      if (!C.empty()) {
        std::size_t best = detail::argmin(ev, obj, C);
        round.vector = ev.solution(best);
        std::vector<int> neq;
        for (int k : K) {
          const std::uint64_t m = pm[static_cast<std::size_t>(k)];
          if (round.vector.agrees_on(x, m)) {
            round.equal.push_back(k);
            tr.last_call[static_cast<std::size_t>(k)] = r;
          } else {
            neq.push_back(k);
            int i = x.first_difference(round.vector, m);
            round.added.push_back(i);
            tr.indices.push_back(i);
            imask |= Solution::bit(i);
          }
        }
        call.rounds.push_back(round);
        if (round.equal.empty()) {
          std::vector<std::size_t> next;
          for (std::size_t z : R)
            if (ev.solution(z).agrees_on(x, imask) && ev.objective_less(obj, z, best)) next.push_back(z);
          R.swap(next);
        } else {
          call.last_round = t;
          K = neq;
          recursed = true;
          break;
        }
      } else {
        Solution trivial = x;
        for (int k : K) {
          int i = first_free_index(imask | ~pm[static_cast<std::size_t>(k)], n);
          require(i >= 0, "partition class ran out of free indices");
          round.added.push_back(i);
          tr.indices.push_back(i);
          imask |= Solution::bit(i);
          trivial = trivial.flipped(i);
        }
        round.vector = trivial;
        call.rounds.push_back(round);
        std::erase_if(R, [&](std::size_t z) { return !ev.solution(z).agrees_on(x, imask); });
      }
    }
    tr.calls.push_back(call);
    if (!recursed) break;
  }
  return tr;
}

/// Certificate of a successful run: I* appends i*_k = min(P_k \ I) for each
/// k, and the columns are all vectors x^(r,t) of the calls with objectives.
inline ZPCertificate zp_certificate(const ZPTrace& tr, const std::vector<IndexTuple>& partition, int n) {
  ZPCertificate cert;
  cert.d = static_cast<int>(partition.size());
  cert.n = n;
  cert.indices = tr.indices;
  const std::uint64_t imask = tr.indices.mask();
  for (const IndexTuple& p : partition) {
    int i = first_free_index(imask | ~p.mask(), n);
    require(i >= 0, "partition class ran out of free indices");
    cert.pivots.push_back(i);
    cert.indices.push_back(i);
  }
  cert.bookkeeping.last_call = tr.last_call;
  for (const ZPCall& call : tr.calls) {
    if (call.objectives.empty()) continue;
    require(call.last_round >= 0, "certificate requested for a failed run");
    cert.bookkeeping.calls.push_back({call.objectives, call.first_round, call.last_round});
    for (const ZPRound& round : call.rounds) cert.columns.push_back(round.vector);
  }
  return cert;
}

/// Runs the zero-preserving witness and extracts its certificate.
inline std::pair<ZPTrace, ZPCertificate> extract_zp_certificate(const Evaluation& ev,
                                                                const std::vector<IndexTuple>& partition,
                                                                const Solution& x) {
  ZPTrace tr = witness_zp(ev, partition, x);
  require(tr.result.size() == 1 && tr.result.front() == x, "the witness run failed; x is not Pareto-optimal");
  return {tr, zp_certificate(tr, partition, ev.n())};
}

/// Shift vector: complement of x at every pivot, x on the rest of I*, zero
/// elsewhere, reading x|_{I*} from the last column.
inline Solution zp_shift_vector(const ZPCertificate& cert) {
  BitMatrix A = cert.restricted();
  Solution u(cert.n);
  for (int r = 0; r < A.rows; ++r) {
    int j = cert.indices[static_cast<std::size_t>(r)];
    bool xj = A(r, A.cols - 1);
    bool pivot = std::find(cert.pivots.begin(), cert.pivots.end(), j) != cert.pivots.end();
    u = u.with(j, pivot ? !xj : xj);
  }
  return u;
}

/// Per-objective check of the triangular flip pattern: on J = I* restricted
/// to P_k, the columns of calls up to r_k form a square matrix that agrees
/// with x above the diagonal, flips x on it (except the last entry) and is
/// unconstrained below.
inline bool has_zp_certificate_form(const ZPCertificate& cert, const std::vector<IndexTuple>& partition,
                                    const Solution& x) {
  const int d = cert.d;
  if (static_cast<int>(cert.indices.size()) > d * d * d + d * d + d || !cert.indices.distinct()) return false;
  for (int k = 0; k < d; ++k) {
    const int rk = cert.bookkeeping.last_call[static_cast<std::size_t>(k)];
    if (rk < 0 || rk >= static_cast<int>(cert.bookkeeping.calls.size())) return false;
    IndexTuple J = cert.indices.intersect(partition[static_cast<std::size_t>(k)]);
    const int cols = cert.bookkeeping.column(rk, cert.bookkeeping.calls[static_cast<std::size_t>(rk)].last_round) + 1;
    if (cols != static_cast<int>(J.size())) return false;
    std::vector<Solution> sub(cert.columns.begin(), cert.columns.begin() + cols);
    if (!has_certificate_form(restrict_columns(sub, J), 0, x, J)) return false;
    if (J.back() != cert.pivots[static_cast<std::size_t>(k)]) return false;
  }
  return true;
}

/// Replays a zero-preserving witness run from (I*, A, bookkeeping) and the
/// corner b of the box of x - u. Returns {x} on success and the empty set
/// otherwise.
inline std::vector<Solution> witness_zp_reconstruct(const Evaluation& ev, const std::vector<IndexTuple>& partition,
                                                    const IndexTuple& Istar, const BitMatrix& A,
                                                    const ZPBookkeeping& bk, const std::vector<double>& corner,
                                                    const Solution& u) {
  check_partition(partition, ev.n(), ev.d());
  const int d = ev.d(), n = ev.n();
  require(A.rows == static_cast<int>(Istar.size()) && A.cols == bk.column_count(), "matrix does not match bookkeeping");
  require(corner.size() == static_cast<std::size_t>(d), "box corner must have d entries");
  require(bk.last_call.size() == static_cast<std::size_t>(d), "bookkeeping needs r_k for every objective");
  const auto pm = detail::class_masks(partition);
  const std::uint64_t imask = Istar.mask();
  std::vector<double> vu(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) vu[static_cast<std::size_t>(k)] = ev.instance().dot(k, u);

  std::uint64_t fixed_mask = 0;  // S' = members agreeing with `fixed` on `fixed_mask`
  Solution fixed(n);
  std::vector<int> K(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) K[static_cast<std::size_t>(k)] = k;

  for (int r = 0;; ++r) {
    std::vector<std::size_t> Sp;
    for (std::size_t s = 0; s < ev.size(); ++s)
      if (ev.solution(s).agrees_on(fixed, fixed_mask)) Sp.push_back(s);
    if (K.empty()) {
      std::vector<Solution> out;
      for (std::size_t s : Sp) out.push_back(ev.solution(s));
      return out;
    }
    if (r >= static_cast<int>(bk.calls.size()) || bk.calls[static_cast<std::size_t>(r)].objectives != K) return {};
    const auto& call = bk.calls[static_cast<std::size_t>(r)];
    const int dp = call.first_round, tr = call.last_round;
    std::vector<Solution> a(static_cast<std::size_t>(dp + 1));  // a[t] for t in [tr, dp]
    for (int t = tr; t <= dp; ++t) a[static_cast<std::size_t>(t)] = A.column_on(Istar, bk.column(r, t), n);
    auto match = [&](std::size_t z) {
      unsigned m = 0;
      for (int t = tr; t <= dp; ++t)
        if (ev.solution(z).agrees_on(a[static_cast<std::size_t>(t)], imask)) m |= 1u << t;
      return m;
    };
    std::vector<std::pair<std::size_t, unsigned>> R, next;
    for (std::size_t s : Sp)
      if (unsigned m = match(s)) R.push_back({s, m});

    bool recursed = false;
    std::vector<std::size_t> C;
    for (int t = dp; t >= 0 && !recursed; --t) {
      C.clear();
      if (t >= tr)
        for (auto [z, m] : R) {
          if (!(m & (1u << t))) continue;
          bool inside = true;
          for (int j = 0; j < t && inside; ++j) {
            int k = K[static_cast<std::size_t>(j)];
            inside = ev.value(z, k) - vu[static_cast<std::size_t>(k)] <= corner[static_cast<std::size_t>(k)];
          }
          if (inside) C.push_back(z);
        }
      const int obj = (t == dp) ? d : K[static_cast<std::size_t>(t)];
      const unsigned earlier = t > 0 ? ((1u << t) - 1) : 0u;  // rounds tr..t-1
      next.clear();
      if (!C.empty()) {
        std::size_t best = detail::argmin(ev, obj, C);
        if (t == tr) {
          const Solution& xt = ev.solution(best);
          std::vector<int> neq;
          for (int k : K) {
            if (bk.last_call[static_cast<std::size_t>(k)] == r) {
              const std::uint64_t m = pm[static_cast<std::size_t>(k)];
              fixed_mask |= m;
              fixed = Solution(n, (fixed.word() & ~m) | (xt.word() & m));
            } else {
              neq.push_back(k);
            }
          }
          K = neq;
          recursed = true;
          break;
        }
        for (auto [z, m] : R)
          if ((m & earlier) && ev.objective_less(obj, z, best)) next.push_back({z, m});
      } else {
        for (auto [z, m] : R)
          if (m & earlier) next.push_back({z, m});
      }
      R.swap(next);
    }
    if (!recursed) return {};
  }
}

/// The matrices [P_k | Q_k] (the combinations of V^k on I*_k read by a
/// reconstruction run) and the vector locating x in objective k.
struct ZPShiftData {
  std::vector<IndexTuple> rows;                // I*_k = I* restricted to P_k
  std::vector<IntMatrix> P;                    // columns of calls before r_k
  std::vector<IntMatrix> Q;                    // columns of call r_k
  std::vector<std::vector<long long>> last;    // p^(r_k, t_{r_k})

  IntMatrix constraints(int k) const {
    std::vector<std::vector<long long>> cols;
    const IntMatrix& p = P[static_cast<std::size_t>(k)];
    const IntMatrix& q = Q[static_cast<std::size_t>(k)];
    for (int c = 0; c < p.cols; ++c) cols.push_back(p.column(c));
    for (int c = 0; c < q.cols; ++c) cols.push_back(q.column(c));
    return IntMatrix::from_columns(static_cast<int>(rows[static_cast<std::size_t>(k)].size()), cols);
  }
  IntMatrix combined(int k) const {
    IntMatrix m = constraints(k);
    std::vector<std::vector<long long>> cols;
    for (int c = 0; c < m.cols; ++c) cols.push_back(m.column(c));
    cols.push_back(last[static_cast<std::size_t>(k)]);
    return IntMatrix::from_columns(m.rows, cols);
  }
};

inline ZPShiftData build_zp_matrices(const ZPCertificate& cert, const std::vector<IndexTuple>& partition,
                                     const Solution& u) {
  const ZPBookkeeping& bk = cert.bookkeeping;
  ZPShiftData sd;
  for (int k = 0; k < cert.d; ++k) {
    IndexTuple J = cert.indices.intersect(partition[static_cast<std::size_t>(k)]);
    const int rows = static_cast<int>(J.size());
    auto p = [&](int r, int t) {
      int c = bk.column(r, t);
      require(c >= 0, "no certificate column for this call and round");
      std::vector<long long> v(static_cast<std::size_t>(rows));
      for (int i = 0; i < rows; ++i) {
        int j = J[static_cast<std::size_t>(i)];
        v[static_cast<std::size_t>(i)] = static_cast<long long>(cert.columns[static_cast<std::size_t>(c)][j]) -
                                         static_cast<long long>(u[j]);
      }
      return v;
    };
    const int rk = bk.last_call[static_cast<std::size_t>(k)];
    require(rk >= 0, "objective was never settled");
    std::vector<std::vector<long long>> pcols, qcols;
    for (int r = 0; r < rk; ++r) {
      const auto& call = bk.calls[static_cast<std::size_t>(r)];
      for (int t = call.first_round; t >= call.last_round; --t) pcols.push_back(p(r, t));
    }
    const auto& call = bk.calls[static_cast<std::size_t>(rk)];
    auto pos = std::find(call.objectives.begin(), call.objectives.end(), k);
    require(pos != call.objectives.end(), "objective missing from its last call");
    const int jk = static_cast<int>(pos - call.objectives.begin()) + 1;
    require(call.last_round <= jk - 1, "call recursed after the objective's own round");
    for (int t = call.first_round; t >= jk; --t) qcols.push_back(p(rk, t));
    for (int t = jk - 2; t >= call.last_round; --t) qcols.push_back(difference(p(rk, t), p(rk, jk - 1)));
    sd.rows.push_back(J);
    sd.P.push_back(IntMatrix::from_columns(rows, pcols));
    sd.Q.push_back(IntMatrix::from_columns(rows, qcols));
    sd.last.push_back(p(rk, call.last_round));
  }
  return sd;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_WITNESS_ZP_HPP
