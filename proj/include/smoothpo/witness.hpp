#ifndef SMOOTHPO_WITNESS_HPP
#define SMOOTHPO_WITNESS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "smoothpo/epsilon.hpp"
#include "smoothpo/model.hpp"
#include "smoothpo/rank.hpp"
#include "smoothpo/rng.hpp"

namespace smoothpo {

/// Row-major 0/1 matrix.
struct BitMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> data;

  BitMatrix() = default;
  BitMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  bool operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c] != 0; }
  void set(int r, int c, bool v) { data[static_cast<std::size_t>(r) * cols + c] = v ? 1 : 0; }

  /// Column c as a vector of length n whose entries at J come from the
  /// matrix and are zero elsewhere.
  Solution column_on(const IndexTuple& J, int c, int n) const {
    Solution s(n);
    for (int r = 0; r < rows; ++r) s = s.with(J[static_cast<std::size_t>(r)], (*this)(r, c));
    return s;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;
};

/// Matrix whose column c is columns[c] restricted to the rows J.
inline BitMatrix restrict_columns(const std::vector<Solution>& columns, const IndexTuple& J) {
  BitMatrix a(static_cast<int>(J.size()), static_cast<int>(columns.size()));
  for (int c = 0; c < a.cols; ++c)
    for (int r = 0; r < a.rows; ++r) a.set(r, c, columns[static_cast<std::size_t>(c)][J[static_cast<std::size_t>(r)]]);
  return a;
}

namespace detail {

/// Minimizer of objective k over `cands`; ties by lexicographic order.
inline std::size_t argmin(const Evaluation& ev, int k, const std::vector<std::size_t>& cands) {
  std::size_t best = cands.front();
  for (std::size_t c : cands) {
    if (ev.objective_less(k, c, best)) best = c;
    else if (!ev.objective_less(k, best, c) && ev.solution(c) < ev.solution(best)) best = c;
  }
  return best;
}

inline std::size_t member_index(const Evaluation& ev, const Solution& x) {
  auto idx = ev.index_of(x);
  require(idx.has_value(), "solution is not a member of the instance's set");
  return *idx;
}

}  // namespace detail

struct WitnessRound {
  int t = 0;
  bool winner_set_empty = false;  // C_t was empty
  Solution vector;                // x^(t); a constructed trivial winner when C_t was empty
  int index = -1;                 // i_t appended in this round, -1 when none
  IndexTuple indices;             // running tuple after the round
};

struct WitnessTrace {
  std::vector<WitnessRound> rounds;  // t = d, d-1, ..., in order
  std::optional<Solution> result;    // x^(0), empty for the failure sentinel
  IndexTuple final_indices;          // the tuple at termination
};

/// The witness procedure for a solution x with forbidden indices I.
/// Round t (from d down to 0) collects the members of R that beat x strictly
/// in objectives 1..t, picks the best of them in objective t+1 (the
/// adversarial objective when t = d) and fixes the first index where it
/// differs from x. Without such a member a fresh index is fixed instead.
inline WitnessTrace witness(const Evaluation& ev, const Solution& x, const IndexTuple& I) {
  const int d = ev.d(), n = ev.n();
  const std::size_t xi = detail::member_index(ev, x);
  require(I.distinct(), "forbidden indices must be distinct");
  for (int i : I) require(i >= 0 && i < n, "forbidden index out of range");
  require(static_cast<int>(I.size()) <= n - (d + 1), "too many forbidden indices");

  WitnessTrace trace;
  IndexTuple idx = I;
  std::uint64_t mask = idx.mask();
  std::vector<std::size_t> R, C;
  for (std::size_t s = 0; s < ev.size(); ++s)
    if (ev.solution(s).agrees_on(x, mask)) R.push_back(s);

  for (int t = d; t >= 0; --t) {
    C.clear();
    for (std::size_t z : R) {
      bool beats = true;
      for (int k = 0; k < t && beats; ++k) beats = ev.value(z, k) < ev.value(xi, k);
      if (beats) C.push_back(z);
    }
    WitnessRound round;
    round.t = t;
    round.winner_set_empty = C.empty();
    if (!C.empty()) {
      std::size_t best = detail::argmin(ev, t, C);
      round.vector = ev.solution(best);
      if (t == 0) {
        round.indices = idx;
        trace.rounds.push_back(round);
        trace.result = round.vector;
        trace.final_indices = idx;
        return trace;
      }
      round.index = x.first_difference(round.vector);
      idx.push_back(round.index);
      mask |= Solution::bit(round.index);
      std::vector<std::size_t> next;
      for (std::size_t z : R)
        if (ev.solution(z).agrees_on(x, mask) && ev.objective_less(t, z, best)) next.push_back(z);
      R.swap(next);
    } else if (t > 0) {
      round.index = first_free_index(mask, n);
      require(round.index >= 0, "no free index left");
      idx.push_back(round.index);
      mask |= Solution::bit(round.index);
      round.vector = x.flipped(round.index);
      std::erase_if(R, [&](std::size_t z) { return !ev.solution(z).agrees_on(x, mask); });
    }
    round.indices = idx;
    trace.rounds.push_back(round);
  }
  trace.final_indices = idx;
  return trace;
}

inline WitnessTrace witness(const Instance& inst, const Solution& x, const IndexTuple& I = {}) {
  return witness(Evaluation(inst), x, I);
}

/// The (V, I)-certificate of x: the tuple I* = (I, i_d, ..., i_1, i*) and
/// the vectors x^(d), ..., x^(0) of the witness run.
struct Certificate {
  int d = 0;
  int n = 0;
  IndexTuple input;               // I
  IndexTuple indices;             // I*
  std::vector<Solution> columns;  // x^(d), ..., x^(0); column c holds x^(d-c)

  int pivot() const { return indices.back(); }
  const Solution& vector_at(int t) const { return columns[static_cast<std::size_t>(d - t)]; }
  BitMatrix restricted() const { return restrict_columns(columns, indices); }
  BitMatrix restricted_to(const IndexTuple& J) const { return restrict_columns(columns, J); }
};

inline Certificate extract_certificate(const Evaluation& ev, const Solution& x, const IndexTuple& I = {}) {
  WitnessTrace tr = witness(ev, x, I);
  require(tr.result.has_value(), "the witness run failed; x is not Pareto-optimal");
  Certificate cert;
  cert.d = ev.d();
  cert.n = ev.n();
  cert.input = I;
  cert.indices = tr.final_indices;
  cert.indices.push_back(first_free_index(cert.indices.mask(), ev.n()));
  for (const WitnessRound& r : tr.rounds) cert.columns.push_back(r.vector);
  return cert;
}

/// Checks the block form of a certificate matrix: rows from I equal x in
/// every column; in the remaining rows (one per round plus i*) column c
/// agrees with x above row c, is the complement of x at row c and is
/// unconstrained below; the last column is x.
inline bool has_certificate_form(const BitMatrix& A, std::size_t prefix, const Solution& x, const IndexTuple& J) {
  const int d1 = A.cols;
  if (A.rows != static_cast<int>(prefix) + d1 || static_cast<int>(J.size()) != A.rows) return false;
  for (int r = 0; r < A.rows; ++r) {
    const bool xv = x[J[static_cast<std::size_t>(r)]];
    const int s = r - static_cast<int>(prefix);  // position within the trailing block, negative for I
    for (int c = 0; c < d1; ++c) {
      if (s < 0 || c > s) {
        if (A(r, c) != xv) return false;
      } else if (c == s) {
        bool want = (c == d1 - 1) ? xv : !xv;
        if (A(r, c) != want) return false;
      }
    }
  }
  return true;
}

inline bool has_certificate_form(const Certificate& cert, const Solution& x) {
  return cert.indices.size() == cert.input.size() + static_cast<std::size_t>(cert.d) + 1 && cert.indices.distinct() &&
         has_certificate_form(cert.restricted(), cert.input.size(), x, cert.indices);
}

/// u*(J, A): the complement of x at the pivot index, x on the rest of J and
/// zero elsewhere, reading x|_J from the last column of A.
inline Solution shift_vector(int n, const IndexTuple& J, const BitMatrix& A, int pivot) {
  require(A.rows == static_cast<int>(J.size()) && A.cols >= 1, "matrix does not match the index tuple");
  require(J.contains(pivot), "pivot must belong to the index tuple");
  Solution u(n);
  for (int r = 0; r < A.rows; ++r) {
    int j = J[static_cast<std::size_t>(r)];
    bool xj = A(r, A.cols - 1);
    u = u.with(j, j == pivot ? !xj : xj);
  }
  return u;
}

inline Solution shift_vector(const Certificate& cert) {
  return shift_vector(cert.n, cert.indices, cert.restricted(), cert.pivot());
}

/// p^(t) = a^(t) - u|_J and the matrices Q_1..Q_d describing which linear
/// combinations of V^k on J a reconstruction run reads.
struct ShiftData {
  Solution u;
  int d = 0;
  std::vector<std::vector<long long>> p;  // p[t], t = 0..d
  std::vector<IntMatrix> q;               // q[k-1], k = 1..d

  const IntMatrix& q_matrix(int k) const { return q[static_cast<std::size_t>(k - 1)]; }

  /// [Q_k | p^(0)].
  IntMatrix q_prime(int k) const {
    std::vector<std::vector<long long>> cols;
    const IntMatrix& qk = q_matrix(k);
    for (int c = 0; c < qk.cols; ++c) cols.push_back(qk.column(c));
    cols.push_back(p[0]);
    return IntMatrix::from_columns(qk.rows, cols);
  }

  /// Block-diagonal matrix of [Q_k | p^(0)] over k = 1..d.
  IntMatrix q_prime_block() const {
    std::vector<IntMatrix> blocks;
    for (int k = 1; k <= d; ++k) blocks.push_back(q_prime(k));
    return IntMatrix::block_diagonal(blocks);
  }
};

inline std::vector<long long> difference(const std::vector<long long>& a, const std::vector<long long>& b) {
  std::vector<long long> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

/// Q_k = [p^(d), ..., p^(k), p^(k-2) - p^(k-1), ..., p^(0) - p^(k-1)].
inline ShiftData build_qk(const IndexTuple& J, const BitMatrix& A, const Solution& u) {
  require(A.rows == static_cast<int>(J.size()) && A.cols >= 2, "matrix needs |J| rows and d+1 >= 2 columns");
  ShiftData sd;
  sd.u = u;
  sd.d = A.cols - 1;
  const int rows = A.rows;
  sd.p.assign(static_cast<std::size_t>(sd.d + 1), std::vector<long long>(static_cast<std::size_t>(rows)));
  for (int t = 0; t <= sd.d; ++t)
    for (int r = 0; r < rows; ++r)
      sd.p[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)] =
          static_cast<long long>(A(r, sd.d - t)) - static_cast<long long>(u[J[static_cast<std::size_t>(r)]]);
  for (int k = 1; k <= sd.d; ++k) {
    std::vector<std::vector<long long>> cols;
    for (int t = sd.d; t >= k; --t) cols.push_back(sd.p[static_cast<std::size_t>(t)]);
    for (int t = k - 2; t >= 0; --t)
      cols.push_back(difference(sd.p[static_cast<std::size_t>(t)], sd.p[static_cast<std::size_t>(k - 1)]));
    sd.q.push_back(IntMatrix::from_columns(rows, cols));
  }
  return sd;
}

/// V(x - u) for the linear objectives, computed as Vx - Vu.
inline std::vector<double> shifted_values(const Evaluation& ev, const Solution& x, const Solution& u) {
  std::size_t xi = detail::member_index(ev, x);
  std::vector<double> v(static_cast<std::size_t>(ev.d()));
  for (int k = 0; k < ev.d(); ++k) v[static_cast<std::size_t>(k)] = ev.value(xi, k) - ev.instance().dot(k, u);
  return v;
}

/// Corner of the eps-box containing V(x - u).
inline std::vector<double> box_of(const Evaluation& ev, const EpsilonGrid& grid, const Solution& x, const Solution& u) {
  return grid.corner(shifted_values(ev, x, u));
}

/// Replays a witness run from a certificate matrix A (rows J) and the corner
/// b of the box of x - u. Returns the reconstructed solution or nothing
/// when every path fails.
inline std::optional<Solution> witness_reconstruct(const Evaluation& ev, const IndexTuple& J, const BitMatrix& A,
                                                   const std::vector<double>& corner, const Solution& u) {
  const int d = ev.d(), n = ev.n();
  require(A.rows == static_cast<int>(J.size()) && A.cols == d + 1, "certificate matrix must be |J| x (d+1)");
  require(corner.size() == static_cast<std::size_t>(d), "box corner must have d entries");
  require(J.distinct(), "index tuple entries must be distinct");
  const std::uint64_t jmask = J.mask();
  std::vector<Solution> a(static_cast<std::size_t>(d + 1));  // a[t] = a^(t)
  for (int t = 0; t <= d; ++t) a[static_cast<std::size_t>(t)] = A.column_on(J, d - t, n);
  std::vector<double> vu(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) vu[static_cast<std::size_t>(k)] = ev.instance().dot(k, u);

  // Bit t of `match` records z in S_J(a^(t)).
  auto matches = [&](std::size_t z) {
    unsigned m = 0;
    for (int t = 0; t <= d; ++t)
      if (ev.solution(z).agrees_on(a[static_cast<std::size_t>(t)], jmask)) m |= 1u << t;
    return m;
  };
  std::vector<std::pair<std::size_t, unsigned>> R, next;
  for (std::size_t s = 0; s < ev.size(); ++s)
    if (unsigned m = matches(s)) R.push_back({s, m});

  std::vector<std::size_t> C;
  for (int t = d; t >= 0; --t) {
    C.clear();
    for (auto [z, m] : R) {
      if (!(m & (1u << t))) continue;
      bool inside = true;
      for (int k = 0; k < t && inside; ++k)
        inside = ev.value(z, k) - vu[static_cast<std::size_t>(k)] <= corner[static_cast<std::size_t>(k)];
      if (inside) C.push_back(z);
    }
    const unsigned earlier = (1u << t) - 1;  // t' = 0..t-1
    next.clear();
    if (!C.empty()) {
      std::size_t best = detail::argmin(ev, t, C);
      if (t == 0) return ev.solution(best);
      for (auto [z, m] : R)
        if ((m & earlier) && ev.objective_less(t, z, best)) next.push_back({z, m});
    } else {
      for (auto [z, m] : R)
        if (m & earlier) next.push_back({z, m});
    }
    R.swap(next);
  }
  return std::nullopt;
}

/// Certificates of c solutions taken one after another, each call
/// forbidding the indices fixed by the calls before it.
struct MultiCertificate {
  IndexTuple indices;                     // I*_c
  std::vector<Certificate> certificates;  // certificate l with input I*_{l-1}

  std::size_t size() const { return certificates.size(); }
  BitMatrix restricted(std::size_t l) const { return certificates[l].restricted_to(indices); }
  Solution shift(std::size_t l) const {
    const Certificate& c = certificates[l];
    return shift_vector(c.n, indices, restricted(l), c.pivot());
  }
  ShiftData shift_data(std::size_t l) const { return build_qk(indices, restricted(l), shift(l)); }

  /// Block-diagonal over k of [Q_k^(1), p^(1,0), ..., Q_k^(c), p^(c,0)].
  IntMatrix stacked_q_prime() const {
    const int d = certificates.front().d;
    std::vector<ShiftData> sd;
    for (std::size_t l = 0; l < size(); ++l) sd.push_back(shift_data(l));
    std::vector<IntMatrix> blocks;
    for (int k = 1; k <= d; ++k) {
      std::vector<std::vector<long long>> cols;
      for (const ShiftData& s : sd) {
        const IntMatrix& q = s.q_matrix(k);
        for (int c = 0; c < q.cols; ++c) cols.push_back(q.column(c));
        cols.push_back(s.p[0]);
      }
      blocks.push_back(IntMatrix::from_columns(static_cast<int>(indices.size()), cols));
    }
    return IntMatrix::block_diagonal(blocks);
  }
};

inline MultiCertificate witness_multi(const Evaluation& ev, const std::vector<Solution>& xs) {
  const int d = ev.d();
  require(!xs.empty(), "need at least one solution");
  require(static_cast<int>(xs.size()) * (d + 1) <= ev.n(), "c * (d+1) must not exceed n");
  MultiCertificate mc;
  for (const Solution& x : xs) {
    Certificate c = extract_certificate(ev, x, mc.indices);
    mc.indices = c.indices;
    mc.certificates.push_back(std::move(c));
  }
  return mc;
}

/// Alternative coefficients that keep V outside the given rows and every
/// product V^k|_{rows_k} . q for the columns q of constraints[k] unchanged.
/// Each constraints[k] must have |rows_k| rows and |rows_k| - 1 independent
/// columns, so the admissible changes of row k form a line; a random point
/// on that line keeping all coefficients in [-1, 1] is chosen.
inline std::vector<double> masked_coefficients(const Instance& inst, const std::vector<IndexTuple>& rows,
                                               const std::vector<IntMatrix>& constraints, Stream& rng) {
  require(rows.size() == static_cast<std::size_t>(inst.d()) && constraints.size() == rows.size(),
          "one row tuple and constraint matrix per objective");
  std::vector<double> coef = inst.coefficients();
  const int n = inst.n();
  for (int k = 0; k < inst.d(); ++k) {
    const IndexTuple& J = rows[static_cast<std::size_t>(k)];
    const IntMatrix& M = constraints[static_cast<std::size_t>(k)];
    require(M.rows == static_cast<int>(J.size()), "constraint rows must match the index tuple");
    if (J.empty()) continue;
    std::vector<double> dir(J.size());
    if (M.cols == 0) {
      for (double& v : dir) v = rng.uniform(-1, 1);
    } else {
      auto y = left_null_vector(M);
      double scale = 0;
      for (std::size_t r = 0; r < y.size(); ++r) {
        dir[r] = y[r].convert_to<double>();
        scale = std::max(scale, std::abs(dir[r]));
      }
      require(scale > 0, "constraint matrix is rank deficient");
      for (double& v : dir) v /= scale;
    }
    double lo = -0.5, hi = 0.5;
    for (std::size_t r = 0; r < J.size(); ++r) {
      double v = coef[static_cast<std::size_t>(k) * n + J[r]];
      if (dir[r] > 0) lo = std::max(lo, (-1 - v) / dir[r]), hi = std::min(hi, (1 - v) / dir[r]);
      if (dir[r] < 0) lo = std::max(lo, (1 - v) / dir[r]), hi = std::min(hi, (-1 - v) / dir[r]);
    }
    double alpha = rng.uniform(lo, hi);
    for (std::size_t r = 0; r < J.size(); ++r) {
      double& v = coef[static_cast<std::size_t>(k) * n + J[r]];
      v = std::clamp(v + alpha * dir[r], -1.0, 1.0);
    }
  }
  return coef;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_WITNESS_HPP
