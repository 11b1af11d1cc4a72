#ifndef SMOOTHPO_SOLUTION_HPP
#define SMOOTHPO_SOLUTION_HPP

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smoothpo {

/// Raised when a caller violates an operation's documented precondition.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an enumeration would exceed its configured size cap.
class cap_exceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline void require(bool cond, const char* what) {
  if (!cond) throw precondition_error(what);
}

/// Fixed-length bit vector with at most 64 entries.
///
/// Index 0 is stored in the most significant bit of the word, so comparing
/// two solutions of equal length as integers is lexicographic order with
/// index 0 most significant.
class Solution {
 public:
  static constexpr int max_size = 64;

  Solution() = default;
  explicit Solution(int n, std::uint64_t word = 0) : n_(n), word_(word & prefix_mask(n)) {
    require(n >= 0 && n <= max_size, "solution length must lie in [0, 64]");
  }

  static Solution from_string(std::string_view bits) {
    Solution s(static_cast<int>(bits.size()));
    for (int i = 0; i < s.n_; ++i) {
      char c = bits[static_cast<std::size_t>(i)];
      require(c == '0' || c == '1', "bit strings may only contain '0' and '1'");
      if (c == '1') s.word_ |= bit(i);
    }
    return s;
  }

  /// The solution whose 0/1 entries are `bits` in order.
  static Solution from_bits(std::initializer_list<int> bits) {
    Solution s(static_cast<int>(bits.size()));
    int i = 0;
    for (int b : bits) s = s.with(i++, b != 0);
    return s;
  }

  static constexpr std::uint64_t bit(int i) { return std::uint64_t{1} << (63 - i); }
  static constexpr std::uint64_t prefix_mask(int n) {
    return n == 0 ? 0 : (n >= 64 ? ~std::uint64_t{0} : ~(~std::uint64_t{0} >> n));
  }

  int size() const { return n_; }
  std::uint64_t word() const { return word_; }
  bool operator[](int i) const { return (word_ & bit(i)) != 0; }
  int count() const { return std::popcount(word_); }

  Solution with(int i, bool v) const {
    Solution s = *this;
    s.word_ = v ? (word_ | bit(i)) : (word_ & ~bit(i));
    return s;
  }
  Solution flipped(int i) const {
    Solution s = *this;
    s.word_ ^= bit(i);
    return s;
  }
  Solution masked(std::uint64_t mask) const { return Solution(n_, word_ & mask); }

  /// True iff this and `other` agree on every index set in `mask`.
  bool agrees_on(const Solution& other, std::uint64_t mask) const {
    return ((word_ ^ other.word_) & mask) == 0;
  }

  /// First index in `mask` where the two vectors differ, or -1.
  int first_difference(const Solution& other, std::uint64_t mask = ~std::uint64_t{0}) const {
    std::uint64_t diff = (word_ ^ other.word_) & mask & prefix_mask(n_);
    return diff == 0 ? -1 : std::countl_zero(diff);
  }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i)
      if ((*this)[i]) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  friend bool operator==(const Solution&, const Solution&) = default;
  friend std::strong_ordering operator<=>(const Solution& a, const Solution& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.word_ <=> b.word_;
  }

 private:
  int n_ = 0;
  std::uint64_t word_ = 0;
};

/// Calls `f(i)` for every set index of `mask` in increasing order.
template <class F>
void for_each_index(std::uint64_t mask, F&& f) {
  while (mask != 0) {
    int i = std::countl_zero(mask);
    f(i);
    mask &= ~Solution::bit(i);
  }
}

/// Ordered list of indices supporting the tuple operations used by the
/// witness procedures: concatenation, ordered difference and intersection.
class IndexTuple {
 public:
  IndexTuple() = default;
  IndexTuple(std::initializer_list<int> idx) : idx_(idx) {}
  explicit IndexTuple(std::vector<int> idx) : idx_(std::move(idx)) {}

  /// The tuple (0, 1, ..., n-1).
  static IndexTuple range(int n) {
    IndexTuple t;
    for (int i = 0; i < n; ++i) t.idx_.push_back(i);
    return t;
  }

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  int operator[](std::size_t i) const { return idx_[i]; }
  int back() const { return idx_.back(); }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }
  const std::vector<int>& values() const { return idx_; }

  void push_back(int i) { idx_.push_back(i); }

  bool contains(int i) const { return std::find(idx_.begin(), idx_.end(), i) != idx_.end(); }
  bool distinct() const {
    std::vector<int> s = idx_;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
  }
  /// Position of index `i` in the tuple, or -1.
  int position(int i) const {
    auto it = std::find(idx_.begin(), idx_.end(), i);
    return it == idx_.end() ? -1 : static_cast<int>(it - idx_.begin());
  }

  /// Concatenation: this followed by the entries of `other` not already present.
  IndexTuple join(const IndexTuple& other) const {
    IndexTuple r = *this;
    for (int i : other)
      if (!r.contains(i)) r.idx_.push_back(i);
    return r;
  }
  /// Entries of this not present in `other`, order preserved.
  IndexTuple minus(const IndexTuple& other) const {
    IndexTuple r;
    for (int i : idx_)
      if (!other.contains(i)) r.idx_.push_back(i);
    return r;
  }
  /// Entries of this also present in `other`, order of this preserved.
  IndexTuple intersect(const IndexTuple& other) const {
    IndexTuple r;
    for (int i : idx_)
      if (other.contains(i)) r.idx_.push_back(i);
    return r;
  }
  bool subset_of(const IndexTuple& other) const {
    return std::all_of(idx_.begin(), idx_.end(), [&](int i) { return other.contains(i); });
  }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int i : idx_) m |= Solution::bit(i);
    return m;
  }

  friend bool operator==(const IndexTuple&, const IndexTuple&) = default;

 private:
  std::vector<int> idx_;
};

/// Smallest index in [0, n) not contained in `mask`, or -1 if none.
inline int first_free_index(std::uint64_t mask, int n) {
  std::uint64_t free = ~mask & Solution::prefix_mask(n);
  return free == 0 ? -1 : std::countl_zero(free);
}

}  // namespace smoothpo

#endif  // SMOOTHPO_SOLUTION_HPP
