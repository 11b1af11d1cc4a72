#ifndef SMOOTHPO_DENSITIES_HPP
#define SMOOTHPO_DENSITIES_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "smoothpo/rng.hpp"
#include "smoothpo/solution.hpp"

namespace smoothpo {

struct Interval {
  double lo = 0;
  double hi = 0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class DensityFamily { uniform, triangular, truncated_gaussian, bimodal };

inline const char* family_name(DensityFamily f) {
  switch (f) {
    case DensityFamily::uniform: return "uniform";
    case DensityFamily::triangular: return "triangular";
    case DensityFamily::truncated_gaussian: return "tgauss";
    case DensityFamily::bimodal: return "bimodal";
  }
  return "?";
}

/// A bounded density supported inside [-1, 1].
class DensitySpec {
 public:
  static DensitySpec uniform(double center, double width) {
    require(width > 0, "uniform width must be positive");
    DensitySpec s(DensityFamily::uniform, center, width);
    s.check_support({center - width / 2, center + width / 2});
    return s;
  }

  static DensitySpec triangular(double peak, double halfwidth) {
    require(halfwidth > 0, "triangular half-width must be positive");
    DensitySpec s(DensityFamily::triangular, peak, halfwidth);
    s.check_support({peak - halfwidth, peak + halfwidth});
    return s;
  }

  /// Normal(mean, sigma) conditioned on [-1, 1].
  static DensitySpec truncated_gaussian(double mean, double sigma) {
    require(sigma > 0, "truncated gaussian sigma must be positive");
    DensitySpec s(DensityFamily::truncated_gaussian, mean, sigma);
    s.mass_ = normal_cdf((1 - mean) / sigma) - normal_cdf((-1 - mean) / sigma);
    require(s.mass_ > 1e-12, "truncated gaussian has no mass on [-1, 1]");
    return s;
  }

  /// Two disjoint uniform blocks carrying mass 1/2 each.
  static DensitySpec bimodal(Interval first, Interval second) {
    if (second.lo < first.lo) std::swap(first, second);
    require(first.length() > 0 && second.length() > 0, "bimodal blocks must have positive length");
    require(first.hi < second.lo, "bimodal blocks must be disjoint");
    DensitySpec s(DensityFamily::bimodal, 0, 0);
    s.blocks_[0] = first;
    s.blocks_[1] = second;
    s.check_support({first.lo, second.hi});
    return s;
  }

  DensityFamily family() const { return family_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const Interval& block(int i) const { return blocks_[i]; }

  bool quasiconcave() const { return family_ != DensityFamily::bimodal; }

  Interval support() const {
    switch (family_) {
      case DensityFamily::uniform: return {a_ - b_ / 2, a_ + b_ / 2};
      case DensityFamily::triangular: return {a_ - b_, a_ + b_};
      case DensityFamily::truncated_gaussian: return {-1, 1};
      case DensityFamily::bimodal: return {blocks_[0].lo, blocks_[1].hi};
    }
    return {};
  }

  double pdf(double x) const {
    switch (family_) {
      case DensityFamily::uniform: return support().contains(x) ? 1 / b_ : 0;
      case DensityFamily::triangular: {
        double r = std::abs(x - a_);
        return r <= b_ ? (1 - r / b_) / b_ : 0;
      }
      case DensityFamily::truncated_gaussian: {
        if (x < -1 || x > 1) return 0;
        double z = (x - a_) / b_;
        return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2 * std::numbers::pi) * mass_);
      }
      case DensityFamily::bimodal:
        for (const Interval& blk : blocks_)
          if (blk.contains(x)) return 0.5 / blk.length();
        return 0;
    }
    return 0;
  }

  double cdf(double x) const {
    Interval s = support();
    if (x <= s.lo) return 0;
    if (x >= s.hi) return 1;
    switch (family_) {
      case DensityFamily::uniform: return (x - s.lo) / b_;
      case DensityFamily::triangular: {
        double t = (x - s.lo) / b_;
        return x <= a_ ? 0.5 * t * t : 1 - 0.5 * ((s.hi - x) / b_) * ((s.hi - x) / b_);
      }
      case DensityFamily::truncated_gaussian:
        return (normal_cdf((x - a_) / b_) - normal_cdf((-1 - a_) / b_)) / mass_;
      case DensityFamily::bimodal: {
        double c = 0;
        for (const Interval& blk : blocks_)
          c += 0.5 * std::clamp((x - blk.lo) / blk.length(), 0.0, 1.0);
        return c;
      }
    }
    return 0;
  }

  double mean() const {
    switch (family_) {
      case DensityFamily::uniform:
      case DensityFamily::triangular: return a_;
      case DensityFamily::truncated_gaussian: {
        double lo = (-1 - a_) / b_, hi = (1 - a_) / b_;
        return a_ + b_ * (normal_pdf(lo) - normal_pdf(hi)) / mass_;
      }
      case DensityFamily::bimodal:
        return 0.25 * (blocks_[0].lo + blocks_[0].hi + blocks_[1].lo + blocks_[1].hi);
    }
    return 0;
  }

  /// Supremum of the density.
  double phi() const {
    switch (family_) {
      case DensityFamily::uniform: return 1 / b_;
      case DensityFamily::triangular: return 1 / b_;
      case DensityFamily::truncated_gaussian: return pdf(std::clamp(a_, -1.0, 1.0));
      case DensityFamily::bimodal:
        return std::max(0.5 / blocks_[0].length(), 0.5 / blocks_[1].length());
    }
    return 0;
  }

  /// Inverse-CDF sampling except for the truncated gaussian, which uses
  /// rejection from a uniform proposal on [-1, 1].
  double sample(Stream& rng) const {
    switch (family_) {
      case DensityFamily::uniform: {
        Interval s = support();
        return std::min(s.lo + b_ * rng.uniform(), s.hi);
      }
      case DensityFamily::triangular: {
        double u = rng.uniform();
        return u < 0.5 ? a_ - b_ + b_ * std::sqrt(2 * u) : a_ + b_ - b_ * std::sqrt(2 * (1 - u));
      }
      case DensityFamily::truncated_gaussian: {
        double top = phi();
        for (;;) {
          double x = rng.uniform(-1, 1);
          if (rng.uniform() * top <= pdf(x)) return x;
        }
      }
      case DensityFamily::bimodal: {
        double u = 2 * rng.uniform();
        const Interval& blk = u < 1 ? blocks_[0] : blocks_[1];
        double t = u < 1 ? u : u - 1;
        return std::min(blk.lo + blk.length() * t, blk.hi);
      }
    }
    return 0;
  }

  /// The interval {x : pdf(x) > level}; for level 0 the closed support.
  /// Defined for quasiconcave families only.
  std::optional<Interval> superlevel(double level) const {
    require(quasiconcave(), "superlevel sets are intervals only for quasiconcave densities");
    if (level <= 0) return support();
    if (level >= phi()) return std::nullopt;
    switch (family_) {
      case DensityFamily::uniform: return support();
      case DensityFamily::triangular: {
        double r = b_ * (1 - level * b_);
        return Interval{a_ - r, a_ + r};
      }
      case DensityFamily::truncated_gaussian: {
        double arg = level * b_ * std::sqrt(2 * std::numbers::pi) * mass_;
        double r = b_ * std::sqrt(-2 * std::log(arg));
        Interval iv{std::max(-1.0, a_ - r), std::min(1.0, a_ + r)};
        if (iv.lo >= iv.hi) return std::nullopt;
        return iv;
      }
      case DensityFamily::bimodal: break;
    }
    return std::nullopt;
  }

  friend bool operator==(const DensitySpec& x, const DensitySpec& y) {
    return x.family_ == y.family_ && x.a_ == y.a_ && x.b_ == y.b_ && x.blocks_[0] == y.blocks_[0] &&
           x.blocks_[1] == y.blocks_[1];
  }

  static double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
  static double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi); }

 private:
  DensitySpec(DensityFamily f, double a, double b) : family_(f), a_(a), b_(b) {}

  void check_support(Interval s) const {
    require(s.lo >= -1 && s.hi <= 1, "density support must lie inside [-1, 1]");
  }

  DensityFamily family_;
  double a_;  // center / peak / mean
  double b_;  // width / half-width / sigma
  double mass_ = 1;
  Interval blocks_[2]{};
};

/// A density from `family` with supremum (about) `phi`, placed at `center`.
/// Uniform and triangular hit phi exactly; the truncated gaussian picks
/// sigma by bisection so its truncated peak lands on phi from below;
/// bimodal splits the mass between blocks of width 1/(2*phi) placed as far
/// apart as [-1, 1] allows. `center` is clamped so the support fits.
inline DensitySpec density_with_phi(DensityFamily family, double phi, double center) {
  require(phi >= 0.5, "phi must be at least 1/2 for a density on [-1, 1]");
  switch (family) {
    case DensityFamily::uniform: {
      double w = 1 / phi;
      return DensitySpec::uniform(std::clamp(center, -1 + w / 2, 1 - w / 2), w);
    }
    case DensityFamily::triangular: {
      double h = 1 / phi;
      return DensitySpec::triangular(std::clamp(center, -1 + h, 1 - h), h);
    }
    case DensityFamily::truncated_gaussian: {
      // truncation raises the peak, so bisect on sigma until it matches phi
      const double mu = std::clamp(center, -1.0, 1.0);
      double lo = 1 / (phi * std::sqrt(2 * std::numbers::pi)), hi = lo;
      while (DensitySpec::truncated_gaussian(mu, hi).phi() > phi && hi < 1e6) hi *= 2;
      for (int it = 0; it < 200 && lo < hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (DensitySpec::truncated_gaussian(mu, mid).phi() > phi ? lo : hi) = mid;
      }
      return DensitySpec::truncated_gaussian(mu, hi);
    }
    case DensityFamily::bimodal: {
      require(phi >= 1, "bimodal densities need phi >= 1");
      double w = 1 / (2 * phi);
      return DensitySpec::bimodal({-1, -1 + w}, {1 - w, 1});
    }
  }
  throw precondition_error("unknown density family");
}

struct Rectangle {
  double height = 0;
  Interval base;
};

/// Rounded-up density written as a stack of rectangles.
struct Staircase {
  double delta = 0;
  std::vector<Rectangle> rectangles;

  double height_at(double x) const {
    double h = 0;
    for (const Rectangle& r : rectangles)
      if (r.base.contains(x)) h += r.height;
    return h;
  }
  double total_height() const {
    double h = 0;
    for (const Rectangle& r : rectangles) h += r.height;
    return h;
  }
  double mass() const {
    double m = 0;
    for (const Rectangle& r : rectangles) m += r.height * r.base.length();
    return m;
  }
};

/// Decomposes ceil(f/delta)*delta into rectangles of height delta, one per
/// level, each based on the superlevel set {f > (j-1)*delta}.
inline Staircase staircase_decompose(const DensitySpec& spec, double delta) {
  require(delta > 0, "staircase resolution must be positive");
  require(spec.quasiconcave(), "staircase decomposition needs a quasiconcave density");
  Staircase st{delta, {}};
  double levels = std::ceil(spec.phi() / delta);
  for (int j = 1; j <= static_cast<int>(levels); ++j) {
    auto base = spec.superlevel((j - 1) * delta);
    if (base && base->length() > 0) st.rectangles.push_back({delta, *base});
  }
  return st;
}

/// Per-coefficient perturbation layout: entry (k, i) is either a density or
/// deterministically zero.
class PerturbationSpec {
 public:
  PerturbationSpec() = default;
  PerturbationSpec(int d, int n) : d_(d), n_(n), entries_(static_cast<std::size_t>(d) * n) {
    require(d >= 1 && n >= 1 && n <= Solution::max_size, "perturbation grid needs d >= 1 and 1 <= n <= 64");
  }

  int d() const { return d_; }
  int n() const { return n_; }

  const std::optional<DensitySpec>& at(int k, int i) const { return entries_[index(k, i)]; }
  void set(int k, int i, std::optional<DensitySpec> spec) { entries_[index(k, i)] = std::move(spec); }

  /// Columns with a density in objective k.
  std::uint64_t perturbed_mask(int k) const {
    std::uint64_t m = 0;
    for (int i = 0; i < n_; ++i)
      if (at(k, i)) m |= Solution::bit(i);
    return m;
  }

  double phi() const {
    double p = 0;
    for (const auto& e : entries_)
      if (e) p = std::max(p, e->phi());
    return p;
  }

  bool quasiconcave() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return !e || e->quasiconcave(); });
  }

  /// Every column is perturbed in exactly one objective.
  bool zp_normal() const {
    for (int i = 0; i < n_; ++i) {
      int c = 0;
      for (int k = 0; k < d_; ++k) c += at(k, i) ? 1 : 0;
      if (c != 1) return false;
    }
    return true;
  }

  /// The classes P_k = {i : entry (k, i) perturbed} of a normal-form spec.
  std::vector<IndexTuple> partition() const {
    require(zp_normal(), "partition is defined for normal-form specs only");
    std::vector<IndexTuple> p(static_cast<std::size_t>(d_));
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < d_; ++k)
        if (at(k, i)) p[static_cast<std::size_t>(k)].push_back(i);
    return p;
  }

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;

 private:
  std::size_t index(int k, int i) const {
    require(k >= 0 && k < d_ && i >= 0 && i < n_, "perturbation entry out of range");
    return static_cast<std::size_t>(k) * n_ + i;
  }

  int d_ = 0;
  int n_ = 0;
  std::vector<std::optional<DensitySpec>> entries_;
};

/// Spec where every coefficient uses the same density family and phi, with
/// centers drawn uniformly from the stream.
inline PerturbationSpec full_spec(int d, int n, DensityFamily family, double phi, Stream& rng) {
  PerturbationSpec spec(d, n);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < n; ++i) spec.set(k, i, density_with_phi(family, phi, rng.uniform(-1, 1)));
  return spec;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_DENSITIES_HPP
