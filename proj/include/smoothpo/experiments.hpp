#ifndef SMOOTHPO_EXPERIMENTS_HPP
#define SMOOTHPO_EXPERIMENTS_HPP

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smoothpo/bounds.hpp"
#include "smoothpo/epsilon.hpp"
#include "smoothpo/generators.hpp"
#include "smoothpo/pareto.hpp"

namespace smoothpo {

inline constexpr const char* library_version = "0.1.0";
inline constexpr const char* sweep_schema = "smoothpo-sweep-v1";

enum class Family { knapsack, hypercube, zp };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::knapsack: return "knapsack";
    case Family::hypercube: return "hypercube";
    case Family::zp: return "zp";
  }
  return "?";
}

struct ExperimentConfig {
  Family family = Family::knapsack;
  DensityFamily density = DensityFamily::uniform;
  std::vector<int> n_list{8};
  std::vector<double> phi_list{1.0};
  int d = 1;
  int c = 2;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  Engine engine = Engine::automatic;
  std::size_t cap = std::size_t{1} << 20;
  int workers = 1;
  // zp family only: pool size per class and number of solutions
  int zp_pool = 4;
  std::size_t zp_set_size = 200;

  void validate() const {
    require(!n_list.empty() && !phi_list.empty(), "n and phi lists must be nonempty");
    require(trials >= 1, "trials must be at least 1");
    require(d >= 1 && c >= 1, "d and c must be positive");
    for (int n : n_list) require(n >= d + 1 && n <= 62, "every n must lie in [d+1, 62]");
    for (double p : phi_list) require(p >= 1, "every phi must be at least 1");
    if (family == Family::zp) for (int n : n_list) require(n >= 2 * d, "zp family needs at least two indices per class");
  }
};

/// Size of the feasible set of the configured family at n.
inline double family_size(const ExperimentConfig& cfg, int n) {
  if (cfg.family == Family::zp) return static_cast<double>(cfg.zp_set_size);
  return std::ldexp(1.0, n);
}

/// The adversary's fixed choices for a cell. They depend on (seed, n) only,
/// so cells with different phi share centers, profits and feasible sets.
inline Model make_model(const ExperimentConfig& cfg, int n, double phi) {
  Stream rng(derive_seed(cfg.seed, {0x6d6f64656cULL, static_cast<std::uint64_t>(n)}));
  switch (cfg.family) {
    case Family::knapsack: return knapsack_model(n, cfg.d, cfg.density, phi, rng);
    case Family::hypercube: {
      auto set = std::make_shared<const SolutionSet>(SolutionSet::hypercube(n));
      PerturbationSpec spec = full_spec(cfg.d, n, cfg.density, phi, rng);
      return random_adversarial_model(set, std::move(spec), rng);
    }
    case Family::zp:
      return zp_pooled_model(contiguous_partition(n, cfg.d), cfg.zp_pool, cfg.zp_set_size, cfg.density, phi, rng);
  }
  throw precondition_error("unknown instance family");
}

inline std::vector<std::uint64_t> perturbed_masks(const PerturbationSpec& spec) {
  std::vector<std::uint64_t> m;
  for (int k = 0; k < spec.d(); ++k) m.push_back(spec.perturbed_mask(k));
  return m;
}

struct TrialOutcome {
  std::size_t po = 0;
  std::uint64_t resamples = 0;
};

/// Draws the instance of one trial. A draw in which two solutions that
/// differ on perturbed columns tie exactly in some objective is discarded
/// and redrawn from the next attempt's stream.
inline Instance draw_trial(const Model& model, std::uint64_t seed, std::uint64_t cell, std::uint64_t trial,
                           std::uint64_t* resamples = nullptr) {
  const auto masks = perturbed_masks(model.spec);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Stream rng(derive_seed(seed, {cell, trial, attempt}));
    Instance inst = draw(model, rng);
    Evaluation ev(inst);
    if (ev.size() < 2 || min_gap(ev, masks) > 0) return inst;
    if (resamples) ++*resamples;
  }
  throw std::runtime_error("repeated exact ties; the perturbation spec is degenerate");
}

inline std::uint64_t cell_key(int n, double phi) {
  return derive_seed(static_cast<std::uint64_t>(n), {std::bit_cast<std::uint64_t>(phi)});
}

/// PO counts of `trials` independent draws, in trial order.
inline std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg, const Model& model, std::uint64_t cell) {
  std::vector<TrialOutcome> out(cfg.trials);
  auto work = [&](std::uint64_t i) {
    std::uint64_t resamples = 0;
    Instance inst = draw_trial(model, cfg.seed, cell, i, &resamples);
    out[i] = {pareto_count(inst, cfg.engine, {cfg.cap, 1}), resamples};
  };
  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < cfg.trials; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex lock;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = static_cast<std::uint64_t>(w); i < cfg.trials; i += static_cast<std::uint64_t>(workers))
            work(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          failure = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  return out;
}

/// Sample mean of x^c with a normal-approximation 99% interval.
struct MomentEstimate {
  double mean = 0;
  double halfwidth = 0;
};

inline MomentEstimate sample_moment(const std::vector<TrialOutcome>& outcomes, int c) {
  const double T = static_cast<double>(outcomes.size());
  double s = 0, s2 = 0;
  for (const auto& o : outcomes) {
    double v = std::pow(static_cast<double>(o.po), c);
    s += v;
    s2 += v * v;
  }
  double mean = s / T;
  double var = T > 1 ? std::max(0.0, (s2 - T * mean * mean) / (T - 1)) : 0.0;
  return {mean, z99 * std::sqrt(var / T)};
}

inline MomentEstimate estimate_moment(const ExperimentConfig& cfg, int n, double phi, int c) {
  cfg.validate();
  Model model = make_model(cfg, n, phi);
  return sample_moment(run_trials(cfg, model, cell_key(n, phi)), c);
}

struct CellReport {
  int n = 0;
  double phi = 0;
  bool skipped = false;
  std::uint64_t trials = 0;
  std::uint64_t resamples = 0;
  MomentEstimate first;   // E[PO]
  double variance = 0;
  MomentEstimate moment;  // E[PO^c]
  std::size_t po_min = 0;
  std::size_t po_max = 0;
  double spec_phi = 0;                // supremum over the drawn densities
  long double log2_bound_first = 0;   // first-moment bound
  long double log2_bound_moment = 0;  // c-th moment bound
  std::vector<std::size_t> samples;

  bool jensen_ok(int c) const {
    if (skipped) return true;
    double lhs = moment.mean + moment.halfwidth + 1e-12 * std::abs(moment.mean);
    return lhs >= std::pow(first.mean, c);
  }
};

/// Least-squares slope of log(mean) against log(x).
struct Fit {
  std::string against;  // "n" or "phi"
  double fixed = 0;     // the other coordinate
  int points = 0;
  bool defined = false;
  double slope = 0;
  double stderr_ = std::nan("");
};

inline Fit fit_loglog(const std::vector<std::pair<double, double>>& xy, std::string against, double fixed) {
  Fit f{std::move(against), fixed, static_cast<int>(xy.size())};
  if (xy.size() < 2) return f;
  double mx = 0, my = 0;
  for (auto [x, y] : xy) mx += std::log(x), my += std::log(y);
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0) return f;
  f.defined = true;
  f.slope = sxy / sxx;
  if (xy.size() > 2) {
    double ssr = 0;
    for (auto [x, y] : xy) {
      double r = std::log(y) - my - f.slope * (std::log(x) - mx);
      ssr += r * r;
    }
    f.stderr_ = std::sqrt(ssr / static_cast<double>(xy.size() - 2) / sxx);
  }
  return f;
}

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellReport> cells;
  std::vector<Fit> fits;
  double wall_seconds = 0;
};

inline ExperimentReport sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg;
  for (int n : cfg.n_list)
    for (double phi : cfg.phi_list) {
      CellReport cell;
      cell.n = n;
      cell.phi = phi;
      if (family_size(cfg, n) > static_cast<double>(cfg.cap)) {
        cell.skipped = true;
        rep.cells.push_back(cell);
        continue;
      }
      Model model = make_model(cfg, n, phi);
      auto outcomes = run_trials(cfg, model, cell_key(n, phi));
      cell.trials = cfg.trials;
      cell.first = sample_moment(outcomes, 1);
      cell.moment = sample_moment(outcomes, cfg.c);
      cell.variance = std::pow(cell.first.halfwidth / z99, 2) * static_cast<double>(cfg.trials);
      cell.po_min = outcomes.front().po;
      for (const auto& o : outcomes) {
        cell.resamples += o.resamples;
        cell.po_min = std::min(cell.po_min, o.po);
        cell.po_max = std::max(cell.po_max, o.po);
        cell.samples.push_back(o.po);
      }
      cell.spec_phi = model.spec.phi();
      const bool qc = model.spec.quasiconcave();
      cell.log2_bound_first =
          bound_smoothed_po(n, cfg.d, cell.spec_phi, qc ? BoundVariant::moment_qc : BoundVariant::moment_general, 1).log2;
      cell.log2_bound_moment =
          bound_smoothed_po(n, cfg.d, cell.spec_phi, qc ? BoundVariant::moment_qc : BoundVariant::moment_general, cfg.c)
              .log2;
      rep.cells.push_back(cell);
    }
  auto usable = [](const CellReport& c) { return !c.skipped && c.first.mean > 0; };
  for (double phi : cfg.phi_list) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& c : rep.cells)
      if (c.phi == phi && usable(c)) xy.push_back({static_cast<double>(c.n), c.first.mean});
    rep.fits.push_back(fit_loglog(xy, "n", phi));
  }
  for (int n : cfg.n_list) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& c : rep.cells)
      if (c.n == n && usable(c)) xy.push_back({c.phi, c.first.mean});
    rep.fits.push_back(fit_loglog(xy, "phi", static_cast<double>(n)));
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_double(v); }

/// Frozen CSV layout; the wall-clock time is deliberately absent.
inline std::string sweep_csv(const ExperimentReport& rep) {
  const int c = rep.config.c;
  std::string out = "schema,kind,n,phi,trials,resamples,status,mean,mean_ci,variance,moment_c,moment_c_ci,c,"
                    "jensen_ok,po_min,po_max,spec_phi,log2_bound_first,log2_bound_moment_c,slope,slope_se,points\n";
  for (const CellReport& cell : rep.cells) {
    out += std::string(sweep_schema) + ",cell," + std::to_string(cell.n) + "," + format_double(cell.phi) + ",";
    if (cell.skipped) {
      out += ",,skipped,,,,,," + std::to_string(c) + ",,,,,,,,,\n";
      continue;
    }
    out += std::to_string(cell.trials) + "," + std::to_string(cell.resamples) + ",ok," + format_double(cell.first.mean) +
           "," + format_double(cell.first.halfwidth) + "," + format_double(cell.variance) + "," +
           format_double(cell.moment.mean) + "," + format_double(cell.moment.halfwidth) + "," + std::to_string(c) + "," +
           (cell.jensen_ok(c) ? "1" : "0") + "," + std::to_string(cell.po_min) + "," + std::to_string(cell.po_max) + "," +
           format_double(cell.spec_phi) + "," + format_double(static_cast<double>(cell.log2_bound_first)) + "," +
           format_double(static_cast<double>(cell.log2_bound_moment)) + ",,,\n";
  }
  for (const Fit& f : rep.fits) {
    out += std::string(sweep_schema) + ",fit_" + f.against + ",";
    out += f.against == "n" ? "," + format_double(f.fixed) : format_double(f.fixed) + ",";
    out += ",,," + std::string(f.defined ? "ok" : "undefined") + ",,,,,,,,,,,,,";
    out += (f.defined ? format_double(f.slope) : "") + "," + csv_number(f.stderr_) + "," + std::to_string(f.points) + "\n";
  }
  return out;
}

/// One row of the tail table.
struct TailRow {
  long double log2_multiple = 0;  // log2 k, threshold theta = k * s_1
  long double log2_threshold = 0;
  double empirical = 0;  // fraction of trials with PO >= theta
  double bound = 1;      // concentration bound at k (1 when k < 1)
  bool within() const { return empirical <= bound; }
};

struct TailReport {
  int n = 0;
  double phi = 0;
  long double log2_s1 = 0;
  std::vector<TailRow> rows;
  std::vector<std::size_t> samples;
  static constexpr const char* note =
      "smoke test: s_1 is astronomically large at desk scale, so tails above k >= 1 are expected to be zero";
};

/// Converts an absolute threshold to its log2 multiple of s_1.
inline long double log2_multiple_of(double theta, long double log2_s1) {
  return std::log2(static_cast<long double>(theta)) - log2_s1;
}

inline long double first_moment_log2_bound(const ExperimentConfig& cfg, const Model& model, int n) {
  bool qc = model.spec.quasiconcave();
  return bound_smoothed_po(n, cfg.d, model.spec.phi(), qc ? BoundVariant::moment_qc : BoundVariant::moment_general, 1).log2;
}

/// Empirical Pr[PO >= k s_1] at the first (n, phi) cell of the config for
/// each requested log2 k.
inline TailReport concentration_tail(const ExperimentConfig& cfg, const std::vector<long double>& log2_multiples) {
  cfg.validate();
  const int n = cfg.n_list.front();
  const double phi = cfg.phi_list.front();
  Model model = make_model(cfg, n, phi);
  auto outcomes = run_trials(cfg, model, cell_key(n, phi));
  TailReport rep;
  rep.n = n;
  rep.phi = phi;
  rep.log2_s1 = first_moment_log2_bound(cfg, model, n);
  for (const auto& o : outcomes) rep.samples.push_back(o.po);
  for (long double lk : log2_multiples) {
    TailRow row;
    row.log2_multiple = lk;
    row.log2_threshold = lk + rep.log2_s1;
    std::size_t above = 0;
    for (std::size_t po : rep.samples)
      if (std::log2(static_cast<long double>(po)) >= row.log2_threshold) ++above;
    row.empirical = static_cast<double>(above) / static_cast<double>(rep.samples.size());
    row.bound = lk >= 0 ? static_cast<double>(std::exp2(log2_concentration_bound(lk, cfg.d))) : 1.0;
    rep.rows.push_back(row);
  }
  return rep;
}

/// Path-trading model: one objective per AS, objective i perturbs exactly
/// the edges inside AS i; edges between ASes cost nothing. Edges without an
/// explicit density get a uniform density of width 1/phi around their
/// length, kept inside [0, 1]. The adversarial objective is the number of
/// edges of the path.
inline Model path_trade_model(const ASGraph& g, double phi) {
  require(phi >= 1, "phi must be at least 1");
  SolutionSet paths = valid_paths(g);
  const int k = g.as_count();
  // Instances need n >= d + 1; short graphs get never-perturbed padding columns.
  const int m = std::max(paths.n(), k + 1);
  auto set = std::make_shared<const SolutionSet>(
      m == paths.n() ? std::move(paths) : SolutionSet::explicit_set(m, [&] {
        std::vector<Solution> v;
        for (std::size_t s = 0; s < paths.size(); ++s) v.push_back(Solution(m, paths.at(s).word()));
        return v;
      }()));
  PerturbationSpec spec(k, m);
  for (int a = 0; a < k; ++a)
    for_each_index(g.intra_mask(a), [&](int e) {
      const ASGraph::Edge& edge = g.edges[static_cast<std::size_t>(e)];
      if (edge.density) {
        spec.set(a, e, edge.density);
      } else {
        double w = 1 / phi;
        spec.set(a, e, DensitySpec::uniform(std::clamp(edge.length, w / 2, 1 - w / 2), w));
      }
    });
  std::vector<double> adv(set->size());
  for (std::size_t s = 0; s < set->size(); ++s) adv[s] = set->at(s).count();
  return Model{set, std::move(adv), std::move(spec), std::nullopt};
}

struct PathTradeReport {
  std::size_t paths = 0;
  int objectives = 0;
  std::vector<std::size_t> po;
  MomentEstimate mean;
  std::size_t po_min = 0;
  std::size_t po_max = 0;
};

inline PathTradeReport path_trade_experiment(const ASGraph& g, double phi, std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 1, "trials must be at least 1");
  Model model = path_trade_model(g, phi);
  PathTradeReport rep;
  rep.paths = model.set->size();
  rep.objectives = model.d();
  std::vector<TrialOutcome> outcomes(trials);
  if (rep.paths > 0) {
    for (std::uint64_t i = 0; i < trials; ++i) {
      Instance inst = draw_trial(model, seed, 0x70617468ULL, i, &outcomes[i].resamples);
      outcomes[i].po = pareto_count(inst, Engine::bruteforce);
    }
  }
  for (const auto& o : outcomes) rep.po.push_back(o.po);
  rep.mean = sample_moment(outcomes, 1);
  rep.po_min = *std::min_element(rep.po.begin(), rep.po.end());
  rep.po_max = *std::max_element(rep.po.begin(), rep.po.end());
  return rep;
}

}  // namespace smoothpo

#endif  // SMOOTHPO_EXPERIMENTS_HPP
