#include "cli_commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "smoothpo/io.hpp"
#include "smoothpo/smoothpo.hpp"

namespace smoothpo::cli {

namespace {

struct violation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class E>
E parse_enum(const std::string& s, const std::map<std::string, E>& names, const char* what) {
  auto it = names.find(s);
  if (it == names.end()) throw precondition_error(std::string("unknown ") + what + " '" + s + "'");
  return it->second;
}

Family parse_family(const std::string& s) {
  return parse_enum<Family>(s, {{"knapsack", Family::knapsack}, {"hypercube", Family::hypercube}, {"zp", Family::zp}},
                            "instance family");
}

DensityFamily parse_density(const std::string& s) {
  return parse_enum<DensityFamily>(s,
                                   {{"uniform", DensityFamily::uniform},
                                    {"triangular", DensityFamily::triangular},
                                    {"tgauss", DensityFamily::truncated_gaussian},
                                    {"bimodal", DensityFamily::bimodal}},
                                   "density family");
}

Engine parse_engine(const std::string& s) {
  return parse_enum<Engine>(s, {{"bruteforce", Engine::bruteforce}, {"nu", Engine::nu}, {"auto", Engine::automatic}},
                            "engine");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw precondition_error(path + ": " + e.what());
  }
}

// Flags shared by every subcommand; they may appear before or after it.
struct Globals {
  std::uint64_t seed = 1;
  std::uint64_t trials = 100;
  std::string engine = "auto";
  std::string out;
  std::string format = "json";
};

// Flags describing an instance family and the (n, phi) grid.
struct FamilyFlags {
  std::string family = "knapsack";
  std::string density = "uniform";
  std::vector<int> n{8};
  std::vector<double> phi{1.0};
  int d = 1;
  int c = 2;
  int workers = 1;
  std::size_t cap = std::size_t{1} << 20;
  int zp_pool = 4;
  std::size_t zp_set_size = 200;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "knapsack | hypercube | zp")->capture_default_str();
    app->add_option("--density", density, "uniform | triangular | tgauss | bimodal")->capture_default_str();
    app->add_option("--n", n, "solution lengths")->delimiter(',')->capture_default_str();
    app->add_option("--phi", phi, "density caps")->delimiter(',')->capture_default_str();
    app->add_option("--d", d, "number of perturbed objectives")->capture_default_str();
    app->add_option("--c", c, "moment order")->capture_default_str();
    app->add_option("--workers", workers, "worker threads")->capture_default_str();
    app->add_option("--cap", cap, "largest enumerable solution set")->capture_default_str();
    app->add_option("--zp-pool", zp_pool, "patterns per class (zp family)")->capture_default_str();
    app->add_option("--zp-set-size", zp_set_size, "solutions per instance (zp family)")->capture_default_str();
  }

  ExperimentConfig config(const Globals& g) const {
    ExperimentConfig cfg;
    cfg.family = parse_family(family);
    cfg.density = parse_density(density);
    cfg.n_list = n;
    cfg.phi_list = phi;
    cfg.d = d;
    cfg.c = c;
    cfg.trials = g.trials;
    cfg.seed = g.seed;
    cfg.engine = parse_engine(g.engine);
    cfg.cap = cap;
    cfg.workers = workers;
    cfg.zp_pool = zp_pool;
    cfg.zp_set_size = zp_set_size;
    cfg.validate();
    return cfg;
  }
};

void require_format(const Globals& g, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (g.format == f) return;
  throw precondition_error("format '" + g.format + "' is not available for this command");
}

std::string cmd_generate(const Globals& g, const FamilyFlags& f, bool model_only, std::uint64_t trial) {
  require_format(g, {"json"});
  ExperimentConfig cfg = f.config(g);
  const int n = cfg.n_list.front();
  const double phi = cfg.phi_list.front();
  Model model = make_model(cfg, n, phi);
  if (model_only) return model_to_json(model).dump(2) + "\n";
  return instance_to_json(draw_trial(model, cfg.seed, cell_key(n, phi), trial)).dump(2) + "\n";
}

std::string cmd_pareto(const Globals& g, const std::string& in, bool count_only) {
  Instance inst = instance_from_json(read_json(in));
  ParetoSet ps = pareto(inst, parse_engine(g.engine));
  if (g.format == "csv") {
    if (count_only) return "count\n" + std::to_string(ps.count()) + "\n";
    return pareto_csv(ps, inst.d());
  }
  require_format(g, {"json"});
  json j = {{"count", ps.count()}};
  if (!count_only) {
    json members = json::array();
    for (const ParetoMember& m : ps.members)
      members.push_back({{"x", m.x.to_string()}, {"linear", m.objectives.linear}, {"adversarial", m.objectives.adversarial}});
    j["members"] = members;
  }
  return j.dump(2) + "\n";
}

// Runs the witness checks on every Pareto-optimal solution of one instance.
std::string cmd_witness_check(const Globals& g, const std::string& in, bool zp) {
  require_format(g, {"json"});
  Instance inst = instance_from_json(read_json(in));
  Evaluation ev(inst);
  const int d = inst.d(), n = inst.n();
  std::vector<IndexTuple> partition;
  std::vector<std::uint64_t> masks = full_masks(d);
  if (zp) {
    partition = contiguous_partition(n, d);
    masks = partition_masks(partition);
  }
  auto q = working_exponent(min_gap(ev, masks));
  if (!q) throw precondition_error("instance has tied objective values; the witness needs distinct values");
  EpsilonGrid grid(*q, d, n);

  json failures = json::array();
  auto check = [&](bool ok, const Solution& x, const char* what) {
    if (!ok) failures.push_back({{"x", x.to_string()}, {"check", what}});
  };
  const Solution zero(n);
  std::size_t solutions = 0;
  for (const Solution& x : pareto_set(ev).solutions()) {
    ++solutions;
    if (zp) {
      auto [tr, cert] = extract_zp_certificate(ev, partition, x);
      check(tr.result == std::vector<Solution>{x}, x, "witness returns x");
      check(has_zp_certificate_form(cert, partition, x), x, "certificate form");
      Solution u = zp_shift_vector(cert);
      BitMatrix A = cert.restricted();
      check(witness_zp_reconstruct(ev, partition, cert.indices, A, cert.bookkeeping, box_of(ev, grid, x, u), u) ==
                std::vector<Solution>{x},
            x, "reconstruct from shifted box");
      ZPShiftData sd = build_zp_matrices(cert, partition, u);
      for (int k = 0; k < d; ++k) check(rank_full(sd.combined(k)), x, "combined matrix full rank");
    } else {
      WitnessTrace tr = witness(ev, x, {});
      check(tr.result == x, x, "witness returns x");
      Certificate cert = extract_certificate(ev, x);
      check(has_certificate_form(cert, x), x, "certificate form");
      Solution u = shift_vector(cert);
      BitMatrix A = cert.restricted();
      check(witness_reconstruct(ev, cert.indices, A, box_of(ev, grid, x, u), u) == x, x, "reconstruct from shifted box");
      check(witness_reconstruct(ev, cert.indices, A, box_of(ev, grid, x, zero), zero) == x, x,
            "reconstruct from own box");
      check(rank_full(build_qk(cert.indices, A, u).q_prime_block()), x, "Q' block full rank");
    }
  }
  json j = {{"solutions", solutions}, {"epsilon_exponent", *q}, {"mode", zp ? "zp" : "plain"}, {"violations", failures}};
  if (!failures.empty()) throw violation_error(j.dump(2));
  return j.dump(2) + "\n";
}

std::string cmd_moments(const Globals& g, const FamilyFlags& f) {
  ExperimentConfig cfg = f.config(g);
  std::string csv = "n,phi,c,trials,moment,halfwidth\n";
  json rows = json::array();
  for (int n : cfg.n_list)
    for (double phi : cfg.phi_list) {
      MomentEstimate e = estimate_moment(cfg, n, phi, cfg.c);
      csv += std::to_string(n) + "," + format_double(phi) + "," + std::to_string(cfg.c) + "," +
             std::to_string(cfg.trials) + "," + format_double(e.mean) + "," + format_double(e.halfwidth) + "\n";
      rows.push_back({{"n", n}, {"phi", phi}, {"c", cfg.c}, {"trials", cfg.trials}, {"moment", e.mean}, {"halfwidth", e.halfwidth}});
    }
  if (g.format == "csv") return csv;
  require_format(g, {"json"});
  return json{{"seed", cfg.seed}, {"rows", rows}}.dump(2) + "\n";
}

std::string cmd_sweep(const Globals& g, const FamilyFlags& f) {
  ExperimentReport rep = sweep(f.config(g));
  if (g.format == "csv") return sweep_csv(rep);
  require_format(g, {"json"});
  return report_to_json(rep).dump(2) + "\n";
}

struct ProbFlags {
  int n = 3;
  int m = 2;
  int k = 1;
  double phi = 2;
  double eps = 0.1;
  std::string density = "uniform";
};

// Monte-Carlo estimate of the probability that k combinations of a random
// full-rank {-1,0,1} matrix land in an eps-box placed by the earlier rows.
std::string cmd_prob_check(const Globals& g, const ProbFlags& p) {
  require(p.phi >= 1 && p.eps > 0, "phi must be at least 1 and eps positive");
  DensityFamily fam = parse_density(p.density);
  Stream rng(derive_seed(g.seed, {0x70726f62ULL}));
  IntMatrix A = full_rank_matrix(p.m, p.n, rng);
  std::vector<DensitySpec> dens;
  for (int i = 0; i < p.n; ++i) dens.push_back(density_with_phi(fam, p.phi, rng.uniform(-1, 1)));
  const int k = p.k;
  const double eps = p.eps;
  BoxChooser chooser = [k, eps](const std::vector<double>& y) {
    double s = 0;
    for (double v : y) s += v;
    std::vector<double> c(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) c[static_cast<std::size_t>(j)] = eps * std::floor(s * (j + 1)) - eps / 2;
    return c;
  };
  Estimate e = estimate_hypercube_prob(A, dens, k, chooser, eps, g.trials, g.seed);
  const bool qc = fam != DensityFamily::bimodal;
  const double bound = box_probability_bound(p.n, k, p.phi, eps, qc);
  const bool ok = e.lo <= bound;
  json j = {{"n", p.n},       {"m", p.m},         {"k", k},     {"phi", p.phi},       {"eps", eps},
            {"density", p.density}, {"hits", e.hits}, {"trials", e.trials}, {"estimate", e.p},
            {"ci_lo", e.lo},  {"ci_hi", e.hi},    {"bound", bound}, {"quasiconcave_bound", qc}, {"within", ok}};
  std::string body;
  if (g.format == "csv") {
    body = "n,m,k,phi,eps,density,hits,trials,estimate,ci_lo,ci_hi,bound,within\n" + std::to_string(p.n) + "," +
           std::to_string(p.m) + "," + std::to_string(k) + "," + format_double(p.phi) + "," + format_double(eps) + "," +
           p.density + "," + std::to_string(e.hits) + "," + std::to_string(e.trials) + "," + format_double(e.p) + "," +
           format_double(e.lo) + "," + format_double(e.hi) + "," + format_double(bound) + "," + (ok ? "true" : "false") +
           "\n";
  } else {
    require_format(g, {"json"});
    body = j.dump(2) + "\n";
  }
  if (!ok) throw violation_error(body);
  return body;
}

struct GraphFlags {
  std::string graph;
  int vertices = 7;
  int edges = 10;
  int as_count = 2;
  double phi = 1;
};

std::string cmd_path_trade(const Globals& g, const GraphFlags& f) {
  ASGraph graph;
  if (!f.graph.empty()) {
    graph = graph_from_json(read_json(f.graph));
  } else {
    Stream rng(derive_seed(g.seed, {0x6772617068ULL}));
    graph = random_as_graph(f.vertices, f.edges, f.as_count, rng);
  }
  PathTradeReport rep = path_trade_experiment(graph, f.phi, g.trials, g.seed);
  if (g.format == "csv") {
    std::string out = "trial,po\n";
    for (std::size_t t = 0; t < rep.po.size(); ++t) out += std::to_string(t) + "," + std::to_string(rep.po[t]) + "\n";
    return out;
  }
  require_format(g, {"json"});
  json j = {{"paths", rep.paths},      {"objectives", rep.objectives}, {"mean", rep.mean.mean},
            {"mean_ci", rep.mean.halfwidth}, {"po_min", rep.po_min},       {"po_max", rep.po_max},
            {"trials", g.trials},      {"graph", graph_to_json(graph)}};
  return j.dump(2) + "\n";
}

std::string cmd_tail(const Globals& g, const FamilyFlags& f, const std::vector<double>& log2_multiples) {
  if (g.format != "csv") require_format(g, {"json"});
  ExperimentConfig cfg = f.config(g);
  std::vector<long double> ks(log2_multiples.begin(), log2_multiples.end());
  TailReport rep = concentration_tail(cfg, ks);
  bool all_within = true;
  std::string csv = "log2_multiple,log2_threshold,empirical,bound,within\n";
  json rows = json::array();
  for (const TailRow& r : rep.rows) {
    all_within = all_within && r.within();
    csv += format_double(static_cast<double>(r.log2_multiple)) + "," + format_double(static_cast<double>(r.log2_threshold)) +
           "," + format_double(r.empirical) + "," + format_double(r.bound) + "," + (r.within() ? "true" : "false") + "\n";
    rows.push_back({{"log2_multiple", static_cast<double>(r.log2_multiple)},
                    {"log2_threshold", static_cast<double>(r.log2_threshold)},
                    {"empirical", r.empirical},
                    {"bound", r.bound},
                    {"within", r.within()}});
  }
  std::string body = csv;
  if (g.format == "json")
    body = json{{"n", rep.n}, {"phi", rep.phi}, {"log2_s1", static_cast<double>(rep.log2_s1)}, {"note", TailReport::note}, {"rows", rows}}
               .dump(2) +
           "\n";
  if (!all_within) throw violation_error(body);
  return body;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smoothed Pareto-optimal counts: instances, witnesses and experiments", "smoothpo"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--trials", g.trials, "Monte-Carlo trials")->capture_default_str();
  app.add_option("--engine", g.engine, "bruteforce | nu | auto")->capture_default_str();
  app.add_option("--out", g.out, "write output to this file");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  FamilyFlags fam;
  std::function<std::string()> action;

  auto* gen = app.add_subcommand("generate", "emit one instance (or its model) as JSON");
  bool model_only = false;
  std::uint64_t trial = 0;
  fam.attach(gen);
  gen->add_flag("--model", model_only, "emit the model instead of a drawn instance");
  gen->add_option("--trial", trial, "trial index of the draw")->capture_default_str();
  gen->callback([&] { action = [&] { return cmd_generate(g, fam, model_only, trial); }; });

  std::string in;
  bool count_only = false;
  auto* par = app.add_subcommand("pareto", "enumerate or count the Pareto set of one instance");
  par->add_option("--in", in, "instance JSON")->required();
  par->add_flag("--count", count_only, "print only the count");
  par->callback([&] { action = [&] { return cmd_pareto(g, in, count_only); }; });

  bool zp = false;
  auto* wc = app.add_subcommand("witness-check", "run the witness checks on one instance");
  wc->add_option("--in", in, "instance JSON")->required();
  wc->add_flag("--zp", zp, "use the zero-preserving witness with a contiguous partition");
  wc->callback([&] { action = [&] { return cmd_witness_check(g, in, zp); }; });

  auto* mom = app.add_subcommand("moments", "estimate E[PO^c] per (n, phi)");
  fam.attach(mom);
  mom->callback([&] { action = [&] { return cmd_moments(g, fam); }; });

  auto* sw = app.add_subcommand("sweep", "full (n, phi) grid with exponent fits");
  fam.attach(sw);
  sw->callback([&] { action = [&] { return cmd_sweep(g, fam); }; });

  ProbFlags pf;
  auto* pc = app.add_subcommand("prob-check", "estimate a box probability and compare with its bound");
  pc->add_option("--n", pf.n, "variables")->capture_default_str();
  pc->add_option("--m", pf.m, "matrix rows")->capture_default_str();
  pc->add_option("--k", pf.k, "rows tested against the box")->capture_default_str();
  pc->add_option("--phi", pf.phi, "density cap")->capture_default_str();
  pc->add_option("--eps", pf.eps, "box width")->capture_default_str();
  pc->add_option("--density", pf.density, "uniform | triangular | tgauss | bimodal")->capture_default_str();
  pc->callback([&] { action = [&] { return cmd_prob_check(g, pf); }; });

  GraphFlags gf;
  auto* pt = app.add_subcommand("path-trade", "Pareto-optimal valid paths in an AS graph");
  pt->add_option("--graph", gf.graph, "graph JSON (random graph when omitted)");
  pt->add_option("--vertices", gf.vertices, "random graph vertices")->capture_default_str();
  pt->add_option("--edges", gf.edges, "random graph edges")->capture_default_str();
  pt->add_option("--as", gf.as_count, "random graph AS count")->capture_default_str();
  pt->add_option("--phi", gf.phi, "density cap")->capture_default_str();
  pt->callback([&] { action = [&] { return cmd_path_trade(g, gf); }; });

  std::vector<double> multiples{0, 1, 2, 4, 8};
  auto* tl = app.add_subcommand("tail", "empirical tail Pr[PO >= k s_1] against its bound");
  fam.attach(tl);
  tl->add_option("--log2-multiples", multiples, "log2 k values")->delimiter(',');
  tl->callback([&] { action = [&] { return cmd_tail(g, fam, multiples); }; });

  for (CLI::App* sub : {gen, par, wc, mom, sw, pc, pt, tl}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_config;
  }

  auto emit = [&](const std::string& body) {
    if (g.out.empty()) {
      out << body;
      return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw precondition_error("cannot write " + g.out);
    f << body;
  };
  try {
    emit(action());
    return exit_ok;
  } catch (const violation_error& e) {
    emit(e.what());
    err << "invariant violation\n";
    return exit_violation;
  } catch (const precondition_error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }
}

}  // namespace smoothpo::cli
