#ifndef SMOOTHPO_IO_HPP
#define SMOOTHPO_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "smoothpo/experiments.hpp"
#include "smoothpo/witness.hpp"
#include "smoothpo/witness_zp.hpp"

namespace smoothpo {

using json = nlohmann::json;

// Doubles are written by nlohmann's shortest round-trip formatter and read
// back with strtod, so values survive a round trip bit for bit.

inline json density_to_json(const std::optional<DensitySpec>& e) {
  if (!e) return {{"kind", "zero"}};
  switch (e->family()) {
    case DensityFamily::uniform: return {{"kind", "uniform"}, {"center", e->a()}, {"width", e->b()}};
    case DensityFamily::triangular: return {{"kind", "triangular"}, {"peak", e->a()}, {"halfwidth", e->b()}};
    case DensityFamily::truncated_gaussian: return {{"kind", "tgauss"}, {"mean", e->a()}, {"sigma", e->b()}};
    case DensityFamily::bimodal:
      return {{"kind", "bimodal"},
              {"blocks", {{e->block(0).lo, e->block(0).hi}, {e->block(1).lo, e->block(1).hi}}}};
  }
  return nullptr;
}

inline std::optional<DensitySpec> density_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return std::nullopt;
  if (kind == "uniform") return DensitySpec::uniform(j.at("center").get<double>(), j.at("width").get<double>());
  if (kind == "triangular") return DensitySpec::triangular(j.at("peak").get<double>(), j.at("halfwidth").get<double>());
  if (kind == "tgauss") return DensitySpec::truncated_gaussian(j.at("mean").get<double>(), j.at("sigma").get<double>());
  if (kind == "bimodal") {
    const json& b = j.at("blocks");
    require(b.is_array() && b.size() == 2, "bimodal density needs two blocks");
    return DensitySpec::bimodal({b[0].at(0).get<double>(), b[0].at(1).get<double>()},
                                {b[1].at(0).get<double>(), b[1].at(1).get<double>()});
  }
  throw precondition_error("unknown density kind: " + kind);
}

inline json spec_to_json(const PerturbationSpec& spec) {
  json rows = json::array();
  for (int k = 0; k < spec.d(); ++k) {
    json row = json::array();
    for (int i = 0; i < spec.n(); ++i) row.push_back(density_to_json(spec.at(k, i)));
    rows.push_back(row);
  }
  return {{"d", spec.d()}, {"n", spec.n()}, {"entries", rows}};
}

inline PerturbationSpec spec_from_json(const json& j) {
  PerturbationSpec spec(j.at("d").get<int>(), j.at("n").get<int>());
  const json& rows = j.at("entries");
  require(rows.size() == static_cast<std::size_t>(spec.d()), "perturbation grid needs d rows");
  for (int k = 0; k < spec.d(); ++k) {
    require(rows[k].size() == static_cast<std::size_t>(spec.n()), "perturbation grid needs n columns");
    for (int i = 0; i < spec.n(); ++i) spec.set(k, i, density_from_json(rows[k][i]));
  }
  return spec;
}

inline json graph_to_json(const ASGraph& g) {
  json vs = json::array(), es = json::array();
  for (const auto& v : g.vertices) vs.push_back({{"id", v.id}, {"as", v.as}});
  for (const auto& e : g.edges) {
    json je = {{"u", e.u}, {"v", e.v}};
    if (e.density) je["density"] = density_to_json(e.density);
    else je["length"] = e.length;
    es.push_back(je);
  }
  return {{"vertices", vs}, {"edges", es}, {"s", g.s}, {"t", g.t}};
}

inline ASGraph graph_from_json(const json& j) {
  ASGraph g;
  for (const json& v : j.at("vertices")) g.vertices.push_back({v.at("id").get<int>(), v.at("as").get<int>()});
  for (const json& e : j.at("edges")) {
    ASGraph::Edge edge{e.at("u").get<int>(), e.at("v").get<int>(), 0, std::nullopt};
    if (e.contains("density")) {
      edge.density = density_from_json(e.at("density"));
      require(edge.density.has_value(), "edge density cannot be zero");
      edge.length = edge.density->mean();
    } else {
      edge.length = e.at("length").get<double>();
    }
    g.edges.push_back(edge);
  }
  g.s = j.at("s").get<int>();
  g.t = j.at("t").get<int>();
  g.validate();
  return g;
}

inline json set_to_json(const SolutionSet& set) {
  switch (set.kind()) {
    case SetKind::hypercube: return {{"kind", "hypercube"}, {"n", set.n()}};
    case SetKind::valid_paths: return {{"kind", "valid_paths"}, {"graph", graph_to_json(*set.graph())}};
    case SetKind::explicit_list: {
      json m = json::array();
      for (std::size_t s = 0; s < set.size(); ++s) m.push_back(set.at(s).to_string());
      return {{"kind", "explicit"}, {"n", set.n()}, {"members", m}};
    }
  }
  return nullptr;
}

inline SolutionSet set_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "hypercube") return SolutionSet::hypercube(j.at("n").get<int>());
  if (kind == "valid_paths") return valid_paths(graph_from_json(j.at("graph")));
  if (kind == "explicit") {
    const int n = j.at("n").get<int>();
    std::vector<Solution> members;
    for (const json& m : j.at("members")) {
      members.push_back(Solution::from_string(m.get<std::string>()));
      require(members.back().size() == n, "explicit member has the wrong length");
    }
    return SolutionSet::explicit_set(n, std::move(members));
  }
  throw precondition_error("unknown solution set kind: " + kind);
}

inline json instance_to_json(const Instance& inst) {
  json j = {{"n", inst.n()},
            {"d", inst.d()},
            {"coefficients", inst.coefficients()},
            {"adversarial", inst.adversarial()},
            {"solution_set", set_to_json(inst.set())}};
  if (inst.profits()) j["profits"] = *inst.profits();
  return j;
}

inline Instance instance_from_json(const json& j) {
  auto set = std::make_shared<const SolutionSet>(set_from_json(j.at("solution_set")));
  require(set->n() == j.at("n").get<int>(), "instance n does not match its solution set");
  Instance inst(set, j.at("d").get<int>(), j.at("coefficients").get<std::vector<double>>(),
                j.at("adversarial").get<std::vector<double>>());
  if (j.contains("profits")) inst.set_profits(j.at("profits").get<std::vector<double>>());
  return inst;
}

inline json model_to_json(const Model& m) {
  json j = {{"solution_set", set_to_json(*m.set)}, {"adversarial", m.adversarial}, {"spec", spec_to_json(m.spec)}};
  if (m.profits) j["profits"] = *m.profits;
  return j;
}

inline Model model_from_json(const json& j) {
  auto set = std::make_shared<const SolutionSet>(set_from_json(j.at("solution_set")));
  Model m{set, j.at("adversarial").get<std::vector<double>>(), spec_from_json(j.at("spec")), std::nullopt};
  require(m.adversarial.size() == set->size(), "adversarial values must align with the solution set");
  require(m.spec.n() == set->n(), "perturbation spec and solution set differ in n");
  if (j.contains("profits")) m.profits = j.at("profits").get<std::vector<double>>();
  return m;
}

inline json bits_to_json(const BitMatrix& a) {
  json rows = json::array();
  for (int r = 0; r < a.rows; ++r) {
    std::string row;
    for (int c = 0; c < a.cols; ++c) row += a(r, c) ? '1' : '0';
    rows.push_back(row);
  }
  return rows;
}

inline json certificate_to_json(const Certificate& c) {
  json cols = json::array();
  for (const Solution& x : c.columns) cols.push_back(x.to_string());
  return {{"d", c.d},           {"n", c.n},          {"I", c.input.values()}, {"I_star", c.indices.values()},
          {"A", bits_to_json(c.restricted())}, {"columns", cols}};
}

inline json zp_certificate_to_json(const ZPCertificate& c) {
  json calls = json::array();
  for (const auto& call : c.bookkeeping.calls)
    calls.push_back({{"objectives", call.objectives}, {"d_prime", call.first_round}, {"t_r", call.last_round}});
  json cols = json::array();
  for (const Solution& x : c.columns) cols.push_back(x.to_string());
  return {{"d", c.d},
          {"n", c.n},
          {"I_star", c.indices.values()},
          {"pivots", c.pivots},
          {"A", bits_to_json(c.restricted())},
          {"columns", cols},
          {"bookkeeping", {{"calls", calls}, {"r_k", c.bookkeeping.last_call}}}};
}

/// One JSON object per round.
inline std::vector<json> trace_lines(const WitnessTrace& tr) {
  std::vector<json> out;
  for (const WitnessRound& r : tr.rounds)
    out.push_back({{"t", r.t},
                   {"winner_set_empty", r.winner_set_empty},
                   {"x", r.vector.to_string()},
                   {"i", r.index},
                   {"I", r.indices.values()}});
  out.push_back({{"result", tr.result ? json(tr.result->to_string()) : json(nullptr)},
                 {"I", tr.final_indices.values()}});
  return out;
}

inline std::vector<json> trace_lines(const ZPTrace& tr) {
  std::vector<json> out;
  for (std::size_t r = 0; r < tr.calls.size(); ++r) {
    const ZPCall& call = tr.calls[r];
    for (const ZPRound& round : call.rounds)
      out.push_back({{"call", r},
                     {"K", call.objectives},
                     {"t", round.t},
                     {"winner_set_empty", round.winner_set_empty},
                     {"x", round.vector.to_string()},
                     {"K_EQ", round.equal},
                     {"added", round.added}});
  }
  json result = json::array();
  for (const Solution& x : tr.result) result.push_back(x.to_string());
  out.push_back({{"result", result}, {"r_k", tr.last_call}, {"I", tr.indices.values()}});
  return out;
}

inline json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

/// JSON mirror of the sweep CSV plus run metadata.
inline json report_to_json(const ExperimentReport& rep) {
  const ExperimentConfig& cfg = rep.config;
  json cells = json::array();
  for (const CellReport& c : rep.cells) {
    json jc = {{"n", c.n}, {"phi", c.phi}, {"status", c.skipped ? "skipped" : "ok"}};
    if (!c.skipped) {
      jc.update({{"trials", c.trials},
                 {"resamples", c.resamples},
                 {"mean", c.first.mean},
                 {"mean_ci", c.first.halfwidth},
                 {"variance", c.variance},
                 {"moment_c", c.moment.mean},
                 {"moment_c_ci", c.moment.halfwidth},
                 {"jensen_ok", c.jensen_ok(cfg.c)},
                 {"po_min", c.po_min},
                 {"po_max", c.po_max},
                 {"spec_phi", c.spec_phi},
                 {"log2_bound_first", static_cast<double>(c.log2_bound_first)},
                 {"log2_bound_moment_c", static_cast<double>(c.log2_bound_moment)}});
    }
    cells.push_back(jc);
  }
  json fits = json::array();
  for (const Fit& f : rep.fits)
    fits.push_back({{"against", f.against},
                    {"fixed", f.fixed},
                    {"points", f.points},
                    {"status", f.defined ? "ok" : "undefined"},
                    {"slope", f.defined ? json(f.slope) : json(nullptr)},
                    {"slope_se", number_or_null(f.stderr_)},
                    {"upper_bound_exponent", f.against == "n" ? 2 * cfg.d : cfg.d}});
  json n_list = cfg.n_list, phi_list = cfg.phi_list;
  return {{"schema", sweep_schema},
          {"metadata",
           {{"version", library_version},
            {"seed", cfg.seed},
            {"family", family_name(cfg.family)},
            {"density", family_name(cfg.density)},
            {"d", cfg.d},
            {"c", cfg.c},
            {"trials", cfg.trials},
            {"n_list", n_list},
            {"phi_list", phi_list},
            {"wall_seconds", rep.wall_seconds}}},
          {"cells", cells},
          {"fits", fits}};
}

}  // namespace smoothpo

#endif  // SMOOTHPO_IO_HPP
