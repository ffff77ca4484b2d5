#include "tangraph/report_io.hpp"

#include <cmath>
#include <locale>

#include "json_io.hpp"

#ifndef TANGRAPH_VERSION
#define TANGRAPH_VERSION "0.0.0"
#endif

namespace tangraph {

const char* version() { return TANGRAPH_VERSION; }

namespace json_io {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json point(const ParamPoint& p) { return {{"chart", p.chart}, {"coords", vec(p.coords)}}; }

json params(const Params& p) {
  json out = json::object();
  for (const auto& [key, v] : p) out[key] = number(v);
  return out;
}

json value(const GraphSample& sample) {
  json out = {{"m", sample.m},
              {"k", sample.k},
              {"radius", number(sample.radius)},
              {"resolution", sample.resolution},
              {"cell_size", number(sample.cell_size)},
              {"nodes", sample.nodes.size()},
              {"is_graph", sample.is_graph()}};
  json counts = json::object();
  for (NodeStatus s : {NodeStatus::ok, NodeStatus::vertical, NodeStatus::multi_sheet,
                       NodeStatus::uncovered})
    counts[to_string(s)] = sample.count(s);
  out["status_counts"] = counts;
  out["norms"] = sample.is_graph() ? value(norms(sample)) : json(nullptr);
  return out;
}

json value(const NormEstimates& n) {
  return {{"c0", number(n.c0)},
          {"c0_bound", number(n.c0_bound)},
          {"lip", number(n.lip)},
          {"vertical", n.vertical}};
}

json value(const Witness& w) {
  return {{"q", point(w.q)},
          {"c0", number(w.c0)},
          {"lip", number(w.lip)},
          {"status", to_string(w.status)}};
}

json value(const PropertyVerdict& v) {
  json witnesses = json::array();
  for (const auto& w : v.witnesses) witnesses.push_back(value(w));
  return {{"holds", v.holds},
          {"inconclusive", v.inconclusive},
          {"witnesses", witnesses},
          {"failing_q", v.failing_q ? point(*v.failing_q) : json(nullptr)}};
}

json value(const RadiusReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses_lo) witnesses.push_back(value(w));
  // Radii hold only over the sampled base points, so the sample is part of
  // the result.
  return {{"kind", r.unbounded ? std::string("unbounded") : std::string(to_string(r.kind))},
          {"property", to_string(r.kind)},
          {"lambda", number(r.lambda)},
          {"r_lo", number(r.r_lo)},
          {"r_hi", number(r.r_hi)},
          {"tol", number(r.tol)},
          {"unbounded", r.unbounded},
          {"inconclusive", r.inconclusive},
          {"immersion", {{"name", r.immersion}, {"params", params(r.params)}}},
          {"sample_spec",
           {{"scope", "sampled base points within the sampler windows"},
            {"count", r.sample.count},
            {"seed", r.sample.seed},
            {"size", r.sample_size},
            {"density", r.sampler_density}}},
          {"grid", r.grid},
          {"evaluations", r.evaluations},
          {"witnesses_lo", witnesses},
          {"failure_hi", r.failure_hi ? value(*r.failure_hi) : json(nullptr)}};
}

json value(const TheoremVerdict& v) {
  return {{"lambda", number(v.lambda)}, {"Lambda", number(v.Lambda)},
          {"r0", value(v.r0)},          {"r1_scaled", value(v.r1_scaled)},
          {"margin", number(v.margin)}, {"margin_infinite", std::isinf(v.margin)},
          {"holds", v.holds},           {"inconclusive", v.inconclusive}};
}

json value(const EnlargementResult& e) {
  return {{"r", number(e.r)},
          {"lambda", number(e.lambda)},
          {"enlarged_radius", number(e.enlarged_radius)},
          {"enlarged_lambda", number(e.enlarged_lambda)},
          {"lambda_in_range", e.lambda_in_range},
          {"hypothesis", value(e.hypothesis)},
          {"conclusion", value(e.conclusion)},
          {"holds", e.holds}};
}

json value(const DistanceResult& d) {
  return {{"rho", number(d.rho)},
          {"r", number(d.r)},
          {"lambda", number(d.lambda)},
          {"bound", number(d.bound)},
          {"slack", number(d.slack)},
          {"max_distance", number(d.max_distance)},
          {"points", d.points},
          {"hypothesis_holds", d.hypothesis_holds},
          {"holds", d.holds}};
}

json value(const InclusionResult& i) {
  return {{"r", number(i.r)},
          {"lambda", number(i.lambda)},
          {"pairs", i.pairs},
          {"cells_checked", i.cells_checked},
          {"cells_missing", i.cells_missing},
          {"hypothesis_holds", i.hypothesis_holds},
          {"holds", i.holds}};
}

json value(const CertifiedDuBound& b) {
  json failures = json::array();
  for (const auto& f : b.failures)
    failures.push_back({{"x", vec(f.x)}, {"probe", f.probe}, {"needed", number(f.needed)}});
  return {{"m", b.m},
          {"r", number(b.r)},
          {"lambda", number(b.lambda)},
          {"rho", number(b.rho)},
          {"global_bound", number(b.global_bound)},
          {"grid", b.grid},
          {"nodes", b.nodes.size()},
          {"max_certified", number(b.max_certified)},
          {"max_actual", number(b.max_actual)},
          {"sound", b.sound},
          {"probe_failures", failures}};
}

json value(const IterationConstants& c) {
  json lifts = json::object();
  for (const auto& [m, lift] : c.lifts) lifts[std::to_string(m)] = number(lift);
  return {{"cube", number(c.cube)},
          {"composed", number(c.composed)},
          {"lifts", lifts},
          {"holds", c.holds}};
}

json value(const CounterexampleReport& c) {
  return {{"epsilon", number(c.epsilon)},
          {"delta", number(c.delta)},
          {"r", number(c.r)},
          {"angles", c.angles},
          {"lambda_gen", number(c.lambda_gen)},
          {"lambda_cap", number(c.lambda_cap)},
          {"horizontal_slope", number(c.horizontal_slope)},
          {"min_over_angles_max_slope", number(c.min_over_angles_max_slope)},
          {"best_angle", number(c.best_angle)},
          {"graph_angles", c.graph_angles},
          {"verdict", c.verdict}};
}

}  // namespace json_io

#define TANGRAPH_TO_JSON(Type) \
  std::string to_json(const Type& v) { return json_io::value(v).dump(2); }

TANGRAPH_TO_JSON(GraphSample)
TANGRAPH_TO_JSON(NormEstimates)
TANGRAPH_TO_JSON(PropertyVerdict)
TANGRAPH_TO_JSON(RadiusReport)
TANGRAPH_TO_JSON(TheoremVerdict)
TANGRAPH_TO_JSON(EnlargementResult)
TANGRAPH_TO_JSON(DistanceResult)
TANGRAPH_TO_JSON(InclusionResult)
TANGRAPH_TO_JSON(CertifiedDuBound)
TANGRAPH_TO_JSON(IterationConstants)
TANGRAPH_TO_JSON(CounterexampleReport)

#undef TANGRAPH_TO_JSON

namespace {

void prepare(std::ostream& out) {
  out.imbue(std::locale::classic());
  out.precision(17);
}

}  // namespace

void write_csv(std::ostream& out, const GraphSample& sample) {
  prepare(out);
  for (int d = 1; d <= sample.m; ++d) out << 'x' << d << ',';
  for (int d = 1; d <= sample.k; ++d) out << 'u' << d << ',';
  out << "status,du_norm\n";
  for (const auto& node : sample.nodes) {
    for (int d = 0; d < sample.m; ++d) out << node.x(d) << ',';
    for (int d = 0; d < sample.k; ++d) {
      if (std::isfinite(node.height(d))) out << node.height(d);
      out << ',';
    }
    out << to_string(node.status) << ',';
    if (node.derivative) out << matrix_norm(*node.derivative);
    out << '\n';
  }
}

void write_csv(std::ostream& out, const CertifiedDuBound& bound) {
  prepare(out);
  for (int d = 1; d <= bound.m; ++d) out << 'x' << d << ',';
  out << "certified,actual\n";
  for (const auto& node : bound.nodes) {
    for (int d = 0; d < bound.m; ++d) out << node.x(d) << ',';
    out << node.certified << ',' << node.actual << '\n';
  }
}

}  // namespace tangraph
