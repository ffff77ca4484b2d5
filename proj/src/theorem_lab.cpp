#include "tangraph/theorem_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "tangraph/errors.hpp"
#include "tangraph/parallel.hpp"
#include "tangraph/zoo.hpp"

namespace tangraph {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double lambda_cap(int m) {
  if (m < 1) throw PreconditionViolated("lambda_cap needs m >= 1");
  return 1e-5 / (static_cast<double>(m) * m);
}

TheoremVerdict verify_main_theorem(const ParamImmersion& f, double lambda,
                                   const SampleSpec& sample, double tol,
                                   const CheckOptions& options) {
  const double cap = lambda_cap(f.m());
  if (!(lambda > 0.0) || lambda > cap * (1.0 + 1e-12))
    throw PreconditionViolated("lambda must lie in (0, Lambda(m)]");
  TheoremVerdict v;
  v.lambda = lambda;
  v.Lambda = cap;
  v.r0 = max_radius(f, lambda, RadiusKind::c0, sample, tol, options);
  v.r1_scaled = max_radius(f, lambda / cap, RadiusKind::c1, sample, tol, options);
  v.inconclusive = v.r0.inconclusive || v.r1_scaled.inconclusive;
  if (v.r1_scaled.unbounded) {
    v.margin = kInf;
    v.holds = true;
  } else if (v.r0.unbounded) {
    v.margin = -kInf;
    v.holds = false;
  } else {
    v.margin = v.r1_scaled.r_lo - v.r0.r_hi;
    const double widths = (v.r0.r_hi - v.r0.r_lo) + (v.r1_scaled.r_hi - v.r1_scaled.r_lo);
    v.holds = v.margin >= -widths;
  }
  return v;
}

EnlargementResult check_enlargement(const ParamImmersion& f, double r, double lambda,
                                    std::span<const ParamPoint> q,
                                    const CheckOptions& options) {
  const double root_m = std::sqrt(static_cast<double>(f.m()));
  EnlargementResult out;
  out.r = r;
  out.lambda = lambda;
  out.enlarged_radius = 1.75 * r;
  out.enlarged_lambda = 8.0 * root_m * lambda;
  out.lambda_in_range = lambda <= 1.0 / (8.0 * root_m);
  out.hypothesis = is_r_lambda(f, r, lambda, q, options);
  if (!out.hypothesis.holds)
    throw PreconditionViolated("f is not an (r, lambda)-immersion on the sample");
  out.conclusion = is_r_lambda(f, out.enlarged_radius, out.enlarged_lambda, q, options);
  out.holds = out.conclusion.holds;
  return out;
}

DistanceResult check_distance_bound(const ParamImmersion& f, const ParamPoint& q, double rho,
                                    double r, double lambda, const CheckOptions& options) {
  if (!(rho > 0.0) || !(rho <= r)) throw PreconditionViolated("need 0 < rho <= r");
  DistanceResult out;
  out.rho = rho;
  out.r = r;
  out.lambda = lambda;
  out.bound = rho + r * lambda;
  const ParamPoint one[] = {q};
  out.hypothesis_holds = is_c0_r_lambda(f, r, lambda, one, options).holds;

  const FrameContext ctx = FrameContext::canonical(f, q, rho);
  const double h = options.cell_size > 0.0 ? options.cell_size : default_cell_size(ctx);
  const ComponentRegion region = component(ctx, h);
  out.slack = h * region.jacobian_bound * std::sqrt(static_cast<double>(f.m()));
  const Vec fq = f.eval(ctx.base);
  for (const auto& cell : region.cells) {
    const Vec fp = f.eval(region.lattice->center(cell.key));
    out.max_distance = std::max(out.max_distance, (fp - fq).norm());
  }
  out.points = region.cells.size();
  out.holds = out.max_distance < out.bound + out.slack;
  return out;
}

InclusionResult check_inclusion(const ParamImmersion& f, std::span<const ParamPoint> q, double r,
                                double lambda, const CheckOptions& options, int pairs_per_q) {
  if (lambda > 0.1) throw PreconditionViolated("inclusion needs lambda <= 1/10");
  if (pairs_per_q < 1) throw PreconditionViolated("need at least one p per q");
  InclusionResult out;
  out.r = r;
  out.lambda = lambda;
  out.hypothesis_holds = is_c0_r_lambda(f, r, lambda, q, options).holds;

  for (const auto& base : q) {
    const FrameContext small = FrameContext::canonical(f, base, 0.4 * r);
    const double h = options.cell_size > 0.0 ? options.cell_size : default_cell_size(small);
    const ComponentRegion inner = component(small, h);
    const std::size_t count = inner.cells.size();
    const std::size_t pairs = std::min<std::size_t>(static_cast<std::size_t>(pairs_per_q), count);
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < pairs; ++i) {
      const std::size_t pick = i * count / pairs;
      if (picks.empty() || picks.back() != pick) picks.push_back(pick);
    }
    std::vector<std::size_t> missing(picks.size(), 0);
    parallel_for(picks.size(), options.threads, [&](std::size_t i) {
      const ParamPoint p = inner.lattice->center(inner.cells[picks[i]].key);
      const ComponentRegion outer = component(FrameContext::canonical(f, p, r), h);
      for (const auto& cell : inner.cells) {
        if (!outer.contains(cell.key)) ++missing[i];
      }
    });
    out.pairs += picks.size();
    out.cells_checked += picks.size() * count;
    for (std::size_t m : missing) out.cells_missing += m;
  }
  out.holds = out.pairs > 0 && out.cells_missing == 0;
  return out;
}

CertifiedDuBound certify_du_bound(const ParamImmersion& f, const ParamPoint& q, double r,
                                  double lambda, int grid, const CheckOptions& options) {
  const int m = f.m();
  const int n = f.n();
  const double cap = lambda_cap(m);
  if (!(lambda > 0.0) || lambda > cap * (1.0 + 1e-12))
    throw PreconditionViolated("lambda must lie in (0, Lambda(m)]");
  if (grid < 8 || grid % 2 != 0) throw PreconditionViolated("grid must be even and >= 8");
  const ParamPoint one[] = {q};
  if (!is_c0_r_lambda(f, r, lambda, one, options).holds)
    throw PreconditionViolated("f is not C0-(r, lambda) at q");

  CertifiedDuBound out;
  out.m = m;
  out.r = r;
  out.lambda = lambda;
  out.rho = r / 5.0;
  out.grid = 2 * grid;
  const double root_m = std::sqrt(static_cast<double>(m));
  out.global_bound = lambda / cap / (512.0 * m * root_m);

  // Extract over B_{2 rho} with 2 * grid nodes per axis: spacing rho / (grid / 2),
  // so x + rho e_j is again a node.
  const FrameContext ctx = FrameContext::canonical(f, q, 2.0 * out.rho);
  ExtractOptions eo;
  eo.refine_component = options.refine;
  eo.rim_nodes = false;
  eo.threads = options.threads;
  const GraphSample sample = extract(ctx, out.grid, options.cell_size, eo);
  const double spacing = 2.0 * ctx.radius / out.grid;
  const int offset = grid / 2;

  std::map<std::vector<long>, std::size_t> index;
  for (std::size_t i = 0; i < sample.nodes.size(); ++i) {
    std::vector<long> key(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) key[static_cast<std::size_t>(d)] = std::lround(sample.nodes[i].x(d) / spacing);
    index.emplace(std::move(key), i);
  }

  const Mat rq_t = ctx.iso.rotation().transpose();
  const double limit = out.rho * (1.0 - 2e-9);
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < sample.nodes.size(); ++i) {
    if (sample.nodes[i].x.norm() < limit) inside.push_back(i);
  }
  std::vector<std::optional<CertifiedNode>> certified(inside.size());
  std::vector<std::optional<ProbeFailure>> failed(inside.size());
  parallel_for(inside.size(), options.threads, [&](std::size_t s) {
    const GraphNode& node = sample.nodes[inside[s]];
    auto fail = [&](int probe, double needed) {
      failed[s] = ProbeFailure{node.x, probe, needed};
    };
    if (node.status != NodeStatus::ok) {
      fail(-1, kInf);
      return;
    }
    const Subspace tangent = tangent_space(f, node.param);
    const Vec fp = f.eval(node.param);
    std::vector<Vec> probes;
    double worst = 0.0;
    int worst_j = 0;
    for (int j = 0; j < m; ++j) {
      std::vector<long> key(static_cast<std::size_t>(m));
      for (int d = 0; d < m; ++d)
        key[static_cast<std::size_t>(d)] = std::lround(node.x(d) / spacing) + (d == j ? offset : 0);
      const auto it = index.find(key);
      if (it == index.end() || sample.nodes[it->second].status == NodeStatus::uncovered) {
        fail(j, kInf);
        return;
      }
      const Vec fj = f.eval(sample.nodes[it->second].param);
      Vec v = rq_t * tangent.project(fj - fp) / out.rho;
      Vec ej = Vec::Zero(n);
      ej(j) = 1.0;
      const double dev = (v - ej).norm();
      if (dev > worst) {
        worst = dev;
        worst_j = j;
      }
      probes.push_back(std::move(v));
    }
    // A few ulps above 3 sqrt(m) worst so the probe test is not lost to rounding.
    const double bound = 3.0 * root_m * worst * (1.0 + 1e-14);
    if (bound > out.global_bound) {
      fail(worst_j, bound);
      return;
    }
    try {
      graph_matrix_from_probes(tangent.transformed(rq_t), probes, bound);
    } catch (const PreconditionViolated& e) {
      fail(e.index(), bound);
      return;
    }
    certified[s] = CertifiedNode{node.x, bound, matrix_norm(*node.derivative)};
  });

  out.sound = true;
  for (std::size_t s = 0; s < inside.size(); ++s) {
    if (failed[s]) out.failures.push_back(*failed[s]);
    if (!certified[s]) continue;
    const CertifiedNode& c = *certified[s];
    out.max_certified = std::max(out.max_certified, c.certified);
    out.max_actual = std::max(out.max_actual, c.actual);
    if (c.actual > c.certified + 1e-12) out.sound = false;
    out.nodes.push_back(c);
  }
  return out;
}

IterationConstants iteration_constants() {
  IterationConstants c;
  c.cube = 1.75 * 1.75 * 1.75;
  c.composed = c.cube / 5.0;
  c.holds = c.cube > 5.0 && c.composed >= 1.0;
  for (int m : {1, 2, 3, 10}) {
    // (8 sqrt m)^3 = 512 m sqrt m.
    const double md = static_cast<double>(m);
    const double lift = (512.0 * md * std::sqrt(md)) / 512.0 / (md * std::sqrt(md));
    c.lifts.emplace_back(m, lift);
    c.holds = c.holds && lift == 1.0;
  }
  return c;
}

bool iteration_constant_check() { return iteration_constants().holds; }

CounterexampleReport analyze_counterexample(double eps, double delta, double r, int angles,
                                            int threads) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidParams("eps must be >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParams("delta must be positive");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidParams("r must be positive");
  if (angles < 2) throw InvalidParams("need at least two angles");

  const ParamImmersion curve = make_wiggle(eps, delta, std::max(1.0, 4.0 * r), 2.0);
  auto height = [&](double t) { return curve.eval(ParamPoint{0, Vec::Constant(1, t)})(1); };
  auto slope = [&](double t) { return curve.jacobian(ParamPoint{0, Vec::Constant(1, t)})(1, 0); };

  CounterexampleReport out;
  out.epsilon = eps;
  out.delta = delta;
  out.r = r;
  out.angles = angles;
  out.lambda_cap = lambda_cap(1);

  constexpr int kPerPeriod = 4096;
  const double crest = 0.25 * delta;
  double dev = 0.0;
  if (2.0 * r >= delta) {
    // The window |t - t_q| < r covers a full period for every q.
    std::vector<double> h(kPerPeriod);
    for (int i = 0; i < kPerPeriod; ++i) h[static_cast<std::size_t>(i)] = height(crest + i * delta / kPerPeriod);
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    for (double v : h) dev = std::max({dev, *hi - v, v - *lo});
  } else {
    constexpr int kInner = 1024;
    for (int i = 0; i <= kPerPeriod; ++i) {
      const double tq = crest - 0.5 * delta + i * delta / kPerPeriod;
      const double hq = height(tq);
      for (int j = 0; j <= kInner; ++j) {
        const double t = tq - r + 2.0 * r * j / kInner;
        dev = std::max(dev, std::abs(height(t) - hq));
      }
    }
  }
  out.lambda_gen = dev / r;

  std::vector<double> slopes(kPerPeriod);
  for (int i = 0; i < kPerPeriod; ++i) slopes[static_cast<std::size_t>(i)] = slope(crest + i * delta / kPerPeriod);
  for (double s : slopes) out.horizontal_slope = std::max(out.horizontal_slope, std::abs(s));

  // Line direction (cos a, sin a). The curve is a graph over it iff
  // ds/dt = cos a + h' sin a keeps one sign.
  const int count = angles - 1;
  std::vector<double> max_slope(static_cast<std::size_t>(count), kInf);
  parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t i) {
    const double a = -0.5 * std::numbers::pi + (static_cast<double>(i) + 1.0) * std::numbers::pi / angles;
    const double c = std::cos(a);
    const double s = std::sin(a);
    double ds_min = kInf;
    double ds_max = -kInf;
    double worst = 0.0;
    for (double hp : slopes) {
      const double ds = c + hp * s;
      ds_min = std::min(ds_min, ds);
      ds_max = std::max(ds_max, ds);
      worst = std::max(worst, std::abs((-s + hp * c) / ds));
    }
    if (ds_min > 0.0 || ds_max < 0.0) max_slope[i] = worst;
  });
  out.min_over_angles_max_slope = kInf;
  for (int i = 0; i < count; ++i) {
    const double v = max_slope[static_cast<std::size_t>(i)];
    if (!std::isfinite(v)) continue;
    ++out.graph_angles;
    if (v < out.min_over_angles_max_slope) {
      out.min_over_angles_max_slope = v;
      out.best_angle = -0.5 * std::numbers::pi + (i + 1.0) * std::numbers::pi / angles;
    }
  }
  out.verdict = out.lambda_gen <= out.lambda_cap * (1.0 + 1e-12) &&
                out.min_over_angles_max_slope > out.lambda_gen / out.lambda_cap;
  return out;
}

}  // namespace tangraph
