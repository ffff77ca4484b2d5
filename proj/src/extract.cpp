#include "tangraph/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tangraph/errors.hpp"
#include "tangraph/parallel.hpp"

namespace tangraph {

FrameContext::FrameContext(ParamImmersion f, ParamPoint base_point, Isometry frame, double r)
    : immersion(std::move(f)), base(std::move(base_point)), iso(std::move(frame)), radius(r) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw PreconditionViolated("graph radius must be positive");
  if (immersion.m() > kMaxParamDim)
    throw PreconditionViolated("intrinsic dimension exceeds the supported maximum");
  auto normalized = immersion.normalize(base);
  if (!normalized) throw PreconditionViolated("base point lies outside every chart");
  base = *normalized;
  if (!is_admissible(iso, immersion.eval(base), tangent_space(immersion, base)))
    throw PreconditionViolated("isometry is not admissible at the base point");
}

FrameContext FrameContext::canonical(const ParamImmersion& f, const ParamPoint& base,
                                     double radius) {
  auto normalized = f.normalize(base);
  if (!normalized) throw PreconditionViolated("base point lies outside every chart");
  Isometry iso = make_admissible_isometry(f.eval(*normalized), tangent_space(f, *normalized));
  return FrameContext(f, *normalized, std::move(iso), radius);
}

std::size_t CellKeyHash::operator()(const CellKey& key) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(key.chart);
  for (std::int64_t v : key.index) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

CellLattice::CellLattice(ParamImmersion f, double h) : f_(std::move(f)), h_(h) {
  if (!(h > 0.0)) throw PreconditionViolated("cell size must be positive");
  for (const auto& chart : f_.charts()) {
    std::vector<std::int64_t> counts;
    std::vector<double> steps;
    for (int d = 0; d < f_.m(); ++d) {
      const double extent = chart.domain.hi(d) - chart.domain.lo(d);
      const double cells = std::ceil(extent / h);
      if (cells > 1e15) throw PreconditionViolated("cell size too small for the chart domain");
      const auto count = std::max<std::int64_t>(1, static_cast<std::int64_t>(cells));
      counts.push_back(count);
      steps.push_back(extent / static_cast<double>(count));
    }
    counts_.push_back(std::move(counts));
    steps_.push_back(std::move(steps));
  }
}

std::int64_t CellLattice::count(int chart, int axis) const {
  return counts_[static_cast<std::size_t>(chart)][static_cast<std::size_t>(axis)];
}

double CellLattice::step(int chart, int axis) const {
  return steps_[static_cast<std::size_t>(chart)][static_cast<std::size_t>(axis)];
}

double CellLattice::cell_volume(int chart) const {
  double v = 1.0;
  for (int d = 0; d < f_.m(); ++d) v *= step(chart, d);
  return v;
}

CellKey CellLattice::cell_of(const ParamPoint& p) const {
  CellKey key;
  key.chart = p.chart;
  const Box& domain = f_.chart(p.chart).domain;
  for (int d = 0; d < f_.m(); ++d) {
    const double t = std::floor((p.coords(d) - domain.lo(d)) / step(p.chart, d));
    key.index[static_cast<std::size_t>(d)] =
        std::clamp<std::int64_t>(static_cast<std::int64_t>(t), 0, count(p.chart, d) - 1);
  }
  return key;
}

Vec CellLattice::center_coords(int chart,
                               const std::array<std::int64_t, kMaxParamDim>& index) const {
  const Box& domain = f_.chart(chart).domain;
  Vec c(f_.m());
  for (int d = 0; d < f_.m(); ++d) {
    c(d) = domain.lo(d) +
           (static_cast<double>(index[static_cast<std::size_t>(d)]) + 0.5) * step(chart, d);
  }
  return c;
}

ParamPoint CellLattice::center(const CellKey& key) const {
  return ParamPoint{key.chart, center_coords(key.chart, key.index)};
}

CellLattice::Step CellLattice::neighbor(const CellKey& key, int axis, int dir) const {
  Step out;
  CellKey next = key;
  auto& i = next.index[static_cast<std::size_t>(axis)];
  i += dir;
  const std::int64_t n = count(key.chart, axis);
  if (i >= 0 && i < n) {
    out.coords = center_coords(next.chart, next.index);
    out.key = next;
    return out;
  }
  const Chart& chart = f_.chart(key.chart);
  if (chart.periodic[static_cast<std::size_t>(axis)]) {
    i = (i % n + n) % n;
    out.coords = center_coords(next.chart, next.index);
    out.key = next;
    return out;
  }
  out.coords = center_coords(next.chart, next.index);
  if (!f_.has_locator()) {
    out.escaped = true;
    return out;
  }
  auto located = f_.locate(chart.eval(out.coords));
  if (!located || !f_.chart(located->chart).domain.contains(located->coords)) return out;
  const CellKey across = cell_of(*located);
  if (across == key) return out;
  out.key = across;
  out.coords = center_coords(across.chart, across.index);
  return out;
}

double ComponentRegion::parameter_volume() const {
  double v = 0.0;
  for (const auto& cell : cells) v += lattice->cell_volume(cell.key.chart);
  return v;
}

bool ComponentRegion::near(const ParamPoint& p) const {
  const CellKey start = lattice->cell_of(p);
  if (contains(start)) return true;
  const int m = lattice->immersion().m();
  std::vector<CellKey> frontier{start};
  for (int depth = 0; depth < 2; ++depth) {
    std::vector<CellKey> next;
    for (const auto& key : frontier) {
      for (int axis = 0; axis < m; ++axis) {
        for (int dir : {-1, 1}) {
          const auto step = lattice->neighbor(key, axis, dir);
          if (!step.key) continue;
          if (contains(*step.key)) return true;
          next.push_back(*step.key);
        }
      }
    }
    frontier = std::move(next);
  }
  return false;
}

double jacobian_scale(const FrameContext& ctx) {
  if (ctx.immersion.jacobian_bound() > 0.0) return ctx.immersion.jacobian_bound();
  Eigen::JacobiSVD<Mat> svd(ctx.immersion.jacobian(ctx.base));
  return 2.0 * svd.singularValues()(0);
}

double default_cell_size(const FrameContext& ctx) {
  return ctx.radius / (32.0 * jacobian_scale(ctx));
}

ComponentRegion component(const FrameContext& ctx, double h) {
  const double sigma = jacobian_scale(ctx);
  if (!(h > 0.0)) throw PreconditionViolated("cell size must be positive");
  if (h > ctx.radius / (16.0 * sigma) * (1.0 + 1e-12))
    throw PreconditionViolated("cell size exceeds r / (16 sigma_max)");
  const ParamImmersion& f = ctx.immersion;
  const int m = f.m();
  const int k = f.k();
  const double r = ctx.radius;

  ComponentRegion region;
  region.lattice = std::make_shared<const CellLattice>(f, h);
  region.radius = r;
  region.jacobian_bound = sigma;
  const CellLattice& lattice = *region.lattice;

  auto frame_of = [&](const ParamPoint& p) { return ctx.to_frame(f.eval(p)); };
  auto add = [&](const CellKey& key, const Vec& z) {
    region.lookup.emplace(key, region.cells.size());
    region.cells.push_back(RegionCell{key, z.head(m), z.tail(k)});
  };

  // The base cell belongs to the component even if its center does not.
  const CellKey start = lattice.cell_of(ctx.base);
  add(start, frame_of(lattice.center(start)));
  std::unordered_map<CellKey, bool, CellKeyHash> rejected;
  for (std::size_t next = 0; next < region.cells.size(); ++next) {
    const CellKey key = region.cells[next].key;
    for (int axis = 0; axis < m; ++axis) {
      for (int dir : {-1, 1}) {
        const auto step = lattice.neighbor(key, axis, dir);
        if (step.escaped) {
          const Vec z = ctx.to_frame(f.chart(key.chart).eval(step.coords));
          if (z.head(m).norm() < r)
            throw BoundaryEscape("component of radius " + std::to_string(r) +
                                 " reaches the edge of chart " + std::to_string(key.chart));
          continue;
        }
        if (!step.key || region.contains(*step.key) || rejected.contains(*step.key)) continue;
        const Vec z = frame_of(lattice.center(*step.key));
        if (z.head(m).norm() < r) {
          add(*step.key, z);
        } else {
          rejected.emplace(*step.key, true);
        }
      }
    }
  }
  return region;
}

HeightSolution solve_height(const FrameContext& ctx, const ComponentRegion& region, const Vec& x,
                            const ParamPoint& seed) {
  constexpr int kMaxIterations = 100;
  const ParamImmersion& f = ctx.immersion;
  const int m = f.m();
  const int k = f.k();
  const double tol = 1e-10 * std::max(1.0, ctx.radius);
  const double floor_tol =
      4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ctx.iso.translation().norm());
  const Mat rt = ctx.iso.rotation().transpose();

  HeightSolution out;
  auto start = f.normalize(seed);
  if (!start) return out;
  ParamPoint p = *start;
  Vec z = ctx.to_frame(f.eval(p));
  double res = (z.head(m) - x).norm();
  bool hit_edge = false;

  int it = 0;
  for (; it < kMaxIterations && res > floor_tol; ++it) {
    const Mat jg = (rt * f.jacobian(p)).topRows(m);
    Eigen::JacobiSVD<Mat> svd(jg, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const Vec delta = svd.solve(x - z.head(m));
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
      ParamPoint trial{p.chart, p.coords + alpha * delta};
      auto normalized = f.normalize(trial);
      if (!normalized) {
        hit_edge = true;
        continue;
      }
      const Vec zt = ctx.to_frame(f.eval(*normalized));
      const double rt_res = (zt.head(m) - x).norm();
      if (rt_res < res * (1.0 - 1e-4 * alpha)) {
        p = *normalized;
        z = zt;
        res = rt_res;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  out.point = p;
  out.height = z.tail(k);
  out.residual = res;
  out.iterations = it;
  if (res > tol) {
    out.status = hit_edge ? SolveStatus::left_region : SolveStatus::no_convergence;
    return out;
  }
  out.status = region.near(p) ? SolveStatus::ok : SolveStatus::left_region;
  return out;
}

const char* to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::ok:
      return "ok";
    case NodeStatus::vertical:
      return "vertical";
    case NodeStatus::multi_sheet:
      return "multi_sheet";
    case NodeStatus::uncovered:
      return "uncovered";
  }
  return "unknown";
}

std::size_t GraphSample::count(NodeStatus status) const {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [status](const GraphNode& n) { return n.status == status; }));
}

bool GraphSample::is_graph() const {
  return count(NodeStatus::multi_sheet) == 0 && count(NodeStatus::uncovered) == 0;
}

namespace {

// Fills status, height and derivative of a node from a converged solve.
void finish_node(const FrameContext& ctx, const HeightSolution& sol, GraphNode& node) {
  node.param = sol.point;
  node.height = sol.height;
  const Subspace tangent =
      tangent_space(ctx.immersion, sol.point).transformed(ctx.iso.rotation().transpose());
  if (auto graph = subspace_graph_matrix(tangent)) {
    node.derivative = std::move(graph->matrix);
    node.status = NodeStatus::ok;
  } else {
    node.derivative.reset();
    node.status = NodeStatus::vertical;
  }
}

bool solved(const GraphNode& node) {
  return node.status == NodeStatus::ok || node.status == NodeStatus::vertical;
}

std::vector<Vec> rim_directions(int m, int resolution, double spacing, double limit) {
  std::vector<Vec> dirs;
  if (m == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (m == 2) {
    const int count = 4 * resolution;
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * i / count;
      dirs.push_back(Vec{{std::cos(a), std::sin(a)}});
    }
  } else {
    // Radial projections of the lattice points just outside the ball.
    const int half = resolution / 2 + 1;
    const int side = 2 * half + 1;
    std::int64_t total = 1;
    for (int d = 0; d < m; ++d) total *= side;
    for (std::int64_t lin = 0; lin < total; ++lin) {
      Vec x(m);
      std::int64_t rest = lin;
      for (int d = 0; d < m; ++d) {
        x(d) = static_cast<double>(rest % side - half) * spacing;
        rest /= side;
      }
      if (x.norm() < limit) continue;
      bool touches = false;
      for (int d = 0; d < m && !touches; ++d) {
        for (double dir : {-1.0, 1.0}) {
          Vec y = x;
          y(d) += dir * spacing;
          if (y.norm() < limit) touches = true;
        }
      }
      if (touches) dirs.push_back(x.normalized());
    }
  }
  return dirs;
}

}  // namespace

GraphSample extract(const FrameContext& ctx, int resolution, double h,
                    const ExtractOptions& options) {
  if (resolution < 8) throw PreconditionViolated("grid resolution must be at least 8");
  const int m = ctx.m();
  const int k = ctx.k();
  const double r = ctx.radius;
  const double limit = r * (1.0 - 1e-9);
  const int half = resolution / 2;
  const double spacing = 2.0 * r / resolution;
  const int side = 2 * half + 1;

  ComponentRegion region;
  if (h > 0.0) {
    region = component(ctx, h);
  } else {
    region = component(ctx, default_cell_size(ctx));
    if (options.refine_component) {
      ComponentRegion finer = component(ctx, 0.5 * default_cell_size(ctx));
      const double coarse = region.parameter_volume();
      const double fine = finer.parameter_volume();
      if (std::abs(coarse - fine) > 0.01 * fine) region = std::move(finer);
    }
  }

  GraphSample sample;
  sample.m = m;
  sample.k = k;
  sample.radius = r;
  sample.resolution = resolution;
  sample.cell_size = region.cell_size();

  std::int64_t total = 1;
  for (int d = 0; d < m; ++d) {
    total *= side;
    if (total > 50'000'000) throw PreconditionViolated("grid too large");
  }
  std::vector<std::int32_t> slot(static_cast<std::size_t>(total), -1);
  std::vector<std::array<int, kMaxParamDim>> tuples;
  std::vector<std::vector<std::int32_t>> layers(static_cast<std::size_t>(half) + 1);
  for (std::int64_t lin = 0; lin < total; ++lin) {
    std::array<int, kMaxParamDim> tuple{};
    Vec x(m);
    std::int64_t rest = lin;
    int layer = 0;
    for (int d = 0; d < m; ++d) {
      tuple[static_cast<std::size_t>(d)] = static_cast<int>(rest % side) - half;
      rest /= side;
      x(d) = tuple[static_cast<std::size_t>(d)] * spacing;
      layer = std::max(layer, std::abs(tuple[static_cast<std::size_t>(d)]));
    }
    if (!(x.norm() < limit)) continue;
    const auto id = static_cast<std::int32_t>(sample.nodes.size());
    slot[static_cast<std::size_t>(lin)] = id;
    GraphNode node;
    node.x = std::move(x);
    node.height = Vec::Constant(k, std::numeric_limits<double>::quiet_NaN());
    sample.nodes.push_back(std::move(node));
    tuples.push_back(tuple);
    layers[static_cast<std::size_t>(layer)].push_back(id);
  }

  auto linear = [&](const std::array<int, kMaxParamDim>& t) -> std::int64_t {
    std::int64_t lin = 0;
    std::int64_t stride = 1;
    for (int d = 0; d < m; ++d) {
      const int v = t[static_cast<std::size_t>(d)];
      if (v < -half || v > half) return -1;
      lin += static_cast<std::int64_t>(v + half) * stride;
      stride *= side;
    }
    return lin;
  };
  auto node_at = [&](const std::array<int, kMaxParamDim>& t) -> std::int32_t {
    const std::int64_t lin = linear(t);
    return lin < 0 ? -1 : slot[static_cast<std::size_t>(lin)];
  };

  // Neighbor offsets in {-1,0,1}^m, face neighbors first.
  std::vector<std::array<int, kMaxParamDim>> offsets;
  {
    std::int64_t count = 1;
    for (int d = 0; d < m; ++d) count *= 3;
    for (std::int64_t lin = 0; lin < count; ++lin) {
      std::array<int, kMaxParamDim> off{};
      std::int64_t rest = lin;
      bool zero = true;
      for (int d = 0; d < m; ++d) {
        off[static_cast<std::size_t>(d)] = static_cast<int>(rest % 3) - 1;
        rest /= 3;
        zero = zero && off[static_cast<std::size_t>(d)] == 0;
      }
      if (!zero) offsets.push_back(off);
    }
    std::stable_sort(offsets.begin(), offsets.end(), [m](const auto& a, const auto& b) {
      int la = 0;
      int lb = 0;
      for (int d = 0; d < m; ++d) {
        la += std::abs(a[static_cast<std::size_t>(d)]);
        lb += std::abs(b[static_cast<std::size_t>(d)]);
      }
      return la < lb;
    });
  }

  // Center node: the base point itself.
  {
    const std::int32_t center = layers[0].front();
    const auto sol = solve_height(ctx, region, sample.nodes[static_cast<std::size_t>(center)].x,
                                  ctx.base);
    if (sol.status != SolveStatus::ok)
      throw std::logic_error("height solve failed at the base point");
    finish_node(ctx, sol, sample.nodes[static_cast<std::size_t>(center)]);
  }

  // Continuation outward, one Chebyshev layer at a time; nodes within a layer
  // only read the finished previous layer.
  for (int layer = 1; layer <= half; ++layer) {
    const auto& ids = layers[static_cast<std::size_t>(layer)];
    parallel_for(ids.size(), options.threads, [&](std::size_t i) {
      const std::int32_t id = ids[i];
      GraphNode& node = sample.nodes[static_cast<std::size_t>(id)];
      const auto& tuple = tuples[static_cast<std::size_t>(id)];
      int attempts = 0;
      for (const auto& off : offsets) {
        std::array<int, kMaxParamDim> t = tuple;
        int seed_layer = 0;
        for (int d = 0; d < m; ++d) {
          t[static_cast<std::size_t>(d)] += off[static_cast<std::size_t>(d)];
          seed_layer = std::max(seed_layer, std::abs(t[static_cast<std::size_t>(d)]));
        }
        if (seed_layer != layer - 1) continue;
        const std::int32_t seed = node_at(t);
        if (seed < 0 || !solved(sample.nodes[static_cast<std::size_t>(seed)])) continue;
        const auto sol =
            solve_height(ctx, region, node.x, sample.nodes[static_cast<std::size_t>(seed)].param);
        if (sol.status == SolveStatus::ok) {
          finish_node(ctx, sol, node);
          return;
        }
        if (++attempts == 3) return;
      }
    });
  }

  if (options.rim_nodes) {
    const auto dirs = rim_directions(m, resolution, spacing, limit);
    const std::size_t first = sample.nodes.size();
    for (const auto& dir : dirs) {
      GraphNode node;
      node.x = limit * dir;
      node.height = Vec::Constant(k, std::numeric_limits<double>::quiet_NaN());
      node.on_rim = true;
      sample.nodes.push_back(std::move(node));
    }
    parallel_for(dirs.size(), options.threads, [&](std::size_t i) {
      GraphNode& node = sample.nodes[first + i];
      std::array<int, kMaxParamDim> c{};
      for (int d = 0; d < m; ++d) {
        c[static_cast<std::size_t>(d)] = std::clamp(
            static_cast<int>(std::lround(node.x(d) / spacing)), -half, half);
      }
      std::int32_t best = -1;
      double best_dist = std::numeric_limits<double>::infinity();
      std::int64_t count = 1;
      for (int d = 0; d < m; ++d) count *= 5;
      for (std::int64_t lin = 0; lin < count; ++lin) {
        std::array<int, kMaxParamDim> t = c;
        std::int64_t rest = lin;
        for (int d = 0; d < m; ++d) {
          t[static_cast<std::size_t>(d)] += static_cast<int>(rest % 5) - 2;
          rest /= 5;
        }
        const std::int32_t id = node_at(t);
        if (id < 0 || !solved(sample.nodes[static_cast<std::size_t>(id)])) continue;
        const double dist = (sample.nodes[static_cast<std::size_t>(id)].x - node.x).norm();
        if (dist < best_dist) {
          best_dist = dist;
          best = id;
        }
      }
      if (best < 0) return;
      const auto sol =
          solve_height(ctx, region, node.x, sample.nodes[static_cast<std::size_t>(best)].param);
      if (sol.status == SolveStatus::ok) finish_node(ctx, sol, node);
    });
  }

  // A region cell whose height is far from the sheet solved over the same
  // grid cell belongs to another sheet. The linear prediction from the node
  // screens cells; a candidate is confirmed by solving the sheet exactly at
  // the cell's x, since steep oscillating sheets defeat the prediction.
  const double gap_threshold = 10.0 * region.cell_size() * region.jacobian_bound;
  std::vector<std::pair<std::size_t, std::int32_t>> candidates;
  for (std::size_t c = 0; c < region.cells.size(); ++c) {
    const RegionCell& cell = region.cells[c];
    std::array<int, kMaxParamDim> t{};
    for (int d = 0; d < m; ++d)
      t[static_cast<std::size_t>(d)] = static_cast<int>(std::lround(cell.x(d) / spacing));
    const std::int32_t id = node_at(t);
    if (id < 0) continue;
    const GraphNode& node = sample.nodes[static_cast<std::size_t>(id)];
    if (!solved(node)) continue;
    Vec predicted = node.height;
    if (node.derivative) predicted += *node.derivative * (cell.x - node.x);
    if ((cell.height - predicted).norm() > gap_threshold) candidates.emplace_back(c, id);
  }
  std::vector<char> confirmed(candidates.size(), 0);
  parallel_for(candidates.size(), options.threads, [&](std::size_t i) {
    const RegionCell& cell = region.cells[candidates[i].first];
    const GraphNode& node = sample.nodes[static_cast<std::size_t>(candidates[i].second)];
    const auto sol = solve_height(ctx, region, cell.x, node.param);
    confirmed[i] = sol.status != SolveStatus::ok ||
                   (cell.height - sol.height).norm() > gap_threshold;
  });
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (confirmed[i])
      sample.nodes[static_cast<std::size_t>(candidates[i].second)].status = NodeStatus::multi_sheet;
  }
  return sample;
}

NormEstimates norms(const GraphSample& sample) {
  const std::size_t multi = sample.count(NodeStatus::multi_sheet);
  const std::size_t uncovered = sample.count(NodeStatus::uncovered);
  if (multi > 0 || uncovered > 0)
    throw NotAGraph("not a graph over B_r: " + std::to_string(multi) + " multi-sheet and " +
                    std::to_string(uncovered) + " uncovered nodes");
  NormEstimates out;
  for (const auto& node : sample.nodes) {
    out.c0 = std::max(out.c0, node.height.norm());
    if (node.status == NodeStatus::vertical) {
      out.vertical = true;
    } else {
      out.lip = std::max(out.lip, matrix_norm(*node.derivative));
    }
  }
  if (out.vertical) {
    out.lip = std::numeric_limits<double>::infinity();
    out.c0_bound = std::numeric_limits<double>::infinity();
  } else {
    out.c0_bound = out.c0 + sample.radius / sample.resolution * out.lip;
  }
  return out;
}

}  // namespace tangraph
