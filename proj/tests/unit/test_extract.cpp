#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "tangraph/errors.hpp"
#include "tangraph/extract.hpp"
#include "tangraph/report_io.hpp"
#include "tangraph/zoo.hpp"
#include "test_support.hpp"

using namespace tangraph;

namespace {

ParamPoint at(double t) { return ParamPoint{0, Vec{{t}}}; }

// Sphere base point (0, 0, 1): face 4 is the +z face, center (0, 0).
ParamPoint north() { return ParamPoint{4, Vec{{0.0, 0.0}}}; }

// Canonical frame composed with a rotation that keeps the tangent plane.
FrameContext rotated_frame(const ParamImmersion& f, const ParamPoint& q, double r, const Mat& qm,
                           const Mat& qk) {
  const FrameContext canon = FrameContext::canonical(f, q, r);
  const int m = f.m(), k = f.k();
  Mat block = Mat::Zero(m + k, m + k);
  block.topLeftCorner(m, m) = qm;
  block.bottomRightCorner(k, k) = qk;
  const Isometry iso(canon.iso.rotation() * block, canon.iso.translation());
  return FrameContext(f, q, iso, r);
}

double max_reconstruction_error(const FrameContext& ctx, const GraphSample& s) {
  double worst = 0.0;
  for (const auto& node : s.nodes) {
    if (node.status != NodeStatus::ok) continue;
    Vec local(ctx.m() + ctx.k());
    local << node.x, node.height;
    worst = std::max(worst, (ctx.iso.apply(local) - ctx.immersion.eval(node.param)).norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("FrameContext validation") {
  const auto f = make_circle(1.0);
  CHECK_THROWS_AS(FrameContext::canonical(f, at(0.0), 0.0), PreconditionViolated);
  CHECK_THROWS_AS(FrameContext(f, at(0.0), Isometry::identity(2), 0.5), PreconditionViolated);
  const auto ctx = FrameContext::canonical(f, at(0.0), 0.5);
  CHECK(is_admissible(ctx.iso, f.eval(at(0.0)), tangent_space(f, at(0.0))));
}

TEST_CASE("component examples") {
  SUBCASE("flat ball") {
    const auto f = make_flat(2, 1, 10.0);
    const auto ctx = FrameContext::canonical(f, ParamPoint{0, Vec::Zero(2)}, 1.0);
    const double h = 1.0 / 32.0;
    const auto region = component(ctx, h);
    for (const auto& cell : region.cells) REQUIRE(cell.x.norm() < 1.0);
    // Cell count approximates the unit disk area.
    CHECK(region.parameter_volume() == doctest::Approx(std::numbers::pi).epsilon(0.02));
  }
  SUBCASE("circle arc") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 0.5);
    const double h = default_cell_size(ctx);
    const auto region = component(ctx, h);
    const double arc = 2.0 * std::asin(0.5);
    CHECK(std::abs(region.parameter_volume() - arc) <= 2.0 * h);
    for (const auto& cell : region.cells) {
      const double t = region.lattice->center(cell.key).coords(0);
      REQUIRE(std::abs(t) < std::asin(0.5) + 1e-12);
    }
  }
  SUBCASE("circle beyond its radius covers everything") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 1.2);
    const auto region = component(ctx, default_cell_size(ctx));
    CHECK(region.parameter_volume() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
  }
  SUBCASE("boundary escape") {
    const auto f = make_flat(1, 1, 2.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 5.0);
    CHECK_THROWS_AS(component(ctx, default_cell_size(ctx)), BoundaryEscape);
  }
  SUBCASE("cell size precondition") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 0.5);
    CHECK_THROWS_AS(component(ctx, 0.0), PreconditionViolated);
    CHECK_THROWS_AS(component(ctx, 0.5), PreconditionViolated);
  }
  SUBCASE("sphere crosses faces") {
    const auto f = make_sphere(1.0);
    const ParamPoint corner{0, Vec{{0.95, 0.95}}};
    const auto ctx = FrameContext::canonical(f, corner, 0.4);
    const auto region = component(ctx, default_cell_size(ctx));
    bool other_face = false;
    for (const auto& cell : region.cells) other_face |= cell.key.chart != 0;
    CHECK(other_face);
    for (const auto& cell : region.cells) REQUIRE(cell.x.norm() < 0.4);
  }
}

TEST_CASE("component is deterministic and face connected") {
  const auto f = make_torus(2.0, 0.5);
  const auto ctx = FrameContext::canonical(f, ParamPoint{0, Vec{{0.3, 1.0}}}, 0.4);
  const double h = default_cell_size(ctx);
  const auto a = component(ctx, h);
  const auto b = component(ctx, h);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) REQUIRE(a.cells[i].key == b.cells[i].key);
  CHECK(a.cells[0].key == a.lattice->cell_of(ctx.base));
  // Flood from cells[0] over region cells only reaches every cell.
  std::vector<bool> seen(a.cells.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (int axis = 0; axis < 2; ++axis) {
      for (int dir : {-1, 1}) {
        const auto step = a.lattice->neighbor(a.cells[i].key, axis, dir);
        if (!step.key) continue;
        auto it = a.lookup.find(*step.key);
        if (it == a.lookup.end() || seen[it->second]) continue;
        seen[it->second] = true;
        stack.push_back(it->second);
      }
    }
  }
  for (bool s : seen) REQUIRE(s);
}

TEST_CASE("solve_height examples") {
  SUBCASE("flat") {
    const auto f = make_flat(2, 2, 10.0);
    const auto ctx = FrameContext::canonical(f, ParamPoint{0, Vec::Zero(2)}, 1.0);
    const auto region = component(ctx, default_cell_size(ctx));
    const Vec x{{0.3, -0.6}};
    const auto s = solve_height(ctx, region, x, ctx.base);
    REQUIRE(s.status == SolveStatus::ok);
    CHECK((s.point.coords - x).norm() <= 1e-12);
    CHECK(s.height.norm() <= 1e-12);
  }
  SUBCASE("circle") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 0.5);
    const auto region = component(ctx, default_cell_size(ctx));
    const auto s = solve_height(ctx, region, Vec{{0.3}}, ctx.base);
    REQUIRE(s.status == SolveStatus::ok);
    CHECK(std::abs(s.point.coords(0)) == doctest::Approx(std::asin(0.3)).epsilon(1e-10));
    CHECK(std::abs(s.point.coords(0)) == doctest::Approx(0.30469).epsilon(1e-5));
    CHECK(std::abs(s.height(0)) == doctest::Approx(1.0 - std::sqrt(0.91)).epsilon(1e-10));
    CHECK(std::abs(s.height(0)) == doctest::Approx(0.046061).epsilon(1e-4));
    CHECK(s.residual <= 1e-10);
  }
  SUBCASE("sphere") {
    const auto f = make_sphere(1.0);
    const auto ctx = FrameContext::canonical(f, north(), 0.9);
    const auto region = component(ctx, default_cell_size(ctx));
    const auto s = solve_height(ctx, region, Vec{{0.3, 0.4}}, ctx.base);
    REQUIRE(s.status == SolveStatus::ok);
    CHECK(std::abs(s.height(0)) == doctest::Approx(1.0 - std::sqrt(0.75)).epsilon(1e-10));
    CHECK(std::abs(s.height(0)) == doctest::Approx(0.133975).epsilon(1e-5));
  }
  SUBCASE("outside the component") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 0.5);
    const auto region = component(ctx, default_cell_size(ctx));
    // |x| > 1 has no preimage at all.
    const auto s = solve_height(ctx, region, Vec{{1.5}}, ctx.base);
    CHECK(s.status != SolveStatus::ok);
  }
}

TEST_CASE("extract and norms examples") {
  SUBCASE("flat") {
    const auto f = make_flat(2, 1, 10.0);
    const auto ctx = FrameContext::canonical(f, ParamPoint{0, Vec::Zero(2)}, 1.0);
    const auto s = extract(ctx, 32);
    CHECK(s.is_graph());
    CHECK(s.count(NodeStatus::ok) == s.nodes.size());
    const auto n = norms(s);
    CHECK(n.c0 <= 1e-14);
    CHECK(n.lip <= 1e-14);
  }
  SUBCASE("circle r = 0.5") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 0.5);
    const auto s = extract(ctx, 256);
    REQUIRE(s.is_graph());
    CHECK(s.count(NodeStatus::ok) == s.nodes.size());
    const auto n = norms(s);
    const double c0 = 1.0 - std::sqrt(0.75);
    const double lip = 0.5 / std::sqrt(0.75);
    CHECK(n.c0 <= c0 + 1e-12);
    CHECK(n.c0 >= c0 - 1e-8);
    CHECK(n.c0_bound >= c0);
    CHECK(n.c0_bound <= c0 + 0.5 / 256 * 0.578);
    CHECK(n.lip == doctest::Approx(lip).epsilon(1e-3));
    CHECK_FALSE(n.vertical);
  }
  SUBCASE("circle r = 1.2 is two sheets") {
    const auto f = make_circle(1.0);
    const auto ctx = FrameContext::canonical(f, at(0.0), 1.2);
    const auto s = extract(ctx, 64);
    CHECK(s.count(NodeStatus::multi_sheet) > 0);
    CHECK_FALSE(s.is_graph());
    CHECK_THROWS_AS(norms(s), NotAGraph);
  }
  SUBCASE("lip grows as r approaches 1") {
    const auto f = make_circle(1.0);
    double previous = 0.0;
    for (double r : {0.9, 0.99, 0.999}) {
      const auto n = norms(extract(FrameContext::canonical(f, at(0.0), r), 64));
      const double exact = r / std::sqrt(1.0 - r * r);
      CHECK(n.lip == doctest::Approx(exact).epsilon(1e-4));
      CHECK(n.lip > previous);
      previous = n.lip;
    }
  }
  SUBCASE("sphere closed forms") {
    const auto f = make_sphere(1.0);
    const auto s = extract(FrameContext::canonical(f, north(), 0.9), 64);
    const auto n = norms(s);
    CHECK(n.c0 == doctest::Approx(1.0 - std::sqrt(1.0 - 0.81)).epsilon(1e-6));
    CHECK(n.lip == doctest::Approx(0.9 / std::sqrt(1.0 - 0.81)).epsilon(1e-6));
  }
  SUBCASE("resolution precondition") {
    const auto f = make_circle(1.0);
    CHECK_THROWS_AS(extract(FrameContext::canonical(f, at(0.0), 0.5), 4), PreconditionViolated);
  }
}

TEST_CASE("reconstruction invariant") {
  for (const auto& entry : zoo_entries()) {
    CAPTURE(entry.name);
    const auto f = entry.builder(entry.defaults);
    const auto qs = f.sample(3, 7);
    for (double r : {0.05, 0.3}) {
      for (const auto& q : qs) {
        const auto ctx = FrameContext::canonical(f, q, r);
        GraphSample s;
        try {
          s = extract(ctx, 32);
        } catch (const BoundaryEscape&) {
          continue;
        }
        REQUIRE(max_reconstruction_error(ctx, s) <= 1e-8 * std::max(1.0, r));
      }
    }
  }
}

TEST_CASE("frame independence of the norms") {
  std::mt19937_64 rng(99);
  SUBCASE("circle, reversed orientation") {
    const auto f = make_circle(1.0);
    const auto a = norms(extract(FrameContext::canonical(f, at(0.7), 0.6), 64));
    const Mat flip = -Mat::Identity(1, 1);
    const auto b = norms(extract(rotated_frame(f, at(0.7), 0.6, flip, flip), 64));
    CHECK(std::abs(a.c0 - b.c0) <= 1e-6);
    CHECK(std::abs(a.lip - b.lip) <= 1e-6);
  }
  SUBCASE("sphere, random rotations of the tangent plane") {
    const auto f = make_sphere(1.0);
    const ParamPoint q{1, Vec{{0.3, -0.2}}};
    const auto a = norms(extract(FrameContext::canonical(f, q, 0.6), 64));
    for (int trial = 0; trial < 3; ++trial) {
      const auto b = norms(
          extract(rotated_frame(f, q, 0.6, random_rotation(2, rng), Mat::Identity(1, 1)), 64));
      CHECK(std::abs(a.c0 - b.c0) <= 1e-6);
      CHECK(std::abs(a.lip - b.lip) <= 1e-6);
    }
  }
  SUBCASE("torus, grid-preserving rotation of the tangent plane") {
    // The torus has no rotational symmetry about the normal, so only
    // rotations that map the grid to itself give node-for-node comparable
    // samples.
    const auto f = make_torus(2.0, 0.5);
    const ParamPoint q{0, Vec{{0.4, 1.1}}};
    const auto a = norms(extract(FrameContext::canonical(f, q, 0.3), 64));
    Mat quarter(2, 2);
    quarter << 0, -1, 1, 0;
    Mat swap_flip(2, 2);
    swap_flip << 0, 1, 1, 0;
    const Mat neg = -Mat::Identity(1, 1);
    for (const auto& [qm, qk] : {std::pair{quarter, Mat(Mat::Identity(1, 1))},
                                 std::pair{swap_flip, neg}}) {
      const auto b = norms(extract(rotated_frame(f, q, 0.3, qm, qk), 64));
      CHECK(std::abs(a.c0 - b.c0) <= 1e-6);
      CHECK(std::abs(a.lip - b.lip) <= 1e-6);
    }
  }
}

TEST_CASE("restriction monotonicity") {
  const auto f = make_torus(2.0, 0.5);
  const ParamPoint q{0, Vec{{0.9, -0.4}}};
  // N doubles with r so the smaller grid is a subset of the larger one.
  const auto small = extract(FrameContext::canonical(f, q, 0.2), 32, 0.0, {1, true, false});
  const auto large = extract(FrameContext::canonical(f, q, 0.4), 64, 0.0, {1, true, false});
  std::map<std::pair<long, long>, const GraphNode*> index;
  const double spacing = 2.0 * 0.4 / 64;
  for (const auto& node : large.nodes)
    index[{std::lround(node.x(0) / spacing), std::lround(node.x(1) / spacing)}] = &node;
  double c0_small = 0.0, c0_common = 0.0, lip_small = 0.0, lip_common = 0.0;
  for (const auto& node : small.nodes) {
    const auto it = index.find({std::lround(node.x(0) / spacing), std::lround(node.x(1) / spacing)});
    REQUIRE(it != index.end());
    REQUIRE(node.status == NodeStatus::ok);
    REQUIRE(it->second->status == NodeStatus::ok);
    REQUIRE((node.height - it->second->height).norm() <= 1e-9);
    c0_small = std::max(c0_small, node.height.norm());
    c0_common = std::max(c0_common, it->second->height.norm());
    lip_small = std::max(lip_small, matrix_norm(*node.derivative));
    lip_common = std::max(lip_common, matrix_norm(*it->second->derivative));
  }
  CHECK(c0_small <= c0_common + 1e-9);
  CHECK(lip_small <= lip_common + 1e-9);
  const auto ns = norms(small), nl = norms(large);
  CHECK(ns.c0 <= nl.c0 + 1e-9);
  CHECK(ns.lip <= nl.lip + 1e-9);
}

TEST_CASE("exact Du matches centered differences of u") {
  struct Case {
    ParamImmersion f;
    ParamPoint q;
    double r;
  };
  const std::vector<Case> cases = {
      {make_circle(1.0), at(0.3), 0.5},
      {make_sphere(1.0), ParamPoint{2, Vec{{0.1, 0.2}}}, 0.5},
      {make_torus(2.0, 0.5), ParamPoint{0, Vec{{0.2, 0.3}}}, 0.3},
      {make_helix(1.0, 20.0), at(1.0), 0.5},
      {zoo_build("graph_of"), ParamPoint{0, Vec{{0.1, -0.2}}}, 0.5},
  };
  const int n = 64;
  for (const auto& c : cases) {
    CAPTURE(c.f.name());
    const auto s = extract(FrameContext::canonical(c.f, c.q, c.r), n, 0.0, {1, true, false});
    const double spacing = 2.0 * c.r / n;
    const int m = s.m;
    std::map<std::vector<long>, const GraphNode*> index;
    auto key = [&](const Vec& x) {
      std::vector<long> k(static_cast<std::size_t>(m));
      for (int d = 0; d < m; ++d) k[static_cast<std::size_t>(d)] = std::lround(x(d) / spacing);
      return k;
    };
    for (const auto& node : s.nodes) index[key(node.x)] = &node;
    // Curvature scale of these entries is at most ~4 (torus inner radius).
    const double tol = std::max(1e-4, 10.0 * spacing * spacing * 4.0);
    int compared = 0;
    for (const auto& node : s.nodes) {
      Mat fd(s.k, m);
      bool complete = true;
      for (int d = 0; d < m && complete; ++d) {
        Vec xp = node.x, xm = node.x;
        xp(d) += spacing;
        xm(d) -= spacing;
        const auto p = index.find(key(xp));
        const auto q = index.find(key(xm));
        if (p == index.end() || q == index.end()) {
          complete = false;
          break;
        }
        fd.col(d) = (p->second->height - q->second->height) / (2.0 * spacing);
      }
      if (!complete) continue;
      ++compared;
      REQUIRE((fd - *node.derivative).cwiseAbs().maxCoeff() <= tol);
    }
    CHECK(compared > 0);
  }
}

TEST_CASE("extract is deterministic across thread counts") {
  const auto f = make_sphere(1.0);
  const auto ctx = FrameContext::canonical(f, ParamPoint{3, Vec{{0.5, 0.8}}}, 0.7);
  const auto a = extract(ctx, 48, 0.0, {1, true, true});
  const auto b = extract(ctx, 48, 0.0, {4, true, true});
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    REQUIRE(a.nodes[i].status == b.nodes[i].status);
    REQUIRE((a.nodes[i].x - b.nodes[i].x).norm() == 0.0);
    REQUIRE((a.nodes[i].height - b.nodes[i].height).norm() == 0.0);
  }
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("csv layout") {
  const auto f = make_sphere(1.0);
  const auto s = extract(FrameContext::canonical(f, north(), 0.3), 8);
  std::ostringstream out;
  write_csv(out, s);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,x2,u1,status,du_norm");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == s.nodes.size());
}
