#pragma once

// Local graph representation of an immersion over its affine tangent plane:
// the component U_{r,q}, the graph function u on B_r and its norms.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tangraph/geometry.hpp"
#include "tangraph/immersion.hpp"

namespace tangraph {

// Base point, admissible frame and radius of one graph representation.
struct FrameContext {
  ParamImmersion immersion;
  ParamPoint base;
  Isometry iso;
  double radius;

  // Throws PreconditionViolated unless iso is admissible at base and r > 0.
  FrameContext(ParamImmersion f, ParamPoint base, Isometry iso, double radius);

  // Uses make_admissible_isometry at f(base) and its tangent plane.
  static FrameContext canonical(const ParamImmersion& f, const ParamPoint& base, double radius);

  int m() const { return immersion.m(); }
  int k() const { return immersion.k(); }
  // iso^{-1}(y)
  Vec to_frame(const Vec& y) const { return iso.apply_inverse(y); }
};

inline constexpr int kMaxParamDim = 6;

struct CellKey {
  int chart = 0;
  std::array<std::int64_t, kMaxParamDim> index{};
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& key) const noexcept;
};

// Per-chart regular lattice of parameter cells. Each chart axis is split into
// ceil(extent / h) equal cells.
class CellLattice {
 public:
  CellLattice(ParamImmersion f, double h);

  double cell_size() const { return h_; }
  const ParamImmersion& immersion() const { return f_; }
  std::int64_t count(int chart, int axis) const;
  double step(int chart, int axis) const;
  double cell_volume(int chart) const;

  // Cell containing a normalized parameter point (clamped to the domain).
  CellKey cell_of(const ParamPoint& p) const;
  // Center coordinates for an index that may lie outside the chart box.
  Vec center_coords(int chart, const std::array<std::int64_t, kMaxParamDim>& index) const;
  ParamPoint center(const CellKey& key) const;

  struct Step {
    std::optional<CellKey> key;  // empty when the neighbor is off the atlas
    Vec coords;                  // center of the (possibly virtual) neighbor
    bool escaped = false;        // left a chart with no continuation
  };
  // Face neighbor along `axis` in direction dir = +-1, wrapping periodic axes
  // and crossing into other charts through the immersion's locator.
  Step neighbor(const CellKey& key, int axis, int dir) const;

 private:
  ParamImmersion f_;
  double h_;
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::vector<double>> steps_;
};

struct RegionCell {
  CellKey key;
  Vec x;       // pi(iso^{-1}(f(center)))
  Vec height;  // last k coordinates of iso^{-1}(f(center))
};

// Cells of the parameter lattice whose centers lie in the q-component of
// (pi o iso^{-1} o f)^{-1}(B_r), connected by face adjacency.
struct ComponentRegion {
  std::shared_ptr<const CellLattice> lattice;
  double radius = 0.0;
  double jacobian_bound = 0.0;  // the bound the default cell size was scaled by
  std::vector<RegionCell> cells;  // cells[0] holds the base point
  std::unordered_map<CellKey, std::size_t, CellKeyHash> lookup;

  double cell_size() const { return lattice->cell_size(); }
  bool contains(const CellKey& key) const { return lookup.contains(key); }
  // Parameter-space measure of the region.
  double parameter_volume() const;
  // True when p's cell or a cell within two face steps belongs to the region.
  bool near(const ParamPoint& p) const;
};

// Upper bound on the Jacobian's largest singular value near the base point:
// the immersion's declared bound, else twice the local value.
double jacobian_scale(const FrameContext& ctx);

// r / (32 sigma_max).
double default_cell_size(const FrameContext& ctx);

// Flood fill of U_{r,q} on a lattice of cell size h. Throws BoundaryEscape when
// the component reaches a chart edge with no continuing chart, and
// PreconditionViolated unless 0 < h <= r / (16 sigma_max).
ComponentRegion component(const FrameContext& ctx, double h);

enum class SolveStatus { ok, no_convergence, left_region };

struct HeightSolution {
  SolveStatus status = SolveStatus::no_convergence;
  ParamPoint point;
  Vec height;
  double residual = 0.0;
  int iterations = 0;
};

// Finds p with pi(iso^{-1}(f(p))) = x by damped Newton from `seed`, falling
// back to least-squares steps where the projected Jacobian is singular.
// Succeeds when the residual drops to 1e-10 max(1, r) within 100 iterations
// and the solution stays in the region.
HeightSolution solve_height(const FrameContext& ctx, const ComponentRegion& region, const Vec& x,
                            const ParamPoint& seed);

enum class NodeStatus : std::uint8_t { ok, vertical, multi_sheet, uncovered };

const char* to_string(NodeStatus status);

struct GraphNode {
  Vec x;
  Vec height;
  std::optional<Mat> derivative;  // Du(x), absent unless ok or multi_sheet
  NodeStatus status = NodeStatus::uncovered;
  ParamPoint param;
  bool on_rim = false;
};

// u sampled on the regular grid of spacing 2r/N inside B_r (nodes with
// |x| < r(1 - 1e-9)) plus nodes on the sphere |x| = r(1 - 1e-9).
struct GraphSample {
  int m = 0;
  int k = 0;
  double radius = 0.0;
  int resolution = 0;
  double cell_size = 0.0;
  std::vector<GraphNode> nodes;

  std::size_t count(NodeStatus status) const;
  bool is_graph() const;
};

struct ExtractOptions {
  int threads = 1;
  // Halve the default cell size when that changes the component measure by
  // more than 1%.
  bool refine_component = true;
  bool rim_nodes = true;
};

// Solves the grid by continuation outward from x = 0, classifies nodes and
// computes Du exactly from the tangent spaces. h <= 0 selects the default cell
// size. Propagates BoundaryEscape.
GraphSample extract(const FrameContext& ctx, int resolution, double h = 0.0,
                    const ExtractOptions& options = {});

struct NormEstimates {
  double c0 = 0.0;        // max |u| over the nodes
  double c0_bound = 0.0;  // c0 + (r/N) lip, infinite with vertical nodes
  double lip = 0.0;       // max ||Du|| over the nodes, infinite with vertical nodes
  bool vertical = false;
};

// Throws NotAGraph when the sample has multi-sheet or uncovered nodes.
NormEstimates norms(const GraphSample& sample);

}  // namespace tangraph
