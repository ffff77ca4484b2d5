#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tangraph/geometry.hpp"

namespace tangraph {

// Axis-aligned box in parameter space.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x) const;
};

// A point q of M, given by its coordinates in one chart.
struct ParamPoint {
  int chart = 0;
  Vec coords;
};

// One coordinate patch of M. `eval` and `jacobian` must stay defined on a
// neighborhood of the domain box; flood fills evaluate half a cell beyond it.
struct Chart {
  Box domain;
  std::vector<bool> periodic;  // per parameter axis; the period is hi - lo
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jacobian;
};

// Maps an ambient point of the image back to the chart that owns it. Only
// atlases with several non-periodic charts need one.
using Locator = std::function<std::optional<ParamPoint>(const Vec&)>;

// Base points are drawn from a lattice with `density` points per parameter
// axis inside each chart's window.
struct SamplerSpec {
  std::vector<Box> windows;  // one per chart
  int density = 64;
};

using Params = std::map<std::string, double>;

// An immersion f: M^m -> R^n described by charts. Copies share the same
// immutable data.
class ParamImmersion {
 public:
  struct Data {
    std::string name;
    Params params;
    int m = 0;
    int n = 0;
    std::vector<Chart> charts;
    SamplerSpec sampler;
    Locator locate;
    // Upper bound on the largest Jacobian singular value, 0 when unknown.
    double jacobian_bound = 0.0;
    // Typical size of the image; radius searches start at 1e-6 of it.
    double length_scale = 1.0;
  };

  explicit ParamImmersion(Data data);

  const std::string& name() const { return data_->name; }
  const Params& params() const { return data_->params; }
  int m() const { return data_->m; }
  int n() const { return data_->n; }
  int k() const { return data_->n - data_->m; }
  const std::vector<Chart>& charts() const { return data_->charts; }
  const Chart& chart(int index) const { return data_->charts.at(static_cast<std::size_t>(index)); }
  const SamplerSpec& sampler() const { return data_->sampler; }
  bool has_locator() const { return static_cast<bool>(data_->locate); }
  double jacobian_bound() const { return data_->jacobian_bound; }
  double length_scale() const { return data_->length_scale; }

  Vec eval(const ParamPoint& p) const;
  Mat jacobian(const ParamPoint& p) const;
  std::optional<ParamPoint> locate(const Vec& y) const;

  // Wraps periodic coordinates and moves points that left their chart into
  // the owning chart. Empty when the point is outside every chart.
  std::optional<ParamPoint> normalize(const ParamPoint& p) const;

  std::size_t lattice_size() const;
  // Deterministic subset of the sampler lattice. count == 0 or count larger
  // than the lattice returns the whole lattice.
  std::vector<ParamPoint> sample(std::size_t count, std::uint64_t seed) const;

  // y -> scale * motion(f(y)).
  ParamImmersion transformed(const Isometry& motion, double scale) const;

 private:
  std::shared_ptr<const Data> data_;
};

// Smallest Jacobian singular value at which f still counts as an immersion.
inline constexpr double kImmersionRankTolerance = 1e-8;

// Column span of the Jacobian at p. Throws RankDeficient when the smallest
// singular value is <= 1e-8.
Subspace tangent_space(const ParamImmersion& f, const ParamPoint& p);

}  // namespace tangraph
