#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "tangraph/immersion.hpp"

namespace tangraph {

struct ZooEntry {
  std::string name;
  std::string summary;
  Params defaults;  // every accepted parameter with its default value
  std::function<ParamImmersion(const Params&)> builder;
};

// The built-in immersions: flat, circle, sphere2, torus, helix, graph_of,
// wiggle.
const std::vector<ZooEntry>& zoo_entries();

// Builds a named immersion. Missing parameters take their defaults; unknown
// names throw UnknownEntry, unknown or out-of-range parameters InvalidParams.
ParamImmersion zoo_build(std::string_view name, const Params& params = {});

// x -> (x, 0) in R^{m+k}, parameters in [-extent, extent]^m.
ParamImmersion make_flat(int m, int k, double extent = 2000.0);

// t -> R (cos t, sin t), t periodic in [-pi, pi).
ParamImmersion make_circle(double radius);

// Round sphere of radius R in R^3 covered by the six central-projection
// patches of a circumscribed cube.
ParamImmersion make_sphere(double radius);

// ((R + r cos a) cos b, (R + r cos a) sin b, r sin a), both angles periodic.
ParamImmersion make_torus(double major, double minor);

// t -> (cos t, sin t, pitch t) for |t| <= half_length.
ParamImmersion make_helix(double pitch, double half_length);

using HeightFn = std::function<Vec(const Vec&)>;          // R^m -> R^k
using HeightJacobianFn = std::function<Mat(const Vec&)>;  // R^m -> R^{k x m}

// x -> (x, height(x)) over `domain`. `jacobian_bound` may be 0 (unknown).
ParamImmersion make_graph_of(HeightFn height, HeightJacobianFn height_jacobian, Box domain,
                             int k, double jacobian_bound = 0.0,
                             std::optional<Box> window = std::nullopt, Params params = {});

// t -> (t, eps sin(2 pi t / delta)) for |t| <= window/2 + margin. Sampled base
// points stay in |t| <= window/2.
ParamImmersion make_wiggle(double eps, double delta, double window = 1.0, double margin = 2.0);

}  // namespace tangraph
