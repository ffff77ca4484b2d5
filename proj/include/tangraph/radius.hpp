#pragma once

// The (r, lambda) and C0-(r, lambda) properties over a sample of base points,
// and bisection estimates of the maximal radii r1(f, lambda) and r0(f, lambda).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tangraph/immersion.hpp"

namespace tangraph {

enum class RadiusKind { c0, c1 };

const char* to_string(RadiusKind kind);

// Which base points a verdict quantifies over: `count` points drawn with
// `seed` from the immersion's sampler lattice (0 = the whole lattice).
struct SampleSpec {
  std::size_t count = 16;
  std::uint64_t seed = 0;
};

std::vector<ParamPoint> sample_points(const ParamImmersion& f, const SampleSpec& spec);

struct CheckOptions {
  int grid = 128;          // extractor resolution N
  double cell_size = 0.0;  // 0 = the extractor default
  bool refine = true;
  int threads = 1;
};

enum class WitnessStatus { pass, fail_norm, not_a_graph, vertical, boundary_escape };

const char* to_string(WitnessStatus status);

struct Witness {
  ParamPoint q;
  double c0 = 0.0;   // NaN when no graph was found
  double lip = 0.0;  // +inf with vertical nodes, NaN when no graph was found
  WitnessStatus status = WitnessStatus::pass;
  bool passed() const { return status == WitnessStatus::pass; }
};

// holds is true only when every sampled q passes. inconclusive marks a
// verdict without definite failures where some q hit a chart boundary.
struct PropertyVerdict {
  bool holds = false;
  bool inconclusive = false;
  std::vector<Witness> witnesses;  // in sample order, up to the first failure
  std::optional<ParamPoint> failing_q;
};

// Definition of an (r, lambda)-immersion tested at each q: a single-sheet
// graph over B_r with no vertical nodes and max ||Du|| <= lambda.
PropertyVerdict is_r_lambda(const ParamImmersion& f, double r, double lambda,
                            std::span<const ParamPoint> q, const CheckOptions& options = {});

// C0 variant: a single-sheet graph (vertical nodes allowed) with max |u| <= r lambda.
PropertyVerdict is_c0_r_lambda(const ParamImmersion& f, double r, double lambda,
                               std::span<const ParamPoint> q, const CheckOptions& options = {});

PropertyVerdict check_property(RadiusKind kind, const ParamImmersion& f, double r, double lambda,
                               std::span<const ParamPoint> q, const CheckOptions& options = {});

struct RadiusReport {
  RadiusKind kind = RadiusKind::c1;
  double lambda = 0.0;
  double tol = 1e-3;
  double r_lo = 0.0;  // largest radius seen to pass (0 if even the start fails)
  double r_hi = 0.0;  // smallest radius seen to fail; +inf when unbounded
  bool unbounded = false;     // passed at the cap radius 1e3 * length scale
  bool inconclusive = false;  // the failing end of the bracket hit a boundary
  std::string immersion;
  Params params;
  SampleSpec sample;
  std::size_t sample_size = 0;
  int sampler_density = 0;
  int grid = 0;
  int evaluations = 0;
  std::vector<Witness> witnesses_lo;  // per-q diagnostics at r_lo
  std::optional<Witness> failure_hi;  // first failing q at r_hi
};

// Doubling from 1e-6 * length scale until failure or the cap, geometric
// bisection until r_hi / r_lo - 1 <= tol, then a monotonicity spot check at
// r_lo * {1/4, 1/2, 3/4} and r_hi * {3/2, 2}. Throws MonotonicityViolated
// when the spot check contradicts the bracket and PreconditionViolated unless
// 0 < tol <= 0.1 and lambda > 0.
RadiusReport max_radius(const ParamImmersion& f, double lambda, RadiusKind kind,
                        const SampleSpec& sample, double tol = 1e-3,
                        const CheckOptions& options = {});

}  // namespace tangraph
