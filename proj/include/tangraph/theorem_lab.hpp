#pragma once

// Numerical checks of the C0-to-C1 regularity theorem, its three lemmas, the
// derivative-bound construction used in its proof, and the tilted-line
// counterexample for graphs over arbitrary lines.

#include <span>
#include <vector>

#include "tangraph/extract.hpp"
#include "tangraph/radius.hpp"

namespace tangraph {

// 1e-5 / m^2.
double lambda_cap(int m);

struct TheoremVerdict {
  double lambda = 0.0;
  double Lambda = 0.0;
  RadiusReport r0;         // C0 radius at lambda
  RadiusReport r1_scaled;  // C1 radius at lambda / Lambda
  double margin = 0.0;     // r1_scaled.r_lo - r0.r_hi; +inf when r1 is unbounded
  bool holds = false;
  bool inconclusive = false;
};

// r1(f, lambda / Lambda) >= r0(f, lambda), compared bracket-aware: holds when
// margin >= -(sum of both bracket widths). Throws PreconditionViolated when
// lambda exceeds lambda_cap(m).
TheoremVerdict verify_main_theorem(const ParamImmersion& f, double lambda,
                                   const SampleSpec& sample, double tol = 1e-3,
                                   const CheckOptions& options = {});

struct EnlargementResult {
  double r = 0.0;
  double lambda = 0.0;
  double enlarged_radius = 0.0;  // 7/4 r
  double enlarged_lambda = 0.0;  // 8 sqrt(m) lambda
  bool lambda_in_range = false;  // lambda <= 1 / (8 sqrt(m))
  PropertyVerdict hypothesis;
  PropertyVerdict conclusion;
  bool holds = false;  // the conclusion verdict
};

// Tests (7/4 r, 8 sqrt(m) lambda) on the sample given (r, lambda). A lambda
// outside the lemma's range is reported through lambda_in_range rather than
// rejected. Throws PreconditionViolated when the (r, lambda) hypothesis fails.
EnlargementResult check_enlargement(const ParamImmersion& f, double r, double lambda,
                                    std::span<const ParamPoint> q,
                                    const CheckOptions& options = {});

struct DistanceResult {
  double rho = 0.0;
  double r = 0.0;
  double lambda = 0.0;
  double bound = 0.0;  // rho + r lambda
  double slack = 0.0;  // one cell diameter in the image
  double max_distance = 0.0;
  std::size_t points = 0;  // sampled p in U_{rho,q}
  bool hypothesis_holds = false;  // C0-(r, lambda) at q
  bool holds = false;             // max_distance < bound + slack
};

// |f(q) - f(p)| over the cell centers p of U_{rho,q}. Throws
// PreconditionViolated unless 0 < rho <= r.
DistanceResult check_distance_bound(const ParamImmersion& f, const ParamPoint& q, double rho,
                                    double r, double lambda, const CheckOptions& options = {});

struct InclusionResult {
  double r = 0.0;
  double lambda = 0.0;
  std::size_t pairs = 0;          // (q, p) pairs tested
  std::size_t cells_checked = 0;  // cells of U_{2r/5,q} summed over pairs
  std::size_t cells_missing = 0;  // of those, cells not in U_{r,p}
  bool hypothesis_holds = false;  // C0-(r, lambda) on the sample
  bool holds = false;
};

// U_{2r/5,q} within U_{r,p} for each q of the sample and up to
// `pairs_per_q` points p spread over U_{2r/5,q}. Both components use the same
// parameter lattice, so cells compare by key. Throws PreconditionViolated
// when lambda > 1/10.
InclusionResult check_inclusion(const ParamImmersion& f, std::span<const ParamPoint> q, double r,
                                double lambda, const CheckOptions& options = {},
                                int pairs_per_q = 8);

struct CertifiedNode {
  Vec x;
  double certified = 0.0;  // 3 sqrt(m) max_j |v_j - (e_j, 0)|
  double actual = 0.0;     // ||Du(x)|| from the tangent space
};

struct ProbeFailure {
  Vec x;
  int probe = -1;
  double needed = 0.0;  // the bound the probes would certify
};

struct CertifiedDuBound {
  int m = 0;
  double r = 0.0;
  double lambda = 0.0;
  double rho = 0.0;           // r / 5
  double global_bound = 0.0;  // 8^-3 m^-3/2 lambda / Lambda
  int grid = 0;               // nodes per axis across B_{2 rho}
  std::vector<CertifiedNode> nodes;
  std::vector<ProbeFailure> failures;
  double max_certified = 0.0;
  double max_actual = 0.0;
  bool sound = false;  // certified >= actual at every node
};

// Probe construction at every grid node x of B_rho: probes at x + rho e_j,
// tangent projections at p(x), certificate from graph_matrix_from_probes.
// Throws PreconditionViolated when lambda > lambda_cap(m), when the
// C0-(r, lambda) hypothesis fails at q, or when grid is odd or < 8.
CertifiedDuBound certify_du_bound(const ParamImmersion& f, const ParamPoint& q, double r,
                                  double lambda, int grid = 64,
                                  const CheckOptions& options = {});

struct IterationConstants {
  double cube = 0.0;      // (7/4)^3
  double composed = 0.0;  // (7/4)^3 / 5
  std::vector<std::pair<int, double>> lifts;  // m -> (8 sqrt m)^3 8^-3 m^-3/2
  bool holds = false;
};

// (7/4)^3 > 5 and the lambda lift is exactly 1 for m in {1, 2, 3, 10}.
IterationConstants iteration_constants();
bool iteration_constant_check();

struct CounterexampleReport {
  double epsilon = 0.0;
  double delta = 0.0;
  double r = 0.0;
  int angles = 0;
  double lambda_gen = 0.0;  // C0 constant over the horizontal line
  double lambda_cap = 0.0;  // Lambda(1)
  double horizontal_slope = 0.0;
  double min_over_angles_max_slope = 0.0;
  double best_angle = 0.0;
  int graph_angles = 0;  // angles over which the curve is a graph
  bool verdict = false;
};

// Wiggle curve t -> (t, eps sin(2 pi t / delta)) around a crest: C0-small
// over the horizontal line, yet steep over every line it is a graph over.
// Throws InvalidParams unless eps >= 0, delta > 0, r > 0 and angles >= 2.
CounterexampleReport analyze_counterexample(double eps, double delta, double r,
                                            int angles = 4096, int threads = 1);

}  // namespace tangraph
