#pragma once

// Small-dimension linear algebra for points of R^n = R^m x R^k: the slope
// matrix norm, Euclidean isometries, and m-dimensional subspaces.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tangraph {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Column-l2 norm (sum_j |a_j|^2)^(1/2) of a k x m slope matrix
// A = (a_1, ..., a_m). It dominates the operator norm.
double matrix_norm(const Mat& a);

// Largest singular value.
double operator_norm(const Mat& a);

// An m-dimensional linear subspace of R^n stored through an orthonormal basis.
// Equality compares spans, not bases.
class Subspace {
 public:
  // Orthonormalizes the columns of `spanning`. Throws RankDeficient if the
  // columns are (numerically) linearly dependent.
  static Subspace from_spanning(const Mat& spanning);

  // R^m x {0} inside R^n.
  static Subspace coordinate(int n, int m);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }

  // Orthogonal projection of v onto the subspace.
  Vec project(const Vec& v) const;
  double distance_to(const Vec& v) const;

  // Sine of the largest principal angle between two subspaces of equal
  // dimension.
  double max_angle_sine(const Subspace& other) const;
  bool same_span(const Subspace& other, double tol = 1e-10) const;
  bool operator==(const Subspace& other) const { return same_span(other); }

  // Image under a linear map that preserves orthonormality (a rotation).
  Subspace transformed(const Mat& rotation) const;

 private:
  explicit Subspace(Mat basis) : basis_(std::move(basis)) {}
  Mat basis_;
};

// x -> R x + T with R in SO(n).
class Isometry {
 public:
  // Throws InvalidParams if `rotation` is not orthogonal within 1e-12 or its
  // determinant is not +1 within 1e-9.
  Isometry(Mat rotation, Vec translation);
  static Isometry identity(int n);

  int dim() const { return static_cast<int>(translation_.size()); }
  const Mat& rotation() const { return rotation_; }
  const Vec& translation() const { return translation_; }

  Vec apply(const Vec& x) const { return rotation_ * x + translation_; }
  Vec apply_inverse(const Vec& y) const {
    return rotation_.transpose() * (y - translation_);
  }
  Isometry inverse() const;
  // (*this) o inner
  Isometry compose(const Isometry& inner) const;

 private:
  Mat rotation_;
  Vec translation_;
};

// Canonical admissible isometry: maps the origin to `base` and R^m x {0} onto
// base + plane. Deterministic for a given (base, plane.basis()).
Isometry make_admissible_isometry(const Vec& base, const Subspace& plane);

bool is_admissible(const Isometry& iso, const Vec& base, const Subspace& plane);

// First m coordinates of x. Requires m < x.size().
Vec project_to_first_m(const Vec& x, int m);

struct GraphMatrixResult {
  Mat matrix;  // k x m, E = span{(e_j, a_j)}
  double norm = 0.0;
};

// Smallest singular value below which the top m x m block of a subspace basis
// is treated as singular (E is vertical over R^m x {0}).
inline constexpr double kGraphRankTolerance = 1e-9;

// Writes E as span{(e_1,a_1),...,(e_m,a_m)} when E projects onto R^m x {0}
// with full rank; empty otherwise.
std::optional<GraphMatrixResult> subspace_graph_matrix(const Subspace& e);

// Probe-point certificate: if the m probes lie in E and each satisfies
// |v_j - (e_j,0)| <= L / (3 sqrt(m)) with L <= 1, then E is a graph over
// R^m x {0} with ||A|| <= L. The matrix is taken from E itself; the probes
// only validate the hypothesis. Throws PreconditionViolated(j) for a bad
// probe j (index -1 for L > 1 or a wrong probe count).
GraphMatrixResult graph_matrix_from_probes(const Subspace& e,
                                           std::span<const Vec> probes,
                                           double bound);

// Haar-random rotation in SO(n), drawn from a portable generator.
Mat random_rotation(int n, std::mt19937_64& rng);

// Standard normal deviate from a portable generator (Box-Muller).
double portable_normal(std::mt19937_64& rng);
// Uniform in [0, 1).
double portable_uniform(std::mt19937_64& rng);

}  // namespace tangraph
