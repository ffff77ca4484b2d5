#include "tangraph/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tangraph/errors.hpp"

namespace tangraph {

double matrix_norm(const Mat& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) sum += a.col(j).squaredNorm();
  return std::sqrt(sum);
}

double operator_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

// Modified Gram-Schmidt with column pivoting, two passes per column.
Subspace Subspace::from_spanning(const Mat& spanning) {
  const Eigen::Index n = spanning.rows();
  const Eigen::Index m = spanning.cols();
  if (m == 0 || m > n) throw RankDeficient("subspace needs 1 <= m <= n columns");
  Mat work = spanning;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) scale = std::max(scale, work.col(j).norm());
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw RankDeficient("spanning set is zero or not finite");

  Mat basis(n, m);
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (Eigen::Index step = 0; step < m; ++step) {
    Eigen::Index pivot = -1;
    double best = -1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double r = work.col(j).norm();
      if (r > best) {
        best = r;
        pivot = j;
      }
    }
    if (best <= 1e-12 * scale) throw RankDeficient("spanning set is rank deficient");
    used[static_cast<std::size_t>(pivot)] = true;
    Vec v = work.col(pivot);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < step; ++i) v -= basis.col(i).dot(v) * basis.col(i);
    }
    const double norm = v.norm();
    if (norm <= 1e-12 * scale) throw RankDeficient("spanning set is rank deficient");
    basis.col(step) = v / norm;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      work.col(j) -= basis.col(step).dot(work.col(j)) * basis.col(step);
    }
  }
  return Subspace(std::move(basis));
}

Subspace Subspace::coordinate(int n, int m) {
  return Subspace(Mat::Identity(n, m));
}

Vec Subspace::project(const Vec& v) const {
  return basis_ * (basis_.transpose() * v);
}

double Subspace::distance_to(const Vec& v) const { return (v - project(v)).norm(); }

double Subspace::max_angle_sine(const Subspace& other) const {
  if (other.dim() != dim() || other.ambient_dim() != ambient_dim()) return 1.0;
  const Mat residual = other.basis_ - basis_ * (basis_.transpose() * other.basis_);
  return std::min(1.0, operator_norm(residual));
}

bool Subspace::same_span(const Subspace& other, double tol) const {
  if (other.dim() != dim() || other.ambient_dim() != ambient_dim()) return false;
  return max_angle_sine(other) <= tol;
}

Subspace Subspace::transformed(const Mat& rotation) const {
  return Subspace(rotation * basis_);
}

Isometry::Isometry(Mat rotation, Vec translation)
    : rotation_(std::move(rotation)), translation_(std::move(translation)) {
  const Eigen::Index n = translation_.size();
  if (rotation_.rows() != n || rotation_.cols() != n)
    throw InvalidParams("isometry rotation must be n x n");
  const double ortho = (rotation_.transpose() * rotation_ - Mat::Identity(n, n))
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-12) throw InvalidParams("isometry rotation is not orthogonal");
  if (std::abs(rotation_.determinant() - 1.0) > 1e-9)
    throw InvalidParams("isometry rotation has determinant != +1");
}

Isometry Isometry::identity(int n) { return Isometry(Mat::Identity(n, n), Vec::Zero(n)); }

Isometry Isometry::inverse() const {
  return Isometry(rotation_.transpose(), -(rotation_.transpose() * translation_));
}

Isometry Isometry::compose(const Isometry& inner) const {
  return Isometry(rotation_ * inner.rotation_, rotation_ * inner.translation_ + translation_);
}

Isometry make_admissible_isometry(const Vec& base, const Subspace& plane) {
  const int n = plane.ambient_dim();
  const int m = plane.dim();
  if (base.size() != n) throw InvalidParams("base point and plane dimensions differ");
  if (m >= n) throw InvalidParams("plane must have positive codimension");

  // Householder QR of [B | I] completes the plane basis B to a frame of R^n.
  Mat stacked(n, m + n);
  stacked << plane.basis(), Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(stacked);
  Mat frame = qr.householderQ() * Mat::Identity(n, n);
  for (int j = 0; j < m; ++j) {
    if (frame.col(j).dot(plane.basis().col(j)) < 0.0) frame.col(j) *= -1.0;
  }
  for (int j = m; j < n; ++j) {
    // Prefer the orientation closest to the coordinate axis it came from.
    if (frame(j, j) < 0.0) frame.col(j) *= -1.0;
  }
  if (frame.determinant() < 0.0) frame.col(n - 1) *= -1.0;
  // Re-orthonormalize against rounding so the Isometry invariant holds tightly.
  for (int j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) frame.col(j) -= frame.col(i).dot(frame.col(j)) * frame.col(i);
    }
    frame.col(j).normalize();
  }
  return Isometry(std::move(frame), base);
}

bool is_admissible(const Isometry& iso, const Vec& base, const Subspace& plane) {
  const int n = plane.ambient_dim();
  if (iso.dim() != n || base.size() != n) return false;
  if ((iso.translation() - base).norm() > 1e-10) return false;
  const Subspace image = Subspace::from_spanning(iso.rotation().leftCols(plane.dim()));
  return image.same_span(plane, 1e-10);
}

Vec project_to_first_m(const Vec& x, int m) {
  if (m <= 0 || m >= x.size()) throw PreconditionViolated("projection needs 0 < m < n");
  return x.head(m);
}

std::optional<GraphMatrixResult> subspace_graph_matrix(const Subspace& e) {
  const int m = e.dim();
  const int k = e.ambient_dim() - m;
  const Mat top = e.basis().topRows(m);
  const Mat bottom = e.basis().bottomRows(k);
  Eigen::JacobiSVD<Mat> svd(top);
  if (svd.singularValues()(m - 1) < kGraphRankTolerance) return std::nullopt;
  // A * top = bottom
  Mat a = top.transpose().partialPivLu().solve(bottom.transpose()).transpose();
  GraphMatrixResult result;
  result.norm = matrix_norm(a);
  result.matrix = std::move(a);
  return result;
}

GraphMatrixResult graph_matrix_from_probes(const Subspace& e, std::span<const Vec> probes,
                                           double bound) {
  const int m = e.dim();
  const int n = e.ambient_dim();
  if (!(bound <= 1.0)) throw PreconditionViolated("probe bound L must satisfy L <= 1");
  if (static_cast<int>(probes.size()) != m)
    throw PreconditionViolated("expected one probe per tangent direction");
  const double radius = bound / (3.0 * std::sqrt(static_cast<double>(m)));
  for (int j = 0; j < m; ++j) {
    const Vec& v = probes[static_cast<std::size_t>(j)];
    if (v.size() != n) throw PreconditionViolated("probe has wrong dimension", j);
    if (e.distance_to(v) > 1e-10)
      throw PreconditionViolated("probe " + std::to_string(j) + " is not on the subspace", j);
    Vec offset = v;
    offset(j) -= 1.0;
    if (offset.norm() > radius)
      throw PreconditionViolated(
          "probe " + std::to_string(j) + " is farther than L/(3 sqrt m) from (e_j,0)", j);
  }
  auto graph = subspace_graph_matrix(e);
  if (!graph) throw std::logic_error("probe hypothesis held but subspace is vertical");
  if (graph->norm > bound + 1e-12)
    throw std::logic_error("probe hypothesis held but ||A|| exceeds L");
  return *graph;
}

double portable_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double portable_normal(std::mt19937_64& rng) {
  double u1 = portable_uniform(rng);
  while (u1 <= 0.0) u1 = portable_uniform(rng);
  const double u2 = portable_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Mat random_rotation(int n, std::mt19937_64& rng) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = portable_normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

}  // namespace tangraph
