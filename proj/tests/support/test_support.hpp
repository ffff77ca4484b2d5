#pragma once

// Random generators and independent oracles shared by the test suites.

#include <cmath>
#include <random>
#include <vector>

#include "tangraph/geometry.hpp"

namespace tangraph::test {

inline Vec random_vec(int n, std::mt19937_64& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = portable_normal(rng);
  return v;
}

inline Mat random_mat(int rows, int cols, std::mt19937_64& rng) {
  Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = portable_normal(rng);
  return a;
}

inline Subspace random_subspace(int n, int m, std::mt19937_64& rng) {
  return Subspace::from_spanning(random_mat(n, m, rng));
}

// Largest singular value by power iteration on A^T A, independent of the
// library's SVD.
inline double power_iteration_norm(const Mat& a) {
  Vec x = Vec::Ones(a.cols());
  double sigma = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vec y = a.transpose() * (a * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    const double next = (a * x).norm();
    if (std::abs(next - sigma) <= 1e-15 * next) return next;
    sigma = next;
  }
  return sigma;
}

struct ProbeCase {
  Subspace e;
  std::vector<Vec> probes;
  double bound = 0.0;
  Mat truth;  // the slope matrix E was built from
};

// E = span{(e_j, a_j)} for a known A, given through a scrambled basis, with
// probes inside E that satisfy |v_j - (e_j, 0)| <= L / (3 sqrt m).
inline ProbeCase random_probe_case(std::mt19937_64& rng) {
  const int m = 1 + static_cast<int>(rng() % 4);
  const int k = 1 + static_cast<int>(rng() % 4);
  const double root_m = std::sqrt(static_cast<double>(m));
  const double bound = 0.05 + 0.95 * portable_uniform(rng);
  Mat a = random_mat(k, m, rng);
  a *= portable_uniform(rng) * bound / (6.0 * root_m) / std::max(1e-300, std::sqrt(a.squaredNorm()));
  Mat graph(m + k, m);
  graph.topRows(m) = Mat::Identity(m, m);
  graph.bottomRows(k) = a;
  const Mat scramble = random_rotation(m, rng) * (Mat::Identity(m, m) + 0.3 * random_mat(m, m, rng) / (m + 1.0));
  ProbeCase c{Subspace::from_spanning(graph * scramble), {}, bound, a};
  for (int j = 0; j < m; ++j) {
    Vec d = random_vec(m, rng);
    d *= portable_uniform(rng) * bound / (12.0 * root_m) / d.norm();
    const Vec t = Vec::Unit(m, j) + d;
    Vec v(m + k);
    v.head(m) = t;
    v.tail(k) = a * t;
    c.probes.push_back(std::move(v));
  }
  return c;
}

}  // namespace tangraph::test
