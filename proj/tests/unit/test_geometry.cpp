#include <doctest.h>

#include <cmath>
#include <random>

#include "tangraph/errors.hpp"
#include "tangraph/geometry.hpp"
#include "test_support.hpp"

using namespace tangraph;

TEST_CASE("matrix_norm examples") {
  CHECK(matrix_norm(Mat::Zero(3, 2)) == 0.0);
  Mat a(1, 2);
  a << 3, 4;
  CHECK(matrix_norm(a) == doctest::Approx(5.0).epsilon(1e-15));
  const Mat id = Mat::Identity(2, 2);
  CHECK(matrix_norm(id) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(operator_norm(id) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("norm domination over random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 6);
    const int m = 1 + static_cast<int>(rng() % 6);
    Mat a(k, m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = portable_normal(rng);
    const double op = test::power_iteration_norm(a);
    REQUIRE(op <= matrix_norm(a) * (1.0 + 1e-12));
  }
}

TEST_CASE("subspace construction and span equality") {
  Mat spanning(3, 2);
  spanning << 1, 1, 0, 1, 0, 0;
  const Subspace e = Subspace::from_spanning(spanning);
  CHECK((e.basis().transpose() * e.basis() - Mat::Identity(2, 2)).norm() <= 1e-12);
  CHECK(e == Subspace::coordinate(3, 2));

  Mat dependent(3, 2);
  dependent << 1, 2, 1, 2, 0, 0;
  CHECK_THROWS_AS(Subspace::from_spanning(dependent), RankDeficient);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    const Subspace s = test::random_subspace(n, m, rng);
    const Mat q = random_rotation(m, rng);
    const Subspace t = Subspace::from_spanning(s.basis() * q);
    REQUIRE(s == t);
    REQUIRE((t.basis().transpose() * t.basis() - Mat::Identity(m, m)).norm() <= 1e-12);
    // A generic other subspace differs.
    if (m < n) REQUIRE_FALSE(s == test::random_subspace(n, m, rng));
  }
}

TEST_CASE("isometry invariants") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Isometry a(random_rotation(n, rng), test::random_vec(n, rng));
    const Isometry b(random_rotation(n, rng), test::random_vec(n, rng));
    const Isometry c = a.compose(b);
    const Mat r = c.rotation();
    REQUIRE((r.transpose() * r - Mat::Identity(n, n)).norm() <= 1e-12);
    const Vec x = test::random_vec(n, rng);
    REQUIRE((c.apply(x) - a.apply(b.apply(x))).norm() <= 1e-12);
    REQUIRE((a.inverse().apply(a.apply(x)) - x).norm() <= 1e-12);
    REQUIRE((a.apply_inverse(a.apply(x)) - x).norm() <= 1e-12);
  }
  Mat reflection = Mat::Identity(2, 2);
  reflection(1, 1) = -1.0;
  CHECK_THROWS_AS(Isometry(reflection, Vec::Zero(2)), InvalidParams);
  Mat skew = Mat::Identity(2, 2);
  skew(0, 1) = 1e-6;
  CHECK_THROWS_AS(Isometry(skew, Vec::Zero(2)), InvalidParams);
}

TEST_CASE("make_admissible_isometry examples") {
  SUBCASE("aligned plane") {
    const Isometry iso = make_admissible_isometry(Vec::Zero(4), Subspace::coordinate(4, 2));
    CHECK(iso.translation().norm() == 0.0);
    CHECK(Subspace::coordinate(4, 2).transformed(iso.rotation()) == Subspace::coordinate(4, 2));
  }
  SUBCASE("line in the plane") {
    const Subspace plane = Subspace::from_spanning(Vec{{0.0, 1.0}});
    const Vec base{{1.0, 2.0}};
    const Isometry iso = make_admissible_isometry(base, plane);
    CHECK((iso.translation() - base).norm() == 0.0);
    CHECK(std::abs(iso.rotation()(0, 0)) <= 1e-15);
    CHECK(std::abs(std::abs(iso.rotation()(1, 0)) - 1.0) <= 1e-15);
    CHECK(is_admissible(iso, base, plane));
  }
  SUBCASE("diagonal line in R^3") {
    const Vec dir = Vec{{1.0, 1.0, 0.0}} / std::sqrt(2.0);
    const Subspace plane = Subspace::from_spanning(dir);
    const Isometry iso = make_admissible_isometry(Vec::Zero(3), plane);
    const Vec first = iso.rotation().col(0);
    CHECK(std::min((first - dir).norm(), (first + dir).norm()) <= 1e-15);
    CHECK(iso.rotation().determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((iso.rotation().transpose() * iso.rotation() - Mat::Identity(3, 3)).norm() <= 1e-12);
  }
}

TEST_CASE("is_admissible predicate") {
  CHECK(is_admissible(Isometry::identity(3), Vec::Zero(3), Subspace::coordinate(3, 2)));
  Vec en = Vec::Zero(3);
  en(2) = 1.0;
  CHECK_FALSE(is_admissible(Isometry::identity(3), en, Subspace::coordinate(3, 2)));

  std::mt19937_64 rng(2024);
  for (int seed = 0; seed < 1000; ++seed) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    const Subspace plane = test::random_subspace(n, m, rng);
    const Vec base = test::random_vec(n, rng);
    const Isometry iso = make_admissible_isometry(base, plane);
    REQUIRE(is_admissible(iso, base, plane));
    REQUIRE(project_to_first_m(iso.apply_inverse(base), m).norm() <= 1e-10);
    // Same span, different basis: same canonical image plane.
    const Subspace rebased = Subspace::from_spanning(plane.basis() * random_rotation(m, rng));
    REQUIRE(is_admissible(make_admissible_isometry(base, rebased), base, plane));
  }
}

TEST_CASE("project_to_first_m examples") {
  CHECK((project_to_first_m(Vec{{1.0, 2.0, 3.0}}, 2) - Vec{{1.0, 2.0}}).norm() == 0.0);
  CHECK(project_to_first_m(Vec{{0.0, 5.0}}, 1)(0) == 0.0);
  CHECK_THROWS_AS(project_to_first_m(Vec{{0.0, 5.0}}, 2), PreconditionViolated);
}

TEST_CASE("subspace_graph_matrix examples") {
  const auto flat = subspace_graph_matrix(Subspace::coordinate(5, 3));
  REQUIRE(flat);
  CHECK(flat->matrix.norm() == 0.0);
  CHECK(flat->matrix.rows() == 2);
  CHECK(flat->matrix.cols() == 3);

  const auto line = subspace_graph_matrix(Subspace::from_spanning(Vec{{1.0, 0.1}} / std::sqrt(1.01)));
  REQUIRE(line);
  CHECK(line->matrix(0, 0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(line->norm == doctest::Approx(matrix_norm(line->matrix)).epsilon(1e-15));

  CHECK_FALSE(subspace_graph_matrix(Subspace::from_spanning(Vec{{0.0, 1.0}})));
}

TEST_CASE("graph_matrix_from_probes examples") {
  SUBCASE("exact probes") {
    const Subspace e = Subspace::coordinate(4, 2);
    std::vector<Vec> probes = {Vec::Unit(4, 0), Vec::Unit(4, 1)};
    const auto res = graph_matrix_from_probes(e, probes, 0.5);
    CHECK(res.matrix.norm() == 0.0);
    CHECK(res.norm == 0.0);
  }
  SUBCASE("sloped line") {
    const Vec v = Vec{{1.0, 0.1}} / std::sqrt(1.01);
    const Subspace e = Subspace::from_spanning(v);
    CHECK((v - Vec::Unit(2, 0)).norm() == doctest::Approx(0.09963).epsilon(1e-4));
    std::vector<Vec> probes = {v};
    const auto res = graph_matrix_from_probes(e, probes, 0.3);
    CHECK(res.matrix(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(res.norm <= 0.3);
  }
  SUBCASE("violations name the probe") {
    const Subspace e = Subspace::coordinate(3, 2);
    std::vector<Vec> off = {Vec::Unit(3, 0), Vec{{0.0, 1.0, 1e-3}}};
    try {
      graph_matrix_from_probes(e, off, 0.5);
      FAIL("expected PreconditionViolated");
    } catch (const PreconditionViolated& err) {
      CHECK(err.index() == 1);
    }
    std::vector<Vec> far = {Vec{{0.5, 0.0, 0.0}}, Vec::Unit(3, 1)};
    try {
      graph_matrix_from_probes(e, far, 0.5);
      FAIL("expected PreconditionViolated");
    } catch (const PreconditionViolated& err) {
      CHECK(err.index() == 0);
    }
    std::vector<Vec> exact = {Vec::Unit(3, 0), Vec::Unit(3, 1)};
    CHECK_THROWS_AS(graph_matrix_from_probes(e, exact, 1.5), PreconditionViolated);
    std::vector<Vec> short_list = {Vec::Unit(3, 0)};
    CHECK_THROWS_AS(graph_matrix_from_probes(e, short_list, 0.5), PreconditionViolated);
  }
}

TEST_CASE("probe certificate against known slope matrices") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto c = test::random_probe_case(rng);
    const auto res = graph_matrix_from_probes(c.e, c.probes, c.bound);
    REQUIRE((res.matrix - c.truth).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE(res.norm <= c.bound + 1e-12);
    const auto oracle = subspace_graph_matrix(c.e);
    REQUIRE(oracle);
    REQUIRE((oracle->matrix - res.matrix).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("portable generators are reproducible") {
  std::mt19937_64 a(7);
  std::mt19937_64 b(7);
  for (int i = 0; i < 100; ++i) REQUIRE(portable_normal(a) == portable_normal(b));
  std::mt19937_64 c(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = portable_uniform(c);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  std::mt19937_64 d(3);
  const Mat r = random_rotation(5, d);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}
