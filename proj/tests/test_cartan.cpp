#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/cartan.hpp"
#include "anosov/linalg.hpp"
#include "anosov/traverse.hpp"
#include "oracles.hpp"

#include <random>

using namespace anosov;

namespace {

Eigen::MatrixXd spread_matrix(int d, double spread, std::mt19937_64& rng) {
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(d, spread, 0);
  return random_orthogonal(d, rng) * a.array().exp().matrix().asDiagonal() * random_orthogonal(d, rng).transpose();
}

}  // namespace

TEST_CASE("compound route agrees with a long double SVD") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + t % 5;
    const Eigen::MatrixXd m = spread_matrix(d, std::log(1e6), rng);
    CHECK((cartan_project(m) - oracle::cartan_ld(m)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Cartan vectors are sorted with zero sum") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd m = gaussian_matrix(5, 5, rng);
  const Eigen::VectorXd a = cartan_project(m);
  CHECK(std::abs(a.sum()) < 1e-12);
  for (int i = 0; i + 1 < 5; ++i) CHECK(a(i) >= a(i + 1));
  CHECK((a - cartan_project_svd(m)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("p_sums lists all p-fold sums") {
  Eigen::VectorXd a(3);
  a << 2, 0, -2;
  const Eigen::VectorXd s = p_sums(a, 2);
  REQUIRE(s.size() == 3);
  CHECK(s(0) == doctest::Approx(2));
  CHECK(s(2) == doctest::Approx(-2));
}

TEST_CASE("Iwasawa cocycle is additive") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    const int d = 2 + t % 5;
    const int p = 1 + t % (d - 1);
    const Eigen::MatrixXd g = spread_matrix(d, 5, rng), h = spread_matrix(d, 5, rng);
    const Eigen::MatrixXd x = orthonormalize(gaussian_matrix(d, p, rng));
    const Eigen::MatrixXd hx = orthonormalize(Eigen::MatrixXd(h * x));
    CHECK(std::abs(iwasawa(g * h, x) - iwasawa(g, hx) - iwasawa(h, x)) < 1e-8);
  }
}

TEST_CASE("basin contraction slack is nonnegative") {
  std::mt19937_64 rng(8);
  double worst = 1;
  for (int t = 0; t < 500; ++t) {
    const int d = 2 + t % 4;
    const Eigen::MatrixXd m = spread_matrix(d, 4, rng);
    const double alpha = 0.3;
    const Eigen::VectorXd x = sample_basin(m, alpha, rng);
    CHECK(basin_membership(m, x, alpha));
    worst = std::min(worst, basin_contraction_slack(m, x, alpha));
  }
  CHECK(worst >= -1e-10);
}

TEST_CASE("ellipsoid cover audit holds") {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd m = spread_matrix(4, 6, rng);
  const EllipsoidCover cover = ellipsoid_cover(m, 0.5, 2);
  const CoverAudit audit = cover_audit(cover, m, 0.5, 20000, rng);
  CHECK(audit.samples == 20000);
  CHECK(audit.max_ellipsoid < 1);
  CHECK(audit.max_ball_ratio <= 1);
}

TEST_CASE("attractor needs a gap") {
  CHECK_THROWS_AS(attractor(Eigen::MatrixXd::Identity(3, 3), 1), NoGapError);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(0, 0) = 5;
  const Frame u = attractor(m, 1);
  CHECK(proj_distance(u.col(0), Eigen::Vector3d::UnitX()) < 1e-12);
  CHECK(gap_ratio(m, 1) == doctest::Approx(std::pow(5.0, 1.0)));
}

TEST_CASE("Gromov products of transverse and non-transverse pairs") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd y = x.rowwise().reverse();
  for (double g : gromov_products(x, y, {1, 2})) CHECK(g == doctest::Approx(0).epsilon(1e-12));
  CHECK_THROWS_AS(gromov_product(x.leftCols(1), x.leftCols(2)), NonTransverseError);
}

TEST_CASE("tracker matches word-by-word Cartan vectors") {
  const Representation s = so_p_pminus1_fuchsian(3);
  CartanTracker fast(s, 6), exact(s, 6, -1, true);
  double worst = 0;
  int n = 0;
  walk_ball(s.spec(), 5, [&](const Word& w) {
    const int k = static_cast<int>(w.size());
    fast.push(k, w.back());
    exact.push(k, w.back());
    if (n++ % 37 == 0) worst = std::max(worst, (fast.cartan(k) - cartan_of_word(s, w)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (fast.cartan(k) - exact.cartan(k)).cwiseAbs().maxCoeff());
    return true;
  });
  CHECK(worst < 1e-8);
}

TEST_CASE("gap report sees the Anosov property") {
  const GapReport g = anosov_gap_report(sym_power(fuchsian_genus2(), 2), 1, 6);
  CHECK(g.anosov);
  CHECK(g.mu_hat > 0.5);
  const GapReport t = anosov_gap_report(trivial(GroupSpec::surface(2), 3), 1, 4);
  CHECK_FALSE(t.anosov);
}
