#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/cartan.hpp"
#include "anosov/cone.hpp"
#include "anosov/group.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace anosov;

namespace {

// Crude minimum of the dual norm over random points of conv + cone.
double sampled_minimum(const DualNormProblem& pr, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0, 3);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(pr.dim());
    double tot = 0;
    std::vector<double> w(pr.generators.size());
    for (double& x : w) tot += (x = ex(rng));
    for (std::size_t j = 0; j < w.size(); ++j) phi += w[j] / tot * pr.generators[j];
    for (const auto& b : pr.cone) phi += (s % 2 ? u(rng) : 0.0) * b;
    best = std::min(best, pr.dual_norm(phi));
  }
  return best;
}

}  // namespace

TEST_CASE("hyperbolic norm gives the translation length on irreducible blocks") {
  for (int m = 2; m <= 6; ++m) {
    const Eigen::MatrixXd n = hyperbolic_norm(m + 1, m);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m + 1);
    const double l = 1.7;
    for (int i = 0; i < m; ++i) a(i) = ((m - 1) / 2.0 - i) * l;
    CHECK(std::sqrt(a.dot(n * a)) == doctest::Approx(l).epsilon(1e-12));
  }
}

TEST_CASE("Cartan bases are orthonormal and inside E") {
  const Eigen::MatrixXd b = sl_cartan_basis(4);
  CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK((Eigen::RowVectorXd::Ones(4) * b).norm() < 1e-12);
  const Eigen::MatrixXd s = so_cartan_basis(5, 2);
  CHECK(s.cols() == 2);
  CHECK((s.transpose() * s - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
  for (int j = 0; j < 2; ++j) CHECK(s(2, j) == doctest::Approx(0));
}

TEST_CASE("segment problem has the closed-form minimum") {
  DualNormProblem pr;
  pr.norm = Eigen::MatrixXd::Identity(2, 2);
  pr.generators = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  const DualNormSolution s = hx_upper_bound(pr);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(s.weights.sum() == doctest::Approx(1));
  CHECK(hull_min_norm(pr).value == doctest::Approx(s.value).epsilon(1e-10));
  CHECK(barycenter_dual_norm(pr) == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("cone directions can lower the bound") {
  DualNormProblem pr;
  pr.norm = Eigen::MatrixXd::Identity(2, 2);
  pr.generators = {Eigen::Vector2d(1, 1)};
  pr.cone = {Eigen::Vector2d(-1, 0)};
  const DualNormSolution s = hx_upper_bound(pr);
  CHECK(s.value == doctest::Approx(1).epsilon(1e-8));
  CHECK(s.cone_coeffs(0) == doctest::Approx(1).epsilon(1e-6));
}

TEST_CASE("solver is never above a sampled minimum") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const int k = 2 + t % 2;
    DualNormProblem pr;
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = g(rng);
    pr.norm = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(k, k);
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd v(k);
      for (int i = 0; i < k; ++i) v(i) = g(rng) + 2;
      pr.generators.push_back(v);
    }
    if (t % 3 == 0) {
      Eigen::VectorXd c = -Eigen::VectorXd::Unit(k, 0);
      pr.cone.push_back(c);
    }
    const DualNormSolution s = hx_upper_bound(pr, 1 + static_cast<std::uint64_t>(t));
    const double sampled = sampled_minimum(pr, 200000, 100 + static_cast<std::uint64_t>(t));
    CHECK(s.value <= sampled + 1e-9);
    if (pr.cone.empty()) CHECK(s.value >= (1 - 5e-2) * sampled);
  }
}

TEST_CASE("SO(p,p-1) problem has bound 1") {
  for (int p = 2; p <= 5; ++p) {
    const DualNormProblem pr = so_positive_problem(p);
    const DualNormSolution s = hx_upper_bound(pr);
    CHECK(s.converged);
    CHECK(s.value == doctest::Approx(1).epsilon(1e-8));
    CHECK(hull_min_norm(pr).value == doctest::Approx(1).epsilon(1e-10));
  }
  CHECK_THROWS_AS(so_positive_problem(1), ConfigError);
}

TEST_CASE("invalid problems are rejected") {
  DualNormProblem pr;
  pr.norm = Eigen::MatrixXd::Identity(2, 2);
  pr.norm(1, 1) = -1;
  pr.generators = {Eigen::Vector2d(1, 0)};
  CHECK_THROWS(pr.validate());
}

TEST_CASE("Jordan directions") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m.diagonal() << 4, 1, 0.25;
  m(0, 1) = 7;
  const Eigen::VectorXd j = jordan_direction(m);
  CHECK(j(0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(j(1) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("anchor limit cone is a single ray") {
  ConeOptions o;
  o.max_len = 5;
  const ConeSummary c = limit_cone_sample(fuchsian_genus2(), o);
  REQUIRE(c.shells.size() == 5);
  CHECK(c.shells.back().count == oracle::kGenus2Spheres[5]);
  CHECK(c.shells.back().max_angle < 1e-9);
  const ConeSummary b = limit_cone_sample(so_p_pminus1_fuchsian(3), o);
  CHECK(b.shells.back().max_angle < 1e-6);
}

TEST_CASE("h^X of the anchor with the hyperbolic norm is 1") {
  EntropyOptions o;
  o.max_len = 8;
  o.min_log_span = 4;
  const EntropyReport r = hx_estimate(fuchsian_genus2(), hyperbolic_norm(2, 2), o);
  CHECK(r.counting.h_hat == doctest::Approx(1).epsilon(0.1));
}
