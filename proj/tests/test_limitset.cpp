#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/limitset.hpp"
#include "anosov/linalg.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace anosov;

TEST_CASE("Veronese embedding is isometric for the sine metric") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 4;
    const Eigen::VectorXd v = gaussian_matrix(d, 1, rng).col(0).normalized();
    const Eigen::VectorXd w = gaussian_matrix(d, 1, rng).col(0).normalized();
    const double c = std::abs(v.dot(w));
    const double s = std::sqrt(std::max(0.0, 1 - c * c));
    CHECK((veronese(v) - veronese(w)).norm() == doctest::Approx(std::sqrt(2.0) * s).epsilon(1e-9));
    CHECK((veronese(v) - veronese(Eigen::VectorXd(-v))).norm() < 1e-12);
  }
}

TEST_CASE("box counting recovers the middle-thirds Cantor set") {
  const BoxDimension b = box_dimension(cantor_points(14));
  CHECK(b.slope == doctest::Approx(oracle::kCantorDim).epsilon(0.05));
}

TEST_CASE("box counting refuses too few points") {
  CHECK_THROWS_AS(box_dimension(cantor_points(6)), EstimationError);
}

TEST_CASE("anchor limit set is a circle") {
  const BoundarySample s = boundary_sample(fuchsian_genus2(), 6);
  CHECK(s.samples.size() == oracle::kGenus2Spheres[6]);
  CHECK(s.no_gap == 0);
  CHECK(s.median_residual < 1e-2);
  const BoxDimension b = box_dimension(sample_points(s));
  CHECK(b.slope == doctest::Approx(1).epsilon(0.15));
}

TEST_CASE("Hitchin samples span the space and lie on the conic") {
  const Representation h = so_p_pminus1_fuchsian(2);
  const BoundarySample s = boundary_sample(h, 5);
  CHECK(weak_irreducibility_rank(sample_points(s)) == 3);
  REQUIRE(h.form());
  double worst = 0;
  for (const auto& x : s.samples) worst = std::max(worst, std::abs(x.point.dot(*h.form() * x.point)));
  CHECK(worst < 1e-6);
  // Barbot samples stay in the 2-plane of the Fuchsian block.
  const Representation f = fuchsian_genus2();
  const BoundarySample b = boundary_sample(direct_sum(f, trivial(f.spec(), 1)), 5);
  CHECK(weak_irreducibility_rank(sample_points(b)) == 2);
}

TEST_CASE("Lipschitz diagnostic separates smooth and Hoelder graphs") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u01(-0.2, 0.2);
  std::vector<double> u;
  Eigen::MatrixXd smooth(4000, 1), rough(4000, 1);
  for (int i = 0; i < 4000; ++i) {
    const double x = u01(rng);
    u.push_back(x);
    smooth(i, 0) = x * x + 0.3 * x;
    rough(i, 0) = std::copysign(std::sqrt(std::abs(x)), x);
  }
  CHECK(lipschitz_graph(u, smooth).verdict == "bounded");
  CHECK(lipschitz_graph(u, rough).verdict == "exploding");
}

TEST_CASE("p-Jacobian identity holds on random flags") {
  for (int d = 2; d <= 5; ++d)
    for (int p = 1; p < d; ++p) {
      const JacobianReport r = ps_jacobian_identity(d, p, 50, 7 + d * 10 + p);
      CHECK(r.trials == 50);
      CHECK(r.max_residual < 1e-8);
    }
}

TEST_CASE("omega volume is the parallelotope volume") {
  Eigen::VectorXd v = Eigen::Vector3d::UnitX();
  Eigen::MatrixXd phi(3, 2);
  phi << 0, 0, 2, 0, 0, 3;
  CHECK(omega_volume(v, phi) == doctest::Approx(6));
}

TEST_CASE("directness margin") {
  const Eigen::VectorXd x = Eigen::Vector3d::UnitX(), y = Eigen::Vector3d::UnitY();
  const Eigen::MatrixXd z = Eigen::Vector3d::UnitZ();
  CHECK(directness_margin(x, y, z) == doctest::Approx(1));
  CHECK_THROWS_AS(directness_margin(x, x, z), ConfigError);
}

TEST_CASE("Hitchin representations are hyperconvex") {
  const HyperconvexReport r = hyperconvex_check(sym_power(fuchsian_genus2(), 3), 2, 100, 3);
  CHECK(r.margins.size() == 100);
  CHECK(r.min_margin > 0);
}

TEST_CASE("restricted signatures") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
  q.diagonal() << 1, 1, -1;
  CHECK(restricted_signature(q, Eigen::MatrixXd::Identity(3, 3)) == std::make_pair(2, 1));
  CHECK(restricted_signature(q, Eigen::MatrixXd::Identity(3, 3).leftCols(2)) == std::make_pair(2, 0));
  Eigen::MatrixXd iso(3, 2);
  iso << 1, 0, 0, 1, 1, 0;
  CHECK(restricted_signature(q, iso) == std::make_pair(-1, -1));
}

TEST_CASE("triples in the SO(2,3) boundary have signature (2,1)") {
  const Representation s = so_p_pminus1_fuchsian(3);
  REQUIRE(s.form());
  const SignatureReport r = hpq_signature_check(s, *s.form(), 40, 11);
  CHECK(r.triples == 40);
  CHECK(r.fraction() == doctest::Approx(1));
  CHECK(r.max_isotropy < 1e-6);
}
