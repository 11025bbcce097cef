#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/cartan.hpp"
#include "anosov/representation.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <random>

using namespace anosov;

TEST_CASE("anchor satisfies the relator") {
  const Representation f = fuchsian_genus2();
  CHECK(f.dim() == 2);
  CHECK(f.relator_residual() < 1e-9);
  for (int g = 2; g <= 4; ++g) CHECK(fuchsian(g).relator_residual() < 1e-9);
}

TEST_CASE("anchor generators are hyperbolic with equal traces") {
  const Representation f = fuchsian_genus2();
  const double tr0 = std::abs(f.image(0).trace());
  CHECK(tr0 > 2);
  for (int l = 0; l < 8; ++l) {
    CHECK(std::abs(f.image(static_cast<Letter>(l)).trace()) == doctest::Approx(tr0).epsilon(1e-12));
    CHECK(f.image(static_cast<Letter>(l)).determinant() == doctest::Approx(1).epsilon(1e-12));
  }
}

TEST_CASE("symmetric powers preserve the antidiagonal form") {
  const Representation f = fuchsian_genus2();
  for (int p = 2; p <= 4; ++p) {
    const Representation s = so_p_pminus1_fuchsian(p);
    CHECK(s.dim() == 2 * p - 1);
    REQUIRE(s.form());
    CHECK(s.form_residual() < s.form_tolerance());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*s.form());
    int pos = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) pos += es.eigenvalues()(i) > 0;
    CHECK(pos == p);
  }
  const Representation s2 = sym_power(f, 2);
  CHECK(s2.relator_residual() <= s2.relator_tolerance());
}

TEST_CASE("Cartan vectors of symmetric powers scale the anchor's") {
  const Representation f = fuchsian_genus2();
  const Representation s3 = sym_power(f, 3);
  const Word w = parse_word("a1 b1 a2", f.spec());
  const double l = cartan_of_word(f, w)(0) * 2;
  const Eigen::VectorXd a = cartan_of_word(s3, w);
  for (int i = 0; i < 4; ++i) CHECK(a(i) == doctest::Approx((1.5 - i) * l).epsilon(1e-9));
}

TEST_CASE("Barbot family has log singular values (t, 0, -t)") {
  const Representation f = fuchsian_genus2();
  const Representation b = direct_sum(f, trivial(f.spec(), 1));
  CHECK(b.dim() == 3);
  const Word w = parse_word("a1 a1 b2", f.spec());
  const Eigen::VectorXd a = cartan_of_word(b, w);
  CHECK(a(1) == doctest::Approx(0).epsilon(1e-12));
  CHECK(a(0) == doctest::Approx(-a(2)).epsilon(1e-12));
  CHECK(a(0) == doctest::Approx(cartan_of_word(f, w)(0)).epsilon(1e-12));
}

TEST_CASE("functorial constructions have the expected dimensions") {
  const Representation f = fuchsian_genus2();
  const Representation s2 = sym_power(f, 2);
  CHECK(tensor(f, f).dim() == 4);
  CHECK(exterior_power(s2, 2).dim() == 3);
  CHECK(dual(s2).dim() == 3);
  CHECK(direct_sum(s2, f).dim() == 5);
  CHECK_THROWS_AS(sym_power(f, 80), DimensionError);
  CHECK_THROWS_AS(direct_sum(f, fuchsian(3)), ConfigError);
}

TEST_CASE("dual representation reverses and negates Cartan vectors") {
  const Representation s2 = sym_power(fuchsian_genus2(), 2);
  const Representation d = dual(s2);
  const Word w = parse_word("b1 a2 B1", s2.spec());
  const Eigen::VectorXd a = cartan_of_word(s2, w), b = cartan_of_word(d, w);
  for (int i = 0; i < 3; ++i) CHECK(b(i) == doctest::Approx(-a(2 - i)).epsilon(1e-9));
}

TEST_CASE("a wrong relator is rejected") {
  const GroupSpec g = GroupSpec::surface(2);
  std::vector<Eigen::MatrixXd> gens(4, Eigen::MatrixXd::Identity(2, 2));
  gens[0] << 2, 0, 0, 0.5;
  gens[1] << 1, 1, 0, 1;
  CHECK_THROWS_AS(Representation::from_generators(g, gens), ConstructionError);
  std::vector<Eigen::MatrixXd> sing(4, Eigen::MatrixXd::Zero(2, 2));
  CHECK_THROWS_AS(Representation::from_generators(g, sing), ConstructionError);
}

TEST_CASE("twisted anchors stay representations with the same traces of a1") {
  for (double tau : {0.3, -0.7}) {
    const Representation t = fuchsian_twisted(tau);
    CHECK(t.relator_residual() < 1e-9);
    CHECK(std::abs(t.image(0).trace()) == doctest::Approx(std::abs(fuchsian_genus2().image(0).trace())));
  }
}

TEST_CASE("text export round trips") {
  const Representation s = so_p_pminus1_fuchsian(3);
  const auto path = std::filesystem::temp_directory_path() / "anosov_rep_roundtrip.txt";
  save_representation(path.string(), s);
  const Representation r = load_representation(path.string());
  std::filesystem::remove(path);
  CHECK(r.dim() == 5);
  REQUIRE(r.form());
  for (int l = 0; l < 8; ++l)
    CHECK((r.image(static_cast<Letter>(l)) - s.image(static_cast<Letter>(l))).norm() <
          1e-9 * s.image(static_cast<Letter>(l)).norm());
}

TEST_CASE("dedup keys separate the ball and the audit finds no collision") {
  const Representation f = fuchsian_genus2();
  KeyAudit audit(f);
  std::uint64_t n = 0;
  walk_ball(f.spec(), 5, [&](const Word& w) {
    audit.add(w);
    ++n;
    return true;
  });
  CHECK(audit.size() == n);
  CHECK(n == 8 + 56 + 392 + 2736 + 19096);
  // Same element, different spelling.
  const Word w = parse_word("a1 b1", f.spec());
  Word v = w;
  v.insert(v.end(), f.spec().relator.begin(), f.spec().relator.end());
  CHECK(dedup_key(w, f) == dedup_key(v, f));
}
