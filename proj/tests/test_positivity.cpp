#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/positivity.hpp"

#include <random>

using namespace anosov;

namespace {

const std::vector<std::pair<int, int>> kGroups = {{2, 3}, {3, 4}, {3, 5}, {4, 5}, {4, 7}, {5, 6}};

}  // namespace

TEST_CASE("Q has signature (p, q)") {
  for (auto [p, q] : kGroups) {
    const PositivityContext ctx(p, q);
    CHECK(ctx.d == p + q);
    CHECK((ctx.Q - ctx.Q.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ctx.Q);
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) (es.eigenvalues()(i) > 0 ? pos : neg)++;
    CHECK(pos == p);
    CHECK(neg == q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ej(ctx.J);
    CHECK((ej.eigenvalues().array() > 0).count() == 1);
  }
  CHECK_THROWS_AS(PositivityContext(3, 3), ConfigError);
  CHECK_THROWS_AS(PositivityContext(1, 4), ConfigError);
}

TEST_CASE("reduced expression has the length of the longest element of B_{p-1}") {
  for (auto [p, q] : kGroups) {
    const auto w = PositivityContext(p, q).reduced_expression();
    CHECK(static_cast<int>(w.size()) == (p - 1) * (p - 1));
    for (int i : w) CHECK((i >= 1 && i <= p - 1));
  }
}

TEST_CASE("positive unipotents preserve Q and are unipotent") {
  std::mt19937_64 rng(1);
  for (auto [p, q] : kGroups) {
    const PositivityContext ctx(p, q);
    for (int i = 1; i <= p - 2; ++i) {
      const Eigen::MatrixXd u = positive_unipotent(ctx, i, 0.7);
      CHECK(form_residual(u, ctx.Q) < 1e-12);
      CHECK(unipotency_residual(u) < 1e-12);
    }
    const PositiveParameters par = random_parameters(ctx, rng);
    for (const auto& v : par.vectors) {
      CHECK(ctx.in_cone(v));
      const Eigen::MatrixXd u = positive_unipotent(ctx, v);
      CHECK(form_residual(u, ctx.Q) < 1e-10);
      CHECK(unipotency_residual(u) < 1e-10);
    }
  }
}

TEST_CASE("cone boundary and outside parameters are rejected") {
  const PositivityContext ctx(3, 5);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ctx.cone_dim());
  v(0) = 1;
  CHECK_FALSE(ctx.in_cone(v));
  CHECK_THROWS_AS(positive_unipotent(ctx, v), ConeViolation);
  CHECK_NOTHROW(positive_unipotent(ctx, v, false));
  CHECK_THROWS_AS(positive_unipotent(ctx, Eigen::VectorXd(-unit_parameters(ctx).vectors[0])), ConeViolation);
}

TEST_CASE("positive triples satisfy the coefficient identity and are direct") {
  std::mt19937_64 rng(2);
  for (auto [p, q] : kGroups) {
    const PositivityContext ctx(p, q);
    for (int t = 0; t < 30; ++t) {
      const PositiveTriple tr = positive_triple(ctx, random_parameters(ctx, rng));
      CHECK(form_residual(tr.s, ctx.Q) < 1e-8 * std::max(1.0, tr.s.cwiseAbs().maxCoeff()));
      REQUIRE(tr.coefficient.size() == tr.expected.size());
      for (std::size_t k = 0; k < tr.coefficient.size(); ++k)
        CHECK(tr.coefficient[k] == doctest::Approx(tr.expected[k]).epsilon(1e-10));
      for (std::size_t k = 0; k < tr.margins.size(); ++k) {
        CHECK(tr.margins[k] > 0);
        CHECK(tr.margins[k] == doctest::Approx(tr.margins_det[k]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("unit parameters give coefficients p - 1 and scale linearly") {
  for (auto [p, q] : kGroups) {
    if (p < 3) continue;
    const PositivityContext ctx(p, q);
    const PositiveParameters u = unit_parameters(ctx);
    for (const auto& v : u.vectors) CHECK(ctx.qj(v) == doctest::Approx(1));
    const PositiveTriple tr = positive_triple(ctx, u);
    for (double c : tr.coefficient) CHECK(c == doctest::Approx(p - 1).epsilon(1e-12));
    const PositiveTriple s = positive_triple(ctx, scale_parameters(u, 2.5));
    for (double c : s.coefficient) CHECK(c == doctest::Approx(2.5 * (p - 1)).epsilon(1e-12));
  }
}
