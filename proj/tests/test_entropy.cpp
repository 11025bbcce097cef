#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anosov/entropy.hpp"
#include "oracles.hpp"

using namespace anosov;

namespace {

EntropyOptions short_run(int len) {
  EntropyOptions o;
  o.max_len = len;
  o.min_log_span = 4;
  return o;
}

}  // namespace

TEST_CASE("functional parsing") {
  const Functional a = Functional::parse("alpha1", 3);
  CHECK(a.coeffs(0) == 1);
  CHECK(a.coeffs(1) == -1);
  CHECK(a.coeffs(2) == 0);
  const Functional e = Functional::parse("eps1-eps2", 5);
  CHECK(e.coeffs(0) == 1);
  CHECK(e.coeffs(1) == -1);
  const Functional s = Functional::parse("2*alpha1", 3);
  CHECK(s.coeffs(0) == 2);
  const Functional l = Functional::parse("[1,0,-1]", 3);
  CHECK(l.coeffs(2) == -1);
  const Functional j = Functional::unstable_jacobian(4, 2);
  Eigen::VectorXd a4(4);
  a4 << 3, 1, -1, -3;
  // J^u_2 = 3 omega_1 - omega_3 = 3 a_1 - (a_1 + a_2 + a_3).
  CHECK(j(a4) == doctest::Approx(3 * 3 - (3 + 1 - 1)));
  CHECK(Functional::unstable_jacobian(3, 1).coeffs.isApprox(Functional::alpha(3, 1).coeffs));
  CHECK_THROWS_AS(Functional::parse("beta1", 3), ConfigError);
  CHECK_THROWS_AS(Functional::parse("alpha3", 3), ConfigError);
}

TEST_CASE("levels and duality of functionals") {
  CHECK(Functional::omega(5, 2).levels_needed() == 2);
  CHECK(Functional::alpha(5, 4).levels_needed() == 4);
  const Functional d = Functional::alpha(3, 1).dual();
  CHECK(d.coeffs.isApprox(Functional::alpha(3, 2).coeffs));
}

TEST_CASE("Fuchsian anchor has h(alpha1) = 1") {
  const EntropyReport r = critical_exponent(fuchsian_genus2(), Functional::alpha(2, 1), short_run(8));
  CHECK(r.counting.h_hat == doctest::Approx(oracle::kFuchsianAlpha).epsilon(0.15));
  CHECK(r.series.h_hat == doctest::Approx(oracle::kFuchsianAlpha).epsilon(0.15));
  CHECK(r.agree);
  std::uint64_t total = 0;
  for (std::size_t n = 1; n <= 8; ++n) total += oracle::kGenus2Spheres[n];
  CHECK(r.elements == total);
}

TEST_CASE("Barbot family: h(alpha1) = 2 and duality") {
  const Representation f = fuchsian_genus2();
  const Representation b = direct_sum(f, trivial(f.spec(), 1));
  const auto rs = critical_exponents(
      b, {Observable::linear(Functional::alpha(3, 1)), Observable::linear(Functional::alpha(3, 2)),
          Observable::linear(Functional::parse("eps1-eps3", 3))},
      short_run(8));
  CHECK(rs[0].series.h_hat == doctest::Approx(oracle::kBarbotAlpha).epsilon(0.15));
  CHECK(rs[1].series.h_hat == doctest::Approx(rs[0].series.h_hat).epsilon(1e-9));
  CHECK(rs[2].series.h_hat == doctest::Approx(1).epsilon(0.15));
  const EntropyReport d = critical_exponent(dual(b), Functional::alpha(3, 1).dual(), short_run(8));
  CHECK(d.series.h_hat == doctest::Approx(rs[0].series.h_hat).epsilon(1e-6));
}

TEST_CASE("min and sum relations") {
  const Representation f = fuchsian_genus2();
  const Representation b = direct_sum(f, trivial(f.spec(), 1));
  const Functional a1 = Functional::alpha(3, 1), e13 = Functional::parse("eps1-eps3", 3);
  const MinCheck m = entropy_min_check(b, {a1, e13}, short_run(8));
  CHECK(m.holds);
  CHECK(m.h_max == doctest::Approx(m.h_each[0]));
  const SumCheck s = entropy_sum_check(b, a1, e13, short_run(8));
  CHECK(s.holds);
  // Equality case: h(a1 + e13) = 2/3 = 2 * 1 / (2 + 1).
  CHECK(s.h_sum == doctest::Approx(2.0 / 3).epsilon(0.1));
}

TEST_CASE("estimators refuse a short range") {
  EntropyOptions o;
  o.max_len = 5;
  CHECK_THROWS_AS(critical_exponent(fuchsian_genus2(), Functional::alpha(2, 1), o), EstimationError);
}

TEST_CASE("affinity exponent of the anchor and the Barbot family") {
  const Representation f = fuchsian_genus2();
  const AffinityEstimate a = affinity_exponent(f, short_run(8));
  CHECK(a.estimate.h_hat == doctest::Approx(1).epsilon(0.1));
  CHECK(a.monotone);
  const AffinityEstimate b = affinity_exponent(direct_sum(f, trivial(f.spec(), 1)), short_run(8));
  CHECK(b.estimate.h_hat == doctest::Approx(oracle::kBarbotAffinity).epsilon(0.1));
}

TEST_CASE("affinity terms follow the broken series") {
  Eigen::VectorXd a(3);
  a << 1, 0, -1;
  // s in [0, 1]: s (a2 - a1); s in [1, 2]: (a2 - a1) + (s - 1)(a3 - a1).
  CHECK(affinity_log_term(a, 0.5) == doctest::Approx(-0.5));
  CHECK(affinity_log_term(a, 1.5) == doctest::Approx(-1 - 0.5 * 2));
  CHECK_THROWS(affinity_log_term(a, -1));
}

TEST_CASE("histogram merge is order independent") {
  ShellHistogram a, b, c;
  a.init(3, 1e-3);
  b.init(3, 1e-3);
  c.init(3, 1e-3);
  a.add(1, 0.5);
  b.add(2, 1.25);
  c.add(1, 0.5);
  c.add(2, 1.25);
  a.merge(b);
  CHECK(a.count == c.count);
  CHECK(a.shell_count == c.shell_count);
}
