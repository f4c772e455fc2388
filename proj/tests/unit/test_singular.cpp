#include <cmath>
#include <numbers>

#include "csofp/errors.hpp"
#include "csofp/golden.hpp"
#include "csofp/singular.hpp"
#include "test_helpers.hpp"

using namespace csofp;
using namespace csofp::testing;

TEST_CASE("singular: construction") {
  const SingularFunction g = SingularFunction::regular_only(DiscSeries::monomial(1, 2.0));
  CHECK(g.is_regular());
  const SingularFunction l({SingularTerm::log(1.0)}, DiscSeries::zero(4.0));
  CHECK(close(eval_singular(l, 3.0), std::log(2.0), 1e-15));
  const SingularFunction p({SingularTerm::pole(0.0, 2)}, DiscSeries::zero(1.0));
  CHECK(close(eval_singular(p, 0.5), 4.0, 1e-15));
  CHECK_THROWS_AS(SingularFunction({SingularTerm::log(3.0)}, DiscSeries::zero(2.0)), InvalidArgument);
  CHECK_THROWS_AS(SingularTerm::pole(0.0, 0), InvalidArgument);
}

TEST_CASE("singular: evaluation on the principal branch") {
  const SingularFunction l({SingularTerm::log(1.0)}, DiscSeries::zero(3.0));
  CHECK(close(eval_singular(l, 2.0), 0.0, 1e-15));
  const SingularFunction p({SingularTerm::pole(0.0, 1)}, DiscSeries::zero(1.0));
  CHECK(close(eval_singular(p, 0.5), 2.0, 1e-15));
  const SingularFunction z({SingularTerm::log(0.0)}, DiscSeries::zero(2.0));
  CHECK(close(eval_singular(z, -1.0), Complex(0.0, std::numbers::pi), 1e-15));
  CHECK_THROWS(eval_singular(p, 0.0));
}

TEST_CASE("singular: unbounded set") {
  const SingularFunction l({SingularTerm::log(1.0)}, DiscSeries::monomial(2, 2.0));
  CHECK(unbounded_set(l) == std::vector<Complex>{1.0});
  CHECK(unbounded_set(SingularFunction::regular_only(DiscSeries::monomial(1, 1.0))).empty());
  const SingularFunction both({SingularTerm::log(0.0), SingularTerm::pole(0.0, 2)}, DiscSeries::zero(1.0));
  CHECK(unbounded_set(both) == std::vector<Complex>{0.0});
}

TEST_CASE("singular: pullbacks") {
  const double w = kOmega;
  SUBCASE("log at a fixed point picks up a constant") {
    const SingularFunction f = pullback_term(SingularTerm::log(0.0), AffineMap(-w, 0.0), 2.0);
    REQUIRE(f.terms().size() == 1);
    CHECK(f.terms()[0].kind == SingularKind::Log);
    CHECK(f.terms()[0].location == 0.0);
    CHECK(close(f.regular().coeff(0), std::log(Complex(-w)), 1e-15));
    CHECK(f.regular().polynomial_norm() == doctest::Approx(std::abs(std::log(Complex(-w)))));
  }
  SUBCASE("pole at a fixed point is rescaled") {
    const Complex s(0.25, 0.5);
    const SingularFunction f = pullback_term(SingularTerm::pole(0.0, 1, 3.0), AffineMap(s, 0.0), 1.0);
    REQUIRE(f.terms().size() == 1);
    CHECK(close(f.terms()[0].weight, 3.0 / s, 1e-15));
    CHECK(f.regular().polynomial_norm() == 0.0);
  }
  SUBCASE("a preimage outside the disc becomes regular") {
    const SingularFunction f = pullback_term(SingularTerm::log(0.0), AffineMap::from_rate_offset(w * w, w), 1.0);
    CHECK(f.is_regular());
    for (const Complex z : {Complex(0.5, 0.2), Complex(-0.9, 0.0)})
      CHECK(close(eval_singular(f, z), std::log(w * w * z + w), 1e-12));
  }
  SUBCASE("constant maps") {
    const SingularFunction f = pullback_term(SingularTerm::log(0.0), AffineMap::constant(0.5), 1.0);
    CHECK(f.is_regular());
    CHECK(close(f.regular().coeff(0), std::log(0.5), 1e-15));
    CHECK_THROWS_AS(pullback_term(SingularTerm::log(0.0), AffineMap::constant(0.0), 1.0), PreconditionFailed);
  }
}

TEST_CASE("singular: arithmetic cancels matching terms") {
  const SingularFunction f({SingularTerm::log(0.5), SingularTerm::pole(0.0, 1)}, DiscSeries::monomial(1, 1.0));
  const SingularFunction d = f - f;
  CHECK(d.is_regular());
  CHECK(d.regular().polynomial_norm() == 0.0);
  const SingularFunction twice = f + f;
  REQUIRE(twice.terms().size() == 2);
  for (const SingularTerm& t : twice.terms()) CHECK(t.weight == 2.0);
}

TEST_CASE("singular: properties") { check_module_properties("singular", 50); }
