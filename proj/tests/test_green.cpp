#include "doctest.h"

#include "subwalk/errors.hpp"
#include "subwalk/green.hpp"

#include <cmath>
#include <numbers>

using namespace subwalk;

namespace {

GreenOptions fast() {
  GreenOptions o;
  o.exact_steps = 256;
  return o;
}

}  // namespace

TEST_SUITE("green") {
  TEST_CASE("asymptotic and Riesz constants in closed form") {
    using std::numbers::pi;
    CHECK(asymptotic_constant(3, 2.0) == doctest::Approx(3.0 / (2.0 * pi)).epsilon(1e-14));
    CHECK(riesz_constant(3, 2.0) == doctest::Approx(1.0 / (4.0 * pi)).epsilon(1e-14));
    CHECK(riesz_constant(3, 1.0) == doctest::Approx(1.0 / (2.0 * pi * pi)).epsilon(1e-14));
    // Gamma(1) / (sqrt(pi) pi^{3/2}) * sqrt(3/2)
    CHECK(asymptotic_constant(3, 1.0) == doctest::Approx(std::sqrt(1.5) / (pi * pi)).epsilon(1e-14));
    CHECK_THROWS_AS(asymptotic_constant(2, 2.0), DomainError);
  }

  TEST_CASE("simple random walk Green function at the origin") {
    // Watson's integral, 1.516386059...
    GreenEvaluator ev(3, BernsteinSpec::power(2.0));
    const auto g = ev.green_full(LatticePoint{0, 0, 0});
    CHECK(std::abs(g.value - 1.516386059) <= g.error_bound);
    CHECK(g.value == doctest::Approx(1.516386059).epsilon(1e-4));
    CHECK(ev.green_from_one(LatticePoint{0, 0, 0}).value == doctest::Approx(g.value - 1.0).epsilon(1e-12));
  }

  TEST_CASE("agrees with the Fourier integral") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    for (LatticePoint x : {LatticePoint{0, 0, 0}, LatticePoint{1, 0, 0}, LatticePoint{2, 1, 0}, LatticePoint{6, 3, 2}}) {
      const auto g = ev.green_full(x);
      const auto f = fourier_oracle(3, BernsteinSpec::power(1.0), x, 2, 1e-7);
      CHECK(std::abs(g.value - f.value) <= g.error_bound + 1e-6);
      CHECK(g.value == doctest::Approx(f.value).epsilon(0.01));
    }
  }

  TEST_CASE("lattice symmetry") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.5), fast());
    const double a = ev.green_full(LatticePoint{3, -1, 2}).value;
    CHECK(ev.green_full(LatticePoint{-2, 3, 1}).value == doctest::Approx(a).epsilon(1e-14));
    CHECK(ev.green_full(LatticePoint{1, 2, -3}).value == doctest::Approx(a).epsilon(1e-14));
  }

  TEST_CASE("decreasing along an axis") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    double prev = ev.green_full(LatticePoint{0, 0, 0}).value;
    for (int r = 1; r <= 40; ++r) {
      const double g = ev.green_full(LatticePoint{r, 0, 0}).value;
      CHECK(g < prev);
      prev = g;
    }
  }

  TEST_CASE("recurrent configurations are rejected") {
    CHECK_THROWS_AS(GreenEvaluator(2, BernsteinSpec::power(2.0)), DomainError);
    CHECK_THROWS_AS(GreenEvaluator(1, BernsteinSpec::power(1.0)), DomainError);
    CHECK_THROWS_AS(fourier_oracle(2, BernsteinSpec::power(2.0), LatticePoint{0, 0}), DomainError);
  }

  TEST_CASE("tolerance is enforced") {
    GreenOptions o = fast();
    o.tolerance = 1e-12;
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), o);
    CHECK_THROWS_AS(ev.green_full(LatticePoint{5, 0, 0}), BudgetExceeded);
    CHECK(ev.full_value(std::vector<std::int64_t>{5, 0, 0}) > 0.0);
  }

  TEST_CASE("ratio to the Riesz kernel") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    const auto rep = ratio_to_riesz(ev, {16, 32, 64});
    CHECK(rep.derived_ratio == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
    CHECK(rep.stated_ratio == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(rep.closer == "derived");
    CHECK(rep.rows.back().ratio == doctest::Approx(rep.derived_ratio).epsilon(0.02));
  }

  TEST_CASE("Green function decay matches the asymptotic constant") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.5), fast());
    const double r = 60;
    const double g = ev.green_full(LatticePoint{60, 0, 0}).value;
    CHECK(g * std::pow(r, 3 - 1.5) == doctest::Approx(asymptotic_constant(3, 1.5)).epsilon(0.02));
  }
}
