#include "doctest.h"

#include "subwalk/bernstein.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/renewal.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace subwalk;

TEST_SUITE("renewal") {
  TEST_CASE("alpha = 1 matches the central binomial oracle") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 500);
    const auto seq = renewal_sequence(c, 500, RenewalMethod::Recurrence);
    // binom(2n, n) 4^{-n} as an extended-precision running product
    long double oracle = 1.0L;
    for (std::size_t n = 0; n <= 500; ++n) {
      if (n) oracle *= (2.0L * n - 1.0L) / (2.0L * n);
      CHECK(seq[n] == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
    }
  }

  TEST_CASE("closed form agrees with the gamma expression") {
    for (double alpha : {0.5, 1.5}) {
      const double a = alpha / 2;
      const auto seq = renewal_closed_form(alpha, 1000);
      for (unsigned n : {1u, 7u, 100u, 1000u}) {
        const double oracle = boost::math::tgamma_ratio(n + a, n + 1.0) / boost::math::tgamma(a);
        CHECK(seq[n] == doctest::Approx(oracle).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("recurrence and series inversion agree") {
    const auto c = coefficients(BernsteinSpec::power(1.5), 2000);
    const auto a = renewal_sequence(c, 2000, RenewalMethod::Recurrence);
    const auto b = renewal_sequence(c, 2000, RenewalMethod::SeriesInversion);
    const auto cf = renewal_closed_form(1.5, 2000);
    for (std::size_t n = 0; n <= 2000; n += 37) {
      CHECK(a[n] == doctest::Approx(cf[n]).epsilon(1e-11));
      CHECK(b[n] == doctest::Approx(cf[n]).epsilon(1e-9));
    }
  }

  TEST_CASE("identity subordinator gives C = 1") {
    const auto c = coefficients(BernsteinSpec::power(2.0), 50);
    const auto seq = renewal_sequence(c, 50);
    for (std::size_t n = 0; n <= 50; ++n) CHECK(seq[n] == doctest::Approx(1.0));
  }

  TEST_CASE("log-convexity and decrease are strict for the power family") {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const auto c = coefficients(BernsteinSpec::power(alpha), 3000);
      const auto seq = renewal_sequence(c, 3000);
      CHECK(check_log_convexity(seq).holds);
      CHECK(check_decreasing(seq).holds);
      CHECK(check_decreasing(seq).verdict == MonotoneVerdict::Strict);
    }
  }

  TEST_CASE("constant sequence is not strictly decreasing") {
    const auto c = coefficients(BernsteinSpec::power(2.0), 20);
    const auto seq = renewal_sequence(c, 20);
    const auto chk = check_decreasing(seq);
    CHECK_FALSE(chk.holds);
    REQUIRE(chk.first_violation.has_value());
    CHECK(*chk.first_violation == 1);
  }

  TEST_CASE("generating function identity") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 4000);
    const auto seq = renewal_sequence(c, 4000);
    for (double z : {0.1, 0.5, 0.9}) {
      const auto r = generating_residual(seq, z);
      CHECK(r.residual <= r.bound);
      CHECK(r.residual < 1e-10);
    }
  }

  TEST_CASE("asymptotic ratio tends to one") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 1 << 14);
    const auto seq = renewal_sequence(c, 1 << 14);
    const auto rows = asymptotic_diagnostic(seq);
    REQUIRE_FALSE(rows.empty());
    CHECK(rows.back().ratio == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("renewal_term reproduces stored entries") {
    const auto c = coefficients(BernsteinSpec::power(0.5), 200);
    const auto seq = renewal_sequence(c, 200, RenewalMethod::Recurrence);
    for (std::size_t n : {1u, 10u, 200u}) CHECK(renewal_term(c, seq, n) == doctest::Approx(seq[n]).epsilon(1e-15));
  }

  TEST_CASE("closed form rejects other families") {
    CHECK_THROWS_AS(renewal_closed_form(3.0, 10), DomainError);
  }
}
