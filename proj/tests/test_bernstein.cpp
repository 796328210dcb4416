#include "doctest.h"

#include "subwalk/bernstein.hpp"
#include "subwalk/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numeric>

using namespace subwalk;

namespace {

// a Gamma(n - a) / (Gamma(1 - a) Gamma(n + 1)) through Boost's gamma ratio
double gamma_form(double a, int n) {
  return a * boost::math::tgamma_ratio(n - a, static_cast<double>(n + 1)) / boost::math::tgamma(1.0 - a);
}

}  // namespace

TEST_SUITE("bernstein") {
  TEST_CASE("power coefficients against the gamma-function form") {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const auto c = coefficients(BernsteinSpec::power(alpha), 200);
      for (int n = 1; n <= 200; ++n) CHECK(c[n] == doctest::Approx(gamma_form(alpha / 2, n)).epsilon(1e-12));
    }
  }

  TEST_CASE("alpha = 1 small coefficients") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 4);
    CHECK(c[1] == 0.5);
    CHECK(c[2] == 0.125);
    CHECK(c[3] == 0.0625);
    CHECK(c[4] == 0.0390625);
  }

  TEST_CASE("alpha = 2 is the identity subordinator") {
    const auto c = coefficients(BernsteinSpec::power(2.0), 5);
    CHECK(c[1] == 1.0);
    for (int n = 2; n <= 5; ++n) CHECK(c[n] == 0.0);
    CHECK(BernsteinSpec::power(2.0).is_identity());
  }

  TEST_CASE("series route agrees with the closed form") {
    for (double alpha : {0.5, 1.5}) {
      const auto a = coefficients(BernsteinSpec::power(alpha), 300);
      const auto b = coefficients_by_series(BernsteinSpec::power(alpha), 300);
      for (int n = 1; n <= 300; ++n) CHECK(b[n] == doctest::Approx(a[n]).epsilon(1e-12));
    }
  }

  TEST_CASE("mass equals one minus the exact tail") {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const double a = alpha / 2;
      const std::size_t N = 10000;
      const auto c = coefficients(BernsteinSpec::power(alpha), N);
      const double tail = boost::math::tgamma_ratio(N + 1 - a, static_cast<double>(N + 1)) / boost::math::tgamma(1 - a);
      CHECK(c.mass() == doctest::Approx(1.0 - tail).epsilon(1e-12));
    }
  }

  TEST_CASE("tail check ratios approach one") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 1 << 12);
    const auto rows = coefficient_tail_check(c);
    REQUIRE(rows.size() >= 10);
    CHECK(rows.back().ratio == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("log-power family is a probability law after normalisation") {
    const auto spec = BernsteinSpec::log_power(1.0, 1.0);
    CHECK(spec(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    const auto c = coefficients(spec, 512);
    for (std::size_t n = 1; n <= 512; ++n) CHECK(c[n] > 0.0);
    CHECK(c.mass() < 1.0);
    CHECK(spec.has_slowly_varying());
  }

  TEST_CASE("tabulated stable density reproduces the power coefficients") {
    const double a = 0.5;
    const double k = a / boost::math::tgamma(1 - a);
    const auto spec = BernsteinSpec::tabulated([=](double t) { return k * std::pow(t, -1 - a); }, 0.0, 1.0);
    CHECK(spec(0.3) == doctest::Approx(std::pow(0.3, a)).epsilon(1e-8));
    const auto c = coefficients(spec, 40);
    const auto ref = coefficients(BernsteinSpec::power(1.0), 40);
    for (int n = 1; n <= 40; ++n) CHECK(c[n] == doctest::Approx(ref[n]).epsilon(1e-7));
  }

  TEST_CASE("negative coefficients are rejected") {
    // drift larger than the normaliser allows gives c_1 > 1 and a negative mass elsewhere
    const auto spec = BernsteinSpec::tabulated([](double t) { return t < 1.0 ? -1.0 : 0.0; }, 2.0);
    CHECK_THROWS_AS(coefficients(spec, 10), NotBernsteinError);
  }

  TEST_CASE("alpha outside (0, 2] is a domain error") {
    CHECK_THROWS_AS(BernsteinSpec::power(2.5), DomainError);
    CHECK_THROWS_AS(BernsteinSpec::power(0.0), DomainError);
    CHECK_THROWS_AS(BernsteinSpec::power(-1.0), DomainError);
    CHECK_THROWS_AS(BernsteinSpec::power(1.0)(-0.5), DomainError);
  }

  TEST_CASE("psi of the power family") {
    const auto spec = BernsteinSpec::power(1.5);
    for (double l : {0.0, 0.01, 0.5, 1.0, 3.0}) CHECK(eval_psi(spec, l) == doctest::Approx(std::pow(l, 0.75)).epsilon(1e-14));
  }

  TEST_CASE("tau law: n = 1 is c and n = 2 is c * c") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 64);
    const auto t1 = tau_pmf(c, 1, 64);
    CHECK(t1.first == 1);
    for (std::size_t k = 1; k <= 64; ++k) CHECK(t1.probs[k - 1] == doctest::Approx(c[k]).epsilon(1e-14));
    const auto t2 = tau_pmf(c, 2, 64);
    CHECK(t2.first == 2);
    for (std::size_t k = 2; k <= 64; ++k) {
      double s = 0;
      for (std::size_t j = 1; j < k; ++j) s += c[j] * c[k - j];
      CHECK(t2.probs[k - 2] == doctest::Approx(s).epsilon(1e-12));
    }
    double total = std::accumulate(t2.probs.begin(), t2.probs.end(), 0.0);
    CHECK(total + t2.deficit == doctest::Approx(1.0).epsilon(1e-12));
  }
}
