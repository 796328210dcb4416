#include "doctest.h"

#include "subwalk/bernstein.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/walk_kernel.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

using namespace subwalk;

namespace {

// naive convolution of the step law, full lattice, no symmetry
std::map<LatticePoint, double> brute_pmf(int d, int k) {
  std::map<LatticePoint, double> cur{{LatticePoint::origin(d), 1.0}};
  for (int s = 0; s < k; ++s) {
    std::map<LatticePoint, double> next;
    for (const auto& [x, p] : cur)
      for (int i = 0; i < d; ++i)
        for (int sg : {-1, 1}) {
          auto y = x;
          y[i] += sg;
          next[y] += p / (2.0 * d);
        }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

TEST_SUITE("walk_kernel") {
  TEST_CASE("step kernel") {
    const auto k = step_kernel(3);
    CHECK(k.size() == 6);
    double s = 0;
    for (auto& [x, p] : k) {
      CHECK(x.norm1() == 1);
      s += p;
    }
    CHECK(s == doctest::Approx(1.0));
  }

  TEST_CASE("table matches brute-force convolution") {
    for (int d : {1, 2, 3}) {
      const int K = d == 3 ? 10 : 14;
      TransitionTable t(d, K, K);
      for (int k = 0; k <= K; ++k) {
        const auto ref = brute_pmf(d, k);
        for (const auto& [x, p] : ref) CHECK(t(k, x) == doctest::Approx(p).epsilon(1e-13));
        CHECK(t(k, LatticePoint::origin(d)) == doctest::Approx(ref.count(LatticePoint::origin(d)) ? ref.at(LatticePoint::origin(d)) : 0.0));
      }
    }
  }

  TEST_CASE("return probability in d = 1 is binomial") {
    TransitionTable t(1, 200, 200);
    for (int k : {2, 50, 200}) {
      const double oracle = std::exp(std::lgamma(k + 1.0) - 2 * std::lgamma(k / 2 + 1.0) - k * std::log(2.0));
      CHECK(t(k, LatticePoint{0}) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }

  TEST_CASE("layers are normalised") {
    const int K = 30;
    TransitionTable t(3, K, K);
    const auto& dom = t.domain();
    for (int k : {1, 7, 30}) {
      double s = 0;
      for (std::size_t i = 0; i < dom.size(); ++i) s += dom.multiplicity(i) * t(k, dom.point(i));
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("parity zero and out of range") {
    TransitionTable t(3, 10, 10);
    CHECK(t(3, LatticePoint{1, 1, 0}) == 0.0);
    CHECK(t(2, LatticePoint{2, 2, 0}) == 0.0);
    CHECK_THROWS_AS(t(11, LatticePoint{0, 0, 0}), DomainError);
  }

  TEST_CASE("L-infinity cutoff is reported") {
    TransitionTable t(3, 20, 5);
    CHECK(t.is_exact(4, LatticePoint{0, 0, 0}));
    CHECK_FALSE(t.is_exact(20, LatticePoint{0, 0, 0}));
  }

  TEST_CASE("save and load round trip") {
    TransitionTable t(3, 24, 24);
    const auto path = (std::filesystem::temp_directory_path() / "subwalk_table_test.bin").string();
    t.save(path);
    const auto u = TransitionTable::load(path);
    CHECK(u == t);
    std::filesystem::remove(path);
  }

  TEST_CASE("gaussian_q sums to two over one parity class") {
    const int d = 3;
    const double n = 400;
    double s = 0;
    const int R = 120;
    for (int a = -R; a <= R; ++a)
      for (int b = -R; b <= R; ++b)
        for (int c = -R; c <= R; ++c)
          if (((a + b + c) & 1) == 0) s += gaussian_q(d, n, static_cast<double>(a * a + b * b + c * c));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("local CLT error shrinks") {
    TransitionTable t(3, 200, 200);
    const double e1 = std::abs(clt_error(t, 50, LatticePoint{0, 0, 0}).error);
    const double e2 = std::abs(clt_error(t, 200, LatticePoint{0, 0, 0}).error);
    CHECK(e2 < e1);
    CHECK(clt_error(t, 3, LatticePoint{0, 0, 0}).parity_mismatch);
  }

  TEST_CASE("subordinated pmf equals the direct mixture") {
    TransitionTable t(3, 300, 300);
    const auto c = coefficients(BernsteinSpec::power(1.0), 300);
    const LatticePoint x{1, 0, 0};
    const auto v = subordinated_pmf(t, c, 1, x);
    double direct = 0;
    for (int k = 1; k <= 300; ++k) direct += c[k] * t(k, x);
    CHECK(v.value == doctest::Approx(direct).epsilon(1e-12));
    CHECK(v.deficit == doctest::Approx(1.0 - c.mass()).epsilon(1e-9));
    const auto w = subordinated_pmf(t, coefficients(BernsteinSpec::power(2.0), 300), 5, LatticePoint{1, 0, 0});
    CHECK(w.value == doctest::Approx(t(5, LatticePoint{1, 0, 0})));
  }
}
