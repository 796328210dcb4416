#include "doctest.h"

#include "subwalk/errors.hpp"
#include "subwalk/lattice.hpp"

#include <cstdlib>
#include <set>

using namespace subwalk;

namespace {

// every point of Z^d with |x|_1 <= K and |x|_inf <= R
std::vector<LatticePoint> brute_box(int d, int K, int R) {
  std::vector<LatticePoint> out;
  std::vector<std::int64_t> x(d, -R);
  while (true) {
    LatticePoint p(x);
    if (p.norm1() <= K) out.push_back(p);
    int i = 0;
    while (i < d && x[i] == R) x[i++] = -R;
    if (i == d) break;
    ++x[i];
  }
  return out;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("point arithmetic and norms") {
    LatticePoint a{3, -4, 0};
    CHECK(a.norm2sq() == 25);
    CHECK(a.norm() == doctest::Approx(5.0));
    CHECK(a.norm1() == 7);
    CHECK(a.norm_inf() == 4);
    CHECK(a.parity() == 1);
    CHECK(a.canonical() == LatticePoint{4, 3, 0});
    CHECK((a - a).is_origin());
    CHECK((-a)[1] == 4);
    CHECK(a.str() == "3,-4,0");
  }

  TEST_CASE("parse_point") {
    CHECK(parse_point("1,-2,3") == LatticePoint{1, -2, 3});
    CHECK_THROWS_AS(parse_point("1,,2"), DomainError);
    CHECK_THROWS_AS(parse_point("a,b"), DomainError);
  }

  TEST_CASE("canonical domain counts orbits by brute force") {
    const int cases[][3] = {{1, 9, 9}, {2, 10, 4}, {3, 8, 8}, {3, 12, 5}, {4, 6, 3}};
    for (const auto& c : cases) {
      const int d = c[0], K = c[1], R = c[2];
      CanonicalDomain dom(d, K, R);
      std::set<LatticePoint> orbits;
      const auto pts = brute_box(d, K, R);
      for (const auto& p : pts) orbits.insert(p.canonical());
      CHECK(dom.size() == orbits.size());
      double mult = 0;
      for (std::size_t i = 0; i < dom.size(); ++i) mult += dom.multiplicity(i);
      CHECK(mult == doctest::Approx(static_cast<double>(pts.size())));
    }
  }

  TEST_CASE("find is the inverse of point") {
    CanonicalDomain dom(3, 10, 6);
    for (std::size_t i = 0; i < dom.size(); ++i) {
      auto j = dom.find(dom.point(i));
      REQUIRE(j.has_value());
      CHECK(*j == i);
    }
    CHECK(dom.find(LatticePoint{-2, 5, 1}) == dom.find(LatticePoint{5, 2, 1}));
    CHECK_FALSE(dom.find(LatticePoint{7, 0, 0}).has_value());
    CHECK_FALSE(dom.find(LatticePoint{6, 5, 0}).has_value());
  }

  TEST_CASE("parity lists are ordered by norm") {
    CanonicalDomain dom(2, 12, 12);
    for (int par : {0, 1}) {
      auto lst = dom.parity_list(par);
      for (std::size_t i = 0; i < lst.size(); ++i) {
        CHECK((dom.norm1(lst[i]) & 1) == par);
        if (i) CHECK(dom.norm1(lst[i - 1]) <= dom.norm1(lst[i]));
      }
      std::size_t n = 0;
      for (auto idx : lst) n += dom.norm1(idx) <= 5;
      CHECK(dom.count_upto(par, 5) == n);
    }
  }

  TEST_CASE("neighbour table") {
    CanonicalDomain dom(3, 6, 6);
    dom.build_neighbors();
    const auto o = *dom.find(LatticePoint{0, 0, 0});
    const auto e = *dom.find(LatticePoint{1, 0, 0});
    for (auto n : dom.neighbors(o)) CHECK(n == e);
    dom.drop_neighbors();
    CHECK_FALSE(dom.has_neighbors());
  }

  TEST_CASE("size estimate is in the right range") {
    const double est = canonical_domain_size_estimate(3, 40, 40);
    CanonicalDomain dom(3, 40, 40);
    CHECK(est > 0.5 * static_cast<double>(dom.size()));
    CHECK(est < 2.0 * static_cast<double>(dom.size()));
  }
}
