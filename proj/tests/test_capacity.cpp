#include "doctest.h"

#include "subwalk/capacity.hpp"
#include "subwalk/errors.hpp"
#include "subwalk/simplex.hpp"

#include <cmath>
#include <sstream>

using namespace subwalk;

namespace {

GreenOptions fast() {
  GreenOptions o;
  o.exact_steps = 256;
  return o;
}

}  // namespace

TEST_SUITE("capacity") {
  TEST_CASE("point sets") {
    PointSet s(3, {LatticePoint{1, 0, 0}, LatticePoint{0, 0, 0}, LatticePoint{1, 0, 0}});
    CHECK(s.size() == 2);
    CHECK(s[0] == LatticePoint{0, 0, 0});
    CHECK(s.contains(LatticePoint{1, 0, 0}));
    CHECK(s.upper() == LatticePoint{1, 0, 0});
    CHECK(s.translated(LatticePoint{0, 2, 0}).contains(LatticePoint{1, 2, 0}));
    CHECK(s.united(PointSet(3, {LatticePoint{5, 5, 5}})).size() == 3);
    CHECK_THROWS_AS(PointSet(3, {LatticePoint{1, 0}}), DomainError);
  }

  TEST_CASE("read and write") {
    std::istringstream in("# two points\n0 0 0\n1,2,3\n\n");
    const auto s = PointSet::read(in);
    REQUIRE(s.size() == 2);
    CHECK(s[1] == LatticePoint{1, 2, 3});
    std::ostringstream out;
    s.write(out);
    std::istringstream back(out.str());
    CHECK(PointSet::read(back).points() == s.points());
  }

  TEST_CASE("ball, cylinder and dilation sizes") {
    int n = 0;
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b)
        for (int c = -3; c <= 3; ++c) n += a * a + b * b + c * c <= 9;
    CHECK(lattice_ball(3, 3.0).size() == static_cast<std::size_t>(n));
    CHECK(lattice_cylinder(3, 10, 1.0).size() == 50);
    CHECK(dilate(PointSet(3, {LatticePoint{0, 0, 0}, LatticePoint{1, 0, 0}}), 3).size() == 54);
    CHECK_THROWS_AS(lattice_ball(3, 400.0), BudgetExceeded);
  }

  TEST_CASE("single point: capacity is the reciprocal of Watson's integral") {
    GreenEvaluator ev(3, BernsteinSpec::power(2.0));
    const auto r = equilibrium(ev, PointSet(3, {LatticePoint{0, 0, 0}}));
    CHECK(r.capacity == doctest::Approx(1.0 / 1.516386059).epsilon(1e-4));
  }

  TEST_CASE("two points against the Fourier integral") {
    const auto spec = BernsteinSpec::power(1.0);
    GreenEvaluator ev(3, spec, fast());
    const double g0 = fourier_oracle(3, spec, LatticePoint{0, 0, 0}, 2, 1e-7).value;
    const double g1 = fourier_oracle(3, spec, LatticePoint{1, 0, 0}, 2, 1e-7).value;
    const auto r = equilibrium(ev, PointSet(3, {LatticePoint{0, 0, 0}, LatticePoint{1, 0, 0}}));
    CHECK(r.capacity == doctest::Approx(2.0 / (g0 + g1)).epsilon(1e-3));
  }

  TEST_CASE("linear solve and simplex agree") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.5), fast());
    const auto ball = lattice_ball(3, 2.5);
    const auto a = equilibrium(ev, ball);
    const auto b = capacity_variational(ev, ball);
    CHECK(a.solver == "dense-llt");
    CHECK(b.solver == "simplex");
    CHECK(b.capacity == doctest::Approx(a.capacity).epsilon(1e-8));
    CHECK(a.residual < 1e-9);
  }

  TEST_CASE("translation invariance, monotonicity and subadditivity") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    const auto a = lattice_ball(3, 2.0);
    const auto b = lattice_cylinder(3, 6, 1.0);
    const double ca = equilibrium(ev, a).capacity;
    const double cb = equilibrium(ev, b).capacity;
    CHECK(equilibrium(ev, a.translated(LatticePoint{7, -3, 11})).capacity == doctest::Approx(ca).epsilon(1e-10));
    const double cu = equilibrium(ev, a.united(b)).capacity;
    CHECK(cu >= std::max(ca, cb) * (1 - 1e-10));
    CHECK(cu <= ca + cb);
  }

  TEST_CASE("equilibrium potential is one on the set and below one off it") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    const auto set = lattice_cylinder(3, 8, 1.0);
    const auto r = equilibrium(ev, set);
    CHECK_FALSE(r.negative_weights);
    CHECK(potential(ev, set, r.equilibrium, set[3]) == doctest::Approx(1.0).epsilon(1e-9));
    const double halo = max_halo_potential(ev, set, r.equilibrium, 3.0);
    CHECK(halo < 1.0);
    CHECK(halo > 0.3);
  }

  TEST_CASE("FFT conjugate gradients match the dense solve") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    const auto set = lattice_ball(3, 4.0);
    const auto dense = equilibrium(ev, set);
    CapacityOptions opt;
    opt.dense_limit = 0;
    const auto cg = equilibrium(ev, set, opt);
    CHECK(cg.solver == "fft-cg");
    CHECK(cg.capacity == doctest::Approx(dense.capacity).epsilon(1e-8));
    for (std::size_t i = 0; i < set.size(); i += 17) CHECK(cg.equilibrium[i] == doctest::Approx(dense.equilibrium[i]).epsilon(1e-6));
  }

  TEST_CASE("green matrix is symmetric") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), fast());
    const auto m = green_matrix(ev, lattice_ball(3, 1.5));
    CHECK((m - m.transpose()).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("ratio band") {
    std::vector<ScanRow> rows(3);
    rows[0].ratio = 2.0;
    rows[1].ratio = 1.0;
    rows[2].ratio = 1.5;
    CHECK(ratio_band(rows) == doctest::Approx(2.0));
  }

  TEST_CASE("simplex on a small LP") {
    // max x + y, 2x + y <= 4, x + 2y <= 4: optimum 8/3 at (4/3, 4/3)
    Eigen::VectorXd c(2), b(2);
    Eigen::MatrixXd A(2, 2);
    c << 1, 1;
    A << 2, 1, 1, 2;
    b << 4, 4;
    const auto r = simplex_maximize(c, A, b);
    CHECK(r.objective == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
    CHECK(r.x(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  }

  TEST_CASE("unbounded LP is reported") {
    Eigen::VectorXd c(2), b(1);
    Eigen::MatrixXd A(1, 2);
    c << 1, 1;
    A << 1, -1;
    b << 1;
    CHECK_THROWS_AS(simplex_maximize(c, A, b), SolverFailure);
  }
}
