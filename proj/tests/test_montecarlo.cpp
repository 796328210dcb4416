#include "doctest.h"

#include "subwalk/errors.hpp"
#include "subwalk/montecarlo.hpp"
#include "subwalk/walk_kernel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace subwalk;

TEST_SUITE("montecarlo") {
  TEST_CASE("identity subordinator always takes one step") {
    IncrementSampler s(coefficients(BernsteinSpec::power(2.0), 16));
    auto rng = trial_rng(1, 0);
    for (int i = 0; i < 1000; ++i) CHECK(s(rng) == 1);
  }

  TEST_CASE("increment law: head probabilities") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 4096);
    IncrementSampler s(c);
    auto rng = trial_rng(7, 0);
    const int n = 200000;
    int ones = 0, small = 0;
    for (int i = 0; i < n; ++i) {
      const auto r = s(rng);
      ones += r == 1;
      small += r <= 16;
    }
    double p16 = 0;
    for (int k = 1; k <= 16; ++k) p16 += c[k];
    CHECK(std::abs(ones / double(n) - 0.5) < 4 * std::sqrt(0.25 / n));
    CHECK(std::abs(small / double(n) - p16) < 4 * std::sqrt(p16 * (1 - p16) / n));
  }

  TEST_CASE("increment law: power tail past the table") {
    const double a = 0.5;
    IncrementSampler s(coefficients(BernsteinSpec::power(1.0), 64));
    auto rng = trial_rng(11, 0);
    const int n = 200000;
    int big = 0;
    for (int i = 0; i < n; ++i) big += s(rng) > 1000;
    // sum_{k > 1000} c_k in closed form
    const double tail = boost::math::tgamma_ratio(1001 - a, 1001.0) / boost::math::tgamma(1 - a);
    CHECK(big / double(n) == doctest::Approx(tail).epsilon(0.06));
  }

  TEST_CASE("steps preserve parity") {
    auto rng = trial_rng(3, 0);
    for (std::uint64_t R : {std::uint64_t{1}, std::uint64_t{7}, std::uint64_t{40}, std::uint64_t{1} << 20,
                            kSurrogateCap * 4 + 1}) {
      for (int i = 0; i < 50; ++i) {
        LatticePoint p{0, 0, 0};
        const bool surrogate = simulate_step(p, R, rng);
        CHECK(surrogate == (R > kSurrogateCap));
        CHECK(static_cast<std::uint64_t>(p.parity()) == (R & 1));
        if (R <= kSurrogateCap) CHECK(static_cast<std::uint64_t>(p.norm1()) <= R);
      }
    }
  }

  TEST_CASE("one subordinated step matches the mixture law") {
    const auto c = coefficients(BernsteinSpec::power(1.0), 4096);
    IncrementSampler s(c);
    TransitionTable t(3, 256, 256);
    const auto ref = subordinated_pmf(t, c, 1, LatticePoint{1, 0, 0});
    auto rng = trial_rng(5, 0);
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      LatticePoint p{0, 0, 0};
      simulate_step(p, s(rng), rng);
      hits += p == LatticePoint{1, 0, 0};
    }
    // one of six neighbours
    const double expect = ref.value;
    CHECK(std::abs(hits / double(n) - expect) < 4 * std::sqrt(expect / n) + ref.error_bound);
  }

  TEST_CASE("simple walk return probability from a neighbour") {
    // P(hit 0 from e_1) = 1 - 1 / G(0) with Watson's G(0)
    SimConfig cfg;
    cfg.spec = BernsteinSpec::power(2.0);
    cfg.start = LatticePoint{1, 0, 0};
    cfg.trials = 10000;
    cfg.stopping = Horizon{8192};
    const auto e = hitting_probability(cfg, LatticeSetSpec::explicit_set(PointSet(3, {LatticePoint{0, 0, 0}})));
    CHECK(e.lower_bound);
    const double truth = 1.0 - 1.0 / 1.516386059;
    CHECK(std::abs(e.estimate - truth) < 4 * e.standard_error() + 0.007);
  }

  TEST_CASE("runs are reproducible from the seed") {
    SimConfig cfg;
    cfg.start = LatticePoint{4, 0, 0};
    cfg.trials = 500;
    cfg.stopping = Horizon{1 << 12};
    cfg.master_seed = 42;
    const auto set = LatticeSetSpec::explicit_set(lattice_ball(3, 1.0));
    const auto a = run_trials(cfg, set);
    const auto b = run_trials(cfg, set);
    CHECK(a.hit_time == b.hit_time);
    cfg.master_seed = 43;
    CHECK(run_trials(cfg, set).hit_time != a.hit_time);
  }

  TEST_CASE("a start inside the set is a hit at time zero") {
    SimConfig cfg;
    cfg.start = LatticePoint{3, 0, 0};
    cfg.trials = 20;
    const auto o = run_trials(cfg, LatticeSetSpec::axis(3));
    for (auto h : o.hit_time) CHECK(h == 0);
    CHECK(hitting_probability(cfg, LatticeSetSpec::axis(3)).estimate == 1.0);
  }

  TEST_CASE("Wilson interval") {
    const auto w = wilson_interval(0, 10);
    CHECK(w.low == doctest::Approx(0.0));
    const double z2 = 1.959964 * 1.959964;
    CHECK(w.high == doctest::Approx(z2 / (10 + z2)).epsilon(1e-12));
    const auto m = wilson_interval(50, 100);
    CHECK((m.low + m.high) / 2 == doctest::Approx(0.5));
    CHECK(m.high - m.low == doctest::Approx(2 * 1.959964 * std::sqrt(0.25 / 100 + z2 / 40000) / (1 + z2 / 100)).epsilon(1e-10));
    CHECK_THROWS_AS(wilson_interval(0, 0), DomainError);
  }

  TEST_CASE("zero trials are rejected") {
    SimConfig cfg;
    cfg.start = LatticePoint{3, 3, 3};
    cfg.trials = 0;
    CHECK_THROWS_AS(run_trials(cfg, LatticeSetSpec::axis(3)), DomainError);
  }

  TEST_CASE("hitting the axis is likelier from nearby") {
    SimConfig cfg;
    cfg.trials = 3000;
    cfg.stopping = Horizon{1 << 14};
    const auto axis = LatticeSetSpec::axis(3);
    cfg.start = axis.start_at_distance(10);
    const auto near = hitting_probability(cfg, axis);
    cfg.start = axis.start_at_distance(40);
    const auto far = hitting_probability(cfg, axis);
    CHECK(near.estimate > far.estimate + 3 * std::hypot(near.standard_error(), far.standard_error()));
  }

  TEST_CASE("escape radius with a return bound") {
    GreenEvaluator ev(3, BernsteinSpec::power(1.0), GreenOptions{256});
    SimConfig cfg;
    cfg.start = LatticePoint{2, 0, 0};
    cfg.trials = 2000;
    cfg.stopping = EscapeRadius{30, 1u << 20};
    const auto e = hitting_probability(cfg, LatticeSetSpec::explicit_set(PointSet(3, {LatticePoint{0, 0, 0}})), &ev);
    REQUIRE(e.return_bound.has_value());
    CHECK(*e.return_bound > 0.0);
    CHECK(*e.return_bound < 0.05);
    CHECK_FALSE(e.lower_bound);
  }
}
