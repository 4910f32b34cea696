#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hhi/errors.hpp"
#include "hhi/measures.hpp"

using namespace hhi;
using doctest::Approx;

TEST_SUITE("measures") {
    TEST_CASE("continuous cumulative closed forms") {
        CHECK(ContinuousMeasure::power_damped(1.0).U(3.0) == Approx(std::log(4.0)).epsilon(1e-14));
        CHECK(ContinuousMeasure::power_damped(0.5).U(3.0) == Approx(2.0).epsilon(1e-14));
        CHECK(ContinuousMeasure::unit().U(2.5) == Approx(2.5).epsilon(1e-15));
        CHECK(ContinuousMeasure::power_damped(0.5).U(0.0) == 0.0);
        CHECK(ContinuousMeasure::power_damped(1.0).u_infinite());
        CHECK(ContinuousMeasure::power_damped(0.5).mu(3.0) == Approx(0.5).epsilon(1e-15));
    }

    TEST_CASE("log forms agree with direct evaluation") {
        for (const ContinuousMeasure& cm : {ContinuousMeasure::unit(), ContinuousMeasure::power_damped(0.5),
                                            ContinuousMeasure::power_damped(1.0)}) {
            for (double x : {1e-12, 1e-3, 0.7, 5.0, 1e6}) {
                CHECK(std::exp(cm.log_U_at_log(std::log(x))) == Approx(cm.U(x)).epsilon(1e-12));
                CHECK(std::exp(cm.log_mu_x_at_log(std::log(x))) == Approx(cm.mu(x) * x).epsilon(1e-12));
                CHECK(cm.log_x_for_log_U(cm.log_U_at_log(std::log(x))) == Approx(std::log(x)).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("tabulated density integrates piecewise linearly") {
        const ContinuousMeasure cm = ContinuousMeasure::tabulated({0.0, 1.0, 2.0}, {2.0, 1.0, 0.5}, 2.0);
        CHECK(cm.U(1.0) == Approx(1.5).epsilon(1e-14));
        CHECK(cm.U(2.0) == Approx(2.25).epsilon(1e-14));
        CHECK(cm.mu(4.0) == Approx(0.125).epsilon(1e-14));
        // tail 0.5 (x/2)^{-2} integrates to 1 past x = 2
        CHECK(cm.U_infinity() == Approx(3.25).epsilon(1e-12));
        CHECK_FALSE(cm.u_infinite());
        CHECK_THROWS_AS(ContinuousMeasure::tabulated({0.5, 1.0}, {1.0, 1.0}, 1.0), DomainError);
        CHECK_THROWS_AS(ContinuousMeasure::tabulated({0.0, 1.0}, {1.0, -1.0}, 1.0), DomainError);
    }

    TEST_CASE("discrete prefix sums") {
        const DiscreteMeasure dm = DiscreteMeasure::power_seq(0.5);
        CHECK(dm.V(0) == 0.0);
        CHECK(dm.V(3) == Approx(1.0 + 1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(dm.nu(4) == Approx(0.5).epsilon(1e-15));
        CHECK(dm.v_infinite());
        CHECK(DiscreteMeasure::unit().V(7) == 7.0);
        // large index through the smooth extension: V_n ~ 2 sqrt(n) + zeta(1/2)
        const double n = 1e6;
        CHECK(std::exp(dm.log_V_shift_smooth(std::log(n))) ==
              Approx(2.0 * std::sqrt(n) - 1.46035450880958681 + 0.5 / std::sqrt(n)).epsilon(1e-10));
    }

    TEST_CASE("shift must not exceed half the first mass") {
        CHECK_NOTHROW(DiscreteMeasure::unit(0.5));
        CHECK_THROWS_AS(DiscreteMeasure::unit(0.51), DomainError);
        CHECK_THROWS_AS(DiscreteMeasure::power_seq(0.5, 0.6), DomainError);
        CHECK_THROWS_AS(DiscreteMeasure::tabulated({2.0, 3.0}, 1.0), DomainError);
    }

    TEST_CASE("tail sum against Hurwitz zeta") {
        // mpmath: zeta(1.5, 0.5) = 4.776537947554830
        const SeriesResult r = tail_sum(0.5, DiscreteMeasure::unit(0.5));
        CHECK(r.converged);
        CHECK(r.value() == Approx(4.77653794755483).epsilon(1e-11));
        // zeta(1.5) = 2.612375348685488
        CHECK(tail_sum(0.5, DiscreteMeasure::unit()).value() == Approx(2.61237534868549).epsilon(1e-11));
        CHECK_THROWS_AS(tail_sum(0.0, DiscreteMeasure::unit()), DomainError);
        CHECK_THROWS_AS(tail_sum(0.5, DiscreteMeasure::tabulated({1.0, 0.5}, 2.0)), DomainError);
    }

    TEST_CASE("tail sum lies inside its integral bracket") {
        for (double b : {0.05, 0.5, 2.0}) {
            for (const DiscreteMeasure& dm : {DiscreteMeasure::unit(0.25), DiscreteMeasure::power_seq(0.5, 0.5),
                                              DiscreteMeasure::power_seq(1.0)}) {
                const double s = tail_sum(b, dm).value();
                const TailSumBracket br = tail_sum_bracket(b, dm);
                CHECK(br.lower <= s * (1 + 1e-10));
                CHECK(s <= br.upper * (1 + 1e-10));
            }
        }
    }

    TEST_CASE("series engine on elementary sums") {
        const DiscreteMeasure dm = DiscreteMeasure::unit();
        const SeriesResult inv_sq = dm.sum_log([](double, double lw) { return -2.0 * lw; });
        CHECK(inv_sq.value() == Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-12));
        const SeriesResult geo = dm.sum_log([](double lt, double) { return -std::exp(lt); });
        CHECK(geo.value() == Approx(1.0 / (std::numbers::e - 1.0)).epsilon(1e-12));
        // slowly convergent: sum n^{-1.01} = zeta(1.01) = 100.577943338497
        const SeriesResult slow = dm.sum_log([](double, double lw) { return -1.01 * lw; });
        CHECK(slow.value() == Approx(100.577943338497).epsilon(1e-10));
    }
}
