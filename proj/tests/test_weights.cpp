#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hhi/errors.hpp"
#include "hhi/weights.hpp"

using namespace hhi;
using doctest::Approx;

namespace {
const double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

Scheme unit_scheme(double beta, int delta = 1) {
    Scheme s;
    s.delta = delta;
    s.cm = ContinuousMeasure::unit();
    s.dm = DiscreteMeasure::unit(beta);
    s.params = KernelParams{1.0, 1.0, 0.5, 1.0};
    return s;
}

Scheme damped_scheme(int delta) {
    Scheme s;
    s.delta = delta;
    s.cm = ContinuousMeasure::power_damped(0.5);
    s.dm = DiscreteMeasure::power_seq(0.5, 0.25);
    s.params = KernelParams{1.0, 0.5, 0.4, 0.8};
    return s;
}
}  // namespace

TEST_SUITE("weights") {
    TEST_CASE("omega against an independent evaluation") {
        // mpmath nsum of h(n-1/2) (n-1/2)^0 at x = 1
        CHECK(omega(unit_scheme(0.5), 1.0) == Approx(1.05995154647739).epsilon(1e-11));
    }

    TEST_CASE("omega stays between the lower bound and the constant") {
        for (const Scheme& s : {unit_scheme(0.5), unit_scheme(0.0), damped_scheme(1), damped_scheme(-1)}) {
            for (double x : {1e-4, 0.1, 1.0, 10.0, 1e4}) {
                const WeightReport r = weight_report(s, x);
                CHECK(r.below_k == Verdict::True);
                CHECK(r.lower_applies);
                CHECK(r.above_lower == Verdict::True);
                CHECK(r.omega < r.k_value);
                CHECK(r.omega > r.k_value * r.one_minus_theta);
            }
        }
    }

    TEST_CASE("varpi equals the constant when U is unbounded") {
        for (long n : {1L, 2L, 17L, 1000L}) {
            const VarpiReport r = varpi_report(unit_scheme(0.5), n);
            CHECK(r.equality_applies);
            CHECK(r.varpi == Approx(kZeta2).epsilon(1e-9));
            CHECK(r.varpi_subst == Approx(r.varpi).epsilon(1e-9));
            CHECK(r.equals_k == Verdict::True);
            CHECK(r.at_most_k == Verdict::True);
        }
        for (int delta : {1, -1}) {
            const Scheme s = damped_scheme(delta);
            const double k = kernel_constant_closed(s.params).value;
            CHECK(varpi(s, 5) == Approx(k).epsilon(1e-8));
        }
    }

    TEST_CASE("varpi falls short of the constant when U is bounded") {
        Scheme s = unit_scheme(0.0);
        s.cm = ContinuousMeasure::tabulated({0.0, 1.0}, {1.0, 1.0}, 2.0);  // U(inf) = 2
        const VarpiReport r = varpi_report(s, 3);
        CHECK_FALSE(r.equality_applies);
        CHECK(r.at_most_k == Verdict::True);
        CHECK(r.varpi < kZeta2);
    }

    TEST_CASE("midpoint comparison for the kernel summand") {
        for (const Scheme& s : {unit_scheme(0.5), damped_scheme(1)}) {
            for (long n : {1L, 2L, 10L, 200L}) {
                for (double c : {0.01, 1.0, 30.0}) {
                    const ComparisonResult r = hermite_hadamard_check(s, n, c);
                    CHECK(r.verdict == Verdict::True);
                    CHECK(r.lhs < r.rhs);
                }
            }
        }
    }

    TEST_CASE("midpoint comparison detects a concave summand") {
        const KernelParams p{1.0, 1.0, 0.5, 1.0};
        const auto neg = [&](double y) { return -h(y - 0.5, p); };
        const ComparisonResult r = hermite_hadamard_check_fn(neg, 2);
        CHECK(r.verdict == Verdict::False);
        const ComparisonResult conv = hermite_hadamard_check_fn([](double y) { return std::exp(-y); }, 3);
        CHECK(conv.verdict == Verdict::True);
    }

    TEST_CASE("sandwich on controls") {
        const ComparisonResult geo = sandwich_check_fn([](double t) { return std::exp(-t); });
        CHECK(geo.verdict == Verdict::True);
        CHECK(geo.mid == Approx(1.0 / (std::numbers::e - 1.0)).epsilon(1e-10));
        CHECK(geo.lhs == Approx(std::exp(-1.0)).epsilon(1e-10));
        CHECK(geo.rhs == Approx(std::exp(-0.5)).epsilon(1e-10));
        const ComparisonResult sq = sandwich_check_fn([](double t) { return 1.0 / (t * t); });
        CHECK(sq.verdict == Verdict::True);
        CHECK(sq.mid == Approx(kZeta2).epsilon(1e-9));
        CHECK(sq.lhs == Approx(1.0).epsilon(1e-9));
        CHECK(sq.rhs == Approx(2.0).epsilon(1e-9));
    }

    TEST_CASE("sandwich on the kernel summand") {
        for (const Scheme& s : {unit_scheme(0.5), unit_scheme(0.0), damped_scheme(1)}) {
            for (double c : {0.05, 1.0, 20.0}) {
                const ComparisonResult r = sandwich_check(s, c);
                CHECK(r.verdict == Verdict::True);
            }
        }
    }

    TEST_CASE("scheme validation") {
        Scheme s = unit_scheme(0.0);
        s.delta = 0;
        CHECK_THROWS_AS(s.validate(), DomainError);
        s = unit_scheme(0.0);
        s.params.gamma = 1.0;
        CHECK_THROWS_AS(s.validate(), DomainError);
    }
}
