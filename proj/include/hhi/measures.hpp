#pragma once
// Continuous measure mu/U and discrete measure nu/V with shift beta.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hhi/kernel.hpp"
#include "hhi/quadrature.hpp"

namespace hhi {

enum class ContinuousFamily { PowerDamped, UnitDensity, Tabulated };

/// mu(t) > 0 on (0, inf) and U(x) = int_0^x mu.
/// Tabulated: mu piecewise linear through (knots, values) with knots[0] = 0,
/// then mu(x) = mu_m (x/x_m)^{-tail} past the last knot.
class ContinuousMeasure {
public:
    static ContinuousMeasure power_damped(double a);
    static ContinuousMeasure unit();
    static ContinuousMeasure tabulated(std::vector<double> knots, std::vector<double> values, double tail_exponent);

    ContinuousFamily family() const { return family_; }
    double exponent() const { return a_; }
    std::string id() const;

    double mu(double x) const;
    double U(double x) const;
    bool u_infinite() const;
    double U_infinity() const;

    /// log U(e^y), finite for every real y.
    double log_U_at_log(double y) const;
    /// log(mu(e^y) e^y).
    double log_mu_x_at_log(double y) const;
    /// y with log U(e^y) = lu (bisection; used to center integrals).
    double log_x_for_log_U(double lu) const;
    /// log of the knots where mu has kinks (empty for smooth families).
    std::vector<double> log_breaks() const;

private:
    ContinuousFamily family_ = ContinuousFamily::UnitDensity;
    double a_ = 0.0;
    std::vector<double> knots_, values_, cum_;
    double tail_ = 0.0;
};

enum class DiscreteFamily { PowerSequence, UnitSequence, Tabulated };

struct SeriesResult {
    double log_value = -std::numeric_limits<double>::infinity();
    double rel_err = 0.0;
    long direct_terms = 0;
    bool converged = true;
    double value() const { return std::exp(log_value); }
};

/// Decreasing positive nu_n, prefix sums V_n, step extension V(y), shift beta.
/// Every family has an exact power tail nu_n = C n^{-tau} for n > m, which
/// provides a smooth extension used for series tails.
class DiscreteMeasure {
public:
    static DiscreteMeasure power_seq(double a, double beta = 0.0);
    static DiscreteMeasure unit(double beta = 0.0);
    static DiscreteMeasure tabulated(std::vector<double> nu, double tail_exponent, double beta = 0.0);

    DiscreteFamily family() const { return family_; }
    std::string id() const;
    double beta() const { return beta_; }
    double tail_exponent() const { return tau_; }

    double nu(long n) const;
    double V(long n) const;
    double V_step(double y) const;
    bool v_infinite() const { return tau_ <= 1.0; }
    double V_infinity() const;

    /// log nu at real index t > m (smooth extension).
    double log_nu_smooth(double log_t) const { return logC_ - tau_ * log_t; }
    /// log(V(t) - beta) for real t >= first_smooth_index(), from log t.
    double log_V_shift_smooth(double log_t) const;
    long first_smooth_index() const { return m_ + 1; }

    /// log(nu(t+1) / V'(t)) on the smooth extension, from log t.
    double log_nu_over_dV(double log_t) const;
    /// Inverse of log_V_shift_smooth.
    double log_t_for_log_V_shift(double lw) const;

    /// Sum over n >= 1 of nu_{n+1}^k exp(log_q(log n, log(V_n - beta))).
    /// Direct summation up to n0, then an Euler-Maclaurin tail on the smooth
    /// extension, with the tail integral taken in log(V - beta). The summand
    /// must be smooth in n past n0. `l_breaks` are points in log(V - beta) where
    /// the summand changes character (e.g. a kernel cutoff); the tail integral is
    /// split there.
    template <class LogQ>
    SeriesResult sum_log(LogQ&& log_q, double k = 1.0, double tol = 1e-12, long n0 = 2048,
                         std::vector<double> l_breaks = {}) const;

    static constexpr long kPrefix = 1L << 16;

private:
    void build();
    double E(double t) const;          // smooth antiderivative-like extension of sum j^{-tau}
    double log_E_big(double lt) const;  // log E(t) for huge t (tau < 1)

    DiscreteFamily family_ = DiscreteFamily::UnitSequence;
    double a_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> table_;  // nu_1..nu_m
    long m_ = 0;
    double tau_ = 0.0;
    double logC_ = 0.0;
    std::vector<double> prefix_;  // V_0..V_kPrefix
    double E_ref_ = 0.0;          // E(kPrefix)
};

struct TailSumBracket {
    double lower;
    double upper;
};

/// sum_{n>=1} nu_{n+1} / (V_n - beta)^{1+b}; requires b > 0 and V(inf) = inf.
SeriesResult tail_sum(double b, const DiscreteMeasure& dm, double tol = 1e-12);
/// Integral-comparison bracket for tail_sum.
TailSumBracket tail_sum_bracket(double b, const DiscreteMeasure& dm);

// ---------------------------------------------------------------------------

template <class LogQ>
SeriesResult DiscreteMeasure::sum_log(LogQ&& log_q, double k, double tol, long n0,
                                      std::vector<double> l_breaks) const {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    n0 = std::max<long>(n0, m_ + 6);
    n0 = std::min<long>(n0, kPrefix - 2);
    std::vector<double> lt(static_cast<std::size_t>(n0));
    double M = kNegInf;
    for (long n = 1; n < n0; ++n) {
        const double lq = log_q(std::log(double(n)), std::log(V(n) - beta_));
        const double l = (lq == kNegInf) ? kNegInf : k * std::log(nu(n + 1)) + lq;
        lt[std::size_t(n)] = l;
        if (l > M) M = l;
    }
    // summand on the smooth extension, as a function of log t
    auto smooth = [&](double log_t) {
        const double lq = log_q(log_t, log_V_shift_smooth(log_t));
        if (lq == kNegInf) return kNegInf;
        return k * log_nu_smooth(log_t + std::log1p(std::exp(-log_t))) + lq;
    };
    const double ln0 = std::log(double(n0));
    const double l0 = smooth(ln0);
    M = std::max(M, l0);
    SeriesResult out;
    if (M == kNegInf) return out;

    double direct = 0.0;
    for (long n = n0 - 1; n >= 1; --n) direct += std::exp(lt[std::size_t(n)] - M);

    // Euler-Maclaurin: int_{n0}^inf g + g(n0)/2 - g'(n0)/12 + g'''(n0)/720
    auto g = [&](double t) { return std::exp(smooth(std::log(t)) - M); };
    const double t0 = double(n0);
    const double g0 = std::exp(l0 - M);
    const double d1 = (g(t0 + 1.0) - g(t0 - 1.0)) / 2.0;
    const double hd = 2.0;
    const double d3 = (g(t0 + 2 * hd) - 2 * g(t0 + hd) + 2 * g(t0 - hd) - g(t0 - 2 * hd)) / (2 * hd * hd * hd);

    // int_{n0}^inf g dt with v = V(t), l = log(v - beta): dt = e^l dl / V'(t)
    auto integrand = [&](const QuadNode& nd) {
        const double l = nd.x;
        const double lt_l = log_t_for_log_V_shift(l);
        const double lq = log_q(lt_l, l);
        if (lq == kNegInf) return kNegInf;
        double r = log_nu_over_dV(lt_l) + lq + l;
        if (k != 1.0) r += (k - 1.0) * log_nu_smooth(lt_l + std::log1p(std::exp(-lt_l)));
        return r;
    };
    DeOptions opt;
    opt.tol = tol;
    const double l_start = log_V_shift_smooth(ln0);
    const double l_end = v_infinite() ? std::numeric_limits<double>::infinity() : std::log(V_infinity() - beta_);
    std::sort(l_breaks.begin(), l_breaks.end());
    std::vector<double> cuts;
    for (double b : l_breaks) {
        if (b > (cuts.empty() ? l_start : cuts.back()) + 1e-9 && b < l_end - 1e-9) cuts.push_back(b);
    }
    // the tail may peak far from n0 (at a break); give it its own scaling
    double Mt = M;
    for (double b : cuts) {
        const double v = integrand(QuadNode{b, 0.0, 0.0, 0.0});
        if (std::isfinite(v)) Mt = std::max(Mt, v);
    }
    QuadResult tail;
    tail.converged = true;
    double a = l_start;
    for (double b : cuts) {
        tail = combine({tail, de_integrate_log(integrand, DeMap::Finite, a, b, Mt, opt)});
        a = b;
    }
    if (v_infinite()) {
        tail = combine({tail, de_integrate_log(integrand, DeMap::HalfUp, a, 1.0, Mt, opt)});
    } else {
        tail = combine({tail, de_integrate_log(integrand, DeMap::Finite, a, l_end, Mt, opt)});
    }
    // total = e^M (direct + corr) + e^Mt tail, formed on the Mt scale
    const double scale = std::exp(M - Mt);
    const double corr = 0.5 * g0 - d1 / 12.0 + d3 / 720.0;
    const double total = tail.value + scale * (direct + corr);
    out.log_value = Mt + std::log(total);
    out.rel_err = (tail.err + scale * (std::fabs(d3) / 720.0 + 1e-16 * direct)) / total;
    out.direct_terms = n0 - 1;
    out.converged = tail.converged;
    return out;
}

}  // namespace hhi
