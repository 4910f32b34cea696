#include "hhi/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hhi/errors.hpp"

namespace hhi {

namespace {

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// B_{2j} / (2j)! for j = 1..8. The last entry only sizes the remainder.
constexpr std::array<double, 8> kBernoulliOverFact = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0};

double gamma_positive(double y) {
    if (y < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * y) * gamma_positive(1.0 - y));
    }
    const double z = y - 1.0;
    double x = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + double(i));
    const double t = z + kLanczosG + 0.5;
    // split the power so t^(z+1/2) does not overflow before exp(-t) pulls it back
    const double half = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * x;
}

// Euler-Maclaurin remainder terms at the shifted cutoff b = N + a.
// Returns sum_{j=1}^{7} and the magnitude of the j = 8 term.
void em_corrections(double s, double b, double& corr, double& next) {
    corr = 0.0;
    double poch = s;                       // s (s+1) ... (s+2j-2)
    double pw = std::pow(b, -s - 1.0);     // b^{-s-2j+1}
    const double inv_b2 = 1.0 / (b * b);
    for (int j = 0; j < 7; ++j) {
        corr += kBernoulliOverFact[j] * poch * pw;
        poch *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        pw *= inv_b2;
    }
    next = std::fabs(kBernoulliOverFact[7] * poch * pw);
}

}  // namespace

double gamma_fn(double y) {
    if (!(y > 0.0) || !std::isfinite(y)) {
        throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(y));
    }
    return gamma_positive(y);
}

double hurwitz_zeta(double s, double a, const Accuracy& acc) {
    if (!(s > 1.0)) throw DomainError("hurwitz_zeta: need s > 1, got s=" + std::to_string(s));
    if (!(a > 0.0)) throw DomainError("hurwitz_zeta: need a > 0, got a=" + std::to_string(a));
    if (!(acc.target_rel_err > 0.0) || acc.max_terms < 1) {
        throw DomainError("hurwitz_zeta: invalid accuracy request");
    }

    // Grow N until the first omitted correction is negligible against the
    // leading tail term.
    int n = 8;
    double corr = 0.0, next = 0.0;
    for (;; n += 4) {
        const double b = n + a;
        em_corrections(s, b, corr, next);
        const double lead = std::pow(b, 1.0 - s) / (s - 1.0);
        if (next <= 0.01 * acc.target_rel_err * lead) break;
        if (n >= acc.max_terms) {
            throw ConvergenceError("hurwitz_zeta: term budget exhausted", 0.0, next);
        }
    }
    const double b = n + a;
    double sum = std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s) + corr;
    for (int k = n - 1; k >= 0; --k) sum += std::pow(k + a, -s);
    return sum;
}

double riemann_zeta(double s, const Accuracy& acc) { return hurwitz_zeta(s, 1.0, acc); }

}  // namespace hhi
