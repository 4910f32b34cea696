#pragma once
// Gamma and Hurwitz zeta for real arguments.

namespace hhi {

struct Accuracy {
    double target_rel_err = 1e-12;
    int max_terms = 100000;
};

/// Gamma function for y > 0. Throws DomainError otherwise.
double gamma_fn(double y);

/// Hurwitz zeta sum_{k>=0} (k+a)^{-s}, s > 1, a > 0.
/// Euler-Maclaurin with Bernoulli corrections through B14.
double hurwitz_zeta(double s, double a, const Accuracy& acc = {});

/// Riemann zeta, identical to hurwitz_zeta(s, 1).
double riemann_zeta(double s, const Accuracy& acc = {});

}  // namespace hhi
