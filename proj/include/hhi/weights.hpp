#pragma once
// Weight coefficients omega (sum over n) and varpi (integral over x), their
// bounds, and the two convexity-based comparison checks.

#include <functional>

#include "hhi/kernel.hpp"
#include "hhi/measures.hpp"
#include "hhi/verdict.hpp"

namespace hhi {

struct Scheme {
    int delta = 1;
    ContinuousMeasure cm = ContinuousMeasure::unit();
    DiscreteMeasure dm = DiscreteMeasure::unit();
    KernelParams params;

    void validate() const;
    /// log U^delta(e^y)
    double log_U_delta_at_log(double y) const { return delta * cm.log_U_at_log(y); }
};

/// log of the kernel at argument U^delta(x)(V - beta), both given in logs.
inline double log_kernel(const Scheme& s, double log_u_delta, double lw) {
    return log_h_at_log(log_u_delta + lw, s.params);
}

struct WeightReport {
    double x = 0.0;
    double omega = 0.0;
    double omega_err = 0.0;
    double k_value = 0.0;
    double theta_value = 0.0;
    double one_minus_theta = 0.0;
    Verdict below_k = Verdict::Indeterminate;   // omega < k
    Verdict above_lower = Verdict::Indeterminate;  // omega > k (1 - theta), needs V(inf) = inf
    bool lower_applies = false;
};

struct VarpiReport {
    long n = 0;
    double varpi = 0.0;         // direct x-integration
    double varpi_subst = 0.0;   // after u = (V_n - beta) U^delta(x)
    double err = 0.0;
    double k_value = 0.0;
    Verdict at_most_k = Verdict::Indeterminate;
    Verdict equals_k = Verdict::Indeterminate;  // only meaningful when U(inf) = inf
    bool equality_applies = false;
};

/// omega as a log, with U^delta(x) passed as log.
SeriesResult omega_log(const Scheme& s, double log_u_delta, double tol = 1e-12, double sigma_override = 0.0);
double omega(const Scheme& s, double x, double tol = 1e-12);
double varpi(const Scheme& s, long n, double tol = 1e-12);
double varpi_substitution(const Scheme& s, long n, double tol = 1e-12);

WeightReport weight_report(const Scheme& s, double x, double tol = 1e-12, double guard = 1e-6);
VarpiReport varpi_report(const Scheme& s, long n, double tol = 1e-12, double eq_tol = 1e-8);

struct ComparisonResult {
    double lhs = 0.0;
    double mid = 0.0;
    double rhs = 0.0;
    double err = 0.0;
    Verdict verdict = Verdict::Indeterminate;
};

/// f(n) < int_{n-1/2}^{n+1/2} f for f(y) = h(c(V(y)-beta)) (V(y)-beta)^{sigma-1}.
/// lhs = f(n), rhs = the integral.
ComparisonResult hermite_hadamard_check(const Scheme& s, long n, double c, double guard = 1e-6);
/// Same comparison for an arbitrary function on [n-1/2, n+1/2].
ComparisonResult hermite_hadamard_check_fn(const std::function<double(double)>& f, long n, double guard = 1e-6);

/// int_1^inf g < sum_{n>=1} g(n) < int_{1/2}^inf g with g(t) = h(c(V(t)-beta)) (V(t)-beta)^{sigma-1}.
ComparisonResult sandwich_check(const Scheme& s, double c, double tol = 1e-12, double guard = 1e-6);
/// Same comparison for a positive decreasing function on [1/2, inf).
ComparisonResult sandwich_check_fn(const std::function<double(double)>& g, double tol = 1e-12, double guard = 1e-6);

}  // namespace hhi
