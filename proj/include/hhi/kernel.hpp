#pragma once
// The kernel h(t) = csch(rho t^g) exp(-alpha t^g) and its Mellin moments.

#include <limits>
#include <string>

namespace hhi {

struct KernelParams {
    double rho = 1.0;
    double alpha = 1.0;
    double gamma = 0.5;
    double sigma = 1.0;

    /// Throws DomainError naming the violated condition.
    void validate() const;
    /// sigma / gamma, the Hurwitz zeta order.
    double zeta_order() const { return sigma / gamma; }
    /// (alpha + rho) / (2 rho), the Hurwitz zeta shift.
    double zeta_shift() const { return (alpha + rho) / (2.0 * rho); }
};

enum class ConstantMethod { ClosedForm, Quadrature };

struct KernelConstant {
    double value = 0.0;
    ConstantMethod method = ConstantMethod::ClosedForm;
    double err_estimate = 0.0;
};

/// Result of a moment integral kept in log form: value = exp(log_value).
struct LogValue {
    double log_value = -std::numeric_limits<double>::infinity();
    double rel_err = 0.0;
    bool converged = true;
    double value() const;
};

double h(double t, const KernelParams& p);
/// log h(e^lt); defined for every real lt.
double log_h_at_log(double lt, const KernelParams& p);

/// Closed-form Mellin moment int_0^inf h(u) u^{s-1} du for s > gamma.
double kernel_mellin_closed(const KernelParams& p, double s);

/// Quadrature of int_{lo}^{hi} h(u) u^{s-1} du with the bounds passed as
/// logarithms (-inf for 0, +inf for infinity).
LogValue kernel_moment_log(const KernelParams& p, double s, double log_lo, double log_hi, double tol = 1e-12);

KernelConstant kernel_constant_closed(const KernelParams& p);
KernelConstant kernel_constant_quadrature(const KernelParams& p, double tol = 1e-10);

/// theta = (1/k) int_0^upper h(u) u^{sigma-1} du.
double theta(const KernelParams& p, double upper, double tol = 1e-12);
/// 1 - theta computed directly from the upper tail (no cancellation).
double theta_complement(const KernelParams& p, double upper, double tol = 1e-12);
/// log(1 - theta) with upper given as its logarithm.
double log_theta_complement(const KernelParams& p, double log_upper, double tol = 1e-12);

}  // namespace hhi
