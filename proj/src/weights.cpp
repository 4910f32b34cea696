#include "hhi/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hhi/errors.hpp"
#include "hhi/quadrature.hpp"

namespace hhi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Scheme::validate() const {
    if (delta != 1 && delta != -1) throw DomainError("scheme: δ must be -1 or 1");
    params.validate();
}

SeriesResult omega_log(const Scheme& s, double le, double tol, double sigma_override) {
    const double sigma = sigma_override > 0.0 ? sigma_override : s.params.sigma;
    auto q = [&](double, double lw) { return log_kernel(s, le, lw) + sigma * le + (sigma - 1.0) * lw; };
    return s.dm.sum_log(q, 1.0, tol);
}

double omega(const Scheme& s, double x, double tol) {
    s.validate();
    if (!(x > 0.0)) throw DomainError("omega: x must be positive");
    const SeriesResult r = omega_log(s, s.log_U_delta_at_log(std::log(x)), tol);
    if (!r.converged || r.rel_err > std::max(tol, 1e-14) * 100.0) {
        throw ConvergenceError("omega: series tail did not converge", r.value(), r.rel_err * r.value());
    }
    return r.value();
}

double varpi(const Scheme& s, long n, double tol) {
    s.validate();
    if (n < 1) throw DomainError("varpi: n must be >= 1");
    const double lc = std::log(s.dm.V(n) - s.dm.beta());
    const double sigma = s.params.sigma;
    const int d = s.delta;
    auto lf = [&](const QuadNode& nd) {
        const double lu = s.cm.log_U_at_log(nd.x);
        return log_kernel(s, d * lu, lc) + sigma * lc + (d * sigma - 1.0) * lu + s.cm.log_mu_x_at_log(nd.x);
    };
    // the kernel argument is 1 at the center
    const double yc = s.cm.log_x_for_log_U(-d * lc);
    QuadNode c{yc, 0, 0, 0};
    DeOptions opt;
    opt.tol = tol;
    const double shift = lf(c);
    // slowly growing U (e.g. logarithmic) stretches the integrand in log x
    const double dlu = (s.cm.log_U_at_log(yc + 1e-3) - s.cm.log_U_at_log(yc - 1e-3)) / 2e-3;
    const double scale = std::clamp(1.0 / dlu, 1.0, 1e6);
    const QuadResult r = integrate_real_line_log(lf, yc, s.cm.log_breaks(), shift, opt, scale);
    if (!r.converged) throw ConvergenceError("varpi: quadrature did not converge", r.value, r.err);
    return std::exp(shift) * r.value;
}

double varpi_substitution(const Scheme& s, long n, double tol) {
    s.validate();
    if (n < 1) throw DomainError("varpi: n must be >= 1");
    const double lc = std::log(s.dm.V(n) - s.dm.beta());
    const double lUinf = s.cm.u_infinite() ? kInf : std::log(s.cm.U_infinity());
    LogValue lv;
    if (s.delta == 1) {
        lv = kernel_moment_log(s.params, s.params.sigma, -kInf, lc + lUinf, tol);
    } else {
        lv = kernel_moment_log(s.params, s.params.sigma, lc - lUinf, kInf, tol);
    }
    if (!lv.converged) throw ConvergenceError("varpi: quadrature did not converge", lv.value(), lv.rel_err);
    return lv.value();
}

WeightReport weight_report(const Scheme& s, double x, double tol, double guard) {
    s.validate();
    if (!(x > 0.0)) throw DomainError("omega: x must be positive");
    WeightReport w;
    w.x = x;
    const double le = s.log_U_delta_at_log(std::log(x));
    const SeriesResult r = omega_log(s, le, tol);
    if (!r.converged) throw ConvergenceError("omega: series tail did not converge", r.value(), r.rel_err);
    w.omega = r.value();
    w.omega_err = std::max(r.rel_err, 1e-15) * w.omega;
    w.k_value = kernel_constant_closed(s.params).value;
    const double lz1 = le + std::log(s.dm.nu(1) - s.dm.beta());
    const double l1mt = log_theta_complement(s.params, lz1, tol);
    w.one_minus_theta = std::exp(l1mt);
    w.theta_value = theta(s.params, std::exp(lz1), tol);
    w.below_k = strict_less(w.omega, w.k_value, w.omega_err + 1e-15 * w.k_value, guard);
    w.lower_applies = s.dm.v_infinite();
    if (w.lower_applies) {
        // compare in logs: both sides may be far below 1
        const double lower = w.k_value * w.one_minus_theta;
        const double lerr = w.omega_err + 1e-14 * lower;
        w.above_lower = strict_less(lower, w.omega, lerr, guard);
    }
    return w;
}

VarpiReport varpi_report(const Scheme& s, long n, double tol, double eq_tol) {
    VarpiReport v;
    v.n = n;
    v.varpi = varpi(s, n, tol);
    v.varpi_subst = varpi_substitution(s, n, tol);
    v.k_value = kernel_constant_closed(s.params).value;
    v.err = std::max(std::fabs(v.varpi - v.varpi_subst), 1e-15 * v.k_value);
    v.at_most_k = less_equal(v.varpi, v.k_value, v.err);
    v.equality_applies = s.cm.u_infinite();
    if (v.equality_applies) {
        v.equals_k = (std::fabs(v.varpi - v.k_value) <= eq_tol * v.k_value) ? Verdict::True : Verdict::False;
    }
    return v;
}

// --- Hermite-Hadamard ---------------------------------------------------------

ComparisonResult hermite_hadamard_check(const Scheme& s, long n, double c, double guard) {
    s.validate();
    if (n < 1) throw DomainError("hermite_hadamard_check: n must be >= 1");
    if (!(c > 0.0)) throw DomainError("hermite_hadamard_check: c must be positive");
    const KernelParams& p = s.params;
    const double beta = s.dm.beta();
    const double sigma = p.sigma;
    const double lcs = -sigma * std::log(c);
    // V is linear on each half cell, so each half is a kernel moment:
    // int f dy = (1/slope) c^{-sigma} int_{c(Va-beta)}^{c(Vb-beta)} h(u) u^{sigma-1} du
    auto half = [&](double va, double vb, double slope) {
        const double la = (va - beta > 0.0) ? std::log(c * (va - beta)) : -kInf;
        const LogValue lv = kernel_moment_log(p, sigma, la, std::log(c * (vb - beta)), 1e-13);
        return std::pair<double, double>{std::exp(lcs + lv.log_value) / slope,
                                         std::exp(lcs + lv.log_value) / slope * std::max(lv.rel_err, 1e-15)};
    };
    const double v_left = s.dm.V_step(double(n) - 0.5);
    const double v_mid = s.dm.V(n);
    const double v_right = s.dm.V_step(double(n) + 0.5);
    const auto a = half(v_left, v_mid, s.dm.nu(n));
    const auto b = half(v_mid, v_right, s.dm.nu(n + 1));
    ComparisonResult r;
    r.lhs = std::exp(log_h_at_log(std::log(c * (v_mid - beta)), p) + (sigma - 1.0) * std::log(v_mid - beta));
    r.rhs = a.first + b.first;
    r.err = a.second + b.second + 1e-15 * r.lhs;
    r.verdict = strict_less(r.lhs, r.rhs, r.err, guard);
    return r;
}

ComparisonResult hermite_hadamard_check_fn(const std::function<double(double)>& f, long n, double guard) {
    DeOptions opt;
    opt.tol = 1e-13;
    auto g = [&](const QuadNode& nd) { return f(nd.x); };
    const QuadResult q = de_integrate(g, DeMap::Finite, n - 0.5, n + 0.5, opt);
    ComparisonResult r;
    r.lhs = f(double(n));
    r.rhs = q.value;
    r.err = q.err + 1e-15 * std::fabs(q.value);
    r.verdict = strict_less(r.lhs, r.rhs, r.err, guard);
    return r;
}

// --- sandwich -----------------------------------------------------------------

ComparisonResult sandwich_check(const Scheme& s, double c, double tol, double guard) {
    s.validate();
    if (!(c > 0.0)) throw DomainError("sandwich_check: c must be positive");
    const KernelParams& p = s.params;
    const double beta = s.dm.beta();
    const double sigma = p.sigma;
    const double lc = std::log(c);

    // sum_n g(n) on the series engine (no nu factor)
    auto q = [&](double, double lw) { return log_h_at_log(lc + lw, p) + (sigma - 1.0) * lw; };
    const SeriesResult sr = s.dm.sum_log(q, 0.0, tol);
    if (!sr.converged) throw ConvergenceError("sandwich_check: series did not converge", sr.value(), sr.rel_err);

    // integrals cell by cell; V is linear on [m, m+1] with slope nu_{m+1}
    auto cell = [&](double va, double vb, double slope, double& err) {
        const double la = (va - beta > 0.0) ? lc + std::log(va - beta) : -kInf;
        const LogValue lv = kernel_moment_log(p, sigma, la, lc + std::log(vb - beta), tol);
        const double v = std::exp(-sigma * lc + lv.log_value) / slope;
        err += v * std::max(lv.rel_err, 1e-15);
        return v;
    };
    double err = 0.0;
    const double head = cell(s.dm.V_step(0.5), s.dm.V(1), s.dm.nu(1), err);
    double from_one = 0.0;
    const long max_cells = std::max<long>(4096, s.dm.first_smooth_index() + 8);
    long m = 1;
    bool done = false;
    for (; m < max_cells; ++m) {
        from_one += cell(s.dm.V(m), s.dm.V(m + 1), s.dm.nu(m + 1), err);
        if (m % 16 == 0) {
            // whole remaining kernel mass, scaled by the current cell width
            const double rest = std::exp(-sigma * lc +
                                         kernel_moment_log(p, sigma, lc + std::log(s.dm.V(m + 1) - beta), kInf, 1e-8)
                                             .log_value) /
                                s.dm.nu(m + 2);
            if (rest < 1e-16 * from_one) {
                done = true;
                break;
            }
        }
    }
    if (!done) {
        // remaining cells: dt = dv / nu(t+1/2) on the smooth extension; the
        // stepwise slope differs by O(tau/m) with alternating sign, O((tau/m)^2) net
        auto lg = [&](const QuadNode& nd) {
            const double l = nd.x;
            const double lt = s.dm.log_t_for_log_V_shift(l);
            const double lnu = s.dm.log_nu_smooth(lt + std::log1p(0.5 * std::exp(-lt)));
            return log_h_at_log(lc + l, p) + sigma * l - lnu;
        };
        DeOptions opt;
        opt.tol = tol;
        const double l0 = std::log(s.dm.V(m) - beta);
        const double shift = lg(QuadNode{l0, 0, 0, 0});
        QuadResult rem;
        if (s.dm.v_infinite()) {
            rem = de_integrate_log(lg, DeMap::HalfUp, l0, 1.0, shift, opt);
        } else {
            rem = de_integrate_log(lg, DeMap::Finite, l0, std::log(s.dm.V_infinity() - beta), shift, opt);
        }
        if (!rem.converged) throw ConvergenceError("sandwich_check: integral tail did not converge", from_one, err);
        const double rv = std::exp(shift) * rem.value;
        const double tm = s.dm.tail_exponent() / double(m);
        from_one += rv;
        err += std::exp(shift) * rem.err + rv * tm * tm;
    }
    ComparisonResult r;
    r.lhs = from_one;
    r.mid = sr.value();
    r.rhs = head + from_one;
    r.err = err + sr.rel_err * r.mid + 1e-15 * r.rhs;
    r.verdict = combine({strict_less(r.lhs, r.mid, r.err, guard), strict_less(r.mid, r.rhs, r.err, guard)});
    return r;
}

ComparisonResult sandwich_check_fn(const std::function<double(double)>& g, double tol, double guard) {
    DeOptions opt;
    opt.tol = tol;
    auto gn = [&](const QuadNode& nd) { return g(nd.x); };
    const long n0 = 2048;
    double direct = 0.0;
    for (long n = n0 - 1; n >= 1; --n) direct += g(double(n));
    // Euler-Maclaurin tail from n0
    const double t0 = double(n0);
    const QuadResult it = de_integrate(gn, DeMap::HalfUp, t0, t0, opt);
    const double d1 = (g(t0 + 1.0) - g(t0 - 1.0)) / 2.0;
    const double sum = direct + it.value + 0.5 * g(t0) - d1 / 12.0;
    const QuadResult i1 = de_integrate(gn, DeMap::HalfUp, 1.0, 1.0, opt);
    const QuadResult ih = de_integrate(gn, DeMap::Finite, 0.5, 1.0, opt);
    ComparisonResult r;
    r.lhs = i1.value;
    r.mid = sum;
    r.rhs = i1.value + ih.value;
    r.err = i1.err + ih.err + it.err + 1e-15 * r.rhs;
    r.verdict = combine({strict_less(r.lhs, r.mid, r.err, guard), strict_less(r.mid, r.rhs, r.err, guard)});
    return r;
}

}  // namespace hhi
