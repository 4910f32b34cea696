#include "hhi/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hhi/errors.hpp"
#include "hhi/quadrature.hpp"
#include "hhi/specfun.hpp"

namespace hhi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;

// log(1 - exp(-x)) for x > 0, accurate at both ends
double log1mexp(double x) {
    if (x < 0.6931) return std::log(-std::expm1(-x));
    return std::log1p(-std::exp(-x));
}

// log(-expm1(-x)) when only log x is known
double log1mexp_from_log(double lx) {
    if (lx < -20.0) return lx - 0.5 * std::exp(lx);
    return log1mexp(std::exp(lx));
}

}  // namespace

void KernelParams::validate() const {
    std::ostringstream msg;
    if (!(std::isfinite(rho) && std::isfinite(alpha) && std::isfinite(gamma) && std::isfinite(sigma))) {
        throw DomainError("kernel parameters must be finite");
    }
    if (!(rho > 0.0 && rho > -alpha)) {
        msg << "kernel parameters violate ρ>max{0,−α}: rho=" << rho << " alpha=" << alpha;
        throw DomainError(msg.str());
    }
    if (!(gamma > 0.0 && gamma < sigma && sigma <= 1.0)) {
        msg << "kernel parameters violate 0<γ<σ≤1: gamma=" << gamma << " sigma=" << sigma;
        throw DomainError(msg.str());
    }
}

double LogValue::value() const { return std::exp(log_value); }

double log_h_at_log(double lt, const KernelParams& p) {
    const double lw = p.gamma * lt;  // log t^gamma
    const double w = std::exp(lw);
    return kLn2 - (p.alpha + p.rho) * w - log1mexp_from_log(std::log(2.0 * p.rho) + lw);
}

double h(double t, const KernelParams& p) {
    if (!(t > 0.0)) throw DomainError("h: t must be positive");
    const double w = std::pow(t, p.gamma);
    if ((p.alpha + p.rho) * w > 700.0) return std::exp(log_h_at_log(std::log(t), p));
    return 2.0 * std::exp(-(p.alpha + p.rho) * w) / (-std::expm1(-2.0 * p.rho * w));
}

double kernel_mellin_closed(const KernelParams& p, double s) {
    if (!(s > p.gamma)) throw DomainError("kernel moment exponent must exceed gamma");
    const double z = s / p.gamma;
    return 2.0 * gamma_fn(z) / (p.gamma * std::pow(2.0 * p.rho, z)) * hurwitz_zeta(z, p.zeta_shift());
}

LogValue kernel_moment_log(const KernelParams& p, double s, double log_lo, double log_hi, double tol) {
    LogValue out;
    if (!(log_lo < log_hi)) return out;  // empty range
    const double c = p.alpha + p.rho;
    const double z = s / p.gamma;
    // integrand after w = u^gamma: (1/gamma) htilde(w) w^{z-1}
    auto logint_w = [&](double w, double lw) {
        return kLn2 - c * w - log1mexp_from_log(std::log(2.0 * p.rho) + lw) + (z - 1.0) * lw - std::log(p.gamma);
    };
    const double lw_lo = p.gamma * log_lo;
    const double lw_hi = p.gamma * log_hi;
    const double w_lo = std::exp(lw_lo);
    const double w_hi = std::exp(lw_hi);
    if (!std::isfinite(w_lo)) return out;  // the whole range lies past overflow
    const double W = 40.0 / c;
    const double reach = 800.0 / c;

    DeOptions opt;
    opt.tol = tol;

    // reference for rescaling: the integrand times its natural width
    double shift;
    if (w_lo >= W) {
        shift = logint_w(w_lo, lw_lo) - std::log(c);
    } else {
        const double wr = std::min(w_hi, W);
        shift = logint_w(wr, std::log(wr)) + std::log(wr);
        if (z > 2.0) {
            const double wp = std::clamp((z - 2.0) / c, w_lo, std::min(w_hi, W));
            if (wp > 0.0) shift = std::max(shift, logint_w(wp, std::log(wp)) + std::log(wp));
        }
    }

    auto f = [&](const QuadNode& n) { return logint_w(n.x, std::log(n.x)); };
    QuadResult total;
    total.converged = true;
    if (w_lo < W) {
        const double b = std::min(w_hi, W);
        // distance-to-left matters only when the left end is 0
        auto fh = [&](const QuadNode& n) {
            const double lw = (w_lo == 0.0) ? n.ldl : std::log(n.x);
            return logint_w(n.x, lw);
        };
        total = combine({total, de_integrate_log(fh, DeMap::Finite, w_lo, b, shift, opt)});
    }
    const double t0 = std::max(w_lo, W);
    if (w_hi > t0) {
        if (!std::isfinite(w_hi) || w_hi - t0 > reach) {
            total = combine({total, de_integrate_log(f, DeMap::HalfUp, t0, 1.0 / c, shift, opt)});
        } else {
            total = combine({total, de_integrate_log(f, DeMap::Finite, t0, w_hi, shift, opt)});
        }
    }
    if (!(total.value > 0.0)) {
        out.log_value = -kInf;
        out.converged = total.converged;
        return out;
    }
    out.log_value = shift + std::log(total.value);
    out.rel_err = total.err / total.value;
    out.converged = total.converged;
    return out;
}

KernelConstant kernel_constant_closed(const KernelParams& p) {
    p.validate();
    KernelConstant k;
    k.method = ConstantMethod::ClosedForm;
    k.value = kernel_mellin_closed(p, p.sigma);
    // gamma_fn ~1e-15, hurwitz_zeta ~1e-12 relative, pow a few ulps
    k.err_estimate = 2e-12 * k.value;
    return k;
}

KernelConstant kernel_constant_quadrature(const KernelParams& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw DomainError("kernel_constant_quadrature: tol must be positive");
    const LogValue lv = kernel_moment_log(p, p.sigma, -kInf, kInf, tol);
    KernelConstant k;
    k.method = ConstantMethod::Quadrature;
    k.value = lv.value();
    k.err_estimate = lv.rel_err * k.value;
    if (!lv.converged) {
        throw ConvergenceError("kernel_constant_quadrature: no convergence", k.value, k.err_estimate);
    }
    return k;
}

double theta(const KernelParams& p, double upper, double tol) {
    if (!(upper > 0.0)) throw DomainError("theta: upper limit must be positive");
    const double lk = std::log(kernel_mellin_closed(p, p.sigma));
    const LogValue head = kernel_moment_log(p, p.sigma, -kInf, std::log(upper), tol);
    return std::exp(head.log_value - lk);
}

double log_theta_complement(const KernelParams& p, double log_upper, double tol) {
    const double lk = std::log(kernel_mellin_closed(p, p.sigma));
    const LogValue tail = kernel_moment_log(p, p.sigma, log_upper, kInf, tol);
    return tail.log_value - lk;
}

double theta_complement(const KernelParams& p, double upper, double tol) {
    if (!(upper > 0.0)) throw DomainError("theta: upper limit must be positive");
    return std::exp(log_theta_complement(p, std::log(upper), tol));
}

}  // namespace hhi
