#pragma once
// Double-exponential quadrature: tanh-sinh on finite intervals, exp-sinh on
// half lines. Integrands may be given directly or as a logarithm, which keeps
// huge/tiny factors representable.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace hhi {

struct QuadResult {
    double value = 0.0;
    double err = 0.0;  ///< |difference of the last two levels|
    int evals = 0;
    int level = 0;
    bool converged = false;
};

/// Point handed to the integrand. `dl`/`dr` are distances to the left/right
/// end of the interval computed without cancellation; `ldl` is log(dl).
struct QuadNode {
    double x;
    double dl;
    double dr;
    double ldl;
};

enum class DeMap { Finite, HalfUp, HalfDown };

struct DeOptions {
    double tol = 1e-12;   ///< relative tolerance between successive levels
    int max_level = 9;    ///< finest step 2^-max_level
    int min_level = 3;
    double tmax = 6.5;
};

namespace detail {

struct MappedNode {
    QuadNode node;
    double log_jac;
    bool valid;
};

inline MappedNode de_map(DeMap m, double a, double b, double t) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double u = half_pi * std::sinh(t);
    const double log_dt = std::log(half_pi * std::cosh(t));
    MappedNode r{};
    r.valid = true;
    if (m == DeMap::Finite) {
        const double w = b - a;
        const double e = std::exp(-2.0 * std::fabs(u));
        const double near = w * e / (1.0 + e);
        if (t < 0.0) {
            r.node.dl = near;
            r.node.dr = w - near;
            r.node.x = a + near;
            r.node.ldl = std::log(w) - 2.0 * std::fabs(u) - std::log1p(e);
        } else {
            r.node.dr = near;
            r.node.dl = w - near;
            r.node.x = b - near;
            r.node.ldl = std::log(r.node.dl);
        }
        if (!(near > 0.0)) r.valid = false;
        r.log_jac = std::log(0.5 * w) + std::log(4.0) - 2.0 * std::fabs(u) - 2.0 * std::log1p(e) + log_dt;
    } else {
        // a is the finite end, b the scale
        const double ld = std::log(b) + u;
        const double d = std::exp(ld);
        r.node.ldl = ld;
        r.node.dl = d;
        r.node.dr = std::numeric_limits<double>::infinity();
        r.node.x = (m == DeMap::HalfUp) ? a + d : a - d;
        if (!std::isfinite(d) || !(d > 0.0)) r.valid = false;
        r.log_jac = ld + log_dt;
    }
    return r;
}

}  // namespace detail

/// Integrate over one DE-mapped piece. `contrib(node, log_jac)` must return the
/// integrand times exp(log_jac). For Finite, (a, b) are the ends; for the half
/// lines a is the finite end and b > 0 a length scale.
template <class Contrib>
QuadResult de_integrate_raw(Contrib&& contrib, DeMap m, double a, double b, const DeOptions& opt) {
    QuadResult res;
    double h = 0.5;
    const int kmax0 = int(std::ceil(opt.tmax / h));

    // level 0: full sweep, then trim the t-range where contributions vanish
    std::vector<double> c0(2 * kmax0 + 1, 0.0);
    double peak = 0.0;
    for (int k = -kmax0; k <= kmax0; ++k) {
        const auto mn = detail::de_map(m, a, b, k * h);
        double c = 0.0;
        if (mn.valid) {
            c = contrib(mn.node, mn.log_jac);
            ++res.evals;
            if (!std::isfinite(c)) c = 0.0;
        }
        c0[k + kmax0] = c;
        peak = std::max(peak, std::fabs(c));
    }
    int klo = -kmax0, khi = kmax0;
    if (peak > 0.0) {
        const double cut = 1e-20 * peak;
        while (klo < 0 && std::fabs(c0[klo + kmax0]) < cut && std::fabs(c0[klo + 1 + kmax0]) < cut) ++klo;
        while (khi > 0 && std::fabs(c0[khi + kmax0]) < cut && std::fabs(c0[khi - 1 + kmax0]) < cut) --khi;
    }
    double sum = 0.0;
    for (int k = klo; k <= khi; ++k) sum += c0[k + kmax0];
    const double t_lo = (klo - 1) * h, t_hi = (khi + 1) * h;
    double est = h * sum;
    double prev = est;

    for (int level = 1; level <= opt.max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        const int k_start = int(std::floor(t_lo / h));
        const int k_end = int(std::ceil(t_hi / h));
        for (int k = k_start; k <= k_end; ++k) {
            if ((k & 1) == 0) continue;
            const auto mn = detail::de_map(m, a, b, k * h);
            if (!mn.valid) continue;
            double c = contrib(mn.node, mn.log_jac);
            ++res.evals;
            if (std::isfinite(c)) add += c;
        }
        prev = est;
        est = 0.5 * est + h * add;
        res.level = level;
        res.err = std::fabs(est - prev);
        if (level >= opt.min_level && res.err <= opt.tol * std::fabs(est)) {
            res.converged = true;
            break;
        }
        if (est == 0.0 && prev == 0.0 && level >= opt.min_level) {
            res.converged = true;
            break;
        }
    }
    res.value = est;
    return res;
}

/// Integrate exp(log_f(node) - shift) over the mapped piece.
template <class LogF>
QuadResult de_integrate_log(LogF&& log_f, DeMap m, double a, double b, double shift, const DeOptions& opt) {
    auto c = [&](const QuadNode& n, double lj) {
        const double l = log_f(n);
        if (l == -std::numeric_limits<double>::infinity()) return 0.0;
        return std::exp(l - shift + lj);
    };
    return de_integrate_raw(c, m, a, b, opt);
}

/// Integrate a real-valued integrand f(node) (any sign).
template <class F>
QuadResult de_integrate(F&& f, DeMap m, double a, double b, const DeOptions& opt) {
    auto c = [&](const QuadNode& n, double lj) { return f(n) * std::exp(lj); };
    return de_integrate_raw(c, m, a, b, opt);
}

/// Sum of results over several pieces.
inline QuadResult combine(std::initializer_list<QuadResult> parts) {
    QuadResult r;
    r.converged = true;
    for (const auto& p : parts) {
        r.value += p.value;
        r.err += p.err;
        r.evals += p.evals;
        r.level = std::max(r.level, p.level);
        r.converged = r.converged && p.converged;
    }
    return r;
}

/// Integrate exp(log_f(y) - shift) over the whole real line, split at `center`
/// and at every breakpoint. Each piece is a finite tanh-sinh interval or an
/// exp-sinh half line with length scale `scale`.
template <class LogF>
QuadResult integrate_real_line_log(LogF&& log_f, double center, std::vector<double> breaks, double shift,
                                   const DeOptions& opt, double scale = 1.0) {
    breaks.push_back(center);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    QuadResult total;
    total.converged = true;
    auto add = [&](const QuadResult& p) { total = combine({total, p}); };
    add(de_integrate_log(log_f, DeMap::HalfDown, breaks.front(), scale, shift, opt));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        add(de_integrate_log(log_f, DeMap::Finite, breaks[i], breaks[i + 1], shift, opt));
    }
    add(de_integrate_log(log_f, DeMap::HalfUp, breaks.back(), scale, shift, opt));
    return total;
}

}  // namespace hhi
