#include "hhi/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hhi/errors.hpp"

namespace hhi {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TestFunctionSpec extremal_pair(double eps, const HolderPair& hp, const Scheme& s) {
    s.validate();
    const double emax = extremal_eps_max(hp, s.params);
    if (!(eps > 0.0 && eps < emax)) {
        throw DomainError("extremal family: eps must lie in the open interval (0, " + std::to_string(emax) + ")");
    }
    TestFunctionSpec t;
    t.family = TestFamily::ExtremalCutoff;
    t.eps = eps;
    return t;
}

std::vector<double> clip_schedule(const std::vector<double>& eps, double eps_max) {
    std::vector<double> out;
    for (double e : eps) {
        if (e > 0.0 && e < eps_max && (out.empty() || e < out.back())) out.push_back(e);
    }
    double next = out.empty() ? 0.8 * eps_max : out.back() / 2.0;
    while (out.size() < eps.size()) {
        out.push_back(next);
        next /= 2.0;
    }
    return out;
}

SharpnessTrace sharpness_trace(const std::vector<double>& eps_list, const HolderPair& hp, const Scheme& s,
                               const Tolerances& tol) {
    s.validate();
    if (hp.regime != Regime::Forward && !(s.cm.u_infinite() && s.dm.v_infinite())) {
        throw DomainError("reverse regimes require U(∞)=V(∞)=∞");
    }
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) throw DomainError("sharpness: eps schedule must be strictly decreasing");
    }
    SharpnessTrace tr;
    tr.regime = hp.regime;
    const KernelConstant kc = kernel_constant_closed(s.params);
    tr.k_value = kc.value;
    const double krel = kc.err_estimate / kc.value;
    const NormWeights w = NormWeights::for_regime(hp.regime);
    const auto schedule = clip_schedule(eps_list, extremal_eps_max(hp, s.params));

    for (double eps : schedule) {
        SharpnessPoint pt;
        pt.eps = eps;
        try {
            const TestFunctionSpec t = extremal_pair(eps, hp, s);
            const FProfile f = make_f(t, hp, s);
            const AProfile a = make_a(t, hp, s);
            const LogValue I = bilinear_I_log(f, a, s, tol);
            const LogValue nf = norm_f_log(f, hp, s, w, tol, true);
            const LogValue na = norm_a_log(a, hp, s, tol);
            pt.I = I.value();
            pt.norm_f = nf.value();
            pt.norm_a = na.value();
            pt.ratio = std::exp(I.log_value - nf.log_value - na.log_value);
            pt.rel_err = I.rel_err + nf.rel_err + na.rel_err;
            pt.ok = std::isfinite(pt.ratio);
            if (!pt.ok) pt.error = "non-finite ratio";
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        tr.points.push_back(pt);
    }

    std::vector<const SharpnessPoint*> good;
    for (const auto& p : tr.points) {
        if (p.ok) good.push_back(&p);
    }
    if (good.empty()) return tr;

    std::vector<Verdict> vb, vm;
    for (const auto* p : good) {
        const double err = p->ratio * p->rel_err + tr.k_value * krel;
        vb.push_back(hp.regime == Regime::Forward ? strict_less(p->ratio, tr.k_value, err, tol.guard)
                                                  : strict_less(tr.k_value, p->ratio, err, tol.guard));
    }
    for (std::size_t i = 1; i < good.size(); ++i) {
        const auto* a = good[i - 1];
        const auto* b = good[i];
        const double err = a->ratio * a->rel_err + b->ratio * b->rel_err;
        vm.push_back(hp.regime == Regime::Forward ? strict_less(a->ratio, b->ratio, err, tol.guard)
                                                  : strict_less(b->ratio, a->ratio, err, tol.guard));
    }
    auto all = [](const std::vector<Verdict>& v) {
        Verdict r = Verdict::True;
        for (Verdict x : v) {
            if (x == Verdict::False) return Verdict::False;
            if (x == Verdict::Indeterminate) r = Verdict::Indeterminate;
        }
        return r;
    };
    tr.bound = all(vb);
    tr.monotone = good.size() >= 2 ? all(vm) : Verdict::Indeterminate;

    // OLS of R on eps over the four smallest eps
    const std::size_t m = std::min<std::size_t>(4, good.size());
    if (m >= 2) {
        double se = 0, sr = 0, see = 0, ser = 0;
        for (std::size_t i = good.size() - m; i < good.size(); ++i) {
            se += good[i]->eps;
            sr += good[i]->ratio;
            see += good[i]->eps * good[i]->eps;
            ser += good[i]->eps * good[i]->ratio;
        }
        const double dm = double(m);
        const double b1 = (dm * ser - se * sr) / (dm * see - se * se);
        const double b0 = (sr - b1 * se) / dm;
        double ssr = 0.0;
        for (std::size_t i = good.size() - m; i < good.size(); ++i) {
            const double r = good[i]->ratio - (b0 + b1 * good[i]->eps);
            ssr += r * r;
        }
        tr.extrapolated_limit = b0;
        tr.slope = b1;
        tr.fit_residual = std::sqrt(ssr / dm);
        tr.limit_ok = std::fabs(b0 - tr.k_value) <= std::max(0.01 * tr.k_value, tr.fit_residual);
    } else {
        tr.extrapolated_limit = good.back()->ratio;
    }
    tr.quadratic_limit = std::numeric_limits<double>::quiet_NaN();
    if (good.size() >= 3) {
        // normal equations for R = c0 + c1 e + c2 e^2, solved by Cramer's rule
        double S[5] = {0, 0, 0, 0, 0}, T[3] = {0, 0, 0};
        for (const auto* pt : good) {
            double e = 1.0;
            for (int k = 0; k < 5; ++k, e *= pt->eps) {
                S[k] += e;
                if (k < 3) T[k] += e * pt->ratio;
            }
        }
        auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
            return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
        };
        const double D = det3(S[0], S[1], S[2], S[1], S[2], S[3], S[2], S[3], S[4]);
        const double D0 = det3(T[0], S[1], S[2], T[1], S[2], S[3], T[2], S[3], S[4]);
        if (D != 0.0) tr.quadratic_limit = D0 / D;
    }
    return tr;
}

// --- operator norm ---------------------------------------------------------------

OperatorGrid build_operator_grid(const Scheme& s, const HolderPair& hp, const GridSpec& gs, const Tolerances& tol) {
    s.validate();
    if (hp.regime != Regime::Forward) throw DomainError("operator grid: forward regime (p > 1) only");
    if (!(gs.x_lo > 0.0 && gs.x_hi > gs.x_lo)) throw DomainError("operator grid: need 0 < x_lo < x_hi");
    if (gs.nx < 2 || gs.n_max < 1) throw DomainError("operator grid: need nx >= 2 and n_max >= 1");
    if (gs.n_max >= DiscreteMeasure::kPrefix - 16) throw DomainError("operator grid: n_max too large");
    if (gs.tail_eps < 0.0 || (gs.tail_eps > 0.0 && gs.tail_eps >= extremal_eps_max(hp, s.params))) {
        throw DomainError("operator grid: tail_eps outside the extremal interval");
    }

    const KernelParams& kp = s.params;
    const double sigma = kp.sigma;
    const double p = hp.p, q = hp.q;
    const int d = s.delta;
    const double y_lo = std::log(gs.x_lo), y_hi = std::log(gs.x_hi);
    const double dy = (y_hi - y_lo) / gs.nx;
    const double yc = 0.5 * (y_lo + y_hi);
    const bool tails = gs.tail_eps > 0.0;
    const long N = gs.n_max;
    const int nx = gs.nx;

    OperatorGrid g;
    g.n_max = N;
    g.tail_rows = tails ? 2 : 0;
    g.tail_cols = tails ? 1 : 0;
    const std::size_t R = std::size_t(nx + g.tail_rows);
    const std::size_t C = std::size_t(N + g.tail_cols);
    g.W.resize(R);
    g.Phi.resize(R);
    g.Psi.resize(C);
    g.K.assign(R * C, 0.0);

    std::vector<double> lw(std::size_t(N) + 1);
    for (long n = 1; n <= N; ++n) {
        lw[std::size_t(n)] = std::log(s.dm.V(n) - s.dm.beta());
        g.Psi[std::size_t(n - 1)] = std::exp((q * (1.0 - sigma) - 1.0) * lw[std::size_t(n)] -
                                             (q - 1.0) * std::log(s.dm.nu(n + 1)));
    }
    const NormWeights phi{WeightKind::Phi};
    std::vector<double> lu(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j) {
        const double y = yc + (j - (nx - 1) / 2.0) * dy;
        g.x_nodes.push_back(std::exp(y));
        lu[std::size_t(j)] = s.cm.log_U_at_log(y);
        g.W[std::size_t(j)] = std::exp(y) * dy;
        g.Phi[std::size_t(j)] = std::exp(phi.log_phi_at_log(s, hp, y));
        double* row = &g.K[std::size_t(j) * C];
        for (long n = 1; n <= N; ++n) row[n - 1] = std::exp(log_h_at_log(d * lu[std::size_t(j)] + lw[std::size_t(n)], kp));
    }
    if (!tails) return g;

    const double eps = gs.tail_eps;
    // a tail: s_n = nu_{n+1}/nu_{N+1} ((V_n-beta)/(V_N-beta))^{sigma-1-eps/q}, n > N
    const double ea = sigma - 1.0 - eps / q;
    const double lwN = lw[std::size_t(N)];
    const double lnuN = std::log(s.dm.nu(N + 1));
    AProfile at;
    at.nu_pow = 1.0;
    at.log_a = [=](double, double l) { return -lnuN + ea * (l - lwN); };

    // f tails beyond the x range: side 0 where U^delta -> 0 (couples to large n), side 1
    // the other end. Shape mu U^{delta e - 1} normalised to mu(edge) (U/U(edge))^{...},
    // e = sigma +- eps/p. In the variable t = U^delta (V_n - beta) the row entries are
    // incomplete kernel moments and the weighted p-th power integrates in closed form.
    const double y_edge[2] = {d == 1 ? y_lo : y_hi, d == 1 ? y_hi : y_lo};
    const double ef[2] = {sigma + eps / p, sigma - eps / p};
    const double lUinf = s.cm.u_infinite() ? std::numeric_limits<double>::infinity() : std::log(s.cm.U_infinity());
    struct Side {
        double e, lue, lme, lt_lo_off, lt_hi_off;
    } sd[2];
    for (int side = 0; side < 2; ++side) {
        Side& S = sd[side];
        S.e = ef[side];
        S.lue = s.cm.log_U_at_log(y_edge[side]);
        S.lme = s.cm.log_mu_x_at_log(y_edge[side]) - y_edge[side];
        const double far = d == 1 ? (side == 0 ? kNegInf : lUinf) : (side == 0 ? -lUinf : -kNegInf);
        S.lt_lo_off = side == 0 ? far : d * S.lue;
        S.lt_hi_off = side == 0 ? d * S.lue : far;
    }
    auto log_row = [&](const Side& S, double l) {
        const LogValue m = kernel_moment_log(kp, S.e, S.lt_lo_off + l, S.lt_hi_off + l, tol.quad);
        return -S.lme + (1.0 - d * S.e) * S.lue - S.e * l + m.log_value;
    };
    for (int side = 0; side < 2; ++side) {
        const Side& S = sd[side];
        const std::size_t r = std::size_t(nx + side);
        // int over the tail of U^{c-1} dU, c = p delta (e - sigma)
        const double c = p * d * (S.e - sigma);
        const double lA = d == 1 ? (side == 0 ? kNegInf : S.lue) : (side == 0 ? S.lue : kNegInf);
        const double lB = d == 1 ? (side == 0 ? S.lue : lUinf) : (side == 0 ? lUinf : S.lue);
        const double Bc = std::isinf(lB) ? 0.0 : std::exp(c * lB);
        const double Ac = std::isinf(lA) ? 0.0 : std::exp(c * lA);
        g.W[r] = 1.0;
        g.Phi[r] = std::exp(-p * S.lme - p * (d * S.e - 1.0) * S.lue) * (Bc - Ac) / c;
        double* row = &g.K[r * C];
        for (long n = 1; n <= N; ++n) row[n - 1] = std::exp(log_row(S, lw[std::size_t(n)]));
    }

    // tail column: Psi_T, then K for grid rows and the two corners, each summed over n > N
    // directly (direct terms start at N+1, Euler-Maclaurin from N+8)
    const std::size_t cT = std::size_t(N);
    const double lcut = std::log(double(N) + 0.5);
    auto tail_sum_log = [&](auto&& log_q, std::vector<double> breaks) {
        const SeriesResult r = s.dm.sum_log(
            [&](double ln, double l) { return ln < lcut ? kNegInf : log_q(ln, l); }, 1.0, tol.sum, N + 8,
            std::move(breaks));
        if (!r.converged) throw ConvergenceError("operator grid: tail column series did not converge", r.value(), r.rel_err);
        return r.log_value;
    };
    g.Psi[cT] = std::exp(tail_sum_log(
        [&](double ln, double l) { return (q * (1.0 - sigma) - 1.0) * l + q * at.log_a(ln, l); }, {}));
    for (int j = 0; j < nx; ++j) {
        const double le = d * lu[std::size_t(j)];
        g.K[std::size_t(j) * C + cT] =
            std::exp(tail_sum_log([&](double ln, double l) { return log_h_at_log(le + l, kp) + at.log_a(ln, l); }, {-le}));
    }
    for (int side = 0; side < 2; ++side) {
        const Side& S = sd[side];
        g.K[std::size_t(nx + side) * C + cT] = std::exp(
            tail_sum_log([&](double ln, double l) { return at.log_a(ln, l) + log_row(S, l); }, {-(d * S.lue)}));
    }
    return g;
}

OpnormResult opnorm_estimate(const OperatorGrid& g, const HolderPair& hp, int max_iter, double tol) {
    if (hp.regime != Regime::Forward) throw DomainError("opnorm_estimate: forward regime (p > 1) only");
    const std::size_t R = g.rows(), C = g.cols();
    if (R == 0 || C == 0 || g.K.size() != R * C || g.Phi.size() != R) throw DomainError("opnorm_estimate: malformed grid");
    const double p = hp.p, q = hp.q;

    auto normalize_a = [&](std::vector<double>& a) {
        double s = 0.0;
        for (std::size_t n = 0; n < C; ++n) s += g.Psi[n] * std::pow(a[n], q);
        const double c = std::pow(s, -1.0 / q);
        for (double& v : a) v *= c;
    };
    auto normalize_f = [&](std::vector<double>& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < R; ++i) s += g.W[i] * g.Phi[i] * std::pow(f[i], p);
        const double c = std::pow(s, -1.0 / p);
        for (double& v : f) v *= c;
    };

    OpnormResult res;
    std::vector<double> a(C), f(R), gv(R), cv(C);
    for (std::size_t n = 0; n < C; ++n) a[n] = std::pow(g.Psi[n], -1.0 / q);
    normalize_a(a);
    double B_old = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        for (std::size_t i = 0; i < R; ++i) {
            const double* row = &g.K[i * C];
            double acc = 0.0;
            for (std::size_t n = 0; n < C; ++n) acc += row[n] * a[n];
            gv[i] = acc;
            f[i] = std::pow(acc / g.Phi[i], 1.0 / (p - 1.0));
        }
        normalize_f(f);
        std::fill(cv.begin(), cv.end(), 0.0);
        for (std::size_t i = 0; i < R; ++i) {
            const double wf = g.W[i] * f[i];
            if (wf == 0.0) continue;
            const double* row = &g.K[i * C];
            for (std::size_t n = 0; n < C; ++n) cv[n] += wf * row[n];
        }
        for (std::size_t n = 0; n < C; ++n) a[n] = std::pow(cv[n] / g.Psi[n], 1.0 / (q - 1.0));
        normalize_a(a);
        double B = 0.0;
        for (std::size_t n = 0; n < C; ++n) B += cv[n] * a[n];
        res.iterations = it;
        res.err = std::fabs(B - B_old);
        res.estimate = std::max(B, res.estimate);
        if (it >= 2 && res.err <= tol * B) {
            res.converged = true;
            break;
        }
        B_old = B;
    }
    res.f = f;
    res.a = a;
    if (!res.converged) {
        throw ConvergenceError("opnorm_estimate: iteration limit reached", res.estimate, res.err);
    }
    return res;
}

std::vector<GridSpec> default_ladder(const GridSpec& finest) {
    const double ylo = std::log(finest.x_lo), yhi = std::log(finest.x_hi);
    const double dy = (yhi - ylo) / finest.nx;
    const double yc = 0.5 * (ylo + yhi);
    const double shrink = std::min(std::log(10.0), (yhi - ylo) / 8.0);
    std::vector<GridSpec> out;
    for (int level = 2; level >= 0; --level) {
        GridSpec g = finest;
        int nx = int(std::lround((yhi - ylo - 2.0 * level * shrink) / dy));
        if ((nx - finest.nx) % 2 != 0) ++nx;
        nx = std::max(nx, 2);
        g.nx = nx;
        g.x_lo = std::exp(yc - 0.5 * nx * dy);
        g.x_hi = std::exp(yc + 0.5 * nx * dy);
        g.n_max = std::max<long>(1, finest.n_max >> level);
        out.push_back(g);
    }
    return out;
}

LadderResult opnorm_ladder(const Scheme& s, const HolderPair& hp, const std::vector<GridSpec>& ladder,
                           const Tolerances& tol, bool with_plain) {
    LadderResult lr;
    lr.k_value = kernel_constant_closed(s.params).value;
    lr.specs = ladder;
    for (const GridSpec& gs : ladder) {
        lr.results.push_back(opnorm_estimate(build_operator_grid(s, hp, gs, tol), hp));
        if (with_plain) {
            GridSpec plain = gs;
            plain.tail_eps = 0.0;
            lr.plain.push_back(opnorm_estimate(build_operator_grid(s, hp, plain, tol), hp).estimate);
        }
    }
    lr.monotone = true;
    for (std::size_t i = 1; i < lr.results.size(); ++i) {
        const auto& a = lr.results[i - 1];
        const auto& b = lr.results[i];
        if (b.estimate < a.estimate - 10.0 * (a.err + b.err) - 1e-9 * a.estimate) lr.monotone = false;
    }
    return lr;
}

}  // namespace hhi
