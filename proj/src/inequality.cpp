#include "hhi/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hhi/errors.hpp"
#include "hhi/quadrature.hpp"

namespace hhi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

LogValue from_series(const SeriesResult& r) {
    LogValue v;
    v.log_value = r.log_value;
    v.rel_err = r.rel_err;
    v.converged = r.converged;
    return v;
}

// Inner (nested) results with a log score: the outer integrand or summand at that
// node plus a log estimate of the node's weight. After the outer pass, an inner
// error only counts in proportion to its node's share of the total.
struct InnerTrack {
    struct Entry {
        double score;
        double rel;
        bool converged;
    };
    std::vector<Entry> entries;
    void add(double score, const LogValue& v) {
        if (v.converged && v.rel_err < 1e-15) return;
        entries.push_back({score, v.rel_err, v.converged});
    }
    /// Adds the weighted inner error to `out` (a log total) and clears `converged`
    /// when a failed inner result carries visible weight.
    void finalize(LogValue& out) const {
        double rel = 0.0;
        bool ok = true;
        for (const Entry& e : entries) {
            if (!std::isfinite(e.score)) continue;
            const double share = std::min(1.0, std::exp(e.score - out.log_value));
            const double r = e.converged ? e.rel : std::max(e.rel, 1.0);
            rel = std::max(rel, share * r);
            if (!e.converged && share > 1e-12) ok = false;
        }
        out.rel_err += rel;
        out.converged = out.converged && ok;
    }
};

double log_mu_at_log(const Scheme& s, double y) { return s.cm.log_mu_x_at_log(y) - y; }

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Forward: return "forward";
        case Regime::ReverseNeg: return "reverse_neg";
        case Regime::ReverseFrac: return "reverse_frac";
    }
    return "?";
}

const char* to_string(WeightKind w) { return w == WeightKind::Phi ? "phi" : "phi_tilde"; }

const char* to_string(TestFamily f) {
    switch (f) {
        case TestFamily::ExtremalCutoff: return "extremal";
        case TestFamily::SmoothPositive: return "smooth";
        case TestFamily::Tabulated: return "tabulated";
    }
    return "?";
}

HolderPair HolderPair::from_p(double p) {
    if (!std::isfinite(p) || p == 0.0 || p == 1.0) throw DomainError("HolderPair: p must be finite with p ∉ {0,1}");
    HolderPair hp;
    hp.p = p;
    hp.q = p / (p - 1.0);
    hp.regime = p > 1.0 ? Regime::Forward : (p < 0.0 ? Regime::ReverseNeg : Regime::ReverseFrac);
    return hp;
}

NormWeights NormWeights::for_regime(Regime r) {
    NormWeights w;
    w.kind = (r == Regime::ReverseFrac) ? WeightKind::PhiTilde : WeightKind::Phi;
    return w;
}

double NormWeights::log_phi_at_log(const Scheme& s, const HolderPair& hp, double y, double tol) const {
    const double sigma = s.params.sigma;
    const double lu = s.cm.log_U_at_log(y);
    double r = (hp.p * (1.0 - s.delta * sigma) - 1.0) * lu - (hp.p - 1.0) * log_mu_at_log(s, y);
    if (kind == WeightKind::PhiTilde) {
        r += log_theta_complement(s.params, s.delta * lu + std::log(s.dm.nu(1) - s.dm.beta()), tol);
    }
    return r;
}

double NormWeights::log_psi(const Scheme& s, const HolderPair& hp, long n) const {
    const double sigma = s.params.sigma;
    return (hp.q * (1.0 - sigma) - 1.0) * std::log(s.dm.V(n) - s.dm.beta()) - (hp.q - 1.0) * std::log(s.dm.nu(n + 1));
}

// --- test profiles ------------------------------------------------------------

double extremal_eps_max(const HolderPair& hp, const KernelParams& k) {
    const double w = (hp.regime == Regime::ReverseFrac) ? hp.p : hp.q;
    return w * (k.sigma - k.gamma) / 2.0;
}

FProfile make_f(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s) {
    FProfile f;
    const Scheme* sp = &s;
    switch (t.family) {
        case TestFamily::ExtremalCutoff: {
            const double emax = extremal_eps_max(hp, s.params);
            if (!(t.eps > 0.0 && t.eps < emax)) {
                throw DomainError("extremal family: eps must lie in (0, " + num(emax) + ")");
            }
            const double ef = s.params.sigma + t.eps / hp.p;
            const int d = s.delta;
            f.log_f = [sp, ef, d](double y) {
                if (d * y > 0.0) return kNegInf;
                return (d * ef - 1.0) * sp->cm.log_U_at_log(y) + log_mu_at_log(*sp, y);
            };
            f.breaks = {0.0};
            f.vanishes = true;
            return f;
        }
        case TestFamily::SmoothPositive: {
            if (!(t.f_scale >= 0.0)) throw DomainError("test function: f_scale must be nonnegative");
            const double lc = std::log(t.f_scale);
            if (t.f_shape == FShape::UPower) {
                const double e0 = t.f_e0, einf = t.f_einf;
                f.log_f = [sp, lc, e0, einf](double y) {
                    const double lu = sp->cm.log_U_at_log(y);
                    return lc + log_mu_at_log(*sp, y) + (e0 - 1.0) * lu + (einf - e0) * softplus(lu);
                };
            } else {
                if (!(t.f_lambda > 0.0)) throw DomainError("test function: f_lambda must be positive");
                const double e = t.f_power, lam = t.f_lambda;
                f.log_f = [lc, e, lam](double y) { return lc + e * y - lam * std::exp(y); };
            }
            f.breaks = s.cm.log_breaks();
            return f;
        }
        case TestFamily::Tabulated: {
            const auto& k = t.f_knots;
            const auto& v = t.f_values;
            if (k.size() < 2 || k.size() != v.size()) throw DomainError("tabulated f: need >= 2 knots and matching values");
            std::vector<double> lk(k.size()), lv(v.size());
            for (std::size_t i = 0; i < k.size(); ++i) {
                if (!(k[i] > 0.0) || (i > 0 && !(k[i] > k[i - 1]))) {
                    throw DomainError("tabulated f: knots must be positive and increasing");
                }
                if (!(v[i] > 0.0)) throw DomainError("tabulated f: values must be positive");
                lk[i] = std::log(k[i]);
                lv[i] = std::log(v[i]);
            }
            const double slo = t.f_slope_lo, shi = t.f_slope_hi;
            f.log_f = [lk, lv, slo, shi](double y) {
                if (y <= lk.front()) return lv.front() + slo * (y - lk.front());
                if (y >= lk.back()) return lv.back() + shi * (y - lk.back());
                const std::size_t i = std::size_t(std::upper_bound(lk.begin(), lk.end(), y) - lk.begin()) - 1;
                const double w = (y - lk[i]) / (lk[i + 1] - lk[i]);
                return lv[i] + w * (lv[i + 1] - lv[i]);
            };
            f.breaks = lk;
            for (double b : s.cm.log_breaks()) f.breaks.push_back(b);
            return f;
        }
    }
    throw DomainError("test function: unknown family");
}

AProfile make_a(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s) {
    AProfile a;
    switch (t.family) {
        case TestFamily::ExtremalCutoff: {
            const double emax = extremal_eps_max(hp, s.params);
            if (!(t.eps > 0.0 && t.eps < emax)) {
                throw DomainError("extremal family: eps must lie in (0, " + num(emax) + ")");
            }
            const double ea = s.params.sigma - t.eps / hp.q - 1.0;
            a.log_a = [ea](double, double lw) { return ea * lw; };
            a.nu_pow = 1.0;
            return a;
        }
        case TestFamily::SmoothPositive: {
            if (!(t.a_scale >= 0.0)) throw DomainError("test sequence: a_scale must be nonnegative");
            const double lc = std::log(t.a_scale);
            if (t.a_shape == AShape::VPower) {
                const double d = t.a_d;
                a.log_a = [lc, d](double, double lw) { return lc + (d - 1.0) * lw; };
                a.nu_pow = 1.0;
            } else {
                const double sx = t.a_s;
                a.log_a = [lc, sx](double ln, double) { return lc - sx * ln; };
                a.nu_pow = 0.0;
            }
            return a;
        }
        case TestFamily::Tabulated: {
            const auto& v = t.a_values;
            if (v.empty() || v.size() > 2000) throw DomainError("tabulated a: need between 1 and 2000 values");
            std::vector<double> lv(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!(v[i] > 0.0)) throw DomainError("tabulated a: values must be positive");
                lv[i] = std::log(v[i]);
            }
            const double lm = std::log(double(v.size()));
            const double tail = t.a_tail;
            a.log_a = [lv, lm, tail](double ln, double) {
                if (ln <= lm + 1e-12) {
                    const long n = std::lround(std::exp(ln));
                    if (n >= 1 && std::size_t(n) <= lv.size() && std::fabs(std::log(double(n)) - ln) < 1e-12) {
                        return lv[std::size_t(n - 1)];
                    }
                }
                return lv.back() - tail * (ln - lm);
            };
            a.nu_pow = 0.0;
            return a;
        }
    }
    throw DomainError("test sequence: unknown family");
}

// --- integration helpers ------------------------------------------------------

LogValue log_integral_line(const std::function<double(double)>& lf, double hint, std::vector<double> breaks,
                           double tol) {
    double M = kNegInf, yc = hint;
    auto consider = [&](double y) {
        const double v = lf(y);
        if (v > M) {
            M = v;
            yc = y;
        }
    };
    for (int j = -128; j <= 128; ++j) consider(hint + 0.5 * j);
    for (double b : breaks) {
        consider(b - 1e-9 * (1.0 + std::fabs(b)));
        consider(b + 1e-9 * (1.0 + std::fabs(b)));
    }
    LogValue out;
    if (M == kNegInf) return out;
    if (!std::isfinite(M)) {
        out.log_value = M;
        out.converged = false;
        return out;
    }
    auto wrapped = [&](const QuadNode& nd) {
        const double v = lf(nd.x);
        if (std::isnan(v)) {
            if (std::fabs(nd.x - yc) > 50.0) return kNegInf;
            throw ConvergenceError("non-finite integrand at log x = " + num(nd.x), 0.0, 0.0);
        }
        return v;
    };
    DeOptions opt;
    opt.tol = tol;
    const QuadResult r = integrate_real_line_log(wrapped, yc, std::move(breaks), M, opt);
    if (!(r.value > 0.0)) return out;
    out.log_value = M + std::log(r.value);
    out.rel_err = r.err / r.value;
    out.converged = r.converged && std::isfinite(out.log_value);
    return out;
}

LogValue inner_f_log(const Scheme& s, const FProfile& f, double lw, double tol) {
    if (!std::isfinite(lw)) return LogValue{};
    const int d = s.delta;
    auto lf = [&](double y) {
        const double v = f.log_f(y);
        if (v == kNegInf) return kNegInf;
        return log_h_at_log(d * s.cm.log_U_at_log(y) + lw, s.params) + v + y;
    };
    std::vector<double> breaks = f.breaks;
    const double hint = s.cm.log_x_for_log_U(-d * lw);
    return log_integral_line(lf, hint, breaks, tol);
}

LogValue inner_a_log(const Scheme& s, const AProfile& a, double y, const Tolerances& tol) {
    const double le = s.log_U_delta_at_log(y);
    auto q = [&](double ln, double lw) {
        const double la = a.log_a(ln, lw);
        if (la == kNegInf) return kNegInf;
        return log_h_at_log(le + lw, s.params) + la;
    };
    return from_series(s.dm.sum_log(q, a.nu_pow, tol.sum, 2048, {-le}));
}

// --- functionals ----------------------------------------------------------------

LogValue norm_f_log(const FProfile& f, const HolderPair& hp, const Scheme& s, const NormWeights& w,
                    const Tolerances& tol, bool support_only) {
    if (f.vanishes && hp.regime != Regime::Forward && !support_only) {
        throw DomainError("f vanishes on x^δ > 1; reverse regimes need f > 0 everywhere");
    }
    auto lf = [&](double y) {
        const double v = f.log_f(y);
        if (v == kNegInf) return kNegInf;
        return w.log_phi_at_log(s, hp, y, tol.quad) + hp.p * v + y;
    };
    const LogValue r = log_integral_line(lf, 0.0, f.breaks, tol.quad);
    if (r.log_value == kNegInf) throw DomainError("norm of f is zero");
    if (!r.converged) {
        throw ConvergenceError("norm of f: integral did not converge (divergent weight?)", std::exp(r.log_value),
                               r.rel_err);
    }
    LogValue out;
    out.log_value = r.log_value / hp.p;
    out.rel_err = r.rel_err / std::fabs(hp.p);
    out.converged = true;
    return out;
}

LogValue norm_a_log(const AProfile& a, const HolderPair& hp, const Scheme& s, const Tolerances& tol) {
    const double sigma = s.params.sigma;
    const double q = hp.q;
    auto lq = [&](double ln, double lw) {
        const double la = a.log_a(ln, lw);
        if (la == kNegInf) return kNegInf;
        return (q * (1.0 - sigma) - 1.0) * lw + q * la;
    };
    const SeriesResult r = s.dm.sum_log(lq, 1.0 - q + q * a.nu_pow, tol.sum);
    if (r.log_value == kNegInf) throw DomainError("norm of a is zero");
    if (!r.converged || !std::isfinite(r.log_value)) {
        throw ConvergenceError("norm of a: series did not converge (divergent weight?)", r.value(), r.rel_err);
    }
    LogValue out;
    out.log_value = r.log_value / q;
    out.rel_err = r.rel_err / std::fabs(q);
    return out;
}

LogValue bilinear_I_log(const FProfile& f, const AProfile& a, const Scheme& s, const Tolerances& tol) {
    InnerTrack tr;
    auto lq = [&](double ln, double lw) {
        const double la = a.log_a(ln, lw);
        if (la == kNegInf) return kNegInf;
        const LogValue F = inner_f_log(s, f, lw, tol.quad);
        const double v = la + F.log_value;
        tr.add(v + a.nu_pow * s.dm.log_nu_smooth(std::max(ln, 0.0)) + ln, F);
        return v;
    };
    const SeriesResult r = s.dm.sum_log(lq, a.nu_pow, tol.sum);
    LogValue out = from_series(r);
    tr.finalize(out);
    if (!out.converged) throw ConvergenceError("I: sum or inner integral did not converge", out.value(), out.rel_err);
    return out;
}

LogValue J1_log(const FProfile& f, const HolderPair& hp, const Scheme& s, const Tolerances& tol) {
    InnerTrack tr;
    const double p = hp.p;
    const double sigma = s.params.sigma;
    auto lq = [&](double ln, double lw) {
        const LogValue F = inner_f_log(s, f, lw, tol.quad);
        if (F.log_value == kNegInf) return p > 0.0 ? kNegInf : std::numeric_limits<double>::infinity();
        const double v = (p * sigma - 1.0) * lw + p * F.log_value;
        LogValue Fp = F;
        Fp.rel_err *= std::fabs(p);
        tr.add(v + s.dm.log_nu_smooth(std::max(ln, 0.0)) + ln, Fp);
        return v;
    };
    const SeriesResult r = s.dm.sum_log(lq, 1.0, tol.sum);
    LogValue sum = from_series(r);
    tr.finalize(sum);
    if (!sum.converged) throw ConvergenceError("J1: sum or inner integral did not converge", r.value(), sum.rel_err);
    LogValue out;
    out.log_value = sum.log_value / p;
    out.rel_err = sum.rel_err / std::fabs(p);
    return out;
}

LogValue J2_log(const AProfile& a, const HolderPair& hp, const Scheme& s, const NormWeights& w,
                const Tolerances& tol) {
    InnerTrack tr;
    const double q = hp.q;
    const double sigma = s.params.sigma;
    const int d = s.delta;
    const double l_nu1 = std::log(s.dm.nu(1) - s.dm.beta());
    auto lf = [&](double y) {
        const LogValue G = inner_a_log(s, a, y, tol);
        if (G.log_value == kNegInf) {
            // with q < 0 the (1-theta)^{1-q} factor decays faster than G^q grows
            if (q > 0.0 || w.kind == WeightKind::PhiTilde) return kNegInf;
            return std::numeric_limits<double>::infinity();
        }
        const double lu = s.cm.log_U_at_log(y);
        double v = (q * d * sigma - 1.0) * lu + s.cm.log_mu_x_at_log(y) + q * G.log_value;
        if (w.kind == WeightKind::PhiTilde) {
            v += (1.0 - q) * log_theta_complement(s.params, d * lu + l_nu1, tol.quad);
        }
        LogValue Gq = G;
        Gq.rel_err *= std::fabs(q);
        tr.add(v + std::log1p(std::fabs(y)) + 2.0, Gq);
        return v;
    };
    LogValue r = log_integral_line(lf, 0.0, s.cm.log_breaks(), tol.quad);
    tr.finalize(r);
    if (!r.converged) throw ConvergenceError("J2: integral or inner sum did not converge", r.value(), r.rel_err);
    LogValue out;
    out.log_value = r.log_value / q;
    out.rel_err = r.rel_err / std::fabs(q);
    return out;
}

double norm_f(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const NormWeights& w,
              const Tolerances& tol) {
    s.validate();
    return norm_f_log(make_f(t, hp, s), hp, s, w, tol).value();
}

double norm_a(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const Tolerances& tol) {
    s.validate();
    return norm_a_log(make_a(t, hp, s), hp, s, tol).value();
}

double bilinear_I(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const Tolerances& tol) {
    s.validate();
    return bilinear_I_log(make_f(t, hp, s), make_a(t, hp, s), s, tol).value();
}

double J1(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const Tolerances& tol) {
    s.validate();
    return J1_log(make_f(t, hp, s), hp, s, tol).value();
}

double J2(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const NormWeights& w,
          const Tolerances& tol) {
    s.validate();
    return J2_log(make_a(t, hp, s), hp, s, w, tol).value();
}

// --- verification ---------------------------------------------------------------

Verdict VerificationReport::overall() const { return combine({verdicts[0], verdicts[1], verdicts[2]}); }

namespace {

void check_hypotheses(const HolderPair& hp, const TestFunctionSpec& t, const Scheme& s, const NormWeights& w) {
    s.validate();
    if (std::fabs(1.0 / hp.p + 1.0 / hp.q - 1.0) > 1e-12) throw DomainError("HolderPair: 1/p + 1/q must equal 1");
    const HolderPair ref = HolderPair::from_p(hp.p);
    if (ref.regime != hp.regime) throw DomainError("HolderPair: regime inconsistent with p");
    if (hp.regime == Regime::ReverseFrac && w.kind != WeightKind::PhiTilde) {
        throw DomainError("regime 0<p<1 requires the Φ̃ weight (1-θ)Φ for f");
    }
    if (hp.regime != Regime::ReverseFrac && w.kind != WeightKind::Phi) {
        throw DomainError("regimes p>1 and p<0 require the Φ weight for f");
    }
    if (hp.regime != Regime::Forward && !(s.cm.u_infinite() && s.dm.v_infinite())) {
        throw DomainError("reverse regimes require U(∞)=V(∞)=∞");
    }
    if (hp.regime != Regime::Forward && t.family == TestFamily::ExtremalCutoff) {
        throw DomainError("reverse regimes require f > 0 everywhere; the extremal family vanishes on x^δ > 1");
    }
    if (t.family == TestFamily::SmoothPositive) {
        if (!(t.f_scale > 0.0)) throw DomainError("f ≡ 0: need 0 < ||f||");
        if (!(t.a_scale > 0.0)) throw DomainError("a ≡ 0: need 0 < ||a||");
        const double ds = s.delta * s.params.sigma;
        if (t.f_shape == FShape::UPower) {
            if (!(hp.p * (t.f_e0 - ds) > 0.0)) {
                throw DomainError("||f|| diverges near U=0: need p(f_e0 - δσ) > 0");
            }
            if (s.cm.u_infinite() && !(hp.p * (t.f_einf - ds) < 0.0)) {
                throw DomainError("||f|| diverges as U→∞: need p(f_einf - δσ) < 0");
            }
        } else if (!(hp.p > 0.0)) {
            throw DomainError("||f|| diverges for the exponential profile when p < 0");
        }
        if (t.a_shape == AShape::VPower && s.dm.v_infinite() && !(hp.q * (t.a_d - s.params.sigma) < 0.0)) {
            throw DomainError("||a|| diverges: need q(a_d - σ) < 0");
        }
    }
}

}  // namespace

VerificationReport verify(const HolderPair& hp, const TestFunctionSpec& t, const Scheme& s, const NormWeights& w,
                          const Tolerances& tol) {
    check_hypotheses(hp, t, s, w);
    const FProfile f = make_f(t, hp, s);
    const AProfile a = make_a(t, hp, s);

    VerificationReport rep;
    rep.regime = hp.regime;
    rep.weights = w.kind;
    const LogValue nf = norm_f_log(f, hp, s, w, tol);
    const LogValue na = norm_a_log(a, hp, s, tol);
    const LogValue I = bilinear_I_log(f, a, s, tol);
    const LogValue j1 = J1_log(f, hp, s, tol);
    const LogValue j2 = J2_log(a, hp, s, w, tol);
    rep.norm_f = nf.value();
    rep.norm_a = na.value();
    rep.I = I.value();
    rep.J1 = j1.value();
    rep.J2_or_J = j2.value();
    rep.rel_err_f = nf.rel_err;
    rep.rel_err_a = na.rel_err;
    rep.rel_err_I = I.rel_err;
    rep.rel_err_J1 = j1.rel_err;
    rep.rel_err_J2 = j2.rel_err;
    const KernelConstant kc = kernel_constant_closed(s.params);
    rep.k_value = kc.value;
    const double krel = kc.err_estimate / kc.value;

    const double lhs[3] = {rep.I, rep.J1, rep.J2_or_J};
    const double lrel[3] = {I.rel_err, j1.rel_err, j2.rel_err};
    const double rhs[3] = {rep.k_value * rep.norm_f * rep.norm_a, rep.k_value * rep.norm_f, rep.k_value * rep.norm_a};
    const double rrel[3] = {krel + nf.rel_err + na.rel_err, krel + nf.rel_err, krel + na.rel_err};
    for (int i = 0; i < 3; ++i) {
        const double err = lhs[i] * lrel[i] + rhs[i] * rrel[i];
        rep.slack[i] = lhs[i] / rhs[i];
        rep.verdicts[i] = (hp.regime == Regime::Forward) ? strict_less(lhs[i], rhs[i], err, tol.guard)
                                                         : strict_less(rhs[i], lhs[i], err, tol.guard);
    }
    return rep;
}

EquivalenceResult equivalence_substitution_check(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s,
                                                 double rel_tol, const Tolerances& tol) {
    if (hp.regime != Regime::Forward) throw DomainError("equivalence substitution: forward regime (p > 1) only");
    s.validate();
    const FProfile f = make_f(t, hp, s);
    const AProfile a = make_a(t, hp, s);
    const double p = hp.p, q = hp.q;
    const double sigma = s.params.sigma;
    const int d = s.delta;
    EquivalenceResult res;

    const LogValue j1 = J1_log(f, hp, s, tol);
    if (j1.log_value == -std::numeric_limits<double>::infinity() || !std::isfinite(j1.log_value)) {
        throw DomainError("equivalence substitution: J1 is 0 or infinite");
    }
    AProfile a_from_f;
    a_from_f.nu_pow = 1.0;
    a_from_f.log_a = [&](double, double lw) {
        return (p * sigma - 1.0) * lw + (p - 1.0) * inner_f_log(s, f, lw, tol.quad).log_value;
    };
    const LogValue na = norm_a_log(a_from_f, hp, s, tol);
    res.J1p = std::exp(p * j1.log_value);
    res.norm_a_q = std::exp(q * na.log_value);
    res.rel_diff_1 = std::fabs(res.J1p - res.norm_a_q) / res.J1p;

    const NormWeights w{WeightKind::Phi};
    const LogValue j2 = J2_log(a, hp, s, w, tol);
    if (!std::isfinite(j2.log_value)) throw DomainError("equivalence substitution: J2 is 0 or infinite");
    FProfile f_from_a;
    f_from_a.breaks = s.cm.log_breaks();
    f_from_a.log_f = [&](double y) {
        const double lu = s.cm.log_U_at_log(y);
        return log_mu_at_log(s, y) + (q * d * sigma - 1.0) * lu + (q - 1.0) * inner_a_log(s, a, y, tol).log_value;
    };
    const LogValue nf = norm_f_log(f_from_a, hp, s, w, tol);
    res.J2q = std::exp(q * j2.log_value);
    res.norm_f_p = std::exp(p * nf.log_value);
    res.rel_diff_2 = std::fabs(res.J2q - res.norm_f_p) / res.J2q;
    res.holds = res.rel_diff_1 <= rel_tol && res.rel_diff_2 <= rel_tol;
    return res;
}

}  // namespace hhi
