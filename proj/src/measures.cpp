#include "hhi/measures.hpp"

#include <algorithm>
#include <cstdio>

#include "hhi/errors.hpp"
#include "hhi/specfun.hpp"

namespace hhi {

namespace {

double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

// --- ContinuousMeasure ------------------------------------------------------

ContinuousMeasure ContinuousMeasure::power_damped(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("power_damped: exponent must lie in [0,1]");
    ContinuousMeasure m;
    m.family_ = ContinuousFamily::PowerDamped;
    m.a_ = a;
    return m;
}

ContinuousMeasure ContinuousMeasure::unit() { return ContinuousMeasure{}; }

ContinuousMeasure ContinuousMeasure::tabulated(std::vector<double> knots, std::vector<double> values,
                                               double tail_exponent) {
    if (knots.size() < 2 || knots.size() != values.size()) {
        throw DomainError("tabulated measure: need at least two knots and one value per knot");
    }
    if (knots[0] != 0.0) throw DomainError("tabulated measure: first knot must be 0");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1])) throw DomainError("tabulated measure: knots must increase");
    }
    for (double v : values) {
        if (!(v > 0.0)) throw DomainError("tabulated measure: density values must be positive");
    }
    if (!(tail_exponent >= 0.0)) throw DomainError("tabulated measure: tail exponent must be >= 0");
    ContinuousMeasure m;
    m.family_ = ContinuousFamily::Tabulated;
    m.knots_ = std::move(knots);
    m.values_ = std::move(values);
    m.tail_ = tail_exponent;
    m.cum_.assign(m.knots_.size(), 0.0);
    for (std::size_t i = 1; i < m.knots_.size(); ++i) {
        m.cum_[i] = m.cum_[i - 1] + 0.5 * (m.knots_[i] - m.knots_[i - 1]) * (m.values_[i] + m.values_[i - 1]);
    }
    return m;
}

std::string ContinuousMeasure::id() const {
    switch (family_) {
        case ContinuousFamily::PowerDamped: return "power_damped(" + fmt_num(a_) + ")";
        case ContinuousFamily::UnitDensity: return "unit";
        case ContinuousFamily::Tabulated: return "tabulated";
    }
    return "?";
}

double ContinuousMeasure::mu(double x) const {
    if (!(x >= 0.0)) throw DomainError("mu: x must be nonnegative");
    switch (family_) {
        case ContinuousFamily::PowerDamped: return std::pow(1.0 + x, -a_);
        case ContinuousFamily::UnitDensity: return 1.0;
        case ContinuousFamily::Tabulated: break;
    }
    const double xm = knots_.back();
    if (x >= xm) return values_.back() * std::pow(x / xm, -tail_);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t i = std::size_t(it - knots_.begin()) - 1;
    const double w = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return values_[i] + w * (values_[i + 1] - values_[i]);
}

double ContinuousMeasure::U(double x) const {
    if (!(x >= 0.0)) throw DomainError("U: x must be nonnegative");
    switch (family_) {
        case ContinuousFamily::PowerDamped:
            if (a_ == 1.0) return std::log1p(x);
            return std::expm1((1.0 - a_) * std::log1p(x)) / (1.0 - a_);
        case ContinuousFamily::UnitDensity: return x;
        case ContinuousFamily::Tabulated: break;
    }
    const double xm = knots_.back();
    if (x >= xm) {
        const double r = x / xm;
        const double c = values_.back() * xm;
        if (tail_ == 1.0) return cum_.back() + c * std::log(r);
        return cum_.back() + c * std::expm1((1.0 - tail_) * std::log(r)) / (1.0 - tail_);
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const std::size_t i = std::size_t(it - knots_.begin()) - 1;
    return cum_[i] + 0.5 * (x - knots_[i]) * (values_[i] + mu(x));
}

bool ContinuousMeasure::u_infinite() const {
    return family_ != ContinuousFamily::Tabulated || tail_ <= 1.0;
}

double ContinuousMeasure::U_infinity() const {
    if (u_infinite()) return std::numeric_limits<double>::infinity();
    return cum_.back() + values_.back() * knots_.back() / (tail_ - 1.0);
}

double ContinuousMeasure::log_U_at_log(double y) const {
    switch (family_) {
        case ContinuousFamily::UnitDensity: return y;
        case ContinuousFamily::PowerDamped: {
            if (y < -30.0) return y - 0.5 * a_ * std::exp(y);
            const double sp = softplus(y);
            if (a_ == 1.0) return std::log(sp);
            const double q = (1.0 - a_) * sp;
            const double lq = q < 600.0 ? std::log(std::expm1(q)) : q + std::log1p(-std::exp(-q));
            return lq - std::log(1.0 - a_);
        }
        case ContinuousFamily::Tabulated: break;
    }
    if (y < -600.0) return std::log(values_[0]) + y;
    const double lxm = std::log(knots_.back());
    if (y > 600.0 && tail_ < 1.0) {
        const double c = values_.back() * knots_.back() / (1.0 - tail_);
        const double e = (1.0 - tail_) * (y - lxm);
        const double a = cum_.back() - c;
        return std::log(c) + e + std::log1p(a * std::exp(-e) / c);
    }
    if (y > 600.0) {
        const double c = values_.back() * knots_.back();
        if (tail_ == 1.0) return std::log(cum_.back() + c * (y - lxm));
        return std::log(cum_.back() + c * std::expm1((1.0 - tail_) * (y - lxm)) / (1.0 - tail_));
    }
    return std::log(U(std::exp(y)));
}

double ContinuousMeasure::log_mu_x_at_log(double y) const {
    switch (family_) {
        case ContinuousFamily::UnitDensity: return y;
        case ContinuousFamily::PowerDamped: return y - a_ * softplus(y);
        case ContinuousFamily::Tabulated: break;
    }
    const double lxm = std::log(knots_.back());
    if (y >= lxm) return std::log(values_.back()) - tail_ * (y - lxm) + y;
    if (y < -600.0) return std::log(values_[0]) + y;
    return std::log(mu(std::exp(y))) + y;
}

double ContinuousMeasure::log_x_for_log_U(double lu) const {
    if (family_ == ContinuousFamily::UnitDensity) return lu;
    if (!u_infinite() && lu >= std::log(U_infinity())) return 1e3;
    double lo = lu - 1.0, hi = lu + 1.0;
    while (log_U_at_log(lo) > lu) lo -= 2.0 * (hi - lo);
    int guard = 0;
    while (log_U_at_log(hi) < lu && guard++ < 200) hi += 2.0 * (hi - lo);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_U_at_log(mid) < lu) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> ContinuousMeasure::log_breaks() const {
    std::vector<double> b;
    for (std::size_t i = 1; i < knots_.size(); ++i) b.push_back(std::log(knots_[i]));
    return b;
}

// --- DiscreteMeasure --------------------------------------------------------

DiscreteMeasure DiscreteMeasure::power_seq(double a, double beta) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("power_seq: exponent must lie in [0,1]");
    DiscreteMeasure d;
    d.family_ = DiscreteFamily::PowerSequence;
    d.a_ = a;
    d.tau_ = a;
    d.beta_ = beta;
    d.build();
    return d;
}

DiscreteMeasure DiscreteMeasure::unit(double beta) {
    DiscreteMeasure d;
    d.family_ = DiscreteFamily::UnitSequence;
    d.beta_ = beta;
    d.build();
    return d;
}

DiscreteMeasure DiscreteMeasure::tabulated(std::vector<double> nu, double tail_exponent, double beta) {
    if (nu.empty()) throw DomainError("tabulated sequence: need at least one value");
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (!(nu[i] > 0.0)) throw DomainError("tabulated sequence: values must be positive");
        if (i > 0 && nu[i] > nu[i - 1]) throw DomainError("tabulated sequence: values must be non-increasing");
    }
    if (!(tail_exponent >= 0.0)) throw DomainError("tabulated sequence: tail exponent must be >= 0");
    if (long(nu.size()) >= kPrefix / 2) throw DomainError("tabulated sequence: table too long");
    DiscreteMeasure d;
    d.family_ = DiscreteFamily::Tabulated;
    d.table_ = std::move(nu);
    d.m_ = long(d.table_.size());
    d.tau_ = tail_exponent;
    d.logC_ = std::log(d.table_.back()) + tail_exponent * std::log(double(d.m_));
    d.beta_ = beta;
    d.build();
    return d;
}

void DiscreteMeasure::build() {
    if (!std::isfinite(beta_) || beta_ > 0.5 * nu(1)) {
        throw DomainError("discrete measure: need β ≤ ν₁/2, got beta=" + std::to_string(beta_));
    }
    prefix_.assign(std::size_t(kPrefix) + 1, 0.0);
    double s = 0.0, comp = 0.0;  // Neumaier summation
    for (long n = 1; n <= kPrefix; ++n) {
        const double v = nu(n);
        const double t = s + v;
        comp += (std::fabs(s) >= v) ? (s - t) + v : (v - t) + s;
        s = t;
        prefix_[std::size_t(n)] = s + comp;
    }
    E_ref_ = E(double(kPrefix));
}

std::string DiscreteMeasure::id() const {
    switch (family_) {
        case DiscreteFamily::PowerSequence: return "power_seq(" + fmt_num(a_) + ")";
        case DiscreteFamily::UnitSequence: return "unit";
        case DiscreteFamily::Tabulated: return "tabulated";
    }
    return "?";
}

double DiscreteMeasure::nu(long n) const {
    if (n < 1) throw DomainError("nu: index must be >= 1");
    if (n <= m_) return table_[std::size_t(n - 1)];
    if (tau_ == 0.0) return std::exp(logC_);
    return std::exp(logC_) * std::pow(double(n), -tau_);
}

double DiscreteMeasure::E(double t) const {
    const double tau = tau_;
    if (tau == 1.0) return std::log(t) + 0.5 / t - 1.0 / (12.0 * t * t) + 1.0 / (120.0 * t * t * t * t);
    const double tm = std::pow(t, -tau);
    return t * tm / (1.0 - tau) + 0.5 * tm - tau * tm / (12.0 * t) +
           tau * (tau + 1.0) * (tau + 2.0) * tm / (720.0 * t * t * t);
}

double DiscreteMeasure::log_E_big(double lt) const {
    return (1.0 - tau_) * lt - std::log(1.0 - tau_) + std::log1p(0.5 * (1.0 - tau_) * std::exp(-lt));
}

double DiscreteMeasure::V(long n) const {
    if (n < 0) throw DomainError("V: index must be >= 0");
    if (n <= kPrefix) return prefix_[std::size_t(n)];
    return prefix_.back() + std::exp(logC_) * (E(double(n)) - E_ref_);
}

double DiscreteMeasure::log_V_shift_smooth(double log_t) const {
    const double C = std::exp(logC_);
    if (tau_ < 1.0 && (1.0 - tau_) * log_t > 600.0) {
        const double lce = logC_ + log_E_big(log_t);
        const double D = prefix_.back() - beta_ - C * E_ref_;
        return lce + std::log1p(D * std::exp(-lce));
    }
    const double t = std::exp(log_t);
    return std::log(prefix_.back() - beta_ + C * (E(t) - E_ref_));
}

double DiscreteMeasure::log_nu_over_dV(double log_t) const {
    const double u = std::exp(-log_t);
    const double tau = tau_;
    const double poly = -0.5 * tau * u + tau * (tau + 1.0) * u * u / 12.0 -
                        tau * (tau + 1.0) * (tau + 2.0) * (tau + 3.0) * u * u * u * u / 720.0;
    return -tau * std::log1p(u) - std::log1p(poly);
}

double DiscreteMeasure::log_t_for_log_V_shift(double lw) const {
    const double C = std::exp(logC_);
    const double D = prefix_.back() - beta_ - C * E_ref_;
    double lt;
    if (tau_ == 1.0) {
        lt = (std::exp(lw) - D) / C;
        if (!std::isfinite(lt) || lt > 700.0) return lt;
    } else if (tau_ < 1.0) {
        lt = (lw + std::log(1.0 - tau_) - logC_) / (1.0 - tau_);
    } else {
        lt = std::log(double(kPrefix));
    }
    lt = std::max(lt, std::log(double(m_ + 1)));
    // Newton on log t; V is increasing so lw(lt) is monotone
    for (int it = 0; it < 60; ++it) {
        const double f = log_V_shift_smooth(lt) - lw;
        const double u = std::exp(-lt);
        const double dE = 1.0 - 0.5 * tau_ * u + tau_ * (tau_ + 1.0) * u * u / 12.0;
        const double slope = std::exp(logC_ + std::log(dE) + (1.0 - tau_) * lt - log_V_shift_smooth(lt));
        if (!(slope > 0.0) || !std::isfinite(slope)) break;
        double step = f / slope;
        step = std::clamp(step, -5.0, 5.0);
        lt -= step;
        if (std::fabs(step) < 1e-14 * (1.0 + std::fabs(lt))) break;
    }
    return lt;
}

double DiscreteMeasure::V_step(double y) const {
    if (!(y >= 0.0)) throw DomainError("V_step: y must be nonnegative");
    if (y == 0.0) return 0.0;
    const double c = std::ceil(y);
    const long n = long(c);
    return V(n - 1) + nu(n) * (y - double(n - 1));
}

double DiscreteMeasure::V_infinity() const {
    if (v_infinite()) return std::numeric_limits<double>::infinity();
    return V(m_) + std::exp(logC_) * hurwitz_zeta(tau_, double(m_ + 1));
}

// --- tail sum -----------------------------------------------------------------

SeriesResult tail_sum(double b, const DiscreteMeasure& dm, double tol) {
    if (!(b > 0.0)) throw DomainError("tail_sum: exponent b must be positive");
    if (!dm.v_infinite()) throw DomainError("tail_sum: requires V(inf) = inf");
    auto q = [b](double, double lw) { return -(1.0 + b) * lw; };
    return dm.sum_log(q, 1.0, tol);
}

TailSumBracket tail_sum_bracket(double b, const DiscreteMeasure& dm) {
    const double d = dm.nu(1) - dm.beta();
    return {1.0 / (b * std::pow(d, b)), 1.0 / (b * std::pow(d, b)) + dm.nu(2) / std::pow(d, 1.0 + b)};
}

}  // namespace hhi
