#pragma once
// Weighted norms, the bilinear form I, the companion functionals J1 and J2 (J),
// and verification of the forward and reverse inequality triples.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hhi/kernel.hpp"
#include "hhi/tolerances.hpp"
#include "hhi/verdict.hpp"
#include "hhi/weights.hpp"

namespace hhi {

enum class Regime { Forward, ReverseNeg, ReverseFrac };
const char* to_string(Regime r);

struct HolderPair {
    double p = 2.0;
    double q = 2.0;
    Regime regime = Regime::Forward;
    /// p must avoid 0 and 1; q = p/(p-1).
    static HolderPair from_p(double p);
};

enum class WeightKind { Phi, PhiTilde };
const char* to_string(WeightKind w);

/// phi(x) = U^{p(1-delta sigma)-1} / mu^{p-1}, psi(n) = (V_n-beta)^{q(1-sigma)-1} / nu_{n+1}^{q-1},
/// phi_tilde = (1 - theta(sigma, x)) phi.
struct NormWeights {
    WeightKind kind = WeightKind::Phi;
    static NormWeights for_regime(Regime r);
    double log_phi_at_log(const Scheme& s, const HolderPair& hp, double y, double tol = 1e-12) const;
    double log_psi(const Scheme& s, const HolderPair& hp, long n) const;
};

enum class TestFamily { ExtremalCutoff, SmoothPositive, Tabulated };
enum class FShape { UPower, XExpPower };
enum class AShape { VPower, IndexPower };
const char* to_string(TestFamily f);

/// A test pair (f, a).
///   ExtremalCutoff: f = U^{delta(sigma+eps/p)-1} mu on {x^delta <= 1}, zero elsewhere;
///                   a_n = (V_n-beta)^{sigma-eps/q-1} nu_{n+1}.
///   SmoothPositive: f = f_scale mu U^{f_e0-1} (1+U)^{f_einf-f_e0}       (UPower)
///                     or f_scale x^{f_power} e^{-f_lambda x}              (XExpPower);
///                   a_n = a_scale nu_{n+1} (V_n-beta)^{a_d-1}             (VPower)
///                     or a_scale n^{-a_s}                                  (IndexPower).
///   Tabulated:      f log-log interpolated through (f_knots, f_values), with power
///                   slopes f_slope_lo / f_slope_hi outside; a_n = a_values[n-1], then
///                   a_m (n/m)^{-a_tail}.
struct TestFunctionSpec {
    TestFamily family = TestFamily::SmoothPositive;
    double eps = 0.1;

    FShape f_shape = FShape::UPower;
    double f_scale = 1.0;
    double f_e0 = 1.5;
    double f_einf = 0.5;
    double f_power = 0.0;
    double f_lambda = 1.0;

    AShape a_shape = AShape::VPower;
    double a_scale = 1.0;
    double a_d = 0.5;
    double a_s = 2.0;

    std::vector<double> f_knots, f_values;
    double f_slope_lo = 0.0;
    double f_slope_hi = -2.0;
    std::vector<double> a_values;
    double a_tail = 2.0;
};

/// f in log form: log f(e^y). `vanishes` marks a cutoff (f = 0 on a set of positive measure).
struct FProfile {
    std::function<double(double)> log_f;
    std::vector<double> breaks;
    bool vanishes = false;
};

/// a_n = nu_{n+1}^{nu_pow} exp(log_a(log n, log(V_n - beta))). log n may be non-integer
/// on the smooth tail extension.
struct AProfile {
    std::function<double(double, double)> log_a;
    double nu_pow = 0.0;
};

FProfile make_f(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s);
AProfile make_a(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s);
/// Admissible interval (0, eps_max) of the extremal family.
double extremal_eps_max(const HolderPair& hp, const KernelParams& k);

/// log of the integral over the real line of exp(lf(y)); sampled around `hint` to
/// place the center and the scaling. Breaks mark kinks or jumps.
LogValue log_integral_line(const std::function<double(double)>& lf, double hint, std::vector<double> breaks,
                           double tol);

/// log of int_0^inf h(U^delta(x) e^{lw}) f(x) dx.
LogValue inner_f_log(const Scheme& s, const FProfile& f, double lw, double tol);
/// log of sum_n h(U^delta(e^y)(V_n - beta)) a_n.
LogValue inner_a_log(const Scheme& s, const AProfile& a, double y, const Tolerances& tol);

/// Profile-level functionals, all returned as logs with a relative error.
/// `support_only` integrates the f-norm over the support of f (used for the
/// extremal family in reverse regimes, where f vanishes outside x^delta <= 1).
LogValue norm_f_log(const FProfile& f, const HolderPair& hp, const Scheme& s, const NormWeights& w,
                    const Tolerances& tol, bool support_only = false);
LogValue norm_a_log(const AProfile& a, const HolderPair& hp, const Scheme& s, const Tolerances& tol);
LogValue bilinear_I_log(const FProfile& f, const AProfile& a, const Scheme& s, const Tolerances& tol);
/// J1 including the outer 1/p power.
LogValue J1_log(const FProfile& f, const HolderPair& hp, const Scheme& s, const Tolerances& tol);
/// J2; with PhiTilde weights this is J, carrying the (1-theta)^{1-q} factor.
LogValue J2_log(const AProfile& a, const HolderPair& hp, const Scheme& s, const NormWeights& w,
                const Tolerances& tol);

/// Conveniences taking a TestFunctionSpec.
double norm_f(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const NormWeights& w,
              const Tolerances& tol = {});
double norm_a(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const Tolerances& tol = {});
double bilinear_I(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const Tolerances& tol = {});
double J1(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const Tolerances& tol = {});
double J2(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s, const NormWeights& w,
          const Tolerances& tol = {});

struct VerificationReport {
    Regime regime = Regime::Forward;
    WeightKind weights = WeightKind::Phi;
    double I = 0.0, J1 = 0.0, J2_or_J = 0.0;
    double norm_f = 0.0, norm_a = 0.0, k_value = 0.0;
    double rel_err_I = 0.0, rel_err_J1 = 0.0, rel_err_J2 = 0.0, rel_err_f = 0.0, rel_err_a = 0.0;
    /// I vs k|f||a|, J1 vs k|f|, J2 vs k|a|; "<" in Forward, ">" otherwise.
    std::array<Verdict, 3> verdicts{Verdict::Indeterminate, Verdict::Indeterminate, Verdict::Indeterminate};
    /// I/(k|f||a|), J1/(k|f|), J2/(k|a|).
    std::array<double, 3> slack{0.0, 0.0, 0.0};
    Verdict overall() const;
};

/// Checks the hypotheses of the regime (throws DomainError naming the violated one),
/// then evaluates all functionals and verdicts.
VerificationReport verify(const HolderPair& hp, const TestFunctionSpec& t, const Scheme& s, const NormWeights& w,
                          const Tolerances& tol = {});

struct EquivalenceResult {
    double J1p = 0.0;        // J1^p
    double norm_a_q = 0.0;   // |a|^q for a built from f
    double rel_diff_1 = 0.0;
    double J2q = 0.0;        // J2^q
    double norm_f_p = 0.0;   // |f|^p for f built from a
    double rel_diff_2 = 0.0;
    bool holds = false;
};

/// J1^p = |a|^q with a_n = nu_{n+1}(V_n-beta)^{p sigma-1} F_n^{p-1}, and symmetrically
/// J2^q = |f|^p with f = mu U^{q delta sigma-1} G^{q-1}. Forward regime only.
EquivalenceResult equivalence_substitution_check(const TestFunctionSpec& t, const HolderPair& hp, const Scheme& s,
                                                 double rel_tol = 1e-8, const Tolerances& tol = {});

}  // namespace hhi
