// Acceptance run: one PASS/FAIL line per criterion with its runtime.
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "hhi/errors.hpp"
#include "hhi/sharpness.hpp"
#include "hhi/specfun.hpp"

using namespace hhi;

namespace {

const double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

Scheme make_scheme(int delta, ContinuousMeasure cm, DiscreteMeasure dm, KernelParams k) {
    Scheme s;
    s.delta = delta;
    s.cm = std::move(cm);
    s.dm = std::move(dm);
    s.params = k;
    return s;
}

Scheme preset(const std::string& name) {
    cli::Overrides o;
    o.preset = name;
    return cli::scheme_from_config(cli::resolve_config(o));
}

Outcome c1_constant() {
    const KernelParams cor54{1.0, 1.0, 0.5, 1.0};
    const double a = kernel_constant_closed(cor54).value;
    const double b = kernel_constant_quadrature(cor54, 1e-10).value;
    const double e54 = std::max(std::fabs(a - kZeta2), std::fabs(b - kZeta2)) / kZeta2;
    double worst = 0.0, worst_riemann = 0.0;
    int n = 0;
    for (double rho : {0.5, 1.0, 2.0})
        for (double af : {-0.5, 0.0, 1.0})
            for (double g : {0.2, 0.4, 0.6})
                for (int si = 0; si < 3; ++si) {
                    const double lo = g + 0.1;
                    const KernelParams p{rho, af * rho, g, lo + (1.0 - lo) * si / 2.0};
                    const double c = kernel_constant_closed(p).value;
                    const double q = kernel_constant_quadrature(p, 1e-10).value;
                    worst = std::max(worst, std::fabs(c - q) / c);
                    if (af == 1.0) {
                        const double s = p.sigma / p.gamma;
                        const double r = 2.0 * gamma_fn(s) * riemann_zeta(s) / (p.gamma * std::pow(2.0 * rho, s));
                        worst_riemann = std::max(worst_riemann, std::fabs(r - q) / r);
                    }
                    ++n;
                }
    const bool pass = e54 <= 1e-10 && worst <= 1e-8 && worst_riemann <= 1e-8 && n == 81;
    return {pass, fmt("pi^2/6 rel err %.2e; %d-point grid max rel diff %.2e (alpha=rho subset, Riemann form: %.2e)", e54,
                      n, worst, worst_riemann)};
}

std::vector<Scheme> weight_schemes() {
    const KernelParams k1{1.0, 1.0, 0.5, 1.0}, k2{1.0, 0.5, 0.4, 0.8}, k3{2.0, -1.0, 0.3, 0.9}, k4{1.0, 0.0, 0.5, 0.9};
    return {
        make_scheme(1, ContinuousMeasure::unit(), DiscreteMeasure::unit(0.0), k1),
        make_scheme(1, ContinuousMeasure::unit(), DiscreteMeasure::unit(0.5), k1),
        make_scheme(1, ContinuousMeasure::power_damped(0.5), DiscreteMeasure::power_seq(0.5, 0.25), k2),
        make_scheme(-1, ContinuousMeasure::power_damped(0.5), DiscreteMeasure::power_seq(0.5, 0.25), k2),
        make_scheme(1, ContinuousMeasure::power_damped(1.0), DiscreteMeasure::power_seq(1.0, 0.1), k3),
        make_scheme(-1, ContinuousMeasure::unit(), DiscreteMeasure::power_seq(0.25, 0.0), k3),
        make_scheme(1, ContinuousMeasure::power_damped(0.25), DiscreteMeasure::unit(0.3), k4),
        make_scheme(-1, ContinuousMeasure::power_damped(1.0), DiscreteMeasure::unit(0.5), k4),
        make_scheme(1, ContinuousMeasure::tabulated({0.0, 1.0, 3.0}, {2.0, 1.0, 0.5}, 1.0),
                    DiscreteMeasure::tabulated({1.0, 0.8, 0.5}, 0.5, 0.2), k2),
    };
}

Outcome c2_weights() {
    int t = 0, f = 0, ind = 0;
    const auto tally = [&](Verdict v) { (v == Verdict::True ? t : v == Verdict::False ? f : ind)++; };
    const std::vector<Scheme> schemes = weight_schemes();
    for (const Scheme& s : schemes) {
        for (int i = 0; i < 30; ++i) {
            const double x = std::pow(10.0, -3.0 + 6.0 * i / 29.0);
            const WeightReport r = weight_report(s, x);
            tally(r.below_k);
            if (r.lower_applies) tally(r.above_lower);
        }
        for (long n : {1L, 2L, 5L, 10L, 100L}) {
            const VarpiReport r = varpi_report(s, n);
            tally(r.at_most_k);
            if (r.equality_applies) tally(r.equals_k);
        }
    }
    return {f == 0 && ind == 0 && schemes.size() >= 8,
            fmt("%zu schemes x 30 x-points x 5 n-values: %d true, %d false, %d indeterminate", schemes.size(), t, f, ind)};
}

Outcome c3_lemmas() {
    int t = 0, bad = 0;
    const KernelParams k1{1.0, 1.0, 0.5, 1.0}, k2{1.0, 0.5, 0.4, 0.8};
    const std::vector<Scheme> fams{make_scheme(1, ContinuousMeasure::unit(), DiscreteMeasure::unit(0.5), k1),
                                   make_scheme(1, ContinuousMeasure::unit(), DiscreteMeasure::power_seq(0.5, 0.25), k2)};
    for (const Scheme& s : fams) {
        for (long n = 1; n <= 10; ++n)
            for (double c : {0.1, 1.0, 10.0}) (hermite_hadamard_check(s, n, c).verdict == Verdict::True ? t : bad)++;
        for (double c : {0.1, 1.0, 10.0}) (sandwich_check(s, c).verdict == Verdict::True ? t : bad)++;
    }
    const ComparisonResult geo = sandwich_check_fn([](double x) { return std::exp(-x); });
    const ComparisonResult sq = sandwich_check_fn([](double x) { return 1.0 / (x * x); });
    const double egeo = std::fabs(geo.mid - 1.0 / (std::numbers::e - 1.0)) * (std::numbers::e - 1.0);
    const double esq = std::fabs(sq.mid - kZeta2) / kZeta2;
    const bool controls = geo.verdict == Verdict::True && sq.verdict == Verdict::True && egeo < 1e-9 && esq < 1e-9 &&
                          std::fabs(sq.lhs - 1.0) < 1e-9 && std::fabs(sq.rhs - 2.0) < 1e-9;
    return {bad == 0 && controls, fmt("%d/%d kernel checks true; controls 1/(e-1) err %.1e, pi^2/6 in (%.6f, %.6f) err %.1e",
                                      t, t + bad, egeo, sq.lhs, sq.rhs, esq)};
}

Outcome c4_tail() {
    std::mt19937_64 rng(20261015);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int inside = 0;
    for (int i = 0; i < 50; ++i) {
        const double b = std::exp(std::log(0.02) + u(rng) * std::log(150.0));  // [0.02, 3]
        const int fam = i % 3;
        DiscreteMeasure dm = DiscreteMeasure::unit();
        if (fam == 0) dm = DiscreteMeasure::unit(0.5 * u(rng));
        if (fam == 1) {
            const double a = u(rng);
            dm = DiscreteMeasure::power_seq(a, 0.5 * u(rng));
        }
        if (fam == 2) dm = DiscreteMeasure::tabulated({1.5, 1.2, 1.0, 0.9}, 0.2 + 0.8 * u(rng), 0.75 * u(rng));
        const double s = tail_sum(b, dm).value();
        const TailSumBracket br = tail_sum_bracket(b, dm);
        if (br.lower <= s * (1 + 1e-12) && s <= br.upper * (1 + 1e-12)) ++inside;
    }
    double worst = 0.0;
    for (double b : {0.01, 0.1, 0.5, 1.0, 2.5}) {
        const double z = riemann_zeta(1.0 + b);
        worst = std::max(worst, std::fabs(tail_sum(b, DiscreteMeasure::unit()).value() - z) / z);
    }
    return {inside == 50 && worst <= 1e-8, fmt("%d/50 random configs inside bracket; zeta(1+b) max rel err %.2e", inside, worst)};
}

Outcome c5_forward() {
    const HolderPair hp = HolderPair::from_p(2.0);
    int ok = 0, pairs = 0;
    double worst_eq = 0.0, max_slack = 0.0;
    for (const std::string& name : cli::preset_names()) {
        const Scheme s = preset(name);
        const double ds = s.delta * s.params.sigma, sg = s.params.sigma;
        TestFunctionSpec a, b;
        a.f_e0 = ds + 0.5, a.f_einf = ds - 0.4, a.a_d = sg - 0.3;
        b.f_e0 = ds + 0.2, b.f_einf = ds - 0.8, b.a_d = sg - 0.6, b.f_scale = 2.0, b.a_scale = 0.5;
        for (const TestFunctionSpec& t : {a, b}) {
            ++pairs;
            const VerificationReport r = verify(hp, t, s, NormWeights{WeightKind::Phi});
            bool good = r.overall() == Verdict::True;
            for (double sl : r.slack) {
                good = good && sl < 1.0;
                max_slack = std::max(max_slack, sl);
            }
            const EquivalenceResult e = equivalence_substitution_check(t, hp, s);
            worst_eq = std::max({worst_eq, e.rel_diff_1, e.rel_diff_2});
            if (good && e.holds) ++ok;
        }
    }
    return {ok == pairs && pairs >= 10 && worst_eq <= 1e-8,
            fmt("%d/%d pairs all three '<' true, max slack %.4f; substitution max rel diff %.2e", ok, pairs, max_slack,
                worst_eq)};
}

Outcome c6_reverse() {
    int ok = 0, runs = 0, rejected = 0;
    for (const std::string& name : cli::preset_names()) {
        const Scheme s = preset(name);
        const double ds = s.delta * s.params.sigma, sg = s.params.sigma;
        TestFunctionSpec neg, frac;
        // I is finite only if the exponent on the side where the kernel is algebraic lies in (gamma, sigma)
        const double mid = 0.5 * (sg + s.params.gamma);
        neg.f_e0 = s.delta == 1 ? mid : ds - 0.25;
        neg.f_einf = s.delta == 1 ? ds + 0.5 : -mid;
        neg.a_d = sg - 0.4;
        frac.f_e0 = ds + 0.5, frac.f_einf = ds - 0.5, frac.a_d = sg + 0.25;
        ++runs;
        if (verify(HolderPair::from_p(-1.0), neg, s, NormWeights{WeightKind::Phi}).overall() == Verdict::True) ++ok;
        ++runs;
        if (verify(HolderPair::from_p(0.5), frac, s, NormWeights{WeightKind::PhiTilde}).overall() == Verdict::True) ++ok;
        try {
            verify(HolderPair::from_p(0.5), frac, s, NormWeights{WeightKind::Phi});
        } catch (const DomainError&) {
            ++rejected;
        }
        try {
            verify(HolderPair::from_p(-1.0), neg, s, NormWeights{WeightKind::PhiTilde});
        } catch (const DomainError&) {
            ++rejected;
        }
    }
    const int mism = 2 * static_cast<int>(cli::preset_names().size());
    return {ok == runs && rejected == mism,
            fmt("%d/%d reverse runs all three '>' true (p=-1 with Phi, p=1/2 with reduced Phi); %d/%d mismatches rejected",
                ok, runs, rejected, mism)};
}

Outcome c7_sharpness() {
    const Scheme s = preset("Cor54");
    const SharpnessTrace f = sharpness_trace({0.4, 0.2, 0.1, 0.05}, HolderPair::from_p(2.0), s);
    const HolderPair neg = HolderPair::from_p(-1.0);
    const SharpnessTrace r =
        sharpness_trace(clip_schedule({0.4, 0.2, 0.1, 0.05}, extremal_eps_max(neg, s.params)), neg, s);
    const double off = (f.extrapolated_limit - f.k_value) / f.k_value;
    std::ostringstream d;
    d << "R =";
    for (const auto& p : f.points) d << fmt(" %.5f", p.ratio);
    d << fmt("; monotone %s, all < k %s; linear limit %.5f (%.2f%% from k, need 1%%)", to_string(f.monotone),
             to_string(f.bound), f.extrapolated_limit, 100.0 * off);
    d << "; reverse p=-1 R =";
    for (const auto& p : r.points) d << fmt(" %.5f", p.ratio);
    d << fmt(" > k %s, decreasing %s", to_string(r.bound), to_string(r.monotone));
    const bool pass = f.monotone == Verdict::True && f.bound == Verdict::True && std::fabs(off) <= 0.01 &&
                      r.bound == Verdict::True && r.monotone == Verdict::True;
    return {pass, d.str()};
}

Outcome c8_opnorm() {
    const Scheme s = preset("Cor54");
    const GridSpec fine;  // [1e-4, 1e4], 2000 nodes, n_max 5000
    const LadderResult lr = opnorm_ladder(s, HolderPair::from_p(2.0), default_ladder(fine), {}, false);
    const double k = lr.k_value;
    bool in_band = true;
    std::ostringstream d;
    d << "estimates/k =";
    for (const auto& r : lr.results) {
        d << fmt(" %.6f", r.estimate / k);
        in_band = in_band && r.estimate <= k + 1e-3;
    }
    const double top = lr.results.back().estimate;
    in_band = in_band && top >= 0.95 * k;
    d << fmt("; finest %.8f on %dx%ld; monotone %s", top, fine.nx, fine.n_max, lr.monotone ? "yes" : "no");
    return {in_band && lr.monotone, d.str()};
}

std::string body_of(const std::string& report) {
    std::istringstream in(report);
    std::string line, r;
    while (std::getline(in, line))
        if (line.rfind("# elapsed_s", 0) != 0) r += line + "\n";
    return r;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "hhi");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    return code;
}

Outcome c9_cli() {
    int same = 0;
    const std::vector<std::vector<std::string>> det{
        {"constant", "--preset", "Cor53"},
        {"weights", "--preset", "Cor52", "--set", "grid.random_x=6", "--seed", "11"},
        {"verify", "--preset", "Remark55"},
        {"sharpness", "--preset", "Cor54", "--set", "sharpness.eps=[0.2,0.1]"},
    };
    for (const auto& a : det) {
        std::string x, y;
        const int cx = run_cli(a, &x), cy = run_cli(a, &y);
        if (cx == cy && body_of(x) == body_of(y)) ++same;
    }
    const int e0 = run_cli({"weights", "--preset", "Cor54"});
    const int e1 = run_cli({"sharpness", "--preset", "Cor54", "--set", "sharpness.eps=[0.4,0.3]"});
    const int e2 = run_cli({"weights", "--preset", "Cor54", "--set", "tolerances.guard=0.9"});
    const int e3 = run_cli({"verify", "--set", "nonsense=1"});
    const int e4 = run_cli({"verify", "--preset", "Cor54", "--tol-quad", "1e-17"});
    const bool codes = e0 == 0 && e1 == 1 && e2 == 2 && e3 == 3 && e4 == 4;
    return {same == static_cast<int>(det.size()) && codes,
            fmt("%d/%zu commands byte-identical bodies; exit fixtures -> %d %d %d %d %d (want 0 1 2 3 4)", same,
                det.size(), e0, e1, e2, e3, e4)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"constant reproduction", c1_constant},
        {"weight-coefficient bounds", c2_weights},
        {"structural lemmas", c3_lemmas},
        {"tail-sum bracket", c4_tail},
        {"forward inequalities", c5_forward},
        {"reverse inequalities", c6_reverse},
        {"sharpness", c7_sharpness},
        {"operator norm", c8_opnorm},
        {"determinism and exit codes", c9_cli},
    };
    const double limits[] = {10, 60, 10, 1e9, 120, 1e9, 120, 300, 1e9};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = sec < limits[i];
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %zu %-28s %s  [%.2f s%s]  %s\n", i + 1, criteria[i].first.c_str(), pass ? "PASS" : "FAIL",
                    sec, limits[i] < 1e9 ? fmt(", limit %.0f s", limits[i]).c_str() : "", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
