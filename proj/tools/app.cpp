#include "app.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "hhi/errors.hpp"
#include "hhi/weights.hpp"

namespace hhi::cli {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

std::string cols(std::initializer_list<std::string> cs, std::size_t w = 22) {
    std::string out;
    for (const auto& c : cs) out += pad(c, w);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

class Report {
public:
    void line(const std::string& s) { body_.push_back(s); }
    void record(Json r) { records_.push_back(std::move(r)); }
    void verdict(Verdict v) {
        if (v == Verdict::False) any_false_ = true;
        if (v == Verdict::Indeterminate) any_indeterminate_ = true;
    }
    void verdict(bool ok) { verdict(ok ? Verdict::True : Verdict::False); }
    void convergence_failure() { any_convergence_ = true; }
    int exit_code() const {
        if (any_false_) return kExitFalse;
        if (any_convergence_) return kExitConvergence;
        if (any_indeterminate_) return kExitIndeterminate;
        return kExitOk;
    }
    const std::vector<std::string>& body() const { return body_; }
    const std::vector<Json>& records() const { return records_; }

private:
    std::vector<std::string> body_;
    std::vector<Json> records_;
    bool any_false_ = false, any_indeterminate_ = false, any_convergence_ = false;
};

// ---- config ----------------------------------------------------------------------

Json test_defaults() {
    const TestFunctionSpec t;
    return Json{{"family", "smooth"},
                {"eps", t.eps},
                {"f_shape", "u_power"},
                {"f_scale", t.f_scale},
                {"f_e0", t.f_e0},
                {"f_einf", t.f_einf},
                {"f_power", t.f_power},
                {"f_lambda", t.f_lambda},
                {"a_shape", "v_power"},
                {"a_scale", t.a_scale},
                {"a_d", t.a_d},
                {"a_s", t.a_s},
                {"f_knots", Json::array()},
                {"f_values", Json::array()},
                {"f_slope_lo", t.f_slope_lo},
                {"f_slope_hi", t.f_slope_hi},
                {"a_values", Json::array()},
                {"a_tail", t.a_tail}};
}

// keys whose value may be a string or an object
bool is_free_leaf(const std::string& path) {
    return path == "measures.continuous" || path == "measures.discrete" || path == "sharpness.eps" ||
           path == "preset";
}

bool compatible(const Json& def, const Json& v) {
    if (def.is_number()) return v.is_number();
    if (def.is_boolean()) return v.is_boolean();
    if (def.is_string()) return v.is_string();
    if (def.is_array()) return v.is_array();
    if (def.is_object()) return v.is_object();
    return true;
}

void merge_into(Json& dst, const Json& src, const std::string& prefix) {
    if (!src.is_object()) throw ConfigError("config: expected an object at '" + (prefix.empty() ? "<root>" : prefix) + "'");
    for (auto it = src.begin(); it != src.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!dst.contains(it.key())) throw ConfigError("config: unknown key '" + path + "'");
        Json& d = dst[it.key()];
        if (is_free_leaf(path)) {
            d = it.value();
        } else if (d.is_object()) {
            merge_into(d, it.value(), path);
        } else {
            if (!compatible(d, it.value())) throw ConfigError("config: wrong type for '" + path + "'");
            d = it.value();
        }
    }
}

Json set_to_patch(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), raw = kv.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::exception&) {
        value = raw;
    }
    Json patch = value;
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
    return patch;
}

double get_num(const Json& c, const char* a, const char* b = nullptr) {
    const Json& v = b ? c.at(a).at(b) : c.at(a);
    if (!v.is_number()) throw ConfigError(std::string("config: '") + a + (b ? std::string(".") + b : "") + "' must be a number");
    return v.get<double>();
}

ContinuousMeasure continuous_from(const Json& v) {
    static const std::regex pd(R"(^\s*power_damped\(\s*([-+0-9.eE]+)\s*\)\s*$)");
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "unit") return ContinuousMeasure::unit();
        std::smatch m;
        if (std::regex_match(s, m, pd)) return ContinuousMeasure::power_damped(std::stod(m[1].str()));
        throw ConfigError("config: unknown continuous measure id '" + s + "'");
    }
    if (v.is_object() && v.value("family", "") == "tabulated") {
        return ContinuousMeasure::tabulated(v.at("knots").get<std::vector<double>>(),
                                            v.at("values").get<std::vector<double>>(),
                                            v.at("tail_exponent").get<double>());
    }
    throw ConfigError("config: measures.continuous must be an id string or a tabulated object");
}

DiscreteMeasure discrete_from(const Json& v, double beta) {
    static const std::regex ps(R"(^\s*power_seq\(\s*([-+0-9.eE]+)\s*\)\s*$)");
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "unit") return DiscreteMeasure::unit(beta);
        std::smatch m;
        if (std::regex_match(s, m, ps)) return DiscreteMeasure::power_seq(std::stod(m[1].str()), beta);
        throw ConfigError("config: unknown discrete measure id '" + s + "'");
    }
    if (v.is_object() && v.value("family", "") == "tabulated") {
        return DiscreteMeasure::tabulated(v.at("nu").get<std::vector<double>>(), v.at("tail_exponent").get<double>(),
                                          beta);
    }
    throw ConfigError("config: measures.discrete must be an id string or a tabulated object");
}

}  // namespace

Json default_config() {
    const Tolerances t;
    const GridSpec g;
    return Json{
        {"preset", nullptr},
        {"kernel", {{"rho", 1.0}, {"alpha", 1.0}, {"gamma", 0.5}, {"sigma", 1.0}}},
        {"delta", 1},
        {"measures", {{"continuous", "unit"}, {"discrete", "unit"}, {"beta", 0.0}}},
        {"p", 2.0},
        {"weights", "auto"},
        {"tolerances", {{"quad", t.quad}, {"sum", t.sum}, {"guard", t.guard}}},
        {"grid",
         {{"x", {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}},
          {"n", {1, 2, 5, 10, 100}},
          {"random_x", 0},
          {"x_lo", 1e-3},
          {"x_hi", 1e3}}},
        {"test", test_defaults()},
        {"sharpness", {{"eps", nullptr}}},
        {"opnorm",
         {{"x_lo", g.x_lo},
          {"x_hi", g.x_hi},
          {"nx", g.nx},
          {"n_max", g.n_max},
          {"tail_eps", g.tail_eps},
          {"ladder", true},
          {"plain", true}}},
        {"seed", 0},
    };
}

std::vector<std::string> preset_names() { return {"Cor51", "Cor52", "Cor53", "Cor54", "Remark55"}; }

Json preset_config(const std::string& name) {
    const Json damped = {{"continuous", "power_damped(0.5)"}, {"discrete", "power_seq(0.5)"}, {"beta", 0.25}};
    const Json unit = {{"continuous", "unit"}, {"discrete", "unit"}, {"beta", 0.0}};
    if (name == "Cor51")
        return {{"kernel", {{"rho", 1.0}, {"alpha", 0.5}, {"gamma", 0.4}, {"sigma", 0.8}}}, {"delta", 1}, {"measures", damped}};
    if (name == "Cor52")
        return {{"kernel", {{"rho", 1.0}, {"alpha", 0.5}, {"gamma", 0.4}, {"sigma", 0.8}}}, {"delta", -1}, {"measures", damped}};
    if (name == "Cor53")
        return {{"kernel", {{"rho", 1.0}, {"alpha", 1.0}, {"gamma", 0.4}, {"sigma", 0.9}}}, {"delta", 1}, {"measures", damped}};
    if (name == "Cor54")
        return {{"kernel", {{"rho", 1.0}, {"alpha", 1.0}, {"gamma", 0.5}, {"sigma", 1.0}}}, {"delta", 1}, {"measures", unit}};
    if (name == "Remark55")
        return {{"kernel", {{"rho", 1.0}, {"alpha", 0.0}, {"gamma", 0.5}, {"sigma", 0.9}}}, {"delta", 1}, {"measures", unit}};
    throw ConfigError("unknown preset '" + name + "' (expected Cor51, Cor52, Cor53, Cor54 or Remark55)");
}

Json resolve_config(const Overrides& o) {
    Json cfg = default_config();
    Json file;
    if (o.config_path) {
        std::ifstream in(*o.config_path);
        if (!in) throw ConfigError("cannot open config file '" + *o.config_path + "'");
        try {
            file = Json::parse(in);
        } catch (const Json::exception& e) {
            throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    }
    std::optional<std::string> preset = o.preset;
    if (!preset && file.contains("preset") && !file["preset"].is_null()) {
        if (!file["preset"].is_string()) throw ConfigError("config: 'preset' must be a string");
        preset = file["preset"].get<std::string>();
    }
    if (preset) {
        merge_into(cfg, preset_config(*preset), "");
        cfg["preset"] = *preset;
    }
    if (!file.is_null()) {
        Json f = file;
        f.erase("preset");
        merge_into(cfg, f, "");
    }
    for (const auto& kv : o.sets) merge_into(cfg, set_to_patch(kv), "");
    if (o.tol_quad) cfg["tolerances"]["quad"] = *o.tol_quad;
    if (o.tol_sum) cfg["tolerances"]["sum"] = *o.tol_sum;
    if (o.seed) cfg["seed"] = *o.seed;

    // structural checks that do not need the numerics
    const Tolerances t = tolerances_from_config(cfg);
    if (!(t.quad > 0 && t.sum > 0 && t.guard > 0)) throw ConfigError("config: tolerances must be positive");
    const Json& d = cfg["delta"];
    if (!d.is_number_integer() || (d.get<int>() != 1 && d.get<int>() != -1)) throw ConfigError("config: delta must be 1 or -1");
    const std::string w = cfg["weights"].get<std::string>();
    if (w != "auto" && w != "phi" && w != "phi_tilde") throw ConfigError("config: weights must be auto, phi or phi_tilde");
    const Json& eps = cfg["sharpness"]["eps"];
    if (!eps.is_null()) {
        if (!eps.is_array() || eps.empty()) throw ConfigError("config: sharpness.eps must be null or a non-empty list");
        for (const auto& e : eps)
            if (!e.is_number()) throw ConfigError("config: sharpness.eps entries must be numbers");
    }
    for (const auto& x : cfg["grid"]["x"])
        if (!x.is_number() || !(x.get<double>() > 0)) throw ConfigError("config: grid.x entries must be positive numbers");
    for (const auto& n : cfg["grid"]["n"])
        if (!n.is_number_integer() || n.get<long>() < 1) throw ConfigError("config: grid.n entries must be integers >= 1");
    if (!cfg["seed"].is_number_integer() || cfg["seed"].get<long long>() < 0) throw ConfigError("config: seed must be a nonnegative integer");
    return cfg;
}

Scheme scheme_from_config(const Json& c) {
    Scheme s;
    s.params.rho = get_num(c, "kernel", "rho");
    s.params.alpha = get_num(c, "kernel", "alpha");
    s.params.gamma = get_num(c, "kernel", "gamma");
    s.params.sigma = get_num(c, "kernel", "sigma");
    s.delta = c.at("delta").get<int>();
    s.cm = continuous_from(c.at("measures").at("continuous"));
    s.dm = discrete_from(c.at("measures").at("discrete"), get_num(c, "measures", "beta"));
    s.validate();
    return s;
}

Tolerances tolerances_from_config(const Json& c) {
    Tolerances t;
    t.quad = get_num(c, "tolerances", "quad");
    t.sum = get_num(c, "tolerances", "sum");
    t.guard = get_num(c, "tolerances", "guard");
    return t;
}

TestFunctionSpec test_spec_from_config(const Json& c) {
    const Json& j = c.at("test");
    TestFunctionSpec t;
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "smooth") t.family = TestFamily::SmoothPositive;
    else if (fam == "extremal") t.family = TestFamily::ExtremalCutoff;
    else if (fam == "tabulated") t.family = TestFamily::Tabulated;
    else throw ConfigError("config: test.family must be smooth, extremal or tabulated");
    const std::string fs = j.at("f_shape").get<std::string>();
    if (fs == "u_power") t.f_shape = FShape::UPower;
    else if (fs == "x_exp_power") t.f_shape = FShape::XExpPower;
    else throw ConfigError("config: test.f_shape must be u_power or x_exp_power");
    const std::string as = j.at("a_shape").get<std::string>();
    if (as == "v_power") t.a_shape = AShape::VPower;
    else if (as == "index_power") t.a_shape = AShape::IndexPower;
    else throw ConfigError("config: test.a_shape must be v_power or index_power");
    t.eps = j.at("eps").get<double>();
    t.f_scale = j.at("f_scale").get<double>();
    t.f_e0 = j.at("f_e0").get<double>();
    t.f_einf = j.at("f_einf").get<double>();
    t.f_power = j.at("f_power").get<double>();
    t.f_lambda = j.at("f_lambda").get<double>();
    t.a_scale = j.at("a_scale").get<double>();
    t.a_d = j.at("a_d").get<double>();
    t.a_s = j.at("a_s").get<double>();
    t.f_knots = j.at("f_knots").get<std::vector<double>>();
    t.f_values = j.at("f_values").get<std::vector<double>>();
    t.f_slope_lo = j.at("f_slope_lo").get<double>();
    t.f_slope_hi = j.at("f_slope_hi").get<double>();
    t.a_values = j.at("a_values").get<std::vector<double>>();
    t.a_tail = j.at("a_tail").get<double>();
    return t;
}

NormWeights weights_from_config(const Json& c, const HolderPair& hp) {
    const std::string w = c.at("weights").get<std::string>();
    if (w == "phi") return NormWeights{WeightKind::Phi};
    if (w == "phi_tilde") return NormWeights{WeightKind::PhiTilde};
    return NormWeights::for_regime(hp.regime);
}

namespace {

// ---- commands --------------------------------------------------------------------

void cmd_constant(const Json& c, Report& rep) {
    const Scheme s = scheme_from_config(c);
    const Tolerances tol = tolerances_from_config(c);
    const KernelParams& kp = s.params;
    const KernelConstant a = kernel_constant_closed(kp);
    const KernelConstant b = kernel_constant_quadrature(kp, tol.quad);
    const double rel = std::fabs(a.value - b.value) / a.value;
    const bool agree = rel <= 1e-8;
    rep.line(cols({"zeta_order", num(kp.zeta_order())}));
    rep.line(cols({"zeta_shift", num(kp.zeta_shift())}));
    rep.line(cols({"method", "value", "err_estimate"}));
    rep.line(cols({"closed_form", num(a.value), num(a.err_estimate)}));
    rep.line(cols({"quadrature", num(b.value), num(b.err_estimate)}));
    rep.line(cols({"rel_diff", num(rel)}));
    rep.line(cols({"agree_1e-8", agree ? "true" : "false"}));
    rep.record({{"type", "constant"}, {"method", "closed_form"}, {"value", a.value}, {"err", a.err_estimate}});
    rep.record({{"type", "constant"}, {"method", "quadrature"}, {"value", b.value}, {"err", b.err_estimate}});
    rep.record({{"type", "agreement"},
                {"zeta_order", kp.zeta_order()},
                {"zeta_shift", kp.zeta_shift()},
                {"rel_diff", rel},
                {"agree", agree}});
    rep.verdict(agree);
}

std::vector<double> x_points(const Json& c) {
    std::vector<double> xs = c.at("grid").at("x").get<std::vector<double>>();
    const long extra = c.at("grid").at("random_x").get<long>();
    if (extra > 0) {
        const double lo = get_num(c, "grid", "x_lo"), hi = get_num(c, "grid", "x_hi");
        if (!(lo > 0 && hi > lo)) throw ConfigError("config: grid.x_lo/x_hi must satisfy 0 < x_lo < x_hi");
        std::mt19937_64 rng(c.at("seed").get<unsigned long long>());
        for (long i = 0; i < extra; ++i) {
            const double u = double(rng() >> 11) * 0x1.0p-53;
            xs.push_back(std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))));
        }
    }
    return xs;
}

void cmd_weights(const Json& c, Report& rep) {
    const Scheme s = scheme_from_config(c);
    const Tolerances tol = tolerances_from_config(c);
    const std::vector<double> xs = x_points(c);
    const std::vector<long> ns = c.at("grid").at("n").get<std::vector<long>>();

    rep.line(cols({"x", "omega", "k", "theta", "omega<k", "omega>k(1-theta)"}));
    for (double x : xs) {
        try {
            const WeightReport w = weight_report(s, x, tol.quad, tol.guard);
            const std::string lower = w.lower_applies ? to_string(w.above_lower) : "n/a";
            rep.line(cols({num(x), num(w.omega), num(w.k_value), num(w.theta_value), to_string(w.below_k), lower}));
            rep.record({{"type", "omega"},
                        {"x", x},
                        {"omega", w.omega},
                        {"omega_err", w.omega_err},
                        {"k", w.k_value},
                        {"theta", w.theta_value},
                        {"one_minus_theta", w.one_minus_theta},
                        {"below_k", to_string(w.below_k)},
                        {"above_lower", lower}});
            rep.verdict(w.below_k);
            if (w.lower_applies) rep.verdict(w.above_lower);
        } catch (const ConvergenceError& e) {
            rep.line(cols({num(x), "error", e.what()}));
            rep.record({{"type", "omega"}, {"x", x}, {"error", e.what()}});
            rep.convergence_failure();
        }
    }
    rep.line("");
    rep.line(cols({"n", "varpi", "varpi_subst", "k", "varpi<=k", "varpi=k"}));
    for (long n : ns) {
        try {
            const VarpiReport v = varpi_report(s, n, tol.quad);
            const std::string eq = v.equality_applies ? to_string(v.equals_k) : "n/a";
            rep.line(cols({std::to_string(n), num(v.varpi), num(v.varpi_subst), num(v.k_value), to_string(v.at_most_k), eq}));
            rep.record({{"type", "varpi"},
                        {"n", n},
                        {"varpi", v.varpi},
                        {"varpi_subst", v.varpi_subst},
                        {"err", v.err},
                        {"k", v.k_value},
                        {"at_most_k", to_string(v.at_most_k)},
                        {"equals_k", eq}});
            rep.verdict(v.at_most_k);
            if (v.equality_applies) rep.verdict(v.equals_k);
        } catch (const ConvergenceError& e) {
            rep.line(cols({std::to_string(n), "error", e.what()}));
            rep.record({{"type", "varpi"}, {"n", n}, {"error", e.what()}});
            rep.convergence_failure();
        }
    }
}

void cmd_verify(const Json& c, Report& rep) {
    const Scheme s = scheme_from_config(c);
    const Tolerances tol = tolerances_from_config(c);
    const HolderPair hp = HolderPair::from_p(get_num(c, "p"));
    const NormWeights w = weights_from_config(c, hp);
    const TestFunctionSpec t = test_spec_from_config(c);
    const VerificationReport r = verify(hp, t, s, w, tol);
    const char* rel = hp.regime == Regime::Forward ? "<" : ">";
    rep.line(cols({"regime", to_string(r.regime)}));
    rep.line(cols({"weights", to_string(r.weights)}));
    rep.line(cols({"p", num(hp.p)}));
    rep.line(cols({"q", num(hp.q)}));
    rep.line(cols({"k", num(r.k_value)}));
    rep.line(cols({"norm_f", num(r.norm_f), num(r.rel_err_f)}));
    rep.line(cols({"norm_a", num(r.norm_a), num(r.rel_err_a)}));
    rep.line(cols({"relation", "value", "bound", "slack", "verdict"}));
    const double bounds[3] = {r.k_value * r.norm_f * r.norm_a, r.k_value * r.norm_f, r.k_value * r.norm_a};
    const double values[3] = {r.I, r.J1, r.J2_or_J};
    const char* names[3] = {"I", "J1", r.weights == WeightKind::PhiTilde ? "J" : "J2"};
    for (int i = 0; i < 3; ++i) {
        rep.line(cols({std::string(names[i]) + " " + rel + " bound", num(values[i]), num(bounds[i]), num(r.slack[i]),
                       to_string(r.verdicts[i])}));
        rep.record({{"type", "relation"},
                    {"name", names[i]},
                    {"relation", rel},
                    {"value", values[i]},
                    {"bound", bounds[i]},
                    {"slack", r.slack[i]},
                    {"verdict", to_string(r.verdicts[i])}});
        rep.verdict(r.verdicts[i]);
    }
    if (hp.regime == Regime::Forward) {
        const EquivalenceResult e = equivalence_substitution_check(t, hp, s, 1e-8, tol);
        rep.line(cols({"J1^p vs |a|^q", num(e.J1p), num(e.norm_a_q), num(e.rel_diff_1)}));
        rep.line(cols({"J2^q vs |f|^p", num(e.J2q), num(e.norm_f_p), num(e.rel_diff_2)}));
        rep.line(cols({"substitution", e.holds ? "true" : "false"}));
        rep.record({{"type", "substitution"},
                    {"J1p", e.J1p},
                    {"norm_a_q", e.norm_a_q},
                    {"rel_diff_1", e.rel_diff_1},
                    {"J2q", e.J2q},
                    {"norm_f_p", e.norm_f_p},
                    {"rel_diff_2", e.rel_diff_2},
                    {"holds", e.holds}});
        rep.verdict(e.holds);
    }
}

void cmd_sharpness(const Json& c, Report& rep) {
    const Scheme s = scheme_from_config(c);
    const Tolerances tol = tolerances_from_config(c);
    const HolderPair hp = HolderPair::from_p(get_num(c, "p"));
    std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
    const Json& je = c.at("sharpness").at("eps");
    if (!je.is_null()) {
        eps = je.get<std::vector<double>>();
        const double emax = extremal_eps_max(hp, s.params);
        for (double e : eps) {
            if (!(e > 0.0 && e < emax)) throw DomainError("sharpness: eps = " + num(e) + " outside (0, " + num(emax) + ")");
        }
    }
    const SharpnessTrace tr = sharpness_trace(eps, hp, s, tol);
    rep.line(cols({"regime", to_string(tr.regime)}));
    rep.line(cols({"eps", "R", "I", "norm_f", "norm_a", "rel_err"}));
    for (const auto& p : tr.points) {
        if (p.ok) {
            rep.line(cols({num(p.eps), num(p.ratio), num(p.I), num(p.norm_f), num(p.norm_a), num(p.rel_err)}));
            rep.record({{"type", "point"},
                        {"eps", p.eps},
                        {"R", p.ratio},
                        {"I", p.I},
                        {"norm_f", p.norm_f},
                        {"norm_a", p.norm_a},
                        {"rel_err", p.rel_err}});
        } else {
            rep.line(cols({num(p.eps), "error", p.error}));
            rep.record({{"type", "point"}, {"eps", p.eps}, {"error", p.error}});
            rep.convergence_failure();
        }
    }
    const char* side = tr.regime == Regime::Forward ? "R<k" : "R>k";
    rep.line("");
    rep.line(cols({"k", num(tr.k_value)}));
    rep.line(cols({"linear_limit", num(tr.extrapolated_limit)}));
    rep.line(cols({"linear_slope", num(tr.slope)}));
    rep.line(cols({"fit_residual", num(tr.fit_residual)}));
    rep.line(cols({"quadratic_limit", num(tr.quadratic_limit)}));
    rep.line(cols({side, to_string(tr.bound)}));
    rep.line(cols({"monotone_toward_k", to_string(tr.monotone)}));
    rep.line(cols({"limit_within_1pct", tr.limit_ok ? "true" : "false"}));
    rep.record({{"type", "trace"},
                {"regime", to_string(tr.regime)},
                {"k", tr.k_value},
                {"linear_limit", tr.extrapolated_limit},
                {"linear_slope", tr.slope},
                {"fit_residual", tr.fit_residual},
                {"quadratic_limit", std::isnan(tr.quadratic_limit) ? Json(nullptr) : Json(tr.quadratic_limit)},
                {"bound", to_string(tr.bound)},
                {"monotone", to_string(tr.monotone)},
                {"limit_ok", tr.limit_ok}});
    rep.verdict(tr.bound);
    rep.verdict(tr.monotone);
    rep.verdict(tr.limit_ok);
}

void cmd_opnorm(const Json& c, Report& rep) {
    const Scheme s = scheme_from_config(c);
    const Tolerances tol = tolerances_from_config(c);
    const HolderPair hp = HolderPair::from_p(get_num(c, "p"));
    if (hp.regime != Regime::Forward) throw DomainError("opnorm: defined for p > 1 only");
    const Json& o = c.at("opnorm");
    GridSpec g;
    g.x_lo = get_num(o, "x_lo");
    g.x_hi = get_num(o, "x_hi");
    g.nx = o.at("nx").get<int>();
    g.n_max = o.at("n_max").get<long>();
    g.tail_eps = get_num(o, "tail_eps");
    const std::vector<GridSpec> ladder = o.at("ladder").get<bool>() ? default_ladder(g) : std::vector<GridSpec>{g};
    const bool plain = o.at("plain").get<bool>();
    const LadderResult lr = opnorm_ladder(s, hp, ladder, tol, plain);

    rep.line(cols({"x_lo", "x_hi", "nx", "n_max", "estimate", "estimate/k", "plain", "iterations"}, 14));
    for (std::size_t i = 0; i < lr.results.size(); ++i) {
        const auto& sp = lr.specs[i];
        const auto& r = lr.results[i];
        const double pl = plain ? lr.plain[i] : std::nan("");
        char ratio[32];
        std::snprintf(ratio, sizeof ratio, "%.6f", r.estimate / lr.k_value);
        char xl[32], xh[32], est[32], pls[32];
        std::snprintf(xl, sizeof xl, "%.4g", sp.x_lo);
        std::snprintf(xh, sizeof xh, "%.4g", sp.x_hi);
        std::snprintf(est, sizeof est, "%.10f", r.estimate);
        std::snprintf(pls, sizeof pls, "%.10f", pl);
        rep.line(cols({xl, xh, std::to_string(sp.nx), std::to_string(sp.n_max), est, ratio, plain ? pls : "-",
                       std::to_string(r.iterations)},
                      14));
        rep.record({{"type", "level"},
                    {"x_lo", sp.x_lo},
                    {"x_hi", sp.x_hi},
                    {"nx", sp.nx},
                    {"n_max", sp.n_max},
                    {"tail_eps", sp.tail_eps},
                    {"estimate", r.estimate},
                    {"err", r.err},
                    {"plain", plain ? Json(pl) : Json(nullptr)},
                    {"iterations", r.iterations}});
    }
    const auto& fin = lr.results.back();
    bool all_under = true;
    for (const auto& r : lr.results) all_under = all_under && r.estimate <= lr.k_value + 1e-3 + r.err;
    rep.line("");
    rep.line(cols({"k", num(lr.k_value)}));
    rep.line(cols({"gap_to_k", num(lr.k_value - fin.estimate)}));
    rep.line(cols({"monotone_ladder", lr.monotone ? "true" : "false"}));
    rep.line(cols({"not_above_k+1e-3", all_under ? "true" : "false"}));
    rep.record({{"type", "opnorm"},
                {"k", lr.k_value},
                {"gap_to_k", lr.k_value - fin.estimate},
                {"monotone", lr.monotone},
                {"not_above_k", all_under}});
    rep.verdict(lr.monotone);
    rep.verdict(all_under);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Half-discrete Hilbert-type inequality toolkit"};
    app.set_version_flag("--version", std::string("hhineq ") + kVersion);
    app.require_subcommand(1, 1);
    Overrides ov;
    std::string config_path, preset, out_path;
    double tol_quad = 0, tol_sum = 0;
    unsigned long long seed = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--preset", preset, "Cor51 | Cor52 | Cor53 | Cor54 | Remark55");
    app.add_option("--set", ov.sets, "override a config value: key.path=value (repeatable)");
    app.add_option("--out", out_path, "write newline-delimited JSON records here");
    app.add_option("--tol-quad", tol_quad, "quadrature relative tolerance");
    app.add_option("--tol-sum", tol_sum, "series relative tolerance");
    app.add_option("--seed", seed, "seed for randomized x points");
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"constant", "kernel constant by closed form and by quadrature"},
        {"weights", "weight coefficients and their bounds on a grid"},
        {"verify", "check the inequality triple for a test pair"},
        {"sharpness", "extremal-family trace toward the constant"},
        {"opnorm", "discretized operator norm on a ladder of grids"},
    };
    for (const auto& [name, desc] : cmds) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (app.count("--config")) ov.config_path = config_path;
    if (app.count("--preset")) ov.preset = preset;
    if (app.count("--tol-quad")) ov.tol_quad = tol_quad;
    if (app.count("--tol-sum")) ov.tol_sum = tol_sum;
    if (app.count("--seed")) ov.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    Json cfg;
    Report rep;
    int code = kExitOk;
    std::string failure;
    try {
        cfg = resolve_config(ov);
        if (command == "constant") cmd_constant(cfg, rep);
        else if (command == "weights") cmd_weights(cfg, rep);
        else if (command == "verify") cmd_verify(cfg, rep);
        else if (command == "sharpness") cmd_sharpness(cfg, rep);
        else cmd_opnorm(cfg, rep);
        code = rep.exit_code();
    } catch (const ConvergenceError& e) {
        failure = std::string("convergence error: ") + e.what() + " (best value " + num(e.partial_value) + ", err " +
                  num(e.err_estimate) + ")";
        code = kExitConvergence;
    } catch (const ConfigError& e) {
        failure = std::string("config error: ") + e.what();
        code = kExitConfig;
    } catch (const DomainError& e) {
        failure = std::string("domain error: ") + e.what();
        code = kExitConfig;
    } catch (const Json::exception& e) {
        failure = std::string("config error: ") + e.what();
        code = kExitConfig;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    out << "# hhineq " << kVersion << "\n";
    out << "# command: " << command << "\n";
    if (!cfg.is_null()) {
        const Tolerances t = tolerances_from_config(cfg);
        out << "# tolerances: quad=" << num(t.quad) << " sum=" << num(t.sum) << " guard=" << num(t.guard) << "\n";
        out << "# config: " << cfg.dump() << "\n";
    } else {
        const Tolerances t;
        out << "# tolerances: quad=" << num(t.quad) << " sum=" << num(t.sum) << " guard=" << num(t.guard) << "\n";
    }
    for (const auto& l : rep.body()) out << l << "\n";
    if (!failure.empty()) {
        out << "error: " << failure << "\n";
        err << failure << "\n";
    }
    out << "# exit: " << code << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", elapsed);
    out << "# elapsed_s: " << buf << "\n";

    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) {
            err << "cannot write '" << out_path << "'\n";
            return kExitConfig;
        }
        f << Json{{"type", "header"}, {"version", kVersion}, {"command", command}, {"config", cfg}}.dump() << "\n";
        for (const auto& r : rep.records()) f << r.dump() << "\n";
        Json summary{{"type", "summary"}, {"exit", code}};
        if (!failure.empty()) summary["error"] = failure;
        f << summary.dump() << "\n";
    }
    return code;
}

}  // namespace hhi::cli
