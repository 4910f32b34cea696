#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "hhi/errors.hpp"

using namespace hhi;
using namespace hhi::cli;

namespace {
struct RunOut {
    int code;
    std::string out, err;
};

RunOut run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hhi");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// report without the timing footer
std::string body(const std::string& report) {
    std::istringstream in(report);
    std::string line, r;
    while (std::getline(in, line))
        if (line.rfind("# elapsed_s", 0) != 0) r += line + "\n";
    return r;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}
}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("presets expand to their hypotheses") {
        for (const std::string& name : preset_names()) {
            Overrides o;
            o.preset = name;
            const Json c = resolve_config(o);
            const Scheme s = scheme_from_config(c);
            CHECK_NOTHROW(s.validate());
            CHECK(s.cm.u_infinite());
            CHECK(s.dm.v_infinite());
            if (name == "Cor51" || name == "Cor53" || name == "Cor54" || name == "Remark55") CHECK(s.delta == 1);
            if (name == "Cor52") CHECK(s.delta == -1);
            if (name == "Cor53" || name == "Cor54") CHECK(s.params.alpha == s.params.rho);
            if (name == "Cor54") {
                CHECK(s.params.gamma == s.params.sigma / 2);
                CHECK(s.params.sigma == 1.0);
                CHECK(s.params.rho == 1.0);
            }
            if (name == "Remark55") {
                CHECK(s.cm.family() == ContinuousFamily::UnitDensity);
                CHECK(s.dm.family() == DiscreteFamily::UnitSequence);
            }
        }
        Overrides bad;
        bad.preset = "Cor99";
        CHECK_THROWS_AS(resolve_config(bad), ConfigError);
    }

    TEST_CASE("config layering") {
        const auto path = temp_file("hhi_cfg_layer.json", R"({"kernel": {"sigma": 0.9}, "p": 3})");
        Overrides o;
        o.preset = "Cor54";
        o.config_path = path.string();
        o.sets = {"kernel.gamma=0.3", "measures.beta=0.25"};
        o.tol_quad = 1e-9;
        const Json c = resolve_config(o);
        CHECK(c["kernel"]["sigma"].get<double>() == 0.9);
        CHECK(c["kernel"]["gamma"].get<double>() == 0.3);
        CHECK(c["kernel"]["rho"].get<double>() == 1.0);
        CHECK(c["p"].get<double>() == 3.0);
        CHECK(c["measures"]["beta"].get<double>() == 0.25);
        CHECK(tolerances_from_config(c).quad == 1e-9);
        CHECK(tolerances_from_config(c).sum == 1e-8);
        std::filesystem::remove(path);
    }

    TEST_CASE("invalid configs are rejected") {
        Overrides o;
        o.sets = {"kernel.nope=1"};
        CHECK_THROWS_AS(resolve_config(o), ConfigError);
        o.sets = {"kernel.rho=\"one\""};
        CHECK_THROWS_AS(resolve_config(o), ConfigError);
        o.sets = {"no_equals_sign"};
        CHECK_THROWS_AS(resolve_config(o), ConfigError);
        const auto broken = temp_file("hhi_cfg_broken.json", "{\"p\": ");
        Overrides f;
        f.config_path = broken.string();
        CHECK_THROWS_AS(resolve_config(f), ConfigError);
        f.config_path = "/nonexistent/hhi.json";
        CHECK_THROWS_AS(resolve_config(f), ConfigError);
        std::filesystem::remove(broken);
    }

    TEST_CASE("constant report") {
        const RunOut r = run_cli({"constant", "--preset", "Cor54"});
        CHECK(r.code == kExitOk);
        CHECK(r.out.find("closed_form           1.64493406684823") != std::string::npos);
        CHECK(r.out.find("quadrature            1.64493406684823") != std::string::npos);
        CHECK(r.out.find("# tolerances: quad=1e-10 sum=1e-08 guard=1e-06") != std::string::npos);
        CHECK(r.out.find("# hhineq 0.1.0") != std::string::npos);
    }

    TEST_CASE("violated parameter gate is named") {
        const RunOut r = run_cli({"constant", "--set", "kernel.gamma=1.0"});
        CHECK(r.code == kExitConfig);
        CHECK(r.err.find("0<γ<σ≤1") != std::string::npos);
        const RunOut b = run_cli({"weights", "--set", "measures.beta=0.75"});
        CHECK(b.code == kExitConfig);
        const RunOut z = run_cli({"verify", "--preset", "Cor54", "--set", "test.f_scale=0"});
        CHECK(z.code == kExitConfig);
        const RunOut e = run_cli({"sharpness", "--preset", "Cor54", "--set", "sharpness.eps=[0.6]"});
        CHECK(e.code == kExitConfig);
    }

    TEST_CASE("one fixture per exit code") {
        CHECK(run_cli({"weights", "--preset", "Cor54"}).code == kExitOk);
        // two coarse eps: the linear limit misses the constant by far more than 1%
        CHECK(run_cli({"sharpness", "--preset", "Cor54", "--set", "sharpness.eps=[0.4,0.3]"}).code == kExitFalse);
        // a guard of 90% leaves every strict comparison unresolved
        CHECK(run_cli({"weights", "--preset", "Cor54", "--set", "tolerances.guard=0.9"}).code == kExitIndeterminate);
        CHECK(run_cli({"verify", "--set", "nonsense=1"}).code == kExitConfig);
        // a quadrature tolerance below double resolution cannot be met
        CHECK(run_cli({"verify", "--preset", "Cor54", "--tol-quad", "1e-17"}).code == kExitConvergence);
    }

    TEST_CASE("reports are deterministic") {
        const std::vector<std::string> args{"weights", "--preset", "Cor51", "--set", "grid.random_x=5", "--seed", "7"};
        const RunOut a = run_cli(args);
        const RunOut b = run_cli(args);
        CHECK(a.code == b.code);
        CHECK(body(a.out) == body(b.out));
        const RunOut c = run_cli({"weights", "--preset", "Cor51", "--set", "grid.random_x=5", "--seed", "8"});
        CHECK(body(a.out) != body(c.out));
    }

    TEST_CASE("newline-delimited records") {
        const auto path = std::filesystem::temp_directory_path() / "hhi_records.ndjson";
        const RunOut r = run_cli({"verify", "--preset", "Cor54", "--out", path.string()});
        CHECK(r.code == kExitOk);
        std::ifstream in(path);
        std::string line;
        std::vector<Json> recs;
        while (std::getline(in, line)) recs.push_back(Json::parse(line));
        REQUIRE(recs.size() >= 3);
        CHECK(recs.front().contains("config"));
        CHECK(recs.back()["type"] == "summary");
        CHECK(recs.back()["exit"] == 0);
        std::filesystem::remove(path);
    }
}
