#pragma once
// Command-line front end: config resolution, presets, report writing.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hhi/inequality.hpp"
#include "hhi/sharpness.hpp"

namespace hhi::cli {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFalse = 1,
    kExitIndeterminate = 2,
    kExitConfig = 3,
    kExitConvergence = 4,
};

/// Every accepted key with its default. Configs may only set keys present here.
Json default_config();
/// Parameter block for a named preset (Cor51, Cor52, Cor53, Cor54, Remark55).
Json preset_config(const std::string& name);
std::vector<std::string> preset_names();

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::vector<std::string> sets;  // key.path=value
    std::optional<double> tol_quad;
    std::optional<double> tol_sum;
    std::optional<unsigned long long> seed;
};

/// defaults <- preset <- config file <- --set <- dedicated flags. Throws ConfigError.
Json resolve_config(const Overrides& o);

Scheme scheme_from_config(const Json& c);
Tolerances tolerances_from_config(const Json& c);
TestFunctionSpec test_spec_from_config(const Json& c);
NormWeights weights_from_config(const Json& c, const HolderPair& hp);

/// Runs the CLI; returns the process exit code. Report to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hhi::cli
