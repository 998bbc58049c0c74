#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "interstitial/heuristics.hpp"

namespace interstitial::cli {

/// Every tunable of the pipeline. Defaults reproduce the reference
/// configuration, so running with no flags is the reference setup.
struct RunConfig {
    heuristics::AnalysisParams analysis;
    std::uint64_t seed = 0;
    int workers = 1;
    bool json = false;
};

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
RunConfig apply_config(const nlohmann::json& j, RunConfig base);
nlohmann::json to_json(const RunConfig& config);

/// Exit codes of `analyze`. Anything above kExitUnlabeled is a failure.
enum ExitCode : int {
    kExitYes = 0,
    kExitNo = 1,
    kExitUnlabeled = 2,
    kExitError = 3,
};

constexpr int kExitOk = 0;

/// Parses argv and runs one subcommand: analyze, scan, features, train, eval,
/// synth or spread. Primary output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace interstitial::cli
