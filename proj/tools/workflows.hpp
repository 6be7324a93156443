#pragma once

#include "config.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace eqflow::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kConfigError = 2,
    kStiffness = 3,
    kNoConvergence = 4,
};

int run_baseline(const RunConfig& cfg, std::ostream& log);
int run_fields(const RunConfig& cfg, std::ostream& log);
int run_respond(const RunConfig& cfg, const std::filesystem::path& pressure_file, std::ostream& log);
int run_verify(const RunConfig& cfg, std::ostream& log);

struct CheckResult {
    std::string name;
    std::string status;  // pass | fail | not-applicable | refused
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    nlohmann::json data = nlohmann::json::object();

    bool failed() const { return status == "fail"; }
};

/// Every cross-check of the verify workflow, in report order.
std::vector<CheckResult> verification_checks(const RunConfig& cfg);

}  // namespace eqflow::cli
