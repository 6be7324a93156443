#pragma once

#include "eqflow/core.hpp"
#include "eqflow/flowfield.hpp"
#include "eqflow/newton.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqflow::cli {

/// Malformed or invalid configuration; exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DensityConfig {
    std::string model = "constant";  // constant | linear-depth | latitude-quadratic | tabulated
    double rho0 = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::string file;  // tabulated: CSV r,theta,rho
};

struct ProfileConfig {
    std::string model = "zero";  // zero | linear | tabulated
    double k = 0.0;
    std::string file;  // tabulated: CSV x,F
};

struct SolverConfig {
    int degree = 32;
    int samples = 129;
    std::string stratification = "table";  // table | direct
    int table_y = 64;
    int table_theta = 33;
    int max_iterations = 50;
    int max_halvings = 8;
    double trust = 1e-3;
    int continuation_steps = 1;
    int grid_nr = 50;
    int grid_ntheta = 50;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv"};  // json adds a JSON copy of each table
    bool csv() const;
    bool json() const;
};

struct RunConfig {
    std::string preset;  // empty when none
    Parameters parameters;
    DensityConfig density;
    ProfileConfig profile;
    SolverConfig solver;
    OutputConfig output;
    std::filesystem::path base_dir;  // relative file paths resolve against this
};

const std::vector<std::string>& preset_names();
/// Embedded YAML text of a preset; ConfigError for unknown names.
const std::string& preset_text(const std::string& name);

/// Parses YAML onto `base` (strict keys; errors carry line numbers).
RunConfig parse_config(const std::string& yaml_text, const std::string& source, RunConfig base);
RunConfig load_config(const std::filesystem::path& path, const std::string& preset);

void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

// Model construction from a configuration.
DensityModel build_density(const RunConfig& cfg);
AzimuthalProfile build_profile(const RunConfig& cfg);
FlowOptions flow_options(const RunConfig& cfg);
NewtonOptions newton_options(const RunConfig& cfg);

}  // namespace eqflow::cli
