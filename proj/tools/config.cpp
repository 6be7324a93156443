#include "config.hpp"

#include "io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace eqflow::cli {

namespace {

// Desk-scale presets keep sqrt(|gamma|/d) eps of order one.
const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> m{
        {"desk", R"(parameters:
  Omega: 0.1
  g: 1.0
  sigma: 0.1
  P_atm: 1.0
  R: 1.0
  a: 0.5
  eps: 0.5
  tol_ode: 1.0e-12
density:
  model: constant
  rho0: 1.0
profile:
  model: linear
  k: 0.02
)"},
        {"desk-linear", R"(parameters:
  Omega: 0.1
  g: 1.0
  sigma: 0.1
  P_atm: 1.0
  R: 1.0
  a: 0.5
  eps: 0.5
  tol_ode: 1.0e-12
density:
  model: linear-depth
  rho0: 1.0
  alpha: 0.5
profile:
  model: linear
  k: 0.02
)"},
        {"desk-stratified", R"(parameters:
  Omega: 0.1
  g: 1.0
  sigma: 0.1
  P_atm: 1.0
  R: 1.0
  a: 0.5
  eps: 0.5
  tol_ode: 1.0e-12
density:
  model: latitude-quadratic
  rho0: 1.0
  alpha: 0.5
  beta: 1.0
profile:
  model: linear
  k: 0.02
)"},
        // Earth and ocean values in SI units
        {"physical", R"(parameters:
  Omega: 7.29e-5
  g: 9.81
  sigma: 0.0728
  P_atm: 101325
  R: 6.37e6
  a: 6.36e6
  eps: 0.016
density:
  model: constant
  rho0: 1025
profile:
  model: zero
)"},
    };
    return m;
}

std::string where(const YAML::Node& n, const std::string& source) {
    std::ostringstream s;
    s << source << ":" << n.Mark().line + 1;
    return s.str();
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& source, const std::string& what) {
    throw ConfigError(where(n, source) + ": " + what);
}

double get_double(const YAML::Node& n, const std::string& key, const std::string& source) {
    try {
        const double v = n.as<double>();
        if (!std::isfinite(v)) fail(n, source, "key '" + key + "' must be finite");
        return v;
    } catch (const YAML::Exception&) {
        fail(n, source, "key '" + key + "' expects a number");
    }
}

int get_int(const YAML::Node& n, const std::string& key, const std::string& source) {
    try {
        return n.as<int>();
    } catch (const YAML::Exception&) {
        fail(n, source, "key '" + key + "' expects an integer");
    }
}

std::string get_string(const YAML::Node& n, const std::string& key, const std::string& source) {
    if (!n.IsScalar()) fail(n, source, "key '" + key + "' expects a string");
    return n.as<std::string>();
}

template <class Handler>
void for_each_key(const YAML::Node& section, const std::string& name, const std::string& source,
                  const std::vector<std::string>& allowed, Handler h) {
    if (section.IsNull()) return;
    if (!section.IsMap()) fail(section, source, "section '" + name + "' must be a mapping");
    for (const auto& kv : section) {
        const std::string key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(kv.first, source, "unknown key '" + key + "' in section '" + name + "' (allowed: " + list + ")");
        }
        h(key, kv.second);
    }
}

}  // namespace

bool OutputConfig::csv() const { return std::find(formats.begin(), formats.end(), "csv") != formats.end(); }
bool OutputConfig::json() const { return std::find(formats.begin(), formats.end(), "json") != formats.end(); }

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : presets()) v.push_back(k);
        return v;
    }();
    return names;
}

const std::string& preset_text(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string list;
        for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (available: " + list + ")");
    }
    return it->second;
}

RunConfig parse_config(const std::string& yaml_text, const std::string& source, RunConfig cfg) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (root.IsNull()) return cfg;
    if (!root.IsMap()) fail(root, source, "top level must be a mapping");

    auto& P = cfg.parameters;
    for_each_key(root, "top level", source, {"preset", "parameters", "density", "profile", "solver", "output"},
                 [&](const std::string& section, const YAML::Node& node) {
        if (section == "preset") {
            // handled by load_config
        } else if (section == "parameters") {
            for_each_key(node, section, source,
                         {"Omega", "g", "sigma", "P_atm", "R", "a", "eps", "A", "tol_quad", "tol_ode", "tol_newton"},
                         [&](const std::string& k, const YAML::Node& v) {
                if (k == "A") {
                    if (v.IsNull() || (v.IsScalar() && v.as<std::string>() == "auto"))
                        P.A.reset();
                    else
                        P.A = get_double(v, k, source);
                    return;
                }
                const double x = get_double(v, k, source);
                if (k == "Omega") P.Omega = x;
                else if (k == "g") P.g = x;
                else if (k == "sigma") P.sigma = x;
                else if (k == "P_atm") P.P_atm = x;
                else if (k == "R") P.R = x;
                else if (k == "a") P.a = x;
                else if (k == "eps") P.eps = x;
                else if (k == "tol_quad") P.tol_quad = x;
                else if (k == "tol_ode") P.tol_ode = x;
                else if (k == "tol_newton") P.tol_newton = x;
            });
        } else if (section == "density") {
            auto& D = cfg.density;
            for_each_key(node, section, source, {"model", "rho0", "alpha", "beta", "file"},
                         [&](const std::string& k, const YAML::Node& v) {
                if (k == "model") {
                    D.model = get_string(v, k, source);
                    if (D.model != "constant" && D.model != "linear-depth" && D.model != "latitude-quadratic" &&
                        D.model != "tabulated")
                        fail(v, source,
                             "density model '" + D.model +
                                 "' is not one of constant, linear-depth, latitude-quadratic, tabulated");
                } else if (k == "file") D.file = get_string(v, k, source);
                else if (k == "rho0") D.rho0 = get_double(v, k, source);
                else if (k == "alpha") D.alpha = get_double(v, k, source);
                else if (k == "beta") D.beta = get_double(v, k, source);
            });
        } else if (section == "profile") {
            auto& F = cfg.profile;
            for_each_key(node, section, source, {"model", "k", "file"}, [&](const std::string& k, const YAML::Node& v) {
                if (k == "model") {
                    F.model = get_string(v, k, source);
                    if (F.model != "zero" && F.model != "linear" && F.model != "tabulated")
                        fail(v, source, "profile model '" + F.model + "' is not one of zero, linear, tabulated");
                } else if (k == "k") F.k = get_double(v, k, source);
                else if (k == "file") F.file = get_string(v, k, source);
            });
        } else if (section == "solver") {
            auto& S = cfg.solver;
            for_each_key(node, section, source,
                         {"degree", "samples", "stratification", "table_y", "table_theta", "max_iterations",
                          "max_halvings", "trust", "continuation_steps", "grid_nr", "grid_ntheta"},
                         [&](const std::string& k, const YAML::Node& v) {
                if (k == "stratification") {
                    S.stratification = get_string(v, k, source);
                    if (S.stratification != "table" && S.stratification != "direct")
                        fail(v, source, "stratification must be 'table' or 'direct'");
                } else if (k == "trust") S.trust = get_double(v, k, source);
                else {
                    const int x = get_int(v, k, source);
                    if (x <= 0) fail(v, source, "key '" + k + "' must be a positive integer");
                    if (k == "degree") S.degree = x;
                    else if (k == "samples") S.samples = x;
                    else if (k == "table_y") S.table_y = x;
                    else if (k == "table_theta") S.table_theta = x;
                    else if (k == "max_iterations") S.max_iterations = x;
                    else if (k == "max_halvings") S.max_halvings = x;
                    else if (k == "continuation_steps") S.continuation_steps = x;
                    else if (k == "grid_nr") S.grid_nr = x;
                    else if (k == "grid_ntheta") S.grid_ntheta = x;
                }
            });
        } else if (section == "output") {
            auto& O = cfg.output;
            for_each_key(node, section, source, {"directory", "formats"}, [&](const std::string& k, const YAML::Node& v) {
                if (k == "directory") O.directory = get_string(v, k, source);
                else {
                    if (!v.IsSequence()) fail(v, source, "key 'formats' expects a list such as [csv, json]");
                    O.formats.clear();
                    for (const auto& f : v) {
                        const std::string s = get_string(f, k, source);
                        if (s != "csv" && s != "json") fail(f, source, "unknown output format '" + s + "'");
                        O.formats.push_back(s);
                    }
                }
            });
        }
    });
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::string& preset) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::string name = preset;
    if (name.empty()) {
        try {
            const YAML::Node root = YAML::Load(text);
            if (root.IsMap() && root["preset"]) name = get_string(root["preset"], "preset", path.string());
        } catch (const YAML::ParserException& e) {
            throw ConfigError(path.string() + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
        }
    }
    RunConfig cfg;
    if (!name.empty()) {
        cfg = parse_config(preset_text(name), "preset:" + name, cfg);
        cfg.preset = name;
    }
    cfg = parse_config(text, path.string(), cfg);
    cfg.base_dir = path.parent_path();
    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    try {
        validate_parameters(cfg.parameters);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("parameters: ") + e.what());
    }
    const auto& D = cfg.density;
    if (D.model == "tabulated" && D.file.empty()) throw ConfigError("density: model 'tabulated' needs 'file'");
    if (D.model != "tabulated" && !(D.rho0 > 0)) throw ConfigError("density: rho0 must be positive");
    if (cfg.profile.model == "tabulated" && cfg.profile.file.empty())
        throw ConfigError("profile: model 'tabulated' needs 'file'");
    const auto& S = cfg.solver;
    if (S.degree < 2) throw ConfigError("solver: degree must be at least 2");
    if (S.samples < 3) throw ConfigError("solver: samples must be at least 3");
    if (S.grid_nr < 2 || S.grid_ntheta < 2) throw ConfigError("solver: grid_nr and grid_ntheta must be at least 2");
    if (S.table_y < 2 || S.table_theta < 2) throw ConfigError("solver: table sizes must be at least 2");
    if (!(S.trust > 0)) throw ConfigError("solver: trust must be positive");
}

nlohmann::json to_json(const RunConfig& cfg) {
    const auto& P = cfg.parameters;
    nlohmann::json j;
    j["preset"] = cfg.preset.empty() ? nlohmann::json(nullptr) : nlohmann::json(cfg.preset);
    j["parameters"] = {{"Omega", P.Omega},       {"g", P.g},
                       {"sigma", P.sigma},       {"P_atm", P.P_atm},
                       {"R", P.R},               {"a", P.a},
                       {"eps", P.eps},           {"A", P.A ? nlohmann::json(*P.A) : nlohmann::json("auto")},
                       {"tol_quad", P.tol_quad}, {"tol_ode", P.tol_ode},
                       {"tol_newton", P.tol_newton}, {"r_max", P.r_max()}};
    const auto& D = cfg.density;
    j["density"] = {{"model", D.model}, {"rho0", D.rho0}, {"alpha", D.alpha}, {"beta", D.beta}, {"file", D.file}};
    j["profile"] = {{"model", cfg.profile.model}, {"k", cfg.profile.k}, {"file", cfg.profile.file}};
    const auto& S = cfg.solver;
    j["solver"] = {{"degree", S.degree},
                   {"samples", S.samples},
                   {"stratification", S.stratification},
                   {"table_y", S.table_y},
                   {"table_theta", S.table_theta},
                   {"max_iterations", S.max_iterations},
                   {"max_halvings", S.max_halvings},
                   {"trust", S.trust},
                   {"continuation_steps", S.continuation_steps},
                   {"grid_nr", S.grid_nr},
                   {"grid_ntheta", S.grid_ntheta}};
    j["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
    return j;
}

namespace {
std::filesystem::path resolve(const RunConfig& cfg, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() ? p : cfg.base_dir / p;
}

CsvTable read_table(const std::filesystem::path& path, std::size_t ncols, const char* what) {
    CsvTable t;
    try {
        t = read_csv(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
    if (t.columns.size() != ncols)
        throw ConfigError(std::string(what) + ": " + path.string() + " must have " + std::to_string(ncols) +
                          " columns");
    return t;
}
}  // namespace

DensityModel build_density(const RunConfig& cfg) {
    const auto& D = cfg.density;
    const auto& P = cfg.parameters;
    if (D.model == "constant") return make_constant_density(P, D.rho0);
    if (D.model == "linear-depth") return make_linear_depth_density(P, D.rho0, D.alpha);
    if (D.model == "latitude-quadratic") return make_latitude_quadratic_density(P, D.rho0, D.alpha, D.beta);
    // tabulated: rows r, theta, rho on a tensor grid, r-major
    const CsvTable t = read_table(resolve(cfg, D.file), 3, "density file");
    std::vector<double> r, th;
    for (double v : t.columns[0])
        if (std::find(r.begin(), r.end(), v) == r.end()) r.push_back(v);
    for (double v : t.columns[1])
        if (std::find(th.begin(), th.end(), v) == th.end()) th.push_back(v);
    if (r.size() * th.size() != t.columns[2].size())
        throw ConfigError("density file: rows do not form an r-major tensor grid");
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < th.size(); ++j) {
            const std::size_t row = i * th.size() + j;
            if (t.columns[0][row] != r[i] || t.columns[1][row] != th[j])
                throw ConfigError("density file: rows do not form an r-major tensor grid");
        }
    try {
        return make_tabulated_density(P, r, th, t.columns[2]);
    } catch (const Error& e) {
        throw ConfigError(std::string("density file: ") + e.what());
    }
}

AzimuthalProfile build_profile(const RunConfig& cfg) {
    const auto& F = cfg.profile;
    const auto& P = cfg.parameters;
    if (F.model == "zero") return make_zero_profile(P);
    if (F.model == "linear") return make_linear_profile(P, F.k);
    const CsvTable t = read_table(resolve(cfg, F.file), 2, "profile file");
    try {
        return make_tabulated_profile(P, t.columns[0], t.columns[1]);
    } catch (const Error& e) {
        throw ConfigError(std::string("profile file: ") + e.what());
    }
}

FlowOptions flow_options(const RunConfig& cfg) {
    FlowOptions o;
    o.mode = cfg.solver.stratification == "direct" ? StratificationMode::direct : StratificationMode::table;
    o.table_y = cfg.solver.table_y;
    o.table_theta = cfg.solver.table_theta;
    return o;
}

NewtonOptions newton_options(const RunConfig& cfg) {
    NewtonOptions o;
    o.max_iterations = cfg.solver.max_iterations;
    o.max_halvings = cfg.solver.max_halvings;
    o.trust = cfg.solver.trust;
    o.degree = cfg.solver.degree;
    o.samples = cfg.solver.samples;
    return o;
}

}  // namespace eqflow::cli
