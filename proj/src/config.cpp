#include "crossdiff/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "crossdiff/errors.hpp"

namespace crossdiff {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " = '" + value +
                          "' is not a number");
    }
}

int parse_int(const std::string& section, const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: [" + section + "] " + key + " = '" + value +
                          "' is not an integer");
    }
}

bool parse_bool(const std::string& section, const std::string& key,
                const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: [" + section + "] " + key + " = '" + value +
                      "' is not a boolean");
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(section, key, item));
    }
    if (out.empty())
        throw ConfigError("config: [" + section + "] " + key + " needs at least one value");
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    std::string section;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + raw + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            cfg.sections.try_emplace(section);
            cfg.echo.push_back("[" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value, got '" +
                              raw + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                              "' outside any section");
        auto& sec = cfg.sections[section];
        if (!sec.emplace(key, value).second)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "]");
        cfg.echo.push_back(key + " = " + value);
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

namespace {

// Section schemas. Unknown sections or keys are configuration errors so that
// misspelled parameter names cannot silently fall back to defaults.
const std::set<std::string> kModelKeys = {"d",   "eps_r", "eps_b", "D_r",  "D_b", "N_r",
                                          "N_b", "v_r",   "v_b",   "x_lo", "x_hi"};
const std::set<std::string> kGridKeys = {"n_cells"};
const std::set<std::string> kEquilibriumKeys = {"tol", "max_iter", "eps_ref"};
const std::set<std::string> kEvolveKeys = {"stepper", "initial", "t_end",
                                           "rtol",    "atol",    "stop_at_stationary",
                                           "tau",     "steps",   "snapshot_stride"};
const std::set<std::string> kSweepKeys = {"axis", "values", "newton_tol", "newton_max_iter",
                                          "t_max"};
const std::set<std::string> kStabilityKeys = {"k", "perturbed", "eps_values"};

void check_keys(const ConfigFile& file, const std::string& section,
                const std::set<std::string>& allowed) {
    const auto it = file.sections.find(section);
    if (it == file.sections.end()) return;
    for (const auto& [key, value] : it->second)
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
}

std::string get(const ConfigFile& file, const std::string& section, const std::string& key,
                const std::string& fallback) {
    const auto sec = file.sections.find(section);
    if (sec == file.sections.end()) return fallback;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? fallback : it->second;
}

bool has(const ConfigFile& file, const std::string& section, const std::string& key) {
    const auto sec = file.sections.find(section);
    return sec != file.sections.end() && sec->second.count(key) > 0;
}

}  // namespace

RunConfig RunConfig::load(const ConfigFile& file) {
    static const std::set<std::string> kSections = {"model",  "grid",  "equilibrium",
                                                    "evolve", "sweep", "stability"};
    for (const auto& [name, keys] : file.sections)
        if (!kSections.count(name))
            throw ConfigError("config: unknown section [" + name + "]");
    check_keys(file, "model", kModelKeys);
    check_keys(file, "grid", kGridKeys);
    check_keys(file, "equilibrium", kEquilibriumKeys);
    check_keys(file, "evolve", kEvolveKeys);
    check_keys(file, "sweep", kSweepKeys);
    check_keys(file, "stability", kStabilityKeys);

    RunConfig cfg;
    cfg.echo = file.echo;

    ModelParams& m = cfg.model;
    m.d = parse_int("model", "d", get(file, "model", "d", "2"));
    m.eps_r = parse_double("model", "eps_r", get(file, "model", "eps_r", "0"));
    m.eps_b = parse_double("model", "eps_b", get(file, "model", "eps_b", "0"));
    m.D_r = parse_double("model", "D_r", get(file, "model", "D_r", "1"));
    m.D_b = parse_double("model", "D_b", get(file, "model", "D_b", "1"));
    m.N_r = parse_double("model", "N_r", get(file, "model", "N_r", "1"));
    m.N_b = parse_double("model", "N_b", get(file, "model", "N_b", "1"));
    m.v_r = parse_double("model", "v_r", get(file, "model", "v_r", "0"));
    m.v_b = parse_double("model", "v_b", get(file, "model", "v_b", "0"));
    m.x_lo = parse_double("model", "x_lo", get(file, "model", "x_lo", "-0.5"));
    m.x_hi = parse_double("model", "x_hi", get(file, "model", "x_hi", "0.5"));
    m.validate();

    cfg.grid = make_grid(m.x_lo, m.x_hi,
                         parse_int("grid", "n_cells", get(file, "grid", "n_cells", "200")));

    cfg.equilibrium.tol =
        parse_double("equilibrium", "tol", get(file, "equilibrium", "tol", "1e-8"));
    cfg.equilibrium.max_iter =
        parse_int("equilibrium", "max_iter", get(file, "equilibrium", "max_iter", "40"));
    cfg.equilibrium.eps_ref =
        parse_double("equilibrium", "eps_ref", get(file, "equilibrium", "eps_ref", "0"));
    if (cfg.equilibrium.tol <= 0.0) throw ConfigError("config: equilibrium tol must be positive");
    if (cfg.equilibrium.max_iter < 1)
        throw ConfigError("config: equilibrium max_iter must be at least 1");

    EvolveConfig& e = cfg.evolve;
    e.stepper = get(file, "evolve", "stepper", "mol");
    if (e.stepper != "mol" && e.stepper != "regularized")
        throw ConfigError("config: evolve stepper must be 'mol' or 'regularized'");
    e.initial = get(file, "evolve", "initial", "pointparticle");
    if (e.initial != "pointparticle" && e.initial != "uniform")
        throw ConfigError("config: evolve initial must be 'pointparticle' or 'uniform'");
    e.t_end = parse_double("evolve", "t_end", get(file, "evolve", "t_end", "1"));
    e.rtol = parse_double("evolve", "rtol", get(file, "evolve", "rtol", "1e-8"));
    e.atol = parse_double("evolve", "atol", get(file, "evolve", "atol", "1e-12"));
    e.stop_at_stationary = parse_bool("evolve", "stop_at_stationary",
                                      get(file, "evolve", "stop_at_stationary", "false"));
    e.tau = parse_double("evolve", "tau", get(file, "evolve", "tau", "1e-2"));
    e.steps = parse_int("evolve", "steps", get(file, "evolve", "steps", "100"));
    e.snapshot_stride =
        parse_int("evolve", "snapshot_stride", get(file, "evolve", "snapshot_stride", "0"));
    if (!(e.t_end > 0.0)) throw ConfigError("config: evolve t_end must be positive");
    if (!(e.tau > 0.0)) throw ConfigError("config: evolve tau must be positive");
    if (e.steps < 1) throw ConfigError("config: evolve steps must be at least 1");

    SweepConfig& sw = cfg.sweep;
    sw.axis = get(file, "sweep", "axis", "epsilon");
    if (sw.axis != "epsilon" && sw.axis != "theta_r")
        throw ConfigError("config: sweep axis must be 'epsilon' or 'theta_r'");
    if (has(file, "sweep", "values"))
        sw.values = parse_list("sweep", "values", get(file, "sweep", "values", ""));
    sw.newton_tol =
        parse_double("sweep", "newton_tol", get(file, "sweep", "newton_tol", "1e-8"));
    sw.newton_max_iter =
        parse_int("sweep", "newton_max_iter", get(file, "sweep", "newton_max_iter", "40"));
    sw.t_max = parse_double("sweep", "t_max", get(file, "sweep", "t_max", "1e5"));
    if (!std::is_sorted(sw.values.begin(), sw.values.end()))
        throw ConfigError("config: sweep values must be sorted ascending");

    StabilityConfig& st = cfg.stability;
    st.k = parse_int("stability", "k", get(file, "stability", "k", "12"));
    st.perturbed =
        parse_bool("stability", "perturbed", get(file, "stability", "perturbed", "false"));
    if (has(file, "stability", "eps_values"))
        st.eps_values = parse_list("stability", "eps_values",
                                   get(file, "stability", "eps_values", ""));
    if (st.k < 1) throw ConfigError("config: stability k must be at least 1");

    return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
    return load(ConfigFile::parse_file(path));
}

}  // namespace crossdiff
