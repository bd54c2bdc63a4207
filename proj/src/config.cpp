#include "gss/config.hpp"

#include <fstream>
#include <sstream>

namespace gss {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(key + ": bad list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": bad numeric value '" + v + "'");
    }
}

long long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError(key + ": bad integer value '" + v + "'");
    }
}

bool parse_onoff(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected on/off");
}

} // namespace

std::string metric_name(Metric m) { return m == Metric::kRbmd ? "rbmd" : "mi"; }

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.source_text = text;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));

        if (key == "constellation") {
            if (val != "pm16qam" && val != "ps-pm16qam" && val != "gss-midpoint" &&
                val != "file")
                throw ConfigError("constellation: unknown source '" + val + "'");
            cfg.constellation = val;
        } else if (key == "constellation_file") {
            cfg.constellation_file = val;
        } else if (key == "p_low") {
            cfg.p_low = parse_double(val, key);
        } else if (key == "m") {
            cfg.m = static_cast<int>(parse_int(val, key));
        } else if (key == "t") {
            cfg.t = static_cast<int>(parse_int(val, key));
        } else if (key == "distances_km") {
            cfg.distances_km = parse_list(val, key);
        } else if (key == "launch_powers_dbm") {
            cfg.launch_powers_dbm = parse_list(val, key);
        } else if (key == "D") {
            cfg.D = static_cast<std::size_t>(parse_int(val, key));
        } else if (key == "opt_D") {
            cfg.opt_D = static_cast<std::size_t>(parse_int(val, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(val, key));
        } else if (key == "metric") {
            if (val == "rbmd")
                cfg.metric = Metric::kRbmd;
            else if (val == "mi")
                cfg.metric = Metric::kMi;
            else
                throw ConfigError("metric: expected mi or rbmd");
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(parse_int(val, key));
        } else if (key == "alpha_db_per_km") {
            cfg.fiber.alpha_db_per_km = parse_double(val, key);
        } else if (key == "beta2_ps2_per_km") {
            cfg.fiber.beta2_ps2_per_km = parse_double(val, key);
        } else if (key == "gamma_per_w_km") {
            cfg.fiber.gamma_per_w_km = parse_double(val, key);
        } else if (key == "steps_per_span") {
            cfg.fiber.steps_per_span = static_cast<int>(parse_int(val, key));
        } else if (key == "symbol_rate_gbaud") {
            cfg.fiber.symbol_rate_gbaud = parse_double(val, key);
        } else if (key == "oversampling") {
            cfg.fiber.oversampling = static_cast<int>(parse_int(val, key));
        } else if (key == "rrc_rolloff") {
            cfg.fiber.rrc_rolloff = parse_double(val, key);
        } else if (key == "edge_discard") {
            cfg.fiber.edge_discard = static_cast<std::size_t>(parse_int(val, key));
        } else if (key == "tx_osnr_db") {
            cfg.imp.tx_osnr_db = parse_double(val, key);
        } else if (key == "rx_min_input_dbm") {
            cfg.imp.rx_min_input_dbm = parse_double(val, key);
        } else if (key == "rx_noise_power_dbm") {
            cfg.imp.rx_noise_power_dbm = parse_double(val, key);
        } else if (key == "tx_noise") {
            cfg.imp.tx_noise_enabled = parse_onoff(val, key);
        } else if (key == "rx_noise") {
            cfg.imp.rx_noise_enabled = parse_onoff(val, key);
        } else if (key == "enforce_min_launch_power") {
            cfg.enforce_min_launch_power = parse_onoff(val, key);
        } else if (key == "chase_q") {
            cfg.chase_q = static_cast<int>(parse_int(val, key));
        } else if (key == "max_evaluations") {
            cfg.search.max_evaluations = static_cast<std::size_t>(parse_int(val, key));
        } else if (key == "initial_mesh") {
            cfg.search.initial_mesh = parse_double(val, key);
        } else if (key == "expansion") {
            cfg.search.expansion = parse_double(val, key);
        } else if (key == "contraction") {
            cfg.search.contraction = parse_double(val, key);
        } else if (key == "mesh_tolerance") {
            cfg.search.mesh_tolerance = parse_double(val, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (cfg.distances_km.empty()) throw ConfigError("distances_km: empty");
    if (cfg.constellation == "file" && cfg.constellation_file.empty())
        throw ConfigError("constellation=file requires constellation_file");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

Constellation RunConfig::make_constellation() const {
    if (constellation == "pm16qam") return build_pm16qam();
    if (constellation == "ps-pm16qam") return build_ps_pm16qam(p_low);
    if (constellation == "gss-midpoint") return build_gss(midpoint_init(m, t));
    if (constellation == "file") {
        std::ifstream in(constellation_file);
        if (!in) throw ConfigError("cannot open constellation file: " + constellation_file);
        std::ostringstream ss;
        ss << in.rdbuf();
        return deserialize(ss.str());
    }
    throw ConfigError("unknown constellation source");
}

} // namespace gss
