#include "cfisac/config.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cfisac {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (std::abs(x - std::llround(x)) > 1e-9)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    return std::llround(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a boolean");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(parse_double(key, item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::string fmt_double_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_double(v[i]);
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (m_subcarriers < 1 || n_symbols < 1) throw ConfigError("grid dimensions must be >= 1");
    if (!(delta_f_hz > 0) || !(fc_hz > 0)) throw ConfigError("frequencies must be positive");
    if (n_tx_aps < 1 || n_rx_aps < 1 || n_users < 1 || antennas_per_ap < 1)
        throw ConfigError("node counts must be >= 1");
    if (paths_per_link < 1) throw ConfigError("paths_per_link must be >= 1");
    if (corr_coeff < 0 || corr_coeff >= 1) throw ConfigError("corr_coeff must be in [0, 1)");
    if (ofdm_pilot_len < 1) throw ConfigError("ofdm_pilot_len must be >= 1");
    if (!(solver_epsilon > 0) || !(inner_feas_tol > 0) || !(inner_opt_tol > 0) ||
        !(eta_floor > 0))
        throw ConfigError("solver tolerances must be positive");
    if (equal_power_sensing_fraction < 0 || equal_power_sensing_fraction >= 1)
        throw ConfigError("equal_power_sensing_fraction must be in [0, 1)");
    if (pilot_len_sweep.size() != bandwidth_sweep_khz.size())
        throw ConfigError("pilot_len_sweep must have one entry per bandwidth_sweep_khz entry");
    if (n_realizations < 1 || n_scenarios < 1)
        throw ConfigError("realization and scenario counts must be >= 1");
}

namespace {

struct Field {
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

const std::map<std::string, Field>& field_table() {
#define F_DOUBLE(name)                                                          \
    {#name,                                                                     \
     {[](ExperimentConfig& c, const std::string& k, const std::string& v) {     \
          c.name = parse_double(k, v);                                          \
      },                                                                        \
      [](const ExperimentConfig& c) { return fmt_double(c.name); }}}
#define F_INT(name)                                                             \
    {#name,                                                                     \
     {[](ExperimentConfig& c, const std::string& k, const std::string& v) {     \
          c.name = static_cast<int>(parse_int(k, v));                           \
      },                                                                        \
      [](const ExperimentConfig& c) { return std::to_string(c.name); }}}
#define F_BOOL(name)                                                            \
    {#name,                                                                     \
     {[](ExperimentConfig& c, const std::string& k, const std::string& v) {     \
          c.name = parse_bool(k, v);                                            \
      },                                                                        \
      [](const ExperimentConfig& c) { return c.name ? "true" : "false"; }}}

    static const std::map<std::string, Field> table = {
        F_DOUBLE(fc_hz), F_DOUBLE(delta_f_hz), F_INT(m_subcarriers), F_INT(n_symbols),
        F_DOUBLE(tau_max_s), F_DOUBLE(max_speed_kmh), F_DOUBLE(region_size_m), F_INT(n_tx_aps),
        F_INT(n_rx_aps), F_INT(n_users), F_INT(antennas_per_ap), F_DOUBLE(hotspot_side_m),
        F_DOUBLE(ap_height_m), F_DOUBLE(ue_height_m), F_DOUBLE(min_ap_user_dist_m),
        F_INT(paths_per_link), F_BOOL(distinct_delays), F_DOUBLE(corr_coeff),
        F_DOUBLE(angle_spread_deg), F_DOUBLE(shadow_sigma_db), F_BOOL(shadowing),
        F_DOUBLE(gamma_s_db), F_DOUBLE(clutter_scaling), F_DOUBLE(rcs_variance_m2),
        F_DOUBLE(tx_gain_dbi), F_DOUBLE(rx_gain_dbi), F_BOOL(target_at_center),
        F_BOOL(use_sensing_beam), F_DOUBLE(noise_figure_db), F_DOUBLE(dl_max_power_w),
        F_DOUBLE(ul_pilot_power_w), F_DOUBLE(ul_data_power_w), F_DOUBLE(ul_power_coeff),
        F_INT(k_hat), F_BOOL(perfect_csi), F_INT(ofdm_pilot_len), F_DOUBLE(solver_epsilon),
        F_INT(solver_max_outer), F_DOUBLE(inner_feas_tol), F_DOUBLE(inner_opt_tol),
        F_DOUBLE(eta_floor), F_DOUBLE(equal_power_sensing_fraction),
        {"seed",
         {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
              try {
                  std::size_t pos = 0;
                  c.seed = std::stoull(v, &pos);
                  if (pos != v.size()) throw std::invalid_argument("trailing junk");
              } catch (const std::exception&) {
                  throw ConfigError("config key '" + k + "': cannot parse '" + v +
                                    "' as a 64-bit seed");
              }
          },
          [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
        F_INT(threads), F_INT(n_scenarios), F_INT(n_realizations),
        {"gamma_sweep_db",
         {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.gamma_sweep_db = parse_double_list(k, v);
          },
          [](const ExperimentConfig& c) { return fmt_double_list(c.gamma_sweep_db); }}},
        {"bandwidth_sweep_khz",
         {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.bandwidth_sweep_khz = parse_double_list(k, v);
          },
          [](const ExperimentConfig& c) { return fmt_double_list(c.bandwidth_sweep_khz); }}},
        {"pilot_len_sweep",
         {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
              c.pilot_len_sweep.clear();
              for (double d : parse_double_list(k, v))
                  c.pilot_len_sweep.push_back(static_cast<int>(std::llround(d)));
          },
          [](const ExperimentConfig& c) {
              std::string s;
              for (std::size_t i = 0; i < c.pilot_len_sweep.size(); ++i) {
                  if (i) s += ",";
                  s += std::to_string(c.pilot_len_sweep[i]);
              }
              return s;
          }}},
        F_BOOL(optimize_sweeps),
    };
#undef F_DOUBLE
#undef F_INT
#undef F_BOOL
    return table;
}

}  // namespace

void apply_key_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = field_table();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(cfg, key, value);
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : field_table()) out[key] = field.get(*this);
    return out;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    ExperimentConfig cfg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        cfg.validate();  // empty file: all defaults
        return cfg;
    }

    if (text[first] == '{') {
        // JSON manifest (or bare JSON object of config keys)
        nlohmann::json j = nlohmann::json::parse(text);
        const nlohmann::json& conf = j.contains("config") ? j["config"] : j;
        for (const auto& [key, val] : conf.items()) {
            const std::string v = val.is_string() ? val.get<std::string>() : val.dump();
            apply_key_value(cfg, key, v);
        }
    } else {
        std::stringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            apply_key_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    cfg.validate();
    return cfg;
}

std::string make_manifest(const ExperimentConfig& cfg, const std::string& command) {
    nlohmann::json j;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["timestamp_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    j["command"] = command;
    j["seed"] = cfg.seed;
    nlohmann::json conf;
    for (const auto& [k, v] : cfg.echo()) conf[k] = v;
    j["config"] = conf;
    return j.dump(2);
}

}  // namespace cfisac
