#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfisac/common.hpp"

namespace cfisac {

/**
 * Flat experiment configuration. Defaults are the simulation parameters used
 * throughout: 4 GHz carrier, 15 kHz subcarriers, 512x128 grid, 1 km^2 region,
 * 100+2 APs, 15 users, EVA delay spread, 300 km/h, 7 dB noise figure.
 *
 * Files are UTF-8 "key = value" lines ('#' comments); a JSON manifest written
 * by a previous run is also accepted (its embedded config is re-ingested).
 * Unknown keys are rejected by name.
 */
struct ExperimentConfig {
    // grid / signal
    double fc_hz = 4e9;
    double delta_f_hz = 15e3;
    int m_subcarriers = 512;
    int n_symbols = 128;
    double tau_max_s = 2.5e-6;
    double max_speed_kmh = 300.0;

    // deployment
    double region_size_m = 1000.0;
    int n_tx_aps = 100;
    int n_rx_aps = 2;
    int n_users = 15;
    int antennas_per_ap = 4;
    double hotspot_side_m = 15.0;
    double ap_height_m = 10.0;
    double ue_height_m = 1.5;
    double min_ap_user_dist_m = 10.0;

    // channel
    int paths_per_link = 9;
    bool distinct_delays = true;
    double corr_coeff = 0.5;
    double angle_spread_deg = 60.0;
    double shadow_sigma_db = 7.82;
    bool shadowing = true;

    // sensing
    double gamma_s_db = 3.0;
    double clutter_scaling = 0.3;
    double rcs_variance_m2 = 1.0;  // 0 dBsm
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    bool target_at_center = false;
    bool use_sensing_beam = true;

    // powers / noise
    double noise_figure_db = 7.0;
    double dl_max_power_w = 1.0;
    double ul_pilot_power_w = 0.2;
    double ul_data_power_w = 0.2;
    double ul_power_coeff = 1.0;

    // estimation
    int k_hat = 1;
    bool perfect_csi = false;
    int ofdm_pilot_len = 14;

    // max-min solver
    double solver_epsilon = 1e-4;
    int solver_max_outer = 100;
    double inner_feas_tol = 1e-6;
    double inner_opt_tol = 1e-9;
    double eta_floor = 1e-12;
    double equal_power_sensing_fraction = 0.0;

    // experiment drivers
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    int n_scenarios = 100;
    int n_realizations = 500;
    std::vector<double> gamma_sweep_db =
        {-40, -35, -30, -25, -20, -15, -10, -5, 0, 5, 10, 15};
    std::vector<double> bandwidth_sweep_khz = {15, 45, 75, 105, 135};
    std::vector<int> pilot_len_sweep = {14, 4, 2, 2, 1};
    bool optimize_sweeps = false;

    void validate() const;

    double v_max_mps() const { return max_speed_kmh / 3.6; }
    double gamma_s_linear() const { return db_to_linear(gamma_s_db); }

    // Canonical key -> value echo of every setting (defaults included).
    std::map<std::string, std::string> echo() const;
};

// Parse a config file (key=value text or a JSON manifest). Empty file = defaults.
ExperimentConfig load_config(const std::string& path);

// Apply one "key = value" assignment; unknown keys throw ConfigError naming the key.
void apply_key_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Manifest JSON embedding the resolved config, seed, and a timestamp.
std::string make_manifest(const ExperimentConfig& cfg, const std::string& command);

}  // namespace cfisac
