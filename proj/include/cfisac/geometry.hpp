#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cfisac/common.hpp"

namespace cfisac::geo {

struct Position3D {
    double x = 0, y = 0, z = 0;
};

inline double dist3d(const Position3D& a, const Position3D& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct AnglePair {
    double azimuth = 0;    // (-pi, pi]
    double elevation = 0;  // [-pi/2, pi/2]
};

// Azimuth/elevation of the direction from `from` to `to`.
AnglePair angles_between(const Position3D& from, const Position3D& to);

// Deployment parameters consumed by place_scenario. Kept minimal so geometry
// stays independent of the full experiment config.
struct DeployConfig {
    double region_size_m = 1000.0;
    int n_tx = 100;
    int n_rx = 2;
    int n_users = 15;
    double hotspot_side_m = 15.0;
    double ap_height_m = 10.0;
    double ue_height_m = 1.5;      // users and target
    double shadow_sigma_db = 7.82;
    bool shadowing = true;
    bool target_at_center = false; // otherwise sampled uniformly in the hotspot box
};

/**
 * One random deployment: AP/user positions, receiver selection, hotspot,
 * the sampled target position, and the per-link shadowing draws. Pure
 * function of (config, seed); immutable afterwards.
 */
struct Scenario {
    std::vector<Position3D> tx_aps;
    std::vector<Position3D> rx_aps;
    std::vector<Position3D> users;
    Position3D hotspot_center;
    double hotspot_side = 0;
    Position3D target;                        // actual target location this sensing period
    std::uint64_t seed = 0;
    Eigen::MatrixXd shadow_comm_db;           // [n_tx x n_users]
    Eigen::MatrixXd shadow_apap_db;           // [n_tx x n_rx]

    std::string to_json(int indent = 2) const;
};

Scenario place_scenario(const DeployConfig& cfg, std::uint64_t seed);

// 3GPP UMi NLOS path loss as a linear power gain:
//   PL_dB = 22.4 + 35.3 log10(d3d) + 21.3 log10(fc/1e9) - 0.3 (h_ue - 1.5) + shadow
double umi_pathloss(double d3d_m, double fc_hz, double shadow_db, double h_ue_m = 1.5);

// Half-wavelength ULA response, unit Euclidean norm:
//   (1/sqrt(Mt)) [1, e^{j pi sin(az) cos(el)}, ..., e^{j (Mt-1) pi sin(az) cos(el)}]
Eigen::VectorXcd array_response(const AnglePair& angle, int m_t);

// Radar range equation, linear power gain of the AP -> target -> AP path:
//   lambda^2 Gt Gr / ((4 pi)^3 d_pt^2 d_tr^2)
double radar_link_gain(double d_pt_m, double d_tr_m, double fc_hz,
                       double g_t_dbi = 0.0, double g_r_dbi = 0.0);

// Unit-diagonal exponential correlation matrix:
//   C[a][b] = (r e^{j pi sin(az)})^(a-b) for a >= b, Hermitian completion.
Eigen::MatrixXcd exp_correlation(double r, double azimuth, int m_t);

struct CorrConfig {
    double fc_hz = 4e9;
    int m_t = 4;
    int paths_per_link = 9;
    double corr_coeff = 0.5;        // exponential-correlation r in [0, 1)
    double angle_spread_deg = 60.0; // per-path azimuth offset, uniform +-spread/2
    double min_link_dist_m = 10.0;  // distance floor for path-loss evaluation
    double clutter_scaling = 0.3;   // target-free channel scaling s
};

// Spatial correlation of path i on link (tx AP p, user q):
//   R = (beta_pq / L) * C(path azimuth),   Tr(R) = Mt * beta_pq / L.
// The per-path azimuth is the LOS azimuth plus a seeded uniform offset.
Eigen::MatrixXcd comm_correlation(int p, int q, int i, const Scenario& sc, const CorrConfig& cc);

struct SensingCorr {
    Eigen::MatrixXcd r_rx;  // unit diagonal, Tr = Mt
    Eigen::MatrixXcd r_tx;  // s * beta_ap-ap * C, carries the scaled link gain
};

// Target-free AP-AP correlation pair for (tx AP p, rx AP r).
SensingCorr sensing_correlations(int p, int r, const Scenario& sc, const CorrConfig& cc);

}  // namespace cfisac::geo
