#include "cfisac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cfisac/rng.hpp"

namespace cfisac::geo {

AnglePair angles_between(const Position3D& from, const Position3D& to) {
    const double dx = to.x - from.x, dy = to.y - from.y, dz = to.z - from.z;
    const double d2d = std::sqrt(dx * dx + dy * dy);
    AnglePair a;
    a.azimuth = std::atan2(dy, dx);
    a.elevation = std::atan2(dz, d2d);
    return a;
}

Scenario place_scenario(const DeployConfig& cfg, std::uint64_t seed) {
    const int n_total = cfg.n_tx + cfg.n_rx;
    if (cfg.n_rx >= n_total)
        throw ConfigError("place_scenario: n_rx must be smaller than the total AP count");
    if (cfg.n_tx < 1 || cfg.n_users < 1)
        throw ConfigError("place_scenario: need at least one transmitter and one user");

    Scenario sc;
    sc.seed = seed;
    sc.hotspot_center = {cfg.region_size_m / 2.0, cfg.region_size_m / 2.0, cfg.ue_height_m};
    sc.hotspot_side = cfg.hotspot_side_m;

    Rng rng = Rng::derive(seed, {stream::kScenario});
    std::vector<Position3D> aps(n_total);
    for (auto& p : aps)
        p = {rng.uniform(0.0, cfg.region_size_m), rng.uniform(0.0, cfg.region_size_m),
             cfg.ap_height_m};
    sc.users.resize(cfg.n_users);
    for (auto& p : sc.users)
        p = {rng.uniform(0.0, cfg.region_size_m), rng.uniform(0.0, cfg.region_size_m),
             cfg.ue_height_m};

    // Receivers are the n_rx APs closest (3-D) to the hotspot center.
    std::vector<int> order(n_total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dist3d(aps[a], sc.hotspot_center) < dist3d(aps[b], sc.hotspot_center);
    });
    std::vector<bool> is_rx(n_total, false);
    for (int i = 0; i < cfg.n_rx; ++i) is_rx[order[i]] = true;
    for (int i = 0; i < n_total; ++i)
        (is_rx[i] ? sc.rx_aps : sc.tx_aps).push_back(aps[i]);

    if (cfg.target_at_center) {
        sc.target = sc.hotspot_center;
    } else {
        Rng trng = Rng::derive(seed, {stream::kTargetPos});
        const double half = cfg.hotspot_side_m / 2.0;
        sc.target = {sc.hotspot_center.x + trng.uniform(-half, half),
                     sc.hotspot_center.y + trng.uniform(-half, half), cfg.ue_height_m};
    }

    sc.shadow_comm_db = Eigen::MatrixXd::Zero(cfg.n_tx, cfg.n_users);
    sc.shadow_apap_db = Eigen::MatrixXd::Zero(cfg.n_tx, cfg.n_rx);
    if (cfg.shadowing && cfg.shadow_sigma_db > 0) {
        for (int p = 0; p < cfg.n_tx; ++p) {
            for (int q = 0; q < cfg.n_users; ++q) {
                Rng s = Rng::derive(seed, {stream::kShadowComm, (std::uint64_t)p, (std::uint64_t)q});
                sc.shadow_comm_db(p, q) = cfg.shadow_sigma_db * s.normal();
            }
            for (int r = 0; r < cfg.n_rx; ++r) {
                Rng s = Rng::derive(seed, {stream::kShadowApAp, (std::uint64_t)p, (std::uint64_t)r});
                sc.shadow_apap_db(p, r) = cfg.shadow_sigma_db * s.normal();
            }
        }
    }
    return sc;
}

std::string Scenario::to_json(int indent) const {
    nlohmann::json j;
    auto pos = [](const Position3D& p) { return nlohmann::json{p.x, p.y, p.z}; };
    for (const auto& p : tx_aps) j["tx_aps"].push_back(pos(p));
    for (const auto& p : rx_aps) j["rx_aps"].push_back(pos(p));
    for (const auto& p : users) j["users"].push_back(pos(p));
    j["hotspot_center"] = pos(hotspot_center);
    j["hotspot_side_m"] = hotspot_side;
    j["target"] = pos(target);
    j["seed"] = seed;
    return j.dump(indent);
}

double umi_pathloss(double d3d_m, double fc_hz, double shadow_db, double h_ue_m) {
    if (!(d3d_m > 0)) throw DomainError("umi_pathloss: distance must be positive");
    const double pl_db = 22.4 + 35.3 * std::log10(d3d_m) + 21.3 * std::log10(fc_hz / 1e9) -
                         0.3 * (h_ue_m - 1.5) + shadow_db;
    return std::pow(10.0, -pl_db / 10.0);
}

Eigen::VectorXcd array_response(const AnglePair& angle, int m_t) {
    if (m_t < 1) throw DomainError("array_response: m_t must be >= 1");
    Eigen::VectorXcd a(m_t);
    const double phase = M_PI * std::sin(angle.azimuth) * std::cos(angle.elevation);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_t));
    for (int t = 0; t < m_t; ++t) a(t) = scale * std::exp(cxd(0, phase * t));
    return a;
}

double radar_link_gain(double d_pt_m, double d_tr_m, double fc_hz, double g_t_dbi,
                       double g_r_dbi) {
    if (!(d_pt_m > 0) || !(d_tr_m > 0))
        throw DomainError("radar_link_gain: distances must be positive");
    const double lambda = kSpeedOfLight / fc_hz;
    const double gains = db_to_linear(g_t_dbi) * db_to_linear(g_r_dbi);
    const double four_pi = 4.0 * M_PI;
    return lambda * lambda * gains /
           (four_pi * four_pi * four_pi * d_pt_m * d_pt_m * d_tr_m * d_tr_m);
}

Eigen::MatrixXcd exp_correlation(double r, double azimuth, int m_t) {
    if (r < 0.0 || r >= 1.0) throw ConfigError("exp_correlation: r must be in [0, 1)");
    const cxd base = r * std::exp(cxd(0, M_PI * std::sin(azimuth)));
    Eigen::MatrixXcd c(m_t, m_t);
    for (int a = 0; a < m_t; ++a) {
        c(a, a) = 1.0;
        cxd pw = 1.0;
        for (int b = a - 1; b >= 0; --b) {
            pw *= base;          // base^(a-b)
            c(a, b) = pw;
            c(b, a) = std::conj(pw);
        }
    }
    return c;
}

Eigen::MatrixXcd comm_correlation(int p, int q, int i, const Scenario& sc, const CorrConfig& cc) {
    if (p < 0 || p >= (int)sc.tx_aps.size() || q < 0 || q >= (int)sc.users.size())
        throw DomainError("comm_correlation: link index out of range");
    if (i < 0 || i >= cc.paths_per_link)
        throw DomainError("comm_correlation: path index out of range");
    const double d = std::max(dist3d(sc.tx_aps[p], sc.users[q]), cc.min_link_dist_m);
    const double beta = umi_pathloss(d, cc.fc_hz, sc.shadow_comm_db(p, q));
    const AnglePair los = angles_between(sc.tx_aps[p], sc.users[q]);
    Rng arng = Rng::derive(sc.seed, {stream::kPathAngle, (std::uint64_t)p, (std::uint64_t)q,
                                     (std::uint64_t)i});
    const double spread = cc.angle_spread_deg * M_PI / 180.0;
    const double az = los.azimuth + arng.uniform(-spread / 2.0, spread / 2.0);
    return (beta / cc.paths_per_link) * exp_correlation(cc.corr_coeff, az, cc.m_t);
}

SensingCorr sensing_correlations(int p, int r, const Scenario& sc, const CorrConfig& cc) {
    if (p < 0 || p >= (int)sc.tx_aps.size() || r < 0 || r >= (int)sc.rx_aps.size())
        throw DomainError("sensing_correlations: AP index out of range");
    const double d = std::max(dist3d(sc.tx_aps[p], sc.rx_aps[r]), cc.min_link_dist_m);
    // No UE-height correction on AP-AP links.
    const double beta = umi_pathloss(d, cc.fc_hz, sc.shadow_apap_db(p, r));
    SensingCorr out;
    out.r_rx = exp_correlation(cc.corr_coeff, angles_between(sc.rx_aps[r], sc.tx_aps[p]).azimuth,
                               cc.m_t);
    out.r_tx = (cc.clutter_scaling * beta) *
               exp_correlation(cc.corr_coeff, angles_between(sc.tx_aps[p], sc.rx_aps[r]).azimuth,
                               cc.m_t);
    return out;
}

}  // namespace cfisac::geo
