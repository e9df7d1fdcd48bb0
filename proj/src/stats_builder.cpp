#include "cfisac/stats_builder.hpp"

namespace cfisac {

geo::DeployConfig deploy_config(const ExperimentConfig& cfg) {
    geo::DeployConfig d;
    d.region_size_m = cfg.region_size_m;
    d.n_tx = cfg.n_tx_aps;
    d.n_rx = cfg.n_rx_aps;
    d.n_users = cfg.n_users;
    d.hotspot_side_m = cfg.hotspot_side_m;
    d.ap_height_m = cfg.ap_height_m;
    d.ue_height_m = cfg.ue_height_m;
    d.shadow_sigma_db = cfg.shadow_sigma_db;
    d.shadowing = cfg.shadowing;
    d.target_at_center = cfg.target_at_center;
    return d;
}

geo::CorrConfig corr_config(const ExperimentConfig& cfg) {
    geo::CorrConfig c;
    c.fc_hz = cfg.fc_hz;
    c.m_t = cfg.antennas_per_ap;
    c.paths_per_link = cfg.paths_per_link;
    c.corr_coeff = cfg.corr_coeff;
    c.angle_spread_deg = cfg.angle_spread_deg;
    c.min_link_dist_m = cfg.min_ap_user_dist_m;
    c.clutter_scaling = cfg.clutter_scaling;
    return c;
}

dd::DDGridSpec derive_grid(const ExperimentConfig& cfg) {
    const auto bounds = chan::derive_index_bounds(cfg.tau_max_s, cfg.v_max_mps(), cfg.fc_hz,
                                                  cfg.m_subcarriers, cfg.n_symbols,
                                                  cfg.delta_f_hz);
    return dd::DDGridSpec::make(cfg.m_subcarriers, cfg.n_symbols, cfg.delta_f_hz, bounds.n_cp);
}

namespace {

// Geometry- and channel-side parts shared by the OTFS and OFDM builds.
perf::SystemStats base_stats(const geo::Scenario& sc, const ExperimentConfig& cfg,
                             const dd::DDGridSpec& grid, const chan::IndexBounds& bounds) {
    const geo::CorrConfig cc = corr_config(cfg);
    perf::SystemStats st;
    st.grid = grid;
    st.n_tx = cfg.n_tx_aps;
    st.n_rx = cfg.n_rx_aps;
    st.k_u = cfg.n_users;
    st.m_t = cfg.antennas_per_ap;
    st.rho_d = cfg.dl_max_power_w /
               perf::noise_variance(cfg.m_subcarriers, cfg.delta_f_hz, cfg.noise_figure_db);

    st.comm.resize(st.n_tx);
    for (int p = 0; p < st.n_tx; ++p) {
        st.comm[p].resize(st.k_u);
        for (int q = 0; q < st.k_u; ++q) {
            Rng prng = Rng::derive(sc.seed, {stream::kPaths, (std::uint64_t)p, (std::uint64_t)q});
            const auto paths = chan::sample_paths(prng, cfg.paths_per_link, bounds.ell_max,
                                                  bounds.k_max, cfg.distinct_delays);
            auto& link = st.comm[p][q];
            link.paths.resize(paths.size());
            for (int i = 0; i < (int)paths.size(); ++i) {
                link.paths[i].dd = paths[i];
                link.paths[i].r = geo::comm_correlation(p, q, i, sc, cc);
            }
        }
    }

    st.beam_steer.resize(st.n_tx);
    st.beam_cov.resize(st.n_tx);
    for (int p = 0; p < st.n_tx; ++p) {
        const auto ang = geo::angles_between(sc.tx_aps[p], sc.hotspot_center);
        st.beam_steer[p] = geo::array_response(ang, st.m_t);
        st.beam_cov[p] = st.beam_steer[p] * st.beam_steer[p].adjoint();
    }

    st.sensing.resize(st.n_tx);
    for (int p = 0; p < st.n_tx; ++p) {
        st.sensing[p].resize(st.n_rx);
        for (int r = 0; r < st.n_rx; ++r) {
            auto& sp = st.sensing[p][r];
            const auto corr = geo::sensing_correlations(p, r, sc, cc);
            sp.r_rx = corr.r_rx;
            sp.r_tx = corr.r_tx;
            const Eigen::VectorXcd h_pt =
                geo::array_response(geo::angles_between(sc.tx_aps[p], sc.target), st.m_t);
            const Eigen::VectorXcd h_tr =
                geo::array_response(geo::angles_between(sc.target, sc.rx_aps[r]), st.m_t);
            sp.v = h_tr * h_pt.transpose();
            sp.beta_pr = geo::radar_link_gain(geo::dist3d(sc.tx_aps[p], sc.target),
                                              geo::dist3d(sc.target, sc.rx_aps[r]), cfg.fc_hz,
                                              cfg.tx_gain_dbi, cfg.rx_gain_dbi);
            sp.sigma_rcs2 = cfg.rcs_variance_m2;
        }
    }
    return st;
}

est::UplinkPowers uplink_powers(const ExperimentConfig& cfg) {
    est::UplinkPowers up;
    up.p_pilot_w = cfg.ul_pilot_power_w;
    up.p_data_w.assign(cfg.n_users, cfg.ul_data_power_w);
    up.eta_ul.assign(cfg.n_users, cfg.ul_power_coeff);
    up.noise_var_w =
        perf::noise_variance(cfg.m_subcarriers, cfg.delta_f_hz, cfg.noise_figure_db);
    return up;
}

}  // namespace

perf::SystemStats build_stats_otfs(const geo::Scenario& sc, const ExperimentConfig& cfg) {
    const auto bounds = chan::derive_index_bounds(cfg.tau_max_s, cfg.v_max_mps(), cfg.fc_hz,
                                                  cfg.m_subcarriers, cfg.n_symbols,
                                                  cfg.delta_f_hz);
    const auto grid =
        dd::DDGridSpec::make(cfg.m_subcarriers, cfg.n_symbols, cfg.delta_f_hz, bounds.n_cp);
    perf::SystemStats st = base_stats(sc, cfg, grid, bounds);
    st.prelog = perf::prelog(grid, perf::SignalKind::kOtfs);
    st.per_symbol_grid = false;

    const est::UplinkPowers up = uplink_powers(cfg);
    const est::EPLayout ep{bounds.k_max, bounds.ell_max, cfg.k_hat};
    for (int p = 0; p < st.n_tx; ++p) {
        std::vector<std::vector<Eigen::MatrixXcd>> r_all(st.k_u);
        for (int q = 0; q < st.k_u; ++q)
            for (const auto& ps : st.comm[p][q].paths) r_all[q].push_back(ps.r);
        for (int q = 0; q < st.k_u; ++q)
            for (auto& ps : st.comm[p][q].paths) {
                if (cfg.perfect_csi) {
                    ps.b = ps.r;
                    continue;
                }
                const auto psi = est::compute_psi(ps.r, r_all, q, cfg.n_symbols, up, ep);
                ps.b = est::compute_b(ps.r, psi, up.p_pilot_w, up.eta_ul[q]);
            }
    }
    return st;
}

perf::SystemStats build_stats_ofdm(const geo::Scenario& sc, const ExperimentConfig& cfg) {
    const auto bounds = chan::derive_index_bounds(cfg.tau_max_s, cfg.v_max_mps(), cfg.fc_hz,
                                                  cfg.m_subcarriers, cfg.n_symbols,
                                                  cfg.delta_f_hz);
    const auto grid =
        dd::DDGridSpec::make(cfg.m_subcarriers, cfg.n_symbols, cfg.delta_f_hz, bounds.n_cp);
    perf::SystemStats st = base_stats(sc, cfg, grid, bounds);
    st.prelog = perf::prelog(grid, perf::SignalKind::kOfdm);
    st.per_symbol_grid = true;

    const est::UplinkPowers up = uplink_powers(cfg);
    // Round-robin pilot assignment; users sharing a pilot contaminate each other.
    for (int p = 0; p < st.n_tx; ++p) {
        for (int q = 0; q < st.k_u; ++q) {
            for (auto& ps : st.comm[p][q].paths) {
                if (cfg.perfect_csi) {
                    ps.b = ps.r;
                    continue;
                }
                Eigen::MatrixXcd psi = up.p_pilot_w * up.eta_ul[q] * ps.r;
                for (int qp = 0; qp < st.k_u; ++qp) {
                    if (qp == q || qp % cfg.ofdm_pilot_len != q % cfg.ofdm_pilot_len) continue;
                    for (const auto& other : st.comm[p][qp].paths)
                        psi += up.p_pilot_w * up.eta_ul[qp] * other.r;
                }
                psi += up.noise_var_w * Eigen::MatrixXcd::Identity(st.m_t, st.m_t);
                ps.b = est::compute_b(ps.r, psi, up.p_pilot_w, up.eta_ul[q]);
            }
        }
    }
    return st;
}

}  // namespace cfisac
