#include "cfisac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "cfisac/csv.hpp"
#include "cfisac/estimation.hpp"

namespace cfisac::sim {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n_tasks, int threads, const std::function<void(int)>& task) {
    threads = std::min(resolve_threads(threads), std::max(1, n_tasks));
    if (threads <= 1) {
        for (int i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n_tasks) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t scenario_seed(std::uint64_t master, int index) {
    return Rng::derive(master, {stream::kExperiment, static_cast<std::uint64_t>(index)})
        .next_u64();
}

namespace {

perf::PowerAlloc equal_alloc_for(const perf::SystemStats& st, const ExperimentConfig& cfg) {
    const auto co = alloc::extract_coefficients(st, cfg.use_sensing_beam);
    const double frac = cfg.use_sensing_beam ? cfg.equal_power_sensing_fraction : 0.0;
    return alloc::equal_power(co, frac);
}

alloc::SolverOptions solver_options(const ExperimentConfig& cfg) {
    alloc::SolverOptions opt;
    opt.epsilon = cfg.solver_epsilon;
    opt.max_outer = cfg.solver_max_outer;
    opt.inner_feas_tol = cfg.inner_feas_tol;
    opt.inner_opt_tol = cfg.inner_opt_tol;
    opt.eta_floor = cfg.eta_floor;
    opt.gamma_s = cfg.gamma_s_linear();
    return opt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monte Carlo SE validation
// ---------------------------------------------------------------------------

namespace {

struct UserClosedForm {
    double ds = 0;                 // v-independent desired-signal mean
    Eigen::VectorXd bu_v, isi_v;   // per lattice point
    double iui = 0;                // v-independent
    double se = 0;
};

struct ChunkAcc {
    Eigen::VectorXcd sum_diag;
    Eigen::VectorXd sum_abs2, sum_isi, sum_iui;
    double s_ds = 0, s2_ds = 0, s_bu = 0, s2_bu = 0;
    double s_isi = 0, s2_isi = 0, s_iui = 0, s2_iui = 0;

    void init(int grid_pts) {
        sum_diag = Eigen::VectorXcd::Zero(grid_pts);
        sum_abs2 = Eigen::VectorXd::Zero(grid_pts);
        sum_isi = Eigen::VectorXd::Zero(grid_pts);
        sum_iui = Eigen::VectorXd::Zero(grid_pts);
    }
};

constexpr int kChunk = 16;  // fixed chunk size keeps reductions thread-count independent

}  // namespace

MCValidation mc_validate_se(const ExperimentConfig& cfg, std::uint64_t seed, int n_real,
                            int threads) {
    const auto sc = geo::place_scenario(deploy_config(cfg), seed);
    const auto st = build_stats_otfs(sc, cfg);
    const int mn = st.grid.size();
    if (mn > 512)
        throw UseLowerBound("mc_validate_se: MN = " + std::to_string(mn) +
                            " exceeds the desk-scale guard");
    const perf::PowerAlloc alloc = equal_alloc_for(st, cfg);
    const bool beam_on = cfg.use_sensing_beam && alloc.eta.col(0).maxCoeff() > 0;

    // Closed forms.
    std::vector<UserClosedForm> cf(st.k_u);
    const dd::PathDD beam_path{0, 0, 0.0};
    for (int q = 0; q < st.k_u; ++q) {
        auto& u = cf[q];
        u.bu_v = Eigen::VectorXd::Zero(mn);
        u.isi_v = Eigen::VectorXd::Zero(mn);
        for (int p = 0; p < st.n_tx; ++p) {
            const auto& own = st.comm[p][q].paths;
            const double eta_q = alloc.user(p, q);
            double btr = 0;
            for (const auto& ps : own) btr += ps.b.trace().real();
            u.ds += std::sqrt(eta_q) * btr;
            for (std::size_t i = 0; i < own.size(); ++i) {
                for (std::size_t j = 0; j < own.size(); ++j) {
                    const double tr =
                        own[i].r.cwiseProduct(own[j].b.transpose()).sum().real();
                    if (i == j) {
                        u.bu_v.array() += eta_q * tr;
                        continue;
                    }
                    const auto tab = dd::chi_kappa_table(st.grid, own[i].dd, own[j].dd);
                    u.bu_v += eta_q * tr * tab.chi;
                    u.isi_v += eta_q * tr * tab.kappa_pow;
                }
                for (int col = 0; col <= st.k_u; ++col) {
                    if (col == q + 1) continue;
                    const double eta_c = alloc.eta(p, col);
                    if (eta_c == 0.0) continue;
                    if (col == 0) {
                        u.iui += eta_c *
                                 own[i].r.cwiseProduct(st.beam_cov[p].transpose()).sum().real();
                    } else {
                        for (const auto& src : st.comm[p][col - 1].paths)
                            u.iui += eta_c *
                                     own[i].r.cwiseProduct(src.b.transpose()).sum().real();
                    }
                }
            }
        }
        u.se = perf::se_full(st, alloc, q).se;
    }

    // Per-link estimate samplers, built once.
    std::vector<std::vector<std::vector<est::EstimatePairSampler>>> samplers(st.n_tx);
    for (int p = 0; p < st.n_tx; ++p) {
        samplers[p].resize(st.k_u);
        for (int q = 0; q < st.k_u; ++q)
            for (const auto& ps : st.comm[p][q].paths)
                samplers[p][q].emplace_back(ps.r, ps.b);
    }

    const int n_chunks = (n_real + kChunk - 1) / kChunk;
    std::vector<std::vector<ChunkAcc>> acc(n_chunks, std::vector<ChunkAcc>(st.k_u));
    for (auto& chunk : acc)
        for (auto& a : chunk) a.init(mn);

    parallel_for(n_chunks, threads, [&](int chunk) {
        // Workspace per task.
        std::vector<std::vector<std::vector<Eigen::VectorXcd>>> h_hat(st.n_tx), h(st.n_tx);
        Eigen::MatrixXcd core(mn, mn);
        for (int r = chunk * kChunk; r < std::min(n_real, (chunk + 1) * kChunk); ++r) {
            Rng rng = Rng::derive(seed, {stream::kRealization, static_cast<std::uint64_t>(r)});
            for (int p = 0; p < st.n_tx; ++p) {
                h_hat[p].assign(st.k_u, {});
                h[p].assign(st.k_u, {});
                for (int q = 0; q < st.k_u; ++q)
                    for (const auto& s : samplers[p][q]) {
                        auto pair = s.sample(rng);
                        h_hat[p][q].push_back(std::move(pair.first));
                        h[p][q].push_back(std::move(pair.second));
                    }
            }
            for (int q = 0; q < st.k_u; ++q) {
                auto& a = acc[chunk][q];
                double isi_avg = 0, iui_avg = 0, ds_avg = 0, bu_avg = 0;
                for (int col = 0; col <= st.k_u; ++col) {
                    if (col == 0 && !beam_on) continue;
                    core.setZero();
                    bool any = false;
                    for (int p = 0; p < st.n_tx; ++p) {
                        const double scale = std::sqrt(alloc.eta(p, col));
                        if (scale == 0.0) continue;
                        const auto& own = st.comm[p][q].paths;
                        for (std::size_t i = 0; i < own.size(); ++i) {
                            if (col == 0) {
                                const cxd c = st.beam_steer[p].dot(h[p][q][i]);
                                dd::add_scaled_core(st.grid, own[i].dd, beam_path, scale * c,
                                                    core);
                                any = true;
                            } else {
                                const auto& src = st.comm[p][col - 1].paths;
                                for (std::size_t j = 0; j < src.size(); ++j) {
                                    const cxd c = h_hat[p][col - 1][j].dot(h[p][q][i]);
                                    dd::add_scaled_core(st.grid, own[i].dd, src[j].dd,
                                                        scale * c, core);
                                    any = true;
                                }
                            }
                        }
                    }
                    if (!any) continue;
                    const Eigen::MatrixXcd z = dd::sandwich_core(st.grid, core);
                    if (col == q + 1) {
                        for (int v = 0; v < mn; ++v) {
                            const cxd dv = z(v, v);
                            const double row_pow = z.row(v).squaredNorm();
                            a.sum_diag(v) += dv;
                            a.sum_abs2(v) += std::norm(dv);
                            a.sum_isi(v) += row_pow - std::norm(dv);
                            ds_avg += dv.real();
                            bu_avg += std::norm(dv - cf[q].ds);
                            isi_avg += row_pow - std::norm(dv);
                        }
                    } else {
                        for (int v = 0; v < mn; ++v) {
                            const double row_pow = z.row(v).squaredNorm();
                            a.sum_iui(v) += row_pow;
                            iui_avg += row_pow;
                        }
                    }
                }
                ds_avg /= mn;
                bu_avg /= mn;
                isi_avg /= mn;
                iui_avg /= mn;
                a.s_ds += ds_avg;
                a.s2_ds += ds_avg * ds_avg;
                a.s_bu += bu_avg;
                a.s2_bu += bu_avg * bu_avg;
                a.s_isi += isi_avg;
                a.s2_isi += isi_avg * isi_avg;
                a.s_iui += iui_avg;
                a.s2_iui += iui_avg * iui_avg;
            }
        }
    });

    MCValidation out;
    out.realizations = n_real;
    out.users.resize(st.k_u);
    const double n = static_cast<double>(n_real);
    for (int q = 0; q < st.k_u; ++q) {
        ChunkAcc total;
        total.init(mn);
        for (const auto& chunk : acc) {
            const auto& a = chunk[q];
            total.sum_diag += a.sum_diag;
            total.sum_abs2 += a.sum_abs2;
            total.sum_isi += a.sum_isi;
            total.sum_iui += a.sum_iui;
            total.s_ds += a.s_ds;
            total.s2_ds += a.s2_ds;
            total.s_bu += a.s_bu;
            total.s2_bu += a.s2_bu;
            total.s_isi += a.s_isi;
            total.s2_isi += a.s2_isi;
            total.s_iui += a.s_iui;
            total.s2_iui += a.s2_iui;
        }
        auto mean_se = [&](double s, double s2, double& mean, double& serr) {
            mean = s / n;
            const double var = std::max(0.0, (s2 - n * mean * mean) / std::max(1.0, n - 1));
            serr = std::sqrt(var / n);
        };
        auto& u = out.users[q];
        mean_se(total.s_ds, total.s2_ds, u.ds_mc, u.ds_se);
        mean_se(total.s_bu, total.s2_bu, u.bu_mc, u.bu_se);
        mean_se(total.s_isi, total.s2_isi, u.isi_mc, u.isi_se);
        mean_se(total.s_iui, total.s2_iui, u.iui_mc, u.iui_se);
        u.ds_cf = cf[q].ds;
        u.bu_cf = cf[q].bu_v.mean();
        u.isi_cf = cf[q].isi_v.mean();
        u.iui_cf = cf[q].iui;
        u.cf_se = cf[q].se;

        double se_acc = 0;
        for (int v = 0; v < mn; ++v) {
            const cxd dbar = total.sum_diag(v) / n;
            const double bu_v = std::max(0.0, total.sum_abs2(v) / n - std::norm(dbar));
            const double isi_v = total.sum_isi(v) / n;
            const double iui_v = total.sum_iui(v) / n;
            const double sinr =
                st.rho_d * std::norm(dbar) / (st.rho_d * (bu_v + isi_v + iui_v) + 1.0);
            se_acc += std::log2(1.0 + sinr);
        }
        u.mc_se = st.prelog * se_acc / mn;
        u.rel_err = std::abs(u.mc_se - u.cf_se) / std::max(1e-300, u.cf_se);
    }
    return out;
}

std::string MCValidation::to_csv() const {
    csv::Writer w({"user", "mc_se", "cf_se", "rel_err", "ds_mc", "ds_cf", "ds_stderr",
                   "bu_mc", "bu_cf", "bu_stderr", "isi_mc", "isi_cf", "isi_stderr",
                   "iui_mc", "iui_cf", "iui_stderr", "realizations"});
    for (std::size_t q = 0; q < users.size(); ++q) {
        const auto& u = users[q];
        w.append_row({std::to_string(q), csv::num(u.mc_se), csv::num(u.cf_se),
                      csv::num(u.rel_err), csv::num(u.ds_mc), csv::num(u.ds_cf),
                      csv::num(u.ds_se), csv::num(u.bu_mc), csv::num(u.bu_cf),
                      csv::num(u.bu_se), csv::num(u.isi_mc), csv::num(u.isi_cf),
                      csv::num(u.isi_se), csv::num(u.iui_mc), csv::num(u.iui_cf),
                      csv::num(u.iui_se), std::to_string(realizations)});
    }
    return w.str();
}

// ---------------------------------------------------------------------------
// CDF experiment
// ---------------------------------------------------------------------------

namespace {

struct ScenarioCdf {
    std::vector<CdfRow> rows;
    std::string jsonl;
};

double percentile5(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t idx =
        std::min(v.size() - 1, static_cast<std::size_t>(std::ceil(0.05 * v.size())) -
                                   std::min<std::size_t>(1, v.size()));
    return v[idx];
}

}  // namespace

CdfResult run_cdf_experiment(const ExperimentConfig& cfg) {
    const int n_scen = cfg.n_scenarios;
    std::vector<ScenarioCdf> per_scen(n_scen);

    parallel_for(n_scen, cfg.threads, [&](int s) {
        const std::uint64_t sseed = scenario_seed(cfg.seed, s);
        const auto sc = geo::place_scenario(deploy_config(cfg), sseed);
        auto& out = per_scen[s];
        out.rows.resize(cfg.n_users);
        for (int q = 0; q < cfg.n_users; ++q) {
            out.rows[q].scenario = s;
            out.rows[q].user = q;
        }
        const auto opt = solver_options(cfg);
        for (int variant = 0; variant < 4; ++variant) {
            ExperimentConfig vc = cfg;
            vc.perfect_csi = (variant % 2 == 1);
            const bool is_ofdm = variant >= 2;
            const perf::SystemStats st =
                is_ofdm ? build_stats_ofdm(sc, vc) : build_stats_otfs(sc, vc);
            const perf::PowerAlloc eq = equal_alloc_for(st, vc);
            const auto mm = alloc::maxmin_allocate(st, opt, vc.use_sensing_beam);
            out.jsonl += alloc::trace_to_jsonl(mm.state.trace);
            for (int q = 0; q < cfg.n_users; ++q) {
                const double se_eq = perf::se_lower_bound(st, eq, q).se;
                const double se_op = perf::se_lower_bound(st, mm.alloc, q).se;
                auto& row = out.rows[q];
                if (variant == 0) { row.otfs_eq_est = se_eq; row.otfs_opt_est = se_op; }
                if (variant == 1) { row.otfs_eq_perf = se_eq; row.otfs_opt_perf = se_op; }
                if (variant == 2) { row.ofdm_eq_est = se_eq; row.ofdm_opt_est = se_op; }
                if (variant == 3) { row.ofdm_eq_perf = se_eq; row.ofdm_opt_perf = se_op; }
            }
        }
    });

    CdfResult res;
    for (auto& s : per_scen) {
        res.rows.insert(res.rows.end(), s.rows.begin(), s.rows.end());
        res.convergence_jsonl += s.jsonl;
    }
    const std::vector<std::pair<std::string, double CdfRow::*>> cols = {
        {"otfs_eq_est", &CdfRow::otfs_eq_est},   {"otfs_opt_est", &CdfRow::otfs_opt_est},
        {"otfs_eq_perf", &CdfRow::otfs_eq_perf}, {"otfs_opt_perf", &CdfRow::otfs_opt_perf},
        {"ofdm_eq_est", &CdfRow::ofdm_eq_est},   {"ofdm_opt_est", &CdfRow::ofdm_opt_est},
        {"ofdm_eq_perf", &CdfRow::ofdm_eq_perf}, {"ofdm_opt_perf", &CdfRow::ofdm_opt_perf}};
    for (const auto& [name, member] : cols) {
        std::vector<double> vals;
        vals.reserve(res.rows.size());
        for (const auto& r : res.rows) vals.push_back(r.*member);
        res.likely95[name] = percentile5(std::move(vals));
    }
    return res;
}

std::string CdfResult::to_csv() const {
    csv::Writer w({"scenario", "user", "otfs_eq_est", "otfs_opt_est", "otfs_eq_perf",
                   "otfs_opt_perf", "ofdm_eq_est", "ofdm_opt_est", "ofdm_eq_perf",
                   "ofdm_opt_perf"});
    for (const auto& r : rows)
        w.append_row({std::to_string(r.scenario), std::to_string(r.user),
                      csv::num(r.otfs_eq_est), csv::num(r.otfs_opt_est),
                      csv::num(r.otfs_eq_perf), csv::num(r.otfs_opt_perf),
                      csv::num(r.ofdm_eq_est), csv::num(r.ofdm_opt_est),
                      csv::num(r.ofdm_eq_perf), csv::num(r.ofdm_opt_perf)});
    return w.str();
}

// ---------------------------------------------------------------------------
// Tradeoff sweep
// ---------------------------------------------------------------------------

TradeoffResult run_tradeoff_sweep(const ExperimentConfig& cfg,
                                  const std::vector<double>& gamma_db) {
    const int n_scen = cfg.n_scenarios;
    struct Cell {
        double min_se = 0;
        double min_se_opt = 0;
        bool feasible = false;
    };
    // [beam][gamma][scenario]
    std::vector<std::vector<std::vector<Cell>>> table(
        2, std::vector<std::vector<Cell>>(gamma_db.size(), std::vector<Cell>(n_scen)));
    std::vector<std::string> jsonl(n_scen);

    // Ascending sort order for the output; solves run from the tightest
    // threshold down, warm-starting each point with the previous solution
    // (always feasible for a smaller gamma), which makes the min-SE curve
    // monotone by construction instead of up to solver noise.
    std::vector<std::size_t> order(gamma_db.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return gamma_db[a] > gamma_db[b]; });

    parallel_for(n_scen, cfg.threads, [&](int s) {
        const std::uint64_t sseed = scenario_seed(cfg.seed, s);
        const auto sc = geo::place_scenario(deploy_config(cfg), sseed);
        const auto st = build_stats_otfs(sc, cfg);
        for (int beam = 0; beam < 2; ++beam) {
            const auto co = alloc::extract_coefficients(st, beam == 1);
            perf::PowerAlloc warm;
            bool have_warm = false;
            for (std::size_t gi : order) {
                auto opt = solver_options(cfg);
                opt.gamma_s = db_to_linear(gamma_db[gi]);
                try {
                    const auto mm = alloc::maxmin_allocate(co, opt,
                                                           have_warm ? &warm : nullptr);
                    jsonl[s] += alloc::trace_to_jsonl(mm.state.trace);
                    double min_se = std::numeric_limits<double>::infinity();
                    for (int q = 0; q < cfg.n_users; ++q)
                        min_se = std::min(min_se, perf::se_lower_bound(st, mm.alloc, q).se);
                    const double min_se_opt =
                        st.prelog * std::log2(1.0 + alloc::min_user_sinr(co, mm.alloc));
                    table[beam][gi][s] = {min_se, min_se_opt, true};
                    warm = mm.alloc;
                    have_warm = true;
                } catch (const Infeasible&) {
                    table[beam][gi][s] = {0.0, 0.0, false};
                }
            }
        }
    });

    TradeoffResult res;
    for (int beam = 0; beam < 2; ++beam)
        for (std::size_t gi = 0; gi < gamma_db.size(); ++gi) {
            TradeoffRow row;
            row.gamma_db = gamma_db[gi];
            row.with_beam = beam == 1;
            row.scenario_count = n_scen;
            double acc = 0, acc_opt = 0;
            for (const auto& cell : table[beam][gi]) {
                if (!cell.feasible) continue;
                acc += cell.min_se;
                acc_opt += cell.min_se_opt;
                ++row.feasible_count;
            }
            row.avg_min_se = row.feasible_count ? acc / row.feasible_count : 0.0;
            row.avg_min_se_opt = row.feasible_count ? acc_opt / row.feasible_count : 0.0;
            res.rows.push_back(row);
        }
    for (const auto& j : jsonl) res.convergence_jsonl += j;
    return res;
}

std::string TradeoffResult::to_csv() const {
    csv::Writer w({"gamma_db", "with_beam", "avg_min_se", "avg_min_se_opt", "feasible_count",
                   "scenario_count"});
    for (const auto& r : rows)
        w.append_row({csv::num(r.gamma_db), r.with_beam ? "1" : "0", csv::num(r.avg_min_se),
                      csv::num(r.avg_min_se_opt), std::to_string(r.feasible_count),
                      std::to_string(r.scenario_count)});
    return w.str();
}

// ---------------------------------------------------------------------------
// Bandwidth sweep
// ---------------------------------------------------------------------------

BandwidthResult run_bandwidth_sweep(const ExperimentConfig& cfg,
                                    const std::vector<double>& delta_f_hz,
                                    const std::vector<int>& pilot_lens) {
    if (pilot_lens.size() != delta_f_hz.size())
        throw ConfigError("run_bandwidth_sweep: one pilot length per bandwidth required");
    BandwidthResult res;
    for (std::size_t i = 0; i < delta_f_hz.size(); ++i) {
        ExperimentConfig vc = cfg;
        vc.delta_f_hz = delta_f_hz[i];
        vc.ofdm_pilot_len = pilot_lens[i];
        BandwidthRow row;
        row.delta_f_hz = delta_f_hz[i];
        row.pilot_len = pilot_lens[i];

        chan::IndexBounds bounds;
        try {
            bounds = chan::derive_index_bounds(vc.tau_max_s, vc.v_max_mps(), vc.fc_hz,
                                               vc.m_subcarriers, vc.n_symbols, vc.delta_f_hz);
        } catch (const GridTooSmall&) {
            row.ofdm_feasible = false;
            res.rows.push_back(row);
            continue;
        }
        row.otfs_cp_pct =
            100.0 * bounds.n_cp / (static_cast<double>(vc.m_subcarriers) * vc.n_symbols);
        row.ofdm_cp_pct = 100.0 * bounds.n_cp / vc.m_subcarriers;
        row.ofdm_feasible = bounds.n_cp < vc.m_subcarriers;

        std::vector<double> otfs_acc(cfg.n_scenarios, 0.0), ofdm_acc(cfg.n_scenarios, 0.0);
        parallel_for(cfg.n_scenarios, cfg.threads, [&](int s) {
            const std::uint64_t sseed = scenario_seed(vc.seed, s);
            const auto sc = geo::place_scenario(deploy_config(vc), sseed);
            const auto opt = solver_options(vc);
            {
                const auto st = build_stats_otfs(sc, vc);
                const perf::PowerAlloc a = vc.optimize_sweeps
                                               ? alloc::maxmin_allocate(st, opt,
                                                                        vc.use_sensing_beam)
                                                     .alloc
                                               : equal_alloc_for(st, vc);
                double acc = 0;
                for (int q = 0; q < vc.n_users; ++q)
                    acc += perf::se_lower_bound(st, a, q).se;
                otfs_acc[s] = acc / vc.n_users;
            }
            if (row.ofdm_feasible) {
                const auto st = build_stats_ofdm(sc, vc);
                const perf::PowerAlloc a = vc.optimize_sweeps
                                               ? alloc::maxmin_allocate(st, opt,
                                                                        vc.use_sensing_beam)
                                                     .alloc
                                               : equal_alloc_for(st, vc);
                double acc = 0;
                for (int q = 0; q < vc.n_users; ++q)
                    acc += perf::se_lower_bound(st, a, q).se;
                ofdm_acc[s] = acc / vc.n_users;
            }
        });
        for (int s = 0; s < cfg.n_scenarios; ++s) {
            row.otfs_se += otfs_acc[s] / cfg.n_scenarios;
            row.ofdm_se += ofdm_acc[s] / cfg.n_scenarios;
        }
        row.gap = row.otfs_se - row.ofdm_se;
        row.gap_ratio = row.ofdm_se > 0 ? row.otfs_se / row.ofdm_se : 0.0;
        res.rows.push_back(row);
    }
    return res;
}

std::string BandwidthResult::to_csv() const {
    csv::Writer w({"delta_f_khz", "otfs_se", "ofdm_se", "gap", "gap_ratio", "otfs_cp_pct",
                   "ofdm_cp_pct", "pilot_len", "ofdm_feasible"});
    for (const auto& r : rows)
        w.append_row({csv::num(r.delta_f_hz / 1e3), csv::num(r.otfs_se), csv::num(r.ofdm_se),
                      csv::num(r.gap), csv::num(r.gap_ratio), csv::num(r.otfs_cp_pct),
                      csv::num(r.ofdm_cp_pct), std::to_string(r.pilot_len),
                      r.ofdm_feasible ? "1" : "0"});
    return w.str();
}

void write_outputs(const std::string& dir, const std::map<std::string, std::string>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files) {
        std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
        if (!out) throw ConfigError("write_outputs: cannot write '" + name + "' in " + dir);
        out << content;
    }
}

}  // namespace cfisac::sim
