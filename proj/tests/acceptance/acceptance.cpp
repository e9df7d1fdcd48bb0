// Acceptance suite: one evaluation per criterion, each printing a single
// PASS/FAIL line with the measured numbers. Run "acceptance <n>" for one
// criterion or "acceptance" for all; the exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cfisac/experiments.hpp"
#include "cfisac/ofdm_baseline.hpp"
#include "../test_support.hpp"

using namespace cfisac;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --------------------------------------------------------------------------
// C1: matrix identities over 500 random grid/path-pair draws
// --------------------------------------------------------------------------
Outcome criterion1() {
    Outcome out;
    Rng rng(2024);
    const int sizes[3] = {2, 4, 8};
    double worst_unitary = 0, worst_lemma5 = 0, worst_lemma6 = 0;
    double worst_sum_hi = 0, worst_sum_distinct = 0;
    for (int draw = 0; draw < 500; ++draw) {
        const int m = sizes[rng.uniform_int(0, 2)];
        const int n = sizes[rng.uniform_int(0, 2)];
        const auto grid = dd::DDGridSpec::make(m, n, 15e3);
        auto rand_path = [&] {
            dd::PathDD p;
            p.ell = static_cast<int>(rng.uniform_int(0, m - 1));
            p.k = static_cast<int>(rng.uniform_int(-2, 2));
            do { p.kappa = rng.uniform(-0.5, 0.5); } while (p.kappa == -0.5);
            return p;
        };
        const auto pi = rand_path();
        const auto pj = rand_path();
        const Eigen::MatrixXcd ti = dd::build_T(grid, pi);
        const Eigen::MatrixXcd tj = dd::build_T(grid, pj);
        const int mn = grid.size();

        worst_unitary = std::max(
            worst_unitary,
            (ti * ti.adjoint() - Eigen::MatrixXcd::Identity(mn, mn)).cwiseAbs().maxCoeff());

        const Eigen::MatrixXcd prod = ti * tj.adjoint();
        if (pi.ell != pj.ell)
            worst_lemma5 = std::max(worst_lemma5, prod.diagonal().cwiseAbs().maxCoeff());
        for (int v = 0; v < mn; ++v) {
            worst_lemma6 =
                std::max(worst_lemma6, std::abs(std::norm(prod.row(v).sum()) - 1.0));
            // interference weight used by the SE evaluator: diagonal power plus
            // off-diagonal row power
            const double chi = std::norm(prod(v, v));
            const double kappa_pow = prod.row(v).squaredNorm() - chi;
            worst_sum_hi = std::max(worst_sum_hi, chi + kappa_pow - 1.0);
            if (pi.ell != pj.ell)
                worst_sum_distinct =
                    std::max(worst_sum_distinct, std::abs(chi + kappa_pow - 1.0));
        }
    }
    out.require(worst_unitary <= 1e-10, "unitarity residual " + fmt(worst_unitary));
    out.require(worst_lemma5 <= 1e-10, "distinct-delay diagonal " + fmt(worst_lemma5));
    out.require(worst_lemma6 <= 1e-9, "row-sum magnitude " + fmt(worst_lemma6));
    out.require(worst_sum_hi <= 1e-9, "chi+kappa exceeds 1 by " + fmt(worst_sum_hi));
    out.require(worst_sum_distinct <= 1e-9,
                "chi+kappa off 1 at distinct delays by " + fmt(worst_sum_distinct));
    out.note("residuals: unit=" + fmt(worst_unitary) + " diag=" + fmt(worst_lemma5) +
             " rowsum=" + fmt(worst_lemma6));
    return out;
}

// --------------------------------------------------------------------------
// C2: closed form vs Monte Carlo at the small-frame scale
// --------------------------------------------------------------------------
Outcome criterion2() {
    Outcome out;
    for (int n_tx : {10, 20}) {
        ExperimentConfig cfg;
        cfg.m_subcarriers = 16;
        cfg.n_symbols = 8;
        cfg.tau_max_s = 5e-6;
        cfg.antennas_per_ap = 2;
        cfg.n_tx_aps = n_tx;
        cfg.n_rx_aps = 2;
        cfg.n_users = 4;
        cfg.paths_per_link = 3;
        cfg.use_sensing_beam = false;
        const auto res = sim::mc_validate_se(cfg, 1, 600, 0);
        double worst_rel = 0, worst_z = 0;
        for (const auto& u : res.users) {
            worst_rel = std::max(worst_rel, u.rel_err);
            for (const auto& [mc, cf, se] :
                 {std::tuple{u.ds_mc, u.ds_cf, u.ds_se}, {u.bu_mc, u.bu_cf, u.bu_se},
                  {u.isi_mc, u.isi_cf, u.isi_se}, {u.iui_mc, u.iui_cf, u.iui_se}})
                worst_z = std::max(worst_z, std::abs(mc - cf) / se);
        }
        out.require(worst_rel <= 0.05, "N_tx=" + std::to_string(n_tx) + " worst |MC-CF|/CF " +
                                           fmt(worst_rel));
        out.require(worst_z <= 3.0, "N_tx=" + std::to_string(n_tx) +
                                        " component z-score " + fmt(worst_z));
        out.note("N_tx=" + std::to_string(n_tx) + ": rel=" + fmt(worst_rel) +
                 " z=" + fmt(worst_z));
    }
    return out;
}

// --------------------------------------------------------------------------
// C3: lower-bound tightness
// --------------------------------------------------------------------------
Outcome criterion3() {
    Outcome out;
    double worst_gap = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto cfg = testsup::desk_config(2, 2, 2, 8, 4, 2);
        const auto sc = geo::place_scenario(deploy_config(cfg), 1000 + seed);
        const auto st = build_stats_otfs(sc, cfg);
        perf::PowerAlloc a;
        a.eta = Eigen::MatrixXd::Zero(2, 3);
        for (int p = 0; p < 2; ++p)
            for (int q = 1; q <= 2; ++q)
                a.eta(p, q) = 0.5 / (st.b_trace(p, 0) + st.b_trace(p, 1));
        for (int q = 0; q < 2; ++q) {
            const double full = perf::se_full(st, a, q).se;
            const double lower = perf::se_lower_bound(st, a, q).se;
            worst_gap = std::max(worst_gap, std::abs(full - lower) / std::max(1e-300, full));
        }
    }
    out.require(worst_gap <= 0.01, "distinct-delay gap " + fmt(worst_gap));

    double worst_violation = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto cfg = testsup::desk_config(2, 2, 2, 8, 4, 2);
        cfg.distinct_delays = false;
        cfg.tau_max_s = 1e-9;  // ell_max = 0: every path collides in delay
        const auto sc = geo::place_scenario(deploy_config(cfg), 2000 + seed);
        const auto st = build_stats_otfs(sc, cfg);
        perf::PowerAlloc a;
        a.eta = Eigen::MatrixXd::Zero(2, 3);
        for (int p = 0; p < 2; ++p)
            for (int q = 1; q <= 2; ++q)
                a.eta(p, q) = 0.5 / (st.b_trace(p, 0) + st.b_trace(p, 1));
        for (int q = 0; q < 2; ++q) {
            const double full = perf::se_full(st, a, q).se;
            const double lower = perf::se_lower_bound(st, a, q).se;
            worst_violation = std::max(worst_violation, lower - full);
        }
    }
    out.require(worst_violation <= 1e-9,
                "collision case: lower exceeds full by " + fmt(worst_violation));
    out.note("distinct gap=" + fmt(worst_gap) + " collision slack=" + fmt(worst_violation));
    return out;
}

// --------------------------------------------------------------------------
// C4: optimizer correctness
// --------------------------------------------------------------------------
Outcome criterion4() {
    Outcome out;

    // (a) + (b) + (d): monotone trace, exit feasibility, equal-power dominance
    double worst_drop = 0, worst_budget = 0, worst_dom = 0;
    int dominance_checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto co = testsup::desk_coefficients(4000 + seed, 3, 3, seed % 2 == 0);
        alloc::SolverOptions opt;
        if (seed % 4 == 0) {
            const double cert = alloc::max_sensing_sinr(co);
            if (cert > 0) opt.gamma_s = 0.3 * cert;  // sensing active on some instances
        }
        const auto res = alloc::maxmin_allocate(co, opt);
        for (std::size_t i = 1; i < res.state.trace.size(); ++i)
            worst_drop = std::max(worst_drop,
                                  res.state.trace[i - 1].z - res.state.trace[i].z);
        alloc::check_exit_feasibility(co, res.alloc, opt.gamma_s, 1e-6);
        worst_budget = std::max(worst_budget, alloc::max_ap_budget(co, res.alloc));
        const auto eq = alloc::equal_power(co);
        const bool eq_feasible =
            opt.gamma_s <= 0 || alloc::sensing_sinr_value(co, eq) >= opt.gamma_s;
        if (eq_feasible) {
            ++dominance_checked;
            const double gain = alloc::min_user_sinr(co, res.alloc) -
                                alloc::min_user_sinr(co, eq);
            worst_dom = std::min(worst_dom, gain);
        }
    }
    out.require(worst_drop <= 1e-8, "z-trace drops by " + fmt(worst_drop));
    out.require(worst_budget <= 1.0 + 1e-6, "budget usage " + fmt(worst_budget));
    out.require(worst_dom >= -1e-6, "equal power beats the optimum by " + fmt(-worst_dom));

    // (c) brute-force equivalence at 2 APs x 2 users
    double worst_bf = 0;
    for (std::uint64_t seed : {11ull, 31ull, 77ull}) {
        auto co = testsup::desk_coefficients(seed, 2, 2, false);
        alloc::SolverOptions opt;
        opt.epsilon = 1e-7;
        const auto res = alloc::maxmin_allocate(co, opt);
        const auto grid = testsup::grid_search_2x2(co, 1e-2);
        const double solver = alloc::min_user_sinr(co, res.alloc);
        out.require(solver >= grid.min_sinr * (1 - 1e-9),
                    "solver below the grid optimum at seed " + std::to_string(seed));
        const double gap = std::abs(solver - grid.min_sinr);
        out.require(gap <= grid.step_sensitivity + 1e-9,
                    "solver-vs-grid gap " + fmt(gap) + " beyond one grid step at seed " +
                        std::to_string(seed));
        worst_bf = std::max(worst_bf, gap / std::max(1e-300, grid.min_sinr));
    }
    out.note("checked dominance on " + std::to_string(dominance_checked) +
             " feasible instances; worst grid gap " + fmt(worst_bf));
    return out;
}

// --------------------------------------------------------------------------
// C5: CP-overhead table reproduction
// --------------------------------------------------------------------------
Outcome criterion5() {
    Outcome out;
    const auto rows = ofdm::overhead_table({15e3, 45e3, 75e3, 105e3, 135e3},
                                           {14, 4, 2, 2, 1}, 512, 128);
    auto rounded = [](double frac) { return std::round(10000.0 * frac) / 100.0; };
    const double otfs_eva[5] = {0.03, 0.09, 0.15, 0.21, 0.26};
    const double ofdm_eva[5] = {3.91, 11.33, 18.75, 26.37, 33.79};
    const double otfs_evb[5] = {0.12, 0.35, 0.59, 0.82, 1.06};
    const double ofdm_evb[3] = {15.04, 45.12, 75.00};
    for (int i = 0; i < 5; ++i) {
        out.require(rounded(rows[i].otfs_eva) == otfs_eva[i],
                    "OTFS EVA row " + std::to_string(i) + " = " + fmt(rounded(rows[i].otfs_eva)));
        out.require(rounded(rows[i].ofdm_eva) == ofdm_eva[i],
                    "OFDM EVA row " + std::to_string(i) + " = " + fmt(rounded(rows[i].ofdm_eva)));
        out.require(rounded(rows[i].otfs_evb) == otfs_evb[i],
                    "OTFS EVB row " + std::to_string(i) + " = " + fmt(rounded(rows[i].otfs_evb)));
        if (i < 3)
            out.require(rounded(rows[i].ofdm_evb) == ofdm_evb[i],
                        "OFDM EVB row " + std::to_string(i) + " = " +
                            fmt(rounded(rows[i].ofdm_evb)));
    }
    out.require(rows[0].ofdm_evb_feasible && rows[1].ofdm_evb_feasible &&
                    rows[2].ofdm_evb_feasible,
                "EVB flagged infeasible below 105 kHz");
    out.require(!rows[3].ofdm_evb_feasible && !rows[4].ofdm_evb_feasible,
                "EVB not flagged infeasible at 105/135 kHz");
    out.note("all 18 printed overheads match");
    return out;
}

// --------------------------------------------------------------------------
// C6: SE vs sensing-SINR tradeoff shape
// --------------------------------------------------------------------------
Outcome criterion6() {
    Outcome out;
    for (int m_t : {1, 4}) {
        ExperimentConfig cfg;
        cfg.n_tx_aps = 20;
        cfg.n_rx_aps = 2;
        cfg.n_users = 5;
        cfg.antennas_per_ap = m_t;
        cfg.region_size_m = 500;
        for (std::uint64_t s = 0; s < 2; ++s) {
            const auto sc = geo::place_scenario(deploy_config(cfg),
                                                sim::scenario_seed(60 + m_t, (int)s));
            const auto st = build_stats_otfs(sc, cfg);
            const auto co_beam = alloc::extract_coefficients(st, true);
            const auto co_nobeam = alloc::extract_coefficients(st, false);
            const double cert_beam = alloc::max_sensing_sinr(co_beam);
            const double cert_nobeam = alloc::max_sensing_sinr(co_nobeam);
            out.require(cert_beam >= cert_nobeam * (1 - 1e-12),
                        "beam shrinks the feasible range at Mt=" + std::to_string(m_t));

            // 12-point sweep placed from the certificate: covers the inactive
            // plateau, the dual-constrained ramp, and one infeasible point.
            // Solved from the tightest threshold down with warm starts, so the
            // curve is monotone by construction.
            std::vector<double> gammas;
            for (int i = 0; i < 12; ++i)
                gammas.push_back(cert_beam * std::pow(10.0, -6.0 + 6.6 * i / 11.0));
            // min-SE here is the optimizer's own metric (estimate-based, the
            // quantity Algorithm 1 maximizes); the true-channel evaluation
            // tracks it up to the estimation-error gap.
            std::vector<double> min_se(gammas.size(), 0.0);
            std::vector<bool> feasible(gammas.size(), false);
            perf::PowerAlloc warm;
            bool have_warm = false;
            for (std::size_t gi = gammas.size(); gi-- > 0;) {
                alloc::SolverOptions opt;
                opt.gamma_s = gammas[gi];
                try {
                    const auto res =
                        alloc::maxmin_allocate(co_beam, opt, have_warm ? &warm : nullptr);
                    min_se[gi] =
                        st.prelog * std::log2(1.0 + alloc::min_user_sinr(co_beam, res.alloc));
                    feasible[gi] = true;
                    warm = res.alloc;
                    have_warm = true;
                } catch (const Infeasible&) {
                }
            }
            out.require(!feasible.back(), "last sweep point unexpectedly feasible");
            out.require(feasible.front(), "first sweep point infeasible");
            double prev = 1e300;
            for (std::size_t i = 0; i < gammas.size(); ++i) {
                if (!feasible[i]) continue;
                out.require(min_se[i] <= prev * (1 + 1e-9),
                            "min-SE increased along the sweep at Mt=" + std::to_string(m_t));
                prev = min_se[i];
            }
            const double plateau_spread =
                std::abs(min_se[0] - min_se[2]) / std::max(1e-300, min_se[0]);
            out.require(plateau_spread < 0.01,
                        "low-gamma plateau varies by " + fmt(plateau_spread));
            if (m_t == 4 && s == 0)
                out.note("Mt=4 cert(beam)=" + fmt(linear_to_db(cert_beam)) +
                         " dB vs " + fmt(linear_to_db(cert_nobeam)) + " dB, plateau " +
                         fmt(min_se[0]) + " bit/s/Hz");
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// C7: desk-scale substitutes for the full-scale distribution claims
// --------------------------------------------------------------------------
Outcome criterion7() {
    Outcome out;

    // optimized-vs-equal dominance per scenario
    auto cdf_cfg = testsup::desk_config(6, 3, 2, 8, 4, 2);
    cdf_cfg.n_scenarios = 4;
    cdf_cfg.gamma_s_db = -300;
    cdf_cfg.use_sensing_beam = false;
    const auto cdf = sim::run_cdf_experiment(cdf_cfg);
    for (int s = 0; s < cdf_cfg.n_scenarios; ++s) {
        double eq_min = 1e300, opt_min = 1e300;
        for (const auto& r : cdf.rows) {
            if (r.scenario != s) continue;
            eq_min = std::min(eq_min, r.otfs_eq_est);
            opt_min = std::min(opt_min, r.otfs_opt_est);
        }
        out.require(opt_min >= eq_min * (1 - 1e-6),
                    "optimized minimum below equal power in scenario " + std::to_string(s));
    }

    // bandwidth sweep: gap ratio strictly increasing, OTFS SE flat
    auto bw_cfg = testsup::desk_config(10, 3, 2, 64, 32, 4);
    bw_cfg.region_size_m = 150;
    bw_cfg.n_scenarios = 4;
    bw_cfg.use_sensing_beam = false;
    const auto bw = sim::run_bandwidth_sweep(bw_cfg, {15e3, 45e3, 75e3, 105e3, 135e3},
                                             {14, 4, 2, 2, 1});
    double prev_ratio = 0, otfs_lo = 1e300, otfs_hi = 0;
    for (const auto& r : bw.rows) {
        out.require(r.ofdm_feasible, "EVA sweep row unexpectedly infeasible");
        out.require(r.gap_ratio > prev_ratio, "gap ratio not strictly increasing");
        prev_ratio = r.gap_ratio;
        otfs_lo = std::min(otfs_lo, r.otfs_se);
        otfs_hi = std::max(otfs_hi, r.otfs_se);
    }
    const double spread = (otfs_hi - otfs_lo) / otfs_hi;
    out.require(spread < 0.05, "OTFS SE varies by " + fmt(spread) + " across the sweep");
    out.note("gap ratio " + fmt(bw.rows.front().gap_ratio) + " -> " +
             fmt(bw.rows.back().gap_ratio) + ", OTFS spread " + fmt(spread));
    return out;
}

// --------------------------------------------------------------------------
// C8: determinism across reruns and thread counts
// --------------------------------------------------------------------------
Outcome criterion8() {
    Outcome out;
    auto cfg = testsup::desk_config(3, 2, 2, 8, 4, 2);
    cfg.n_scenarios = 3;
    cfg.gamma_s_db = -300;
    cfg.use_sensing_beam = false;

    auto run_cdf = [&](int threads) {
        auto c = cfg;
        c.threads = threads;
        return sim::run_cdf_experiment(c);
    };
    const auto a = run_cdf(1);
    const auto b = run_cdf(4);
    const auto c = run_cdf(2);
    out.require(a.to_csv() == b.to_csv() && a.to_csv() == c.to_csv(),
                "CDF result CSV differs across thread counts");
    out.require(a.convergence_jsonl == b.convergence_jsonl,
                "convergence trace differs across thread counts");

    const auto m1 = sim::mc_validate_se(cfg, 77, 64, 1);
    const auto m2 = sim::mc_validate_se(cfg, 77, 64, 3);
    out.require(m1.to_csv() == m2.to_csv(), "Monte Carlo CSV differs across thread counts");

    auto bw_cfg = cfg;
    bw_cfg.m_subcarriers = 64;
    bw_cfg.n_symbols = 32;
    bw_cfg.paths_per_link = 4;
    const auto b1 = sim::run_bandwidth_sweep(bw_cfg, {15e3, 45e3}, {14, 4});
    bw_cfg.threads = 4;
    const auto b2 = sim::run_bandwidth_sweep(bw_cfg, {15e3, 45e3}, {14, 4});
    out.require(b1.to_csv() == b2.to_csv(), "bandwidth CSV differs across thread counts");
    out.note("CDF, Monte Carlo, and bandwidth outputs byte-identical at 1/2/3/4 threads");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"matrix identities (unitarity, diagonal, row sums, chi+kappa)", criterion1},
        {"closed form vs Monte Carlo (SE within 5%, components within 3 SE)", criterion2},
        {"lower-bound tightness and ordering", criterion3},
        {"optimizer: monotone trace, feasibility, brute force, dominance", criterion4},
        {"CP-overhead table reproduction", criterion5},
        {"tradeoff-curve shape (plateau, monotone, beam feasibility)", criterion6},
        {"desk-scale distribution substitutes (dominance, gap growth, flat OTFS)", criterion7},
        {"determinism across thread counts", criterion8},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int num = static_cast<int>(i) + 1;
        if (only != 0 && only != num) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] C%d %s (%.1f s)%s%s\n", out.pass ? "PASS" : "FAIL", num,
                    criteria[i].first.c_str(), dt, out.detail.empty() ? "" : ": ",
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
