#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cfisac/config.hpp"
#include "cfisac/power_allocator.hpp"
#include "cfisac/stats_builder.hpp"

namespace cfisac::sim {

// Deterministic parallel map: tasks are processed in fixed-size chunks claimed
// off an atomic counter, and every task writes only its own result slot, so
// outputs are identical for any thread count.
void parallel_for(int n_tasks, int threads, const std::function<void(int)>& task);

int resolve_threads(int requested);

struct MCUserReport {
    double mc_se = 0, cf_se = 0, rel_err = 0;
    // v-averaged component comparison: Monte Carlo mean, closed form, standard error
    double ds_mc = 0, ds_cf = 0, ds_se = 0;
    double bu_mc = 0, bu_cf = 0, bu_se = 0;
    double isi_mc = 0, isi_cf = 0, isi_se = 0;
    double iui_mc = 0, iui_cf = 0, iui_se = 0;
};

struct MCValidation {
    std::vector<MCUserReport> users;
    int realizations = 0;
    std::string to_csv() const;
};

/**
 * Monte Carlo validation of the closed-form SE at desk scale (MN <= 512).
 * Per realization, draws (h_hat, h) pairs from the estimator statistics and
 * accumulates the effective-channel product rows through the structured
 * operator cores (the MN x (Mt MN) channel itself is never materialized).
 * Components are compared v-averaged; standard errors come from the spread
 * across realizations.
 */
MCValidation mc_validate_se(const ExperimentConfig& cfg, std::uint64_t seed, int n_real,
                            int threads);

struct CdfRow {
    int scenario = 0, user = 0;
    // columns: [otfs/ofdm][equal/optimized][estimated/perfect]
    double otfs_eq_est = 0, otfs_opt_est = 0, otfs_eq_perf = 0, otfs_opt_perf = 0;
    double ofdm_eq_est = 0, ofdm_opt_est = 0, ofdm_eq_perf = 0, ofdm_opt_perf = 0;
};

struct CdfResult {
    std::vector<CdfRow> rows;
    std::map<std::string, double> likely95;  // 5th percentile per column
    std::string convergence_jsonl;
    std::string to_csv() const;
};

// Per-user SE samples across random scenarios for all eight system variants.
CdfResult run_cdf_experiment(const ExperimentConfig& cfg);

struct TradeoffRow {
    double gamma_db = 0;
    bool with_beam = false;
    double avg_min_se = 0;      // evaluated against the true correlations
    double avg_min_se_opt = 0;  // the optimizer's estimate-based metric (monotone in gamma)
    int feasible_count = 0;
    int scenario_count = 0;
};

struct TradeoffResult {
    std::vector<TradeoffRow> rows;
    std::string convergence_jsonl;
    std::string to_csv() const;
};

// Max-min SE against the sensing threshold, with and without the dedicated
// beam; infeasible (scenario, gamma) pairs are flagged, not fatal.
TradeoffResult run_tradeoff_sweep(const ExperimentConfig& cfg,
                                  const std::vector<double>& gamma_db);

struct BandwidthRow {
    double delta_f_hz = 0;
    double otfs_se = 0, ofdm_se = 0;
    double gap = 0, gap_ratio = 0;
    double otfs_cp_pct = 0, ofdm_cp_pct = 0;
    int pilot_len = 0;
    bool ofdm_feasible = true;
};

struct BandwidthResult {
    std::vector<BandwidthRow> rows;
    std::string to_csv() const;
};

// OTFS vs OFDM average per-user SE across subcarrier bandwidths; CP lengths,
// noise floor, and the OFDM pilot model are re-derived per bandwidth.
BandwidthResult run_bandwidth_sweep(const ExperimentConfig& cfg,
                                    const std::vector<double>& delta_f_hz,
                                    const std::vector<int>& pilot_lens);

// Write named text files into dir (created if needed).
void write_outputs(const std::string& dir, const std::map<std::string, std::string>& files);

// Scenario seed of experiment task index i under the master seed.
std::uint64_t scenario_seed(std::uint64_t master, int index);

}  // namespace cfisac::sim
