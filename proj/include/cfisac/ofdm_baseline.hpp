#pragma once

#include <string>
#include <vector>

#include "cfisac/common.hpp"
#include "cfisac/performance.hpp"

namespace cfisac::ofdm {

// Block-type pilot configuration for the OFDM baseline.
struct OFDMConfig {
    int m = 512;
    double delta_f = 15e3;
    int n_cp = 20;          // samples
    int pilot_len = 14;     // orthogonal pilot sequences available
    double d_t = 0;         // pilot time interval (seconds), 0 = unchecked
    double d_f = 0;         // pilot frequency interval (Hz), 0 = unchecked

    // Pilot-interval sampling conditions: D_t < 1/(2 nu_max T), D_f < 1/(delta_f tau_max).
    void validate(double nu_max_hz, double tau_max_s) const;
};

// SE of user q under the OFDM pre-log; identical trace algebra to the OTFS
// lower bound, so it simply evaluates on OFDM-built statistics.
perf::SEResult ofdm_se_lower(const perf::SystemStats& ofdm_stats, const perf::PowerAlloc& alloc,
                             int q);

struct OverheadRow {
    double delta_f_hz = 0;
    int n_cp_eva = 0, n_cp_evb = 0;
    double otfs_eva = 0, otfs_evb = 0;  // CP overhead fractions
    double ofdm_eva = 0, ofdm_evb = 0;
    bool ofdm_evb_feasible = true;      // false when the CP exceeds the symbol
    int pilot_len = 0;
};

// CP-overhead table across subcarrier bandwidths for the EVA (tau = 2.5 us)
// and EVB (tau = 10 us) delay profiles at fixed M, N.
std::vector<OverheadRow> overhead_table(const std::vector<double>& delta_f_hz,
                                        const std::vector<int>& pilot_lens, int m, int n,
                                        double tau_eva_s = 2.5e-6, double tau_evb_s = 10e-6);

std::string overhead_table_csv(const std::vector<OverheadRow>& rows);

}  // namespace cfisac::ofdm
