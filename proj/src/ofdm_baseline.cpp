#include "cfisac/ofdm_baseline.hpp"

#include <cmath>
#include <cstdio>

namespace cfisac::ofdm {

void OFDMConfig::validate(double nu_max_hz, double tau_max_s) const {
    if (m < 1) throw ConfigError("OFDMConfig: M must be >= 1");
    if (pilot_len < 1) throw ConfigError("OFDMConfig: pilot_len must be >= 1");
    if (n_cp >= m) throw ConfigError("OFDMConfig: CP exceeds the OFDM symbol");
    // D_t counts symbols between pilot insertions, D_f counts subcarriers.
    const double t = 1.0 / delta_f;
    if (d_t > 0 && nu_max_hz > 0 && d_t >= 1.0 / (2.0 * nu_max_hz * t))
        throw ConfigError("OFDMConfig: pilot time interval violates D_t < 1/(2 nu_max T)");
    if (d_f > 0 && tau_max_s > 0 && d_f >= 1.0 / (delta_f * tau_max_s))
        throw ConfigError("OFDMConfig: pilot frequency interval violates D_f < 1/(df tau_max)");
}

perf::SEResult ofdm_se_lower(const perf::SystemStats& ofdm_stats, const perf::PowerAlloc& alloc,
                             int q) {
    if (!ofdm_stats.per_symbol_grid)
        throw DomainError("ofdm_se_lower: stats were not built for the OFDM baseline");
    return perf::se_lower_bound(ofdm_stats, alloc, q);
}

std::vector<OverheadRow> overhead_table(const std::vector<double>& delta_f_hz,
                                        const std::vector<int>& pilot_lens, int m, int n,
                                        double tau_eva_s, double tau_evb_s) {
    if (pilot_lens.size() != delta_f_hz.size())
        throw ConfigError("overhead_table: one pilot length per bandwidth required");
    std::vector<OverheadRow> rows;
    const double mn = static_cast<double>(m) * n;
    for (std::size_t i = 0; i < delta_f_hz.size(); ++i) {
        OverheadRow r;
        r.delta_f_hz = delta_f_hz[i];
        r.pilot_len = pilot_lens[i];
        r.n_cp_eva = static_cast<int>(std::ceil(tau_eva_s * m * delta_f_hz[i] - 1e-12));
        r.n_cp_evb = static_cast<int>(std::ceil(tau_evb_s * m * delta_f_hz[i] - 1e-12));
        r.otfs_eva = r.n_cp_eva / mn;
        r.otfs_evb = r.n_cp_evb / mn;
        r.ofdm_eva = static_cast<double>(r.n_cp_eva) / m;
        r.ofdm_evb = static_cast<double>(r.n_cp_evb) / m;
        r.ofdm_evb_feasible = r.n_cp_evb < m;
        rows.push_back(r);
    }
    return rows;
}

std::string overhead_table_csv(const std::vector<OverheadRow>& rows) {
    std::string out =
        "delta_f_khz,otfs_cp_eva_pct,otfs_cp_evb_pct,ofdm_cp_eva_pct,ofdm_cp_evb_pct,"
        "ofdm_evb_feasible,pilot_len\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%g,%.2f,%.2f,%.2f,%.2f,%s,%d\n", r.delta_f_hz / 1e3,
                      100 * r.otfs_eva, 100 * r.otfs_evb, 100 * r.ofdm_eva, 100 * r.ofdm_evb,
                      r.ofdm_evb_feasible ? "yes" : "no", r.pilot_len);
        out += buf;
    }
    return out;
}

}  // namespace cfisac::ofdm
