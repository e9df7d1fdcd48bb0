#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfisac/common.hpp"
#include "cfisac/channel.hpp"
#include "cfisac/dd_lattice.hpp"

namespace cfisac::perf {

// Downlink power-control coefficients. Column 0 is the dedicated sensing beam,
// columns 1..K_u the users. All entries nonnegative.
struct PowerAlloc {
    Eigen::MatrixXd eta;  // n_tx x (k_u + 1)

    double user(int p, int q) const { return eta(p, q + 1); }      // q in [0, k_u)
    double sensing(int p) const { return eta(p, 0); }
    int n_tx() const { return static_cast<int>(eta.rows()); }
    int k_u() const { return static_cast<int>(eta.cols()) - 1; }
};

struct PathStats {
    dd::PathDD dd;
    Eigen::MatrixXcd r;  // spatial correlation
    Eigen::MatrixXcd b;  // MMSE estimate covariance (equals r in perfect-CSI mode)
};

struct LinkStats {
    std::vector<PathStats> paths;
};

struct SensingPairStats {
    Eigen::MatrixXcd r_rx, r_tx;  // target-free correlation pair
    Eigen::MatrixXcd v;           // h_tr h_pt^T at the target location
    double beta_pr = 0.0;         // radar-equation link gain
    double sigma_rcs2 = 0.0;      // RCS variance
};

/**
 * Everything the closed forms consume for one scenario draw: per-link per-path
 * (R, B) pairs, the sensing-beam covariances, the target/clutter statistics,
 * the grid, and the normalized downlink SNR. Signal kind enters only through
 * the pre-log factor and the grid the operators live on.
 */
struct SystemStats {
    dd::DDGridSpec grid;
    int n_tx = 0, n_rx = 0, k_u = 0, m_t = 0;
    double rho_d = 0.0;   // P_d / noise variance
    double prelog = 1.0;  // omega for the active signal kind
    bool per_symbol_grid = false;  // true for the OFDM baseline (operators are M x M)

    std::vector<std::vector<LinkStats>> comm;       // [p][q]
    std::vector<Eigen::VectorXcd> beam_steer;       // a(hotspot angles) per tx AP
    std::vector<Eigen::MatrixXcd> beam_cov;         // B_p0 = a a^H per tx AP
    std::vector<std::vector<SensingPairStats>> sensing;  // [p][r]

    // Total estimate-covariance trace of user q at AP p (the per-AP budget weight).
    double b_trace(int p, int q) const {
        double s = 0;
        for (const auto& ps : comm[p][q].paths) s += ps.b.trace().real();
        return s;
    }
};

// Thermal noise power over the occupied band: k_B * 290 K * (M * delta_f) * 10^(F/10).
double noise_variance(int m, double delta_f_hz, double noise_figure_db);

enum class SignalKind { kOtfs, kOfdm };

// CP pre-log: 1 - n_cp/(MN) for OTFS, 1 - n_cp/M for OFDM.
double prelog(const dd::DDGridSpec& grid, SignalKind kind);

struct SEResult {
    double se = 0.0;    // bit/s/Hz
    double sinr = 0.0;  // linear
};

// Which matrix occupies the "actual channel" slot of the interference traces:
// R for SE evaluation, B for the optimizer's substitute objective.
enum class FirstSlot { kR, kB };

/**
 * Closed-form SE lower bound of user q (0-based among users):
 *   SINR = rho (sum_p sum_i eta_pq^1/2 Tr B_pq,i)^2 /
 *          (rho [sum_p eta_pq sum_ij Tr(X_pq,i B_pq,j)
 *                + sum_p sum_{q'!=q, incl. beam} eta_pq' sum_ij Tr(X_pq,i B_pq',j)] + 1)
 *   SE = prelog * log2(1 + SINR)
 * with X = R or B per first_slot.
 */
SEResult se_lower_bound(const SystemStats& st, const PowerAlloc& alloc, int q,
                        FirstSlot first_slot = FirstSlot::kR);

struct SEFullResult {
    double se = 0.0;
    std::vector<double> sinr_per_v;
};

/**
 * Full per-lattice-point SE of user q: SE = (prelog/MN) sum_v log2(1+SINR_v),
 * with the within-link interference weighted per (i, j, v). The i != j weight
 * splits into the diagonal power chi (precoding-gain uncertainty) and the
 * off-diagonal row power (inter-symbol interference); its sum is exactly 1
 * by unitarity, which is what makes the lower bound tight. Cross-user terms
 * carry weight 1 (unit row power of a unitary product).
 * Desk-scale guard: throws UseLowerBound when MN > 512.
 */
SEFullResult se_full(const SystemStats& st, const PowerAlloc& alloc, int q,
                     FirstSlot first_slot = FirstSlot::kR);

struct ComponentPowers {
    double ds2 = 0.0;  // squared desired-signal mean
    double bu = 0.0;   // precoding-gain uncertainty power
    double isi = 0.0;  // inter-symbol interference power
    double iui = 0.0;  // inter-user (+ sensing beam) interference power
};

enum class SplitMode {
    kBound,  // i != j pairs: chi = 0 to BU, weight 1 to ISI (distinct-delay convention)
    kFull,   // per-v chi split averaged over the lattice
};

ComponentPowers component_powers(const SystemStats& st, const PowerAlloc& alloc, int q,
                                 SplitMode mode = SplitMode::kBound,
                                 FirstSlot first_slot = FirstSlot::kR);

struct SensingReport {
    double numerator = 0.0;    // reflected-power term (before dividing)
    double denominator = 0.0;  // clutter + noise term
    double sinr = 0.0;
    double sinr_db = -std::numeric_limits<double>::infinity();
};

/**
 * Closed-form sensing SINR:
 *   num = rho sum_r sum_p sum_q sum_i eta_pq sigma_pr^2 beta_pr Tr(V B V^H)
 *   den = rho sum_r sum_p sum_q sum_i eta_pq Tr(R_rx) Tr(R_tx B) + N_rx Mt
 * The q sum includes the dedicated beam column.
 */
SensingReport sensing_sinr(const SystemStats& st, const PowerAlloc& alloc);

}  // namespace cfisac::perf
