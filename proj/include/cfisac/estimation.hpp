#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfisac/common.hpp"
#include "cfisac/channel.hpp"
#include "cfisac/geometry.hpp"

namespace cfisac::est {

// Embedded-pilot guard layout. Guard sizes follow the index bounds plus an
// extra fractional-Doppler guard k_hat; pilot positions are never simulated,
// only accounted for in the overhead report.
struct EPLayout {
    int k_max = 0;
    int ell_max = 0;
    int k_hat = 1;
};

// Uplink power knobs entering the estimator statistics.
struct UplinkPowers {
    double p_pilot_w = 0.2;            // per-user pilot power
    std::vector<double> p_data_w;      // per-user uplink data power
    std::vector<double> eta_ul;        // per-user uplink power control in [0, 1]
    double noise_var_w = 0.0;
};

/**
 * Interference-plus-noise covariance of the received pilot for path i of
 * link (p, q):
 *   Psi = Ppil*eta_q*R_pq,i
 *       + (1/N) sum_q' eta_q' Pdt_q' sum_j R_pq',j
 *       - Pdt_q (4 k_max + 4 k_hat + 1)/N^2 sum_j R_pq,j
 *       + noise_var * I
 * r_all[q'][j] supplies the per-user per-path correlation matrices of AP p.
 * Throws EstimatorDegenerate when the result is not positive definite (the
 * subtracted own-data term can dominate at tiny N).
 */
Eigen::MatrixXcd compute_psi(const Eigen::MatrixXcd& r_pqi,
                             const std::vector<std::vector<Eigen::MatrixXcd>>& r_all,
                             int q, int n_symbols, const UplinkPowers& powers,
                             const EPLayout& ep);

// MMSE estimate covariance B = Ppil * eta_q * R * Psi^-1 * R (Hermitian PSD, B <= R).
Eigen::MatrixXcd compute_b(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& psi,
                           double p_pilot_w, double eta_ul);

/**
 * Draws (h_hat, h) with h_hat ~ CN(0,B), eps ~ CN(0,R-B) independent,
 * h = h_hat + eps. Factors are cached at construction for Monte Carlo use.
 * Perfect CSI is the B = R special case (eps = 0).
 */
class EstimatePairSampler {
public:
    EstimatePairSampler(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& b);
    std::pair<Eigen::VectorXcd, Eigen::VectorXcd> sample(Rng& rng) const;  // (h_hat, h)

private:
    chan::GaussianVectorSampler est_, err_;
};

// Rank-one unit-trace beam covariance a(angle) a(angle)^H for the dedicated
// sensing stream pointed at the hotspot center.
Eigen::MatrixXcd sensing_beam_cov(const geo::AnglePair& to_hotspot, int m_t);

struct EPOverheadReport {
    double cp_overhead = 0.0;        // n_cp / (M N)
    int pilot_guard_footprint = 0;   // (4 k_max + 4 k_hat + 1) * (2 ell_max + 1) grid points
    int users = 0;
};

// Overhead accounting only; the SE pre-log uses the CP term alone.
EPOverheadReport ep_overhead(const dd::DDGridSpec& grid, const EPLayout& ep, int k_u);

}  // namespace cfisac::est
