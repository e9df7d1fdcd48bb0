#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfisac/common.hpp"
#include "cfisac/dd_lattice.hpp"
#include "cfisac/rng.hpp"

namespace cfisac::chan {

struct IndexBounds {
    int ell_max = 0;
    int k_max = 0;
    int n_cp = 0;
};

// Index guards from the physical spreads:
//   ell_max = ceil(tau_max * M * delta_f),  nu_max = fc * v_max / c,
//   k_max = ceil(nu_max * N * T),           n_cp = ell_max.
// Throws GridTooSmall when ell_max >= M or k_max >= N/2.
IndexBounds derive_index_bounds(double tau_max_s, double v_max_mps, double fc_hz,
                                int m, int n, double delta_f);

// Uniform path sampling: ell on {0..ell_max} (without replacement when
// distinct_delays), k on {-k_max..k_max}, kappa on the open (-0.5, 0.5).
std::vector<dd::PathDD> sample_paths(Rng& rng, int l, int ell_max, int k_max,
                                     bool distinct_delays);

// One path with its complex gain vector (one entry per transmit antenna).
struct PathRealization {
    dd::PathDD dd;
    Eigen::VectorXcd gain;
};

// H = sum_i (gain_i^T (x) T_i), laid out as Mt column blocks of MN x MN.
// Dense assembly only at desk scale; beyond the guard use the factored form.
Eigen::MatrixXcd assemble_effective_channel(const std::vector<PathRealization>& paths,
                                            const dd::DDGridSpec& grid);

// Swerling-I RCS draw, CN(0, sigma2).
cxd sample_rcs(Rng& rng, double sigma2);

// Target-free channel factor, Mt x Mt i.i.d. CN(0,1) entries.
Eigen::MatrixXcd sample_target_free_factor(Rng& rng, int m_t);

/**
 * CN(0, R) sampler with a cached PSD factor (eigendecomposition with
 * negative-eigenvalue clamping, so exactly-singular R such as R - B at
 * perfect CSI is handled).
 */
class GaussianVectorSampler {
public:
    explicit GaussianVectorSampler(const Eigen::MatrixXcd& cov);
    Eigen::VectorXcd sample(Rng& rng) const;
    int dim() const { return static_cast<int>(factor_.rows()); }

private:
    Eigen::MatrixXcd factor_;  // F with F F^H = R
};

}  // namespace cfisac::chan
