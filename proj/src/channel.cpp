#include "cfisac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfisac::chan {

IndexBounds derive_index_bounds(double tau_max_s, double v_max_mps, double fc_hz,
                                int m, int n, double delta_f) {
    if (!(tau_max_s >= 0) || !(v_max_mps >= 0) || !(fc_hz > 0) || !(delta_f > 0))
        throw ConfigError("derive_index_bounds: nonpositive input");
    IndexBounds b;
    b.ell_max = static_cast<int>(std::ceil(tau_max_s * m * delta_f - 1e-12));
    const double nu_max = fc_hz * v_max_mps / kSpeedOfLight;
    const double t_sym = 1.0 / delta_f;
    b.k_max = static_cast<int>(std::ceil(nu_max * n * t_sym - 1e-12));
    b.n_cp = b.ell_max;
    if (b.ell_max >= m)
        throw GridTooSmall("delay spread needs " + std::to_string(b.ell_max) +
                           " taps but the grid has only M=" + std::to_string(m));
    if (b.k_max >= (n + 1) / 2)
        throw GridTooSmall("Doppler spread needs k_max=" + std::to_string(b.k_max) +
                           " but the grid has only N/2=" + std::to_string(n / 2));
    return b;
}

std::vector<dd::PathDD> sample_paths(Rng& rng, int l, int ell_max, int k_max,
                                     bool distinct_delays) {
    if (l < 1) throw ConfigError("sample_paths: need at least one path");
    if (distinct_delays && l > ell_max + 1)
        throw ConfigError("sample_paths: " + std::to_string(l) +
                          " distinct delays do not fit in {0.." + std::to_string(ell_max) + "}");
    std::vector<int> delays(l);
    if (distinct_delays) {
        // partial Fisher-Yates over {0..ell_max}
        std::vector<int> pool(ell_max + 1);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < l; ++i) {
            const int j = static_cast<int>(rng.uniform_int(i, ell_max));
            std::swap(pool[i], pool[j]);
            delays[i] = pool[i];
        }
    } else {
        for (int i = 0; i < l; ++i) delays[i] = static_cast<int>(rng.uniform_int(0, ell_max));
    }
    std::vector<dd::PathDD> out(l);
    for (int i = 0; i < l; ++i) {
        out[i].ell = delays[i];
        out[i].k = static_cast<int>(rng.uniform_int(-k_max, k_max));
        double u;
        do { u = rng.uniform(); } while (u == 0.0);  // keep kappa strictly above -0.5
        out[i].kappa = u - 0.5;
    }
    return out;
}

Eigen::MatrixXcd assemble_effective_channel(const std::vector<PathRealization>& paths,
                                            const dd::DDGridSpec& grid) {
    grid.validate();
    if (paths.empty()) throw DomainError("assemble_effective_channel: no paths");
    const int mn = grid.size();
    if (mn > 4096)
        throw UseFactoredForm("assemble_effective_channel: MN=" + std::to_string(mn) +
                              " exceeds the dense guard");
    const int m_t = static_cast<int>(paths.front().gain.size());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(mn, static_cast<long>(m_t) * mn);
    for (const auto& pr : paths) {
        if (pr.gain.size() != m_t)
            throw DomainError("assemble_effective_channel: inconsistent antenna count");
        const Eigen::MatrixXcd t = dd::build_T(grid, pr.dd);
        for (int s = 0; s < m_t; ++s) h.block(0, static_cast<long>(s) * mn, mn, mn) += pr.gain(s) * t;
    }
    return h;
}

cxd sample_rcs(Rng& rng, double sigma2) {
    if (sigma2 < 0) throw DomainError("sample_rcs: variance must be nonnegative");
    if (sigma2 == 0) return {0.0, 0.0};
    return rng.cnormal(sigma2);
}

Eigen::MatrixXcd sample_target_free_factor(Rng& rng, int m_t) {
    Eigen::MatrixXcd w(m_t, m_t);
    for (int r = 0; r < m_t; ++r)
        for (int c = 0; c < m_t; ++c) w(r, c) = rng.cnormal(1.0);
    return w;
}

GaussianVectorSampler::GaussianVectorSampler(const Eigen::MatrixXcd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov);
    if (es.info() != Eigen::Success)
        throw EstimatorDegenerate("GaussianVectorSampler: eigendecomposition failed");
    const double floor = -1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < floor)
        throw EstimatorDegenerate("GaussianVectorSampler: covariance indefinite beyond tolerance");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    factor_ = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

Eigen::VectorXcd GaussianVectorSampler::sample(Rng& rng) const {
    Eigen::VectorXcd g(factor_.cols());
    for (int i = 0; i < g.size(); ++i) g(i) = rng.cnormal(1.0);
    return factor_ * g;
}

}  // namespace cfisac::chan
