#include "cfisac/estimation.hpp"

namespace cfisac::est {

Eigen::MatrixXcd compute_psi(const Eigen::MatrixXcd& r_pqi,
                             const std::vector<std::vector<Eigen::MatrixXcd>>& r_all,
                             int q, int n_symbols, const UplinkPowers& powers,
                             const EPLayout& ep) {
    const int m_t = static_cast<int>(r_pqi.rows());
    const int k_u = static_cast<int>(r_all.size());
    if (q < 0 || q >= k_u) throw DomainError("compute_psi: user index out of range");
    if ((int)powers.p_data_w.size() != k_u || (int)powers.eta_ul.size() != k_u)
        throw ConfigError("compute_psi: power vectors must have one entry per user");

    Eigen::MatrixXcd psi = powers.p_pilot_w * powers.eta_ul[q] * r_pqi;
    const double n = static_cast<double>(n_symbols);
    for (int qp = 0; qp < k_u; ++qp) {
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(m_t, m_t);
        for (const auto& r : r_all[qp]) sum += r;
        psi += (powers.eta_ul[qp] * powers.p_data_w[qp] / n) * sum;
    }
    Eigen::MatrixXcd own = Eigen::MatrixXcd::Zero(m_t, m_t);
    for (const auto& r : r_all[q]) own += r;
    const double guard = 4.0 * ep.k_max + 4.0 * ep.k_hat + 1.0;
    psi -= (powers.p_data_w[q] * guard / (n * n)) * own;
    psi += powers.noise_var_w * Eigen::MatrixXcd::Identity(m_t, m_t);
    psi = 0.5 * (psi + psi.adjoint()).eval();

    Eigen::LLT<Eigen::MatrixXcd> llt(psi);
    if (llt.info() != Eigen::Success)
        throw EstimatorDegenerate("compute_psi: covariance not positive definite "
                                  "(own-data guard term dominates at this N)");
    return psi;
}

Eigen::MatrixXcd compute_b(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& psi,
                           double p_pilot_w, double eta_ul) {
    Eigen::LLT<Eigen::MatrixXcd> llt(psi);
    if (llt.info() != Eigen::Success)
        throw EstimatorDegenerate("compute_b: Psi is singular or indefinite");
    Eigen::MatrixXcd b = p_pilot_w * eta_ul * r * llt.solve(r);
    return 0.5 * (b + b.adjoint()).eval();
}

EstimatePairSampler::EstimatePairSampler(const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& b)
    : est_(b), err_(r - b) {}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> EstimatePairSampler::sample(Rng& rng) const {
    Eigen::VectorXcd h_hat = est_.sample(rng);
    Eigen::VectorXcd h = h_hat + err_.sample(rng);
    return {std::move(h_hat), std::move(h)};
}

Eigen::MatrixXcd sensing_beam_cov(const geo::AnglePair& to_hotspot, int m_t) {
    const Eigen::VectorXcd a = geo::array_response(to_hotspot, m_t);
    return a * a.adjoint();
}

EPOverheadReport ep_overhead(const dd::DDGridSpec& grid, const EPLayout& ep, int k_u) {
    if (ep.k_max < 0 || ep.ell_max < 0 || ep.k_hat < 0)
        throw ConfigError("ep_overhead: negative guard sizes");
    EPOverheadReport rep;
    rep.users = k_u;
    rep.cp_overhead = static_cast<double>(grid.n_cp) / grid.size();
    const int height = 4 * ep.k_max + 4 * ep.k_hat + 1;
    const int width = 2 * ep.ell_max + 1;
    if (height > grid.n || width > grid.m)
        throw ConfigError("ep_overhead: pilot guard region exceeds the DD grid");
    rep.pilot_guard_footprint = height * width;
    return rep;
}

}  // namespace cfisac::est
