#include "cfisac/dd_lattice.hpp"

#include <cmath>

namespace cfisac::dd {

namespace {

constexpr int kDenseGuard = 4096;  // largest MN for explicit MN x MN assembly

inline int imod(long long a, int m) {
    int r = static_cast<int>(a % m);
    return r < 0 ? r + m : r;
}

void check_dense_scale(const DDGridSpec& grid) {
    if (grid.size() > kDenseGuard)
        throw UseFactoredForm("dense DD operator of size " + std::to_string(grid.size()) +
                              " exceeds the desk-scale guard; use DDOperatorFactored");
}

// Phase ramp entries of Delta^e starting at grid index n0 (mod MN semantics of
// the raw diagonal, exponent e * ((n0 + t) as stored)).
inline cxd unit_phase(double turns) {
    const double a = 2.0 * M_PI * turns;
    return {std::cos(a), std::sin(a)};
}

}  // namespace

Eigen::MatrixXcd dft_matrix(int n) {
    Eigen::MatrixXcd f(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            f(a, b) = s * unit_phase(-static_cast<double>(a) * b / n);
    return f;
}

DDOperator build_permutation(const DDGridSpec& grid) {
    grid.validate();
    check_dense_scale(grid);
    const int mn = grid.size();
    DDOperator pi = DDOperator::Zero(mn, mn);
    for (int j = 0; j < mn; ++j) pi((j + 1) % mn, j) = 1.0;
    return pi;
}

DDOperator build_delta(const DDGridSpec& grid, double exponent) {
    grid.validate();
    check_dense_scale(grid);
    const int mn = grid.size();
    DDOperator d = DDOperator::Zero(mn, mn);
    for (int i = 0; i < mn; ++i) d(i, i) = unit_phase(exponent * i / mn);
    return d;
}

DDOperator build_T(const DDGridSpec& grid, const PathDD& path) {
    grid.validate();
    check_path(grid, path);
    check_dense_scale(grid);
    const int m = grid.m, n = grid.n, mn = grid.size();
    const double e = static_cast<double>(path.k) + path.kappa;

    // core = Pi^ell * Delta^e: one nonzero per row, core[(w + ell) mod MN][w] = z^(e*w)
    // Right-multiply K^H by the core, then left-multiply by K, where K = F_N (x) I_M.
    const Eigen::MatrixXcd f = dft_matrix(n);

    // A = core * K^H: row u of A is z^(e*w(u)) times row w(u) of K^H, w(u) = (u - ell) mod MN.
    Eigen::MatrixXcd a(mn, mn);
    Eigen::MatrixXcd kh(mn, mn);  // K^H = F_N^H (x) I_M
    kh.setZero();
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            for (int r = 0; r < m; ++r) kh(bn * m + r, bm * m + r) = std::conj(f(bm, bn));
    for (int u = 0; u < mn; ++u) {
        const int w = imod(u - path.ell, mn);
        a.row(u) = unit_phase(e * w / mn) * kh.row(w);
    }
    // T = K * A.
    Eigen::MatrixXcd t(mn, mn);
    t.setZero();
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            t.block(bn * m, 0, m, mn) += f(bn, bm) * a.block(bm * m, 0, m, mn);
    return t;
}

Eigen::VectorXcd DDOperatorFactored::apply(const Eigen::VectorXcd& x) const {
    grid.validate();
    check_path(grid, path);
    const int m = grid.m, n = grid.n, mn = grid.size();
    if (x.size() != mn) throw DomainError("DDOperatorFactored::apply: size mismatch");
    const Eigen::MatrixXcd f = dft_matrix(n);
    const double e = static_cast<double>(path.k) + path.kappa;

    // y = (F^H (x) I_M) x: block-DFT across the symbol dimension.
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(mn);
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            y.segment(bn * m, m) += std::conj(f(bm, bn)) * x.segment(bm * m, m);
    // phase ramp then cyclic shift by ell
    Eigen::VectorXcd ys(mn);
    for (int w = 0; w < mn; ++w) ys((w + path.ell) % mn) = unit_phase(e * w / mn) * y(w);
    // (F (x) I_M)
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(mn);
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            out.segment(bn * m, m) += f(bn, bm) * ys.segment(bm * m, m);
    return out;
}

Eigen::VectorXcd DDOperatorFactored::apply_adjoint(const Eigen::VectorXcd& x) const {
    grid.validate();
    check_path(grid, path);
    const int m = grid.m, n = grid.n, mn = grid.size();
    if (x.size() != mn) throw DomainError("DDOperatorFactored::apply_adjoint: size mismatch");
    const Eigen::MatrixXcd f = dft_matrix(n);
    const double e = static_cast<double>(path.k) + path.kappa;

    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(mn);
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            y.segment(bn * m, m) += std::conj(f(bm, bn)) * x.segment(bm * m, m);
    // inverse shift then conjugate phase ramp
    Eigen::VectorXcd ys(mn);
    for (int w = 0; w < mn; ++w) ys(w) = std::conj(unit_phase(e * w / mn)) * y((w + path.ell) % mn);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(mn);
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            out.segment(bn * m, m) += f(bn, bm) * ys.segment(bm * m, m);
    return out;
}

DDOperator build_q_ofdm(int m, double tau, double nu_hz, double t_sym) {
    if (m < 1) throw ConfigError("build_q_ofdm: M must be >= 1");
    if (!(t_sym > 0)) throw ConfigError("build_q_ofdm: t_sym must be positive");
    const double samples = tau * m / t_sym;
    const double rounded = std::round(samples);
    if (std::abs(samples - rounded) > 1e-9)
        throw OffGridDelay("build_q_ofdm: delay " + std::to_string(tau) +
                           " s is not on the sample grid");
    const int ell = imod(static_cast<long long>(rounded), m);
    const double cycles = nu_hz * t_sym;  // Doppler in cycles per symbol
    DDOperator q = DDOperator::Zero(m, m);
    for (int col = 0; col < m; ++col)
        q((col + ell) % m, col) = unit_phase(cycles * col / m);
    return q;
}

DDOperator build_q_ofdm_bar(int m, double tau, double nu_hz, double t_sym) {
    const Eigen::MatrixXcd f = dft_matrix(m);
    const DDOperator q = build_q_ofdm(m, tau, nu_hz, t_sym);
    return f * q * f.adjoint();
}

DDOperator build_q_ofdm(const DDGridSpec& grid, const PathDD& path) {
    check_path(grid, path);
    const double tau = static_cast<double>(path.ell) / (grid.m * grid.delta_f);
    const double nu = (static_cast<double>(path.k) + path.kappa) / (grid.n * grid.t_sym);
    return build_q_ofdm(grid.m, tau, nu, grid.t_sym);
}

DDOperator build_q_ofdm_bar(const DDGridSpec& grid, const PathDD& path) {
    check_path(grid, path);
    const double tau = static_cast<double>(path.ell) / (grid.m * grid.delta_f);
    const double nu = (static_cast<double>(path.k) + path.kappa) / (grid.n * grid.t_sym);
    return build_q_ofdm_bar(grid.m, tau, nu, grid.t_sym);
}

ChiKappa chi_kappa(const DDOperator& ti, const DDOperator& tj, int v) {
    if (ti.rows() != tj.rows() || ti.cols() != tj.cols() || ti.rows() != ti.cols())
        throw DomainError("chi_kappa: operator dimension mismatch");
    const int mn = static_cast<int>(ti.rows());
    if (v < 0 || v >= mn) throw DomainError("chi_kappa: row index out of range");
    // Row v of P = Ti * Tj^H without the full product.
    const Eigen::RowVectorXcd row = ti.row(v) * tj.adjoint();
    const cxd diag = row(v);
    const cxd off_sum = row.sum() - diag;
    return {std::norm(diag), std::norm(off_sum)};
}

PairCoeffTable chi_kappa_table(const DDOperator& ti, const DDOperator& tj) {
    if (ti.rows() != tj.rows() || ti.cols() != tj.cols() || ti.rows() != ti.cols())
        throw DomainError("chi_kappa_table: operator dimension mismatch");
    const int mn = static_cast<int>(ti.rows());
    const Eigen::MatrixXcd p = ti * tj.adjoint();
    PairCoeffTable t;
    t.chi.resize(mn);
    t.kappa_amp.resize(mn);
    t.kappa_pow.resize(mn);
    for (int v = 0; v < mn; ++v) {
        const cxd diag = p(v, v);
        t.chi(v) = std::norm(diag);
        t.kappa_amp(v) = std::norm(p.row(v).sum() - diag);
        t.kappa_pow(v) = p.row(v).squaredNorm() - t.chi(v);
    }
    return t;
}

namespace {

// Structured evaluation of P = Ti * Tj^H = K * S * K^H with
// S[u][w] = z^(de * ((u - li) mod MN)) iff (u - li) == (w - lj) mod MN.
// Row u = (nu, mu) of P has nonzeros only at columns w with
// m_w = (mu - li + lj) mod M, one per Doppler block:
//   P[(nu,mu)][(nw,mw)] = sum_{n'} F[nu][n'] d(n',mu) conj(F[nw][(n'+cy) mod N])
// where d(n',mu) = z^(de * (((n'+c2) mod N)*M + r2)), r2 = (mu-li) mod M,
// c2 = -1 if mu < li else 0, and cy = floor((mu - li + lj)/M).
struct StructuredPair {
    int m, n, mn;
    int li, lj;
    double de;

    StructuredPair(const DDGridSpec& grid, const PathDD& pi, const PathDD& pj)
        : m(grid.m), n(grid.n), mn(grid.size()), li(pi.ell), lj(pj.ell),
          de((pi.k + pi.kappa) - (pj.k + pj.kappa)) {
        check_path(grid, pi);
        check_path(grid, pj);
    }

    int col_residue(int mu) const { return imod(mu - li + lj, m); }
    int carry(int mu) const {
        const int raw = mu - li + lj;
        return raw < 0 ? -1 : (raw >= m ? 1 : 0);
    }
    cxd diag_phase(int nprime, int mu) const {
        const int c2 = (mu < li) ? -1 : 0;
        const int idx = imod(nprime + c2, n) * m + imod(mu - li, m);
        return unit_phase(de * idx / mn);
    }
};

}  // namespace

PairCoeffTable chi_kappa_table(const DDGridSpec& grid, const PathDD& pi, const PathDD& pj) {
    const StructuredPair sp(grid, pi, pj);
    const Eigen::MatrixXcd f = dft_matrix(sp.n);
    PairCoeffTable t;
    t.chi = Eigen::VectorXd::Zero(sp.mn);
    t.kappa_amp.resize(sp.mn);
    t.kappa_pow.resize(sp.mn);

    std::vector<cxd> entries(sp.n);
    for (int nu = 0; nu < sp.n; ++nu) {
        for (int mu = 0; mu < sp.m; ++mu) {
            const int v = nu * sp.m + mu;
            const int mw = sp.col_residue(mu);
            const int cy = sp.carry(mu);
            cxd row_sum = 0.0;
            double row_pow = 0.0;
            cxd diag = 0.0;
            for (int nw = 0; nw < sp.n; ++nw) {
                cxd e = 0.0;
                for (int np = 0; np < sp.n; ++np)
                    e += f(nu, np) * sp.diag_phase(np, mu) * std::conj(f(nw, imod(np + cy, sp.n)));
                row_sum += e;
                row_pow += std::norm(e);
                if (nw == nu && mw == mu) diag = e;
            }
            t.chi(v) = std::norm(diag);
            t.kappa_amp(v) = std::norm(row_sum - diag);
            t.kappa_pow(v) = row_pow - t.chi(v);
        }
    }
    return t;
}

void add_scaled_core(const DDGridSpec& grid, const PathDD& pi, const PathDD& pj,
                     cxd scale, Eigen::MatrixXcd& s) {
    const StructuredPair sp(grid, pi, pj);
    if (s.rows() != sp.mn || s.cols() != sp.mn)
        throw DomainError("add_scaled_core: accumulator size mismatch");
    // S[u][w]: w = (u - li + lj) mod MN, value z^(de * ((u - li) mod MN)).
    for (int u = 0; u < sp.mn; ++u) {
        const int shifted = imod(u - sp.li, sp.mn);
        const int w = imod(u - sp.li + sp.lj, sp.mn);
        s(u, w) += scale * unit_phase(sp.de * shifted / sp.mn);
    }
}

Eigen::MatrixXcd sandwich_core(const DDGridSpec& grid, const Eigen::MatrixXcd& s) {
    const int m = grid.m, n = grid.n, mn = grid.size();
    if (s.rows() != mn || s.cols() != mn) throw DomainError("sandwich_core: size mismatch");
    const Eigen::MatrixXcd f = dft_matrix(n);
    // left: A = (F (x) I_M) * S
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(mn, mn);
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            a.block(bn * m, 0, m, mn) += f(bn, bm) * s.block(bm * m, 0, m, mn);
    // right: P = A * (F^H (x) I_M): column blocks combine with conj(F) pattern.
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(mn, mn);
    for (int bn = 0; bn < n; ++bn)
        for (int bm = 0; bm < n; ++bm)
            p.block(0, bn * m, mn, m) += std::conj(f(bn, bm)) * a.block(0, bm * m, mn, m);
    return p;
}

void add_scaled_pair_product(const DDGridSpec& grid, const PathDD& pi, const PathDD& pj,
                             cxd scale, Eigen::MatrixXcd& z) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(grid.size(), grid.size());
    add_scaled_core(grid, pi, pj, scale, s);
    z += sandwich_core(grid, s);
}

}  // namespace cfisac::dd
