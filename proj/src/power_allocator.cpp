#include "cfisac/power_allocator.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

namespace cfisac::alloc {

namespace {

double trace_prod(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& b) {
    return x.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace

SINRCoefficients extract_coefficients(const perf::SystemStats& st, bool use_beam) {
    SINRCoefficients co;
    co.n_tx = st.n_tx;
    co.k_u = st.k_u;
    co.use_beam = use_beam;
    co.rho_d = st.rho_d;
    co.noise_const = static_cast<double>(st.n_rx) * st.m_t;
    co.b = Eigen::MatrixXd::Zero(st.n_tx, st.k_u + 1);
    co.c = Eigen::MatrixXd::Zero(st.n_tx, st.k_u + 1);
    co.d = Eigen::MatrixXd::Zero(st.n_tx, st.k_u + 1);
    co.a.assign(st.k_u, Eigen::MatrixXd::Zero(st.n_tx, st.k_u + 1));

    for (int p = 0; p < st.n_tx; ++p) {
        // column 0: the beam; columns 1..k_u: users
        std::vector<const Eigen::MatrixXcd*> col_b;  // flattened per-column path list
        std::vector<std::pair<int, int>> col_span;   // (first index, count) per column
        std::vector<const Eigen::MatrixXcd*> flat;
        col_span.reserve(st.k_u + 1);
        flat.push_back(&st.beam_cov[p]);
        col_span.emplace_back(0, 1);
        for (int q = 0; q < st.k_u; ++q) {
            const int first = static_cast<int>(flat.size());
            for (const auto& ps : st.comm[p][q].paths) flat.push_back(&ps.b);
            col_span.emplace_back(first, static_cast<int>(st.comm[p][q].paths.size()));
        }
        for (int col = 0; col <= st.k_u; ++col) {
            const auto [first, count] = col_span[col];
            for (int j = 0; j < count; ++j) {
                const Eigen::MatrixXcd& bm = *flat[first + j];
                co.b(p, col) += bm.trace().real();
                for (int r = 0; r < st.n_rx; ++r) {
                    const auto& sp = st.sensing[p][r];
                    co.c(p, col) += sp.sigma_rcs2 * sp.beta_pr *
                                    (sp.v * bm * sp.v.adjoint()).trace().real();
                    co.d(p, col) += sp.r_rx.trace().real() * (sp.r_tx * bm).trace().real();
                }
            }
        }
        for (int q = 0; q < st.k_u; ++q)
            for (const auto& ps : st.comm[p][q].paths)
                for (int col = 0; col <= st.k_u; ++col) {
                    const auto [first, count] = col_span[col];
                    for (int j = 0; j < count; ++j)
                        co.a[q](p, col) += trace_prod(ps.b, *flat[first + j]);
                }
    }
    if (!use_beam) {
        co.b.col(0).setZero();
        co.c.col(0).setZero();
        co.d.col(0).setZero();
        for (auto& aq : co.a) aq.col(0).setZero();
    }
    return co;
}

perf::PowerAlloc equal_power(const SINRCoefficients& co, double sensing_fraction) {
    if (sensing_fraction < 0 || sensing_fraction >= 1)
        throw ConfigError("equal_power: sensing fraction must be in [0, 1)");
    perf::PowerAlloc alloc;
    alloc.eta = Eigen::MatrixXd::Zero(co.n_tx, co.k_u + 1);
    for (int p = 0; p < co.n_tx; ++p) {
        double total = 0;
        for (int q = 1; q <= co.k_u; ++q) total += co.b(p, q);
        if (total <= 0) throw DegenerateScenario("equal_power: AP " + std::to_string(p) +
                                                 " has no estimate power toward any user");
        const double f = (co.use_beam && co.b(p, 0) > 0) ? sensing_fraction : 0.0;
        for (int q = 1; q <= co.k_u; ++q) alloc.eta(p, q) = (1.0 - f) / total;
        if (f > 0) alloc.eta(p, 0) = f / co.b(p, 0);
    }
    return alloc;
}

double user_sinr(const SINRCoefficients& co, const perf::PowerAlloc& alloc, int q) {
    double sig = 0, intf = 0;
    for (int p = 0; p < co.n_tx; ++p) {
        sig += std::sqrt(alloc.eta(p, q + 1)) * co.b(p, q + 1);
        for (int col = 0; col <= co.k_u; ++col) intf += alloc.eta(p, col) * co.a[q](p, col);
    }
    return co.rho_d * sig * sig / (co.rho_d * intf + 1.0);
}

double min_user_sinr(const SINRCoefficients& co, const perf::PowerAlloc& alloc) {
    double m = std::numeric_limits<double>::infinity();
    for (int q = 0; q < co.k_u; ++q) m = std::min(m, user_sinr(co, alloc, q));
    return m;
}

double sensing_sinr_value(const SINRCoefficients& co, const perf::PowerAlloc& alloc) {
    double num = 0, den = 0;
    for (int p = 0; p < co.n_tx; ++p)
        for (int col = 0; col <= co.k_u; ++col) {
            num += alloc.eta(p, col) * co.c(p, col);
            den += alloc.eta(p, col) * co.d(p, col);
        }
    return co.rho_d * num / (co.rho_d * den + co.noise_const);
}

double max_ap_budget(const SINRCoefficients& co, const perf::PowerAlloc& alloc) {
    double worst = 0;
    for (int p = 0; p < co.n_tx; ++p) {
        double s = 0;
        for (int col = 0; col <= co.k_u; ++col) s += alloc.eta(p, col) * co.b(p, col);
        worst = std::max(worst, s);
    }
    return worst;
}

double max_sensing_sinr(const SINRCoefficients& co) {
    // h(gamma) = sum_p max(0, max_col rho*(cbar - gamma*dbar)) - gamma*noise_const,
    // strictly decreasing; the root is the best achievable sensing SINR.
    const auto h = [&](double gamma) {
        double s = -gamma * co.noise_const;
        for (int p = 0; p < co.n_tx; ++p) {
            double best = 0;
            for (int col = 0; col <= co.k_u; ++col) {
                if (co.b(p, col) <= 0) continue;
                const double w =
                    co.rho_d * (co.c(p, col) - gamma * co.d(p, col)) / co.b(p, col);
                best = std::max(best, w);
            }
            s += best;
        }
        return s;
    };
    if (h(0.0) <= 0) return 0.0;
    double hi = 1.0;
    int guard = 0;
    while (h(hi) > 0 && guard++ < 200) hi *= 4.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0 ? lo : hi) = mid;
    }
    return lo;
}

namespace {

// Inner problem in per-AP budget fractions x = eta .* b over the active
// entries (b > 0 and, for column 0, the beam enabled).
struct InnerProblem {
    const SINRCoefficients& co;
    const Eigen::VectorXd& y;
    double gamma;
    bool sensing_on;

    std::vector<std::pair<int, int>> vars;   // (p, col)
    std::vector<std::vector<int>> ap_vars;   // variable ids per AP
    std::vector<std::vector<int>> user_vars; // variable ids with col == q+1, per user
    Eigen::VectorXd bvec;                    // b per variable
    std::vector<Eigen::VectorXd> abar;       // a_q / b per variable, per user
    Eigen::VectorXd w_sen;                   // rho*(c - gamma*d)/b per variable
    Eigen::VectorXd lb;                      // variable floors
    int nv = 0;

    InnerProblem(const SINRCoefficients& c_, const Eigen::VectorXd& y_, double gamma_,
                 double eta_floor)
        : co(c_), y(y_), gamma(gamma_), sensing_on(gamma_ > 0) {
        ap_vars.resize(co.n_tx);
        for (int p = 0; p < co.n_tx; ++p)
            for (int col = (co.use_beam ? 0 : 1); col <= co.k_u; ++col) {
                if (co.b(p, col) <= 0) continue;
                ap_vars[p].push_back(nv);
                vars.emplace_back(p, col);
                ++nv;
            }
        bvec.resize(nv);
        w_sen.resize(nv);
        lb.resize(nv);
        user_vars.resize(co.k_u);
        abar.assign(co.k_u, Eigen::VectorXd::Zero(nv));
        for (int v = 0; v < nv; ++v) {
            const auto [p, col] = vars[v];
            bvec(v) = co.b(p, col);
            w_sen(v) = co.rho_d * (co.c(p, col) - gamma * co.d(p, col)) / co.b(p, col);
            lb(v) = eta_floor * co.b(p, col);
            if (col >= 1) user_vars[col - 1].push_back(v);
            for (int q = 0; q < co.k_u; ++q) abar[q](v) = co.a[q](p, col) / co.b(p, col);
        }
    }

    double g_user(const Eigen::VectorXd& x, int q) const {
        double sig = 0;
        for (int v : user_vars[q]) sig += std::sqrt(bvec(v) * x(v));
        const double den = co.rho_d * abar[q].dot(x) + 1.0;
        return 2.0 * y(q) * std::sqrt(co.rho_d) * sig - y(q) * y(q) * den;
    }

    double sen_margin(const Eigen::VectorXd& x) const {
        return w_sen.dot(x) - gamma * co.noise_const;
    }

    bool feasible_strict(const Eigen::VectorXd& x, double z) const {
        for (int v = 0; v < nv; ++v)
            if (!(x(v) > lb(v))) return false;
        for (int p = 0; p < co.n_tx; ++p) {
            double s = 0;
            for (int v : ap_vars[p]) s += x(v);
            if (!(s < 1.0)) return false;
        }
        if (sensing_on && !(sen_margin(x) > 0)) return false;
        for (int q = 0; q < co.k_u; ++q)
            if (!(g_user(x, q) > z)) return false;
        return true;
    }

    // Barrier objective; nullopt outside the strict interior.
    std::optional<double> phi(const Eigen::VectorXd& x, double z, double t) const {
        if (!feasible_strict(x, z)) return std::nullopt;
        double val = -t * z;
        for (int q = 0; q < co.k_u; ++q) val -= std::log(g_user(x, q) - z);
        for (int p = 0; p < co.n_tx; ++p) {
            double s = 0;
            for (int v : ap_vars[p]) s += x(v);
            val -= std::log(1.0 - s);
        }
        if (sensing_on) val -= std::log(sen_margin(x));
        for (int v = 0; v < nv; ++v) val -= std::log(x(v) - lb(v));
        return val;
    }

    int constraint_count() const {
        return co.k_u + co.n_tx + nv + (sensing_on ? 1 : 0);
    }

    // Barrier gradient plus the Hessian in factored form,
    //   H = diag(diag_out) + u_cols * u_cols^T,
    // one rank-one column per epigraph / power / sensing constraint. The
    // diagonal collects the bound barriers and the concavity of the sqrt
    // terms; only the epigraph columns touch the last (z) coordinate.
    void grad_factors(const Eigen::VectorXd& x, double z, double t, Eigen::VectorXd& grad,
                      Eigen::VectorXd& diag_out, Eigen::MatrixXd& u_cols) const {
        const int n = nv + 1;
        const int r = co.k_u + co.n_tx + (sensing_on ? 1 : 0);
        grad.setZero(n);
        diag_out.setZero(n);
        u_cols.setZero(n, r);
        grad(nv) = -t;
        int col = 0;

        Eigen::VectorXd gf(n);
        for (int q = 0; q < co.k_u; ++q) {
            const double f = g_user(x, q) - z;
            gf.setZero();
            for (int v : user_vars[q])
                gf(v) = y(q) * std::sqrt(co.rho_d) * std::sqrt(bvec(v) / x(v));
            gf.head(nv) -= (y(q) * y(q) * co.rho_d) * abar[q];
            gf(nv) = -1.0;
            grad -= gf / f;
            u_cols.col(col++) = gf / f;
            for (int v : user_vars[q]) {
                const double s = std::sqrt(bvec(v) * x(v));
                // -(1/f) * d2g/dx2, with d2g/dx2 = -y sqrt(rho) b^2 / (2 s^3)
                diag_out(v) +=
                    y(q) * std::sqrt(co.rho_d) * bvec(v) * bvec(v) / (2.0 * s * s * s) / f;
            }
        }
        for (int p = 0; p < co.n_tx; ++p) {
            double s = 0;
            for (int v : ap_vars[p]) s += x(v);
            const double pw = 1.0 - s;
            for (int v : ap_vars[p]) {
                grad(v) += 1.0 / pw;
                u_cols(v, col) = 1.0 / pw;
            }
            ++col;
        }
        if (sensing_on) {
            const double sm = sen_margin(x);
            grad.head(nv) -= w_sen / sm;
            u_cols.col(col++).head(nv) = w_sen / sm;
        }
        for (int v = 0; v < nv; ++v) {
            const double gap = x(v) - lb(v);
            grad(v) -= 1.0 / gap;
            diag_out(v) += 1.0 / (gap * gap);
        }
    }

    perf::PowerAlloc to_alloc(const Eigen::VectorXd& x) const {
        perf::PowerAlloc a;
        a.eta = Eigen::MatrixXd::Zero(co.n_tx, co.k_u + 1);
        for (int v = 0; v < nv; ++v) {
            const auto [p, col] = vars[v];
            a.eta(p, col) = std::max(0.0, x(v)) / co.b(p, col);
        }
        return a;
    }

    Eigen::VectorXd from_alloc(const perf::PowerAlloc& a) const {
        Eigen::VectorXd x(nv);
        for (int v = 0; v < nv; ++v) {
            const auto [p, col] = vars[v];
            x(v) = a.eta(p, col) * co.b(p, col);
        }
        return x;
    }

    // Analytic maximizer of the sensing margin: full budget on the best
    // column per AP, floors elsewhere.
    Eigen::VectorXd best_sensing_point() const {
        Eigen::VectorXd x = 2.0 * lb;
        for (int p = 0; p < co.n_tx; ++p) {
            if (ap_vars[p].empty()) continue;
            int best = ap_vars[p].front();
            for (int v : ap_vars[p])
                if (w_sen(v) > w_sen(best)) best = v;
            if (w_sen(best) <= 0) continue;
            double others = 0;
            for (int v : ap_vars[p])
                if (v != best) others += x(v);
            x(best) = std::max(x(best), 1.0 - 1e-9 - others);
        }
        return x;
    }
};

}  // namespace

Eigen::VectorXd solve_diag_lowrank(const Eigen::VectorXd& d, const Eigen::MatrixXd& u,
                                   const Eigen::VectorXd& rhs) {
    const int n = static_cast<int>(d.size());
    const int r = static_cast<int>(u.cols());
    if (u.rows() != n || rhs.size() != n)
        throw DomainError("solve_diag_lowrank: dimension mismatch");
    if (r == 0) return rhs.cwiseQuotient(d);
    const int nx = n - 1;

    // Bordered system: A = Dx + Ux Ux^T over the leading block, the last
    // coordinate coupled only through b = Ux uz and c = uz.uz.
    const Eigen::VectorXd dx_inv = d.head(nx).cwiseInverse();
    const Eigen::MatrixXd ux = u.topRows(nx);
    const Eigen::VectorXd uz = u.row(nx).transpose();
    const Eigen::MatrixXd w = dx_inv.asDiagonal() * ux;               // Dx^-1 Ux
    Eigen::MatrixXd cap = ux.transpose() * w;                          // Ux^T Dx^-1 Ux
    cap.diagonal().array() += 1.0;
    const Eigen::LLT<Eigen::MatrixXd> cap_llt(cap);
    if (cap_llt.info() != Eigen::Success)
        throw DomainError("solve_diag_lowrank: capacitance matrix not positive definite");
    const auto solve_a = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const Eigen::VectorXd dv = dx_inv.cwiseProduct(v);
        return dv - w * cap_llt.solve(ux.transpose() * dv);
    };

    const Eigen::VectorXd b = ux * uz;
    const double c = d(nx) + uz.squaredNorm();
    const Eigen::VectorXd t1 = solve_a(rhs.head(nx));
    const Eigen::VectorXd t2 = solve_a(b);
    const double schur = c - b.dot(t2);
    if (!(schur > 0))
        throw DomainError("solve_diag_lowrank: system not positive definite");
    const double sz = (rhs(nx) - b.dot(t1)) / schur;
    Eigen::VectorXd s(n);
    s.head(nx) = t1 - t2 * sz;
    s(nx) = sz;
    return s;
}

Eigen::VectorXd update_y(const SINRCoefficients& co, const perf::PowerAlloc& alloc) {
    Eigen::VectorXd y(co.k_u);
    for (int q = 0; q < co.k_u; ++q) {
        double sig = 0, intf = 0;
        for (int p = 0; p < co.n_tx; ++p) {
            sig += std::sqrt(alloc.eta(p, q + 1)) * co.b(p, q + 1);
            for (int col = 0; col <= co.k_u; ++col) intf += alloc.eta(p, col) * co.a[q](p, col);
        }
        y(q) = std::sqrt(co.rho_d) * sig / (co.rho_d * intf + 1.0);
    }
    return y;
}

InnerResult inner_solve(const SINRCoefficients& co, const Eigen::VectorXd& y,
                        const SolverOptions& opt, const perf::PowerAlloc& warm) {
    if (y.size() != co.k_u) throw DomainError("inner_solve: y must have one entry per user");
    InnerProblem prob(co, y, opt.gamma_s, opt.eta_floor);
    if (prob.nv == 0) throw DegenerateScenario("inner_solve: no usable power variables");

    // Well-interior start shaped after the warm point. The warm point itself
    // may hug the power boundary (slack ~ 1/t from the previous barrier run),
    // where the Newton system is hopelessly ill-conditioned, so pull the
    // start towards the per-AP uniform center; the final comparison against
    // the untouched warm point keeps the outer loop monotone regardless.
    Eigen::VectorXd x = prob.from_alloc(warm).cwiseMax(2.0 * prob.lb);
    for (int p = 0; p < co.n_tx; ++p) {
        if (prob.ap_vars[p].empty()) continue;
        double s = 0;
        for (int v : prob.ap_vars[p]) s += x(v);
        if (s > 0.8) {
            const double scale = 0.8 / s;
            for (int v : prob.ap_vars[p]) x(v) *= scale;
        }
        const double uniform = 0.5 / static_cast<double>(prob.ap_vars[p].size());
        for (int v : prob.ap_vars[p]) x(v) = 0.75 * x(v) + 0.25 * uniform;
    }
    if (prob.sensing_on) {
        const Eigen::VectorXd x_lp = prob.best_sensing_point();
        const double m_lp = prob.sen_margin(x_lp);
        if (m_lp <= 0)
            throw Infeasible("inner_solve: sensing constraint unsatisfiable at full power",
                             max_sensing_sinr(co));
        const double m0 = prob.sen_margin(x);
        const double target = 0.05 * m_lp;
        if (m0 < target) {
            double lam = (target - m0) / (m_lp - m0);
            lam = std::min(0.999, std::max(0.0, lam));
            x = (1.0 - lam) * x + lam * x_lp;
        }
    }

    double ming = std::numeric_limits<double>::infinity();
    for (int q = 0; q < co.k_u; ++q) ming = std::min(ming, prob.g_user(x, q));
    double z = ming - std::max(1e-6, 0.1 * std::abs(ming));

    const int m = prob.constraint_count();
    const int n = prob.nv + 1;
    // Dense Newton is fine at desk scale; beyond it the diagonal+low-rank
    // structure makes the factored solve hundreds of times cheaper.
    const bool factored = n > 192;
    double t = std::max(1.0, m / std::max(1e-3, 0.1 * std::abs(z)));
    Eigen::VectorXd grad(n), diag(n), step(n);
    Eigen::MatrixXd ucols;

    for (int outer = 0; outer < 80; ++outer) {
        // center at the current t
        for (int it = 0; it < 80; ++it) {
            prob.grad_factors(x, z, t, grad, diag, ucols);
            if (factored) {
                step = solve_diag_lowrank(diag, ucols, -grad);
            } else {
                Eigen::MatrixXd hess = ucols * ucols.transpose();
                hess.diagonal() += diag;
                step = Eigen::LDLT<Eigen::MatrixXd>(hess).solve(-grad);
            }
            const double decrement2 = -grad.dot(step);
            if (!(decrement2 > 1e-11)) break;
            double alpha = 1.0;
            const double phi0 = *prob.phi(x, z, t);
            const double slope = grad.dot(step);
            bool moved = false;
            for (int ls = 0; ls < 70; ++ls) {
                const Eigen::VectorXd xn = x + alpha * step.head(prob.nv);
                const double zn = z + alpha * step(prob.nv);
                const auto pn = prob.phi(xn, zn, t);
                if (pn && *pn <= phi0 + 0.25 * alpha * slope) {
                    x = xn;
                    z = zn;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
        }
        const double gap = static_cast<double>(m) / t;
        if (gap <= opt.inner_opt_tol * std::max(1.0, std::abs(z))) break;
        t *= 20.0;
    }

    // The barrier keeps z strictly below min_q g; report the exact value.
    double z_out = std::numeric_limits<double>::infinity();
    for (int q = 0; q < co.k_u; ++q) z_out = std::min(z_out, prob.g_user(x, q));

    // Never return worse than the (feasible) warm start under this surrogate.
    Eigen::VectorXd xw = prob.from_alloc(warm);
    bool warm_ok = (xw.array() >= -1e-15).all();
    for (int p = 0; p < co.n_tx && warm_ok; ++p) {
        double s = 0;
        for (int v : prob.ap_vars[p]) s += xw(v);
        warm_ok = s <= 1.0 + 1e-9;
    }
    if (warm_ok && prob.sensing_on) warm_ok = prob.sen_margin(xw) >= -1e-12;
    if (warm_ok) {
        double zw = std::numeric_limits<double>::infinity();
        for (int q = 0; q < co.k_u; ++q)
            zw = std::min(zw, prob.g_user(xw.cwiseMax(0.0), q));
        if (zw > z_out) return {warm, zw};
    }
    return {prob.to_alloc(x), z_out};
}

MaxminResult maxmin_allocate(const SINRCoefficients& co, const SolverOptions& opt,
                             const perf::PowerAlloc* warm_start) {
    if (opt.gamma_s > 0) {
        const double cert = max_sensing_sinr(co);
        if (cert <= opt.gamma_s * (1.0 + 1e-9))
            throw Infeasible("maxmin_allocate: required sensing SINR " +
                                 std::to_string(opt.gamma_s) + " exceeds the achievable " +
                                 std::to_string(cert),
                             cert);
    }
    perf::PowerAlloc alloc = equal_power(co, 0.0);
    if (opt.gamma_s > 0 && sensing_sinr_value(co, alloc) < opt.gamma_s && co.use_beam) {
        // plain equal power misses the sensing target: seed the beam column
        alloc = equal_power(co, 0.1);
    }
    if (warm_start != nullptr) {
        // adopt the provided start when it is feasible and at least as good
        const bool ok = warm_start->eta.rows() == co.n_tx &&
                        warm_start->eta.cols() == co.k_u + 1 &&
                        warm_start->eta.minCoeff() >= 0 &&
                        max_ap_budget(co, *warm_start) <= 1.0 + 1e-9 &&
                        (opt.gamma_s <= 0 ||
                         sensing_sinr_value(co, *warm_start) >= opt.gamma_s);
        const bool start_infeasible =
            opt.gamma_s > 0 && sensing_sinr_value(co, alloc) < opt.gamma_s;
        if (ok && (start_infeasible ||
                   min_user_sinr(co, *warm_start) > min_user_sinr(co, alloc)))
            alloc = *warm_start;
    }

    MaxminResult out;
    out.state.t = 0;
    double z_prev = 0.0;
    for (int t = 1; t <= opt.max_outer; ++t) {
        const Eigen::VectorXd y = update_y(co, alloc);
        InnerResult inner = inner_solve(co, y, opt, alloc);
        alloc = std::move(inner.alloc);
        out.state.t = t;
        out.state.y = y;
        out.state.z = inner.z;
        out.state.trace.push_back({t, inner.z, min_user_sinr(co, alloc),
                                   sensing_sinr_value(co, alloc), max_ap_budget(co, alloc)});
        // The ascent guarantee starts once the iterate itself is feasible; the
        // t = 1 surrogate can sit below z^(0) = 0 when the sensing constraint
        // excludes the equal-power start.
        if (t >= 2 && inner.z < z_prev - 1e-8)
            throw NonMonotone("maxmin_allocate: surrogate objective decreased from " +
                              std::to_string(z_prev) + " to " + std::to_string(inner.z));
        if (std::abs(inner.z - z_prev) <= opt.epsilon) {
            z_prev = inner.z;
            break;
        }
        z_prev = inner.z;
    }
    out.state.eta = alloc;
    out.alloc = alloc;
    check_exit_feasibility(co, alloc, opt.gamma_s, opt.inner_feas_tol);
    return out;
}

MaxminResult maxmin_allocate(const perf::SystemStats& st, const SolverOptions& opt,
                             bool use_beam) {
    return maxmin_allocate(extract_coefficients(st, use_beam), opt);
}

void check_exit_feasibility(const SINRCoefficients& co, const perf::PowerAlloc& alloc,
                            double gamma_s, double tol) {
    if (alloc.eta.minCoeff() < -tol)
        throw DomainError("allocation has negative power coefficients");
    const double budget = max_ap_budget(co, alloc);
    if (budget > 1.0 + tol)
        throw DomainError("allocation violates a per-AP power budget: " + std::to_string(budget));
    if (gamma_s > 0) {
        const double s = sensing_sinr_value(co, alloc);
        if (s < gamma_s * (1.0 - tol) - tol)
            throw DomainError("allocation violates the sensing constraint: " +
                              std::to_string(s) + " < " + std::to_string(gamma_s));
    }
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
    std::string out;
    char buf[240];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf),
                      "{\"t\":%d,\"z\":%.10g,\"min_sinr\":%.10g,\"sensing_sinr\":%.10g,"
                      "\"max_ap_power\":%.10g}\n",
                      r.t, r.z, r.min_sinr, r.sensing_sinr, r.max_ap_power);
        out += buf;
    }
    return out;
}

}  // namespace cfisac::alloc
