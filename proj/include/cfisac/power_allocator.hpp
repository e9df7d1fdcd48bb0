#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cfisac/common.hpp"
#include "cfisac/performance.hpp"

namespace cfisac::alloc {

/**
 * Scalar coefficients of the max-min problem, extracted once per scenario:
 *   b[p][col]    = sum_i Tr(B_p,col,i)                      (signal / budget weights)
 *   a[q][p][col] = sum_i sum_j Tr(B_pq,i B_p,col,j)         (interference, estimate-based)
 *   c[p][col]    = sum_r sum_i sigma_pr^2 beta_pr Tr(V B V^H)   (sensing numerator)
 *   d[p][col]    = sum_r sum_i Tr(R_rx) Tr(R_tx B)              (clutter)
 * col 0 is the dedicated sensing beam; it is absent when use_beam is false.
 * Everything is nonnegative.
 */
struct SINRCoefficients {
    int n_tx = 0, k_u = 0;
    bool use_beam = true;
    double rho_d = 0.0;
    double noise_const = 0.0;  // N_rx * Mt
    Eigen::MatrixXd b;                   // n_tx x (k_u+1)
    std::vector<Eigen::MatrixXd> a;      // one n_tx x (k_u+1) block per user
    Eigen::MatrixXd c, d;                // n_tx x (k_u+1)
};

SINRCoefficients extract_coefficients(const perf::SystemStats& st, bool use_beam);

// Equal power: eta_pq = (1-f) / sum_q' b_pq' for users, eta_p0 = f (beam);
// per-AP budget met with equality. Throws DegenerateScenario when an AP has
// no usable estimate power at all.
perf::PowerAlloc equal_power(const SINRCoefficients& co, double sensing_fraction = 0.0);

// Quadratic-transform auxiliary update for fixed eta:
//   y_q = sqrt(rho) sum_p eta_pq^1/2 b_pq / (rho sum_p sum_col eta_p,col a_q,p,col + 1)
Eigen::VectorXd update_y(const SINRCoefficients& co, const perf::PowerAlloc& alloc);

// Communication SINR of user q in the optimizer's estimate-based form.
double user_sinr(const SINRCoefficients& co, const perf::PowerAlloc& alloc, int q);
double min_user_sinr(const SINRCoefficients& co, const perf::PowerAlloc& alloc);

// Sensing SINR in coefficient form (same value as perf::sensing_sinr).
double sensing_sinr_value(const SINRCoefficients& co, const perf::PowerAlloc& alloc);

// max_p sum_col eta b (per-AP budget usage; feasible means <= 1).
double max_ap_budget(const SINRCoefficients& co, const perf::PowerAlloc& alloc);

// Largest achievable sensing SINR under the per-AP power constraints
// (linear-fractional program; the inner LP maximization is an analytic
// per-AP argmax, the outer level is bisected). The feasibility certificate.
double max_sensing_sinr(const SINRCoefficients& co);

struct SolverOptions {
    double epsilon = 1e-4;        // outer: stop when |z_t - z_{t-1}| <= epsilon
    int max_outer = 100;
    double inner_feas_tol = 1e-6; // exit feasibility check tolerance
    double inner_opt_tol = 1e-9;  // relative duality-gap target of the barrier
    double eta_floor = 1e-12;     // keeps sqrt(eta) differentiable
    double gamma_s = 0.0;         // linear sensing threshold (0 disables 35b)
};

struct InnerResult {
    perf::PowerAlloc alloc;
    double z = 0.0;  // min_q of the transformed per-user expression at alloc
};

/**
 * Convex inner subproblem for fixed y: maximize z subject to per-AP budgets,
 * the linear sensing constraint, eta >= 0, and the concave per-user epigraph
 * constraints. Solved by a primal log-barrier interior-point method on the
 * per-AP budget fractions. The returned point is never worse than the warm
 * start under the current surrogate, which makes the outer loop monotone.
 */
InnerResult inner_solve(const SINRCoefficients& co, const Eigen::VectorXd& y,
                        const SolverOptions& opt, const perf::PowerAlloc& warm);

struct TraceRecord {
    int t = 0;
    double z = 0, min_sinr = 0, sensing_sinr = 0, max_ap_power = 0;
};

struct IterState {
    perf::PowerAlloc eta;
    Eigen::VectorXd y;
    double z = 0.0;
    int t = 0;
    std::vector<TraceRecord> trace;
};

struct MaxminResult {
    perf::PowerAlloc alloc;
    IterState state;
};

// Alternating y-update / inner-solve loop. Starts from equal power by
// default; a caller-provided warm start (e.g. the solution of a neighbouring
// sweep point) is used instead when it is feasible and better. Throws
// Infeasible (with the certificate) when the sensing constraint cannot be
// met at full power, and NonMonotone if z ever decreases beyond 1e-8.
MaxminResult maxmin_allocate(const SINRCoefficients& co, const SolverOptions& opt,
                             const perf::PowerAlloc* warm_start = nullptr);
MaxminResult maxmin_allocate(const perf::SystemStats& st, const SolverOptions& opt,
                             bool use_beam);

// Throws if alloc violates eta >= 0, the per-AP budgets, or the sensing
// constraint beyond tol.
void check_exit_feasibility(const SINRCoefficients& co, const perf::PowerAlloc& alloc,
                            double gamma_s, double tol);

// One JSON object per outer iteration: {"t","z","min_sinr","sensing_sinr","max_ap_power"}.
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);

/**
 * Solves (diag(d) + U U^T) s = rhs in O(n r^2 + r^3) instead of O(n^3).
 *
 * This is the barrier Newton system: d carries the bound/curvature diagonal
 * (strictly positive except possibly the last entry, the epigraph variable,
 * whose curvature arrives only through the rank-one constraint terms in U).
 * The last coordinate is eliminated by a bordered Schur step and the leading
 * block is inverted with the Woodbury identity. Requires the full matrix to
 * be positive definite.
 */
Eigen::VectorXd solve_diag_lowrank(const Eigen::VectorXd& d, const Eigen::MatrixXd& u,
                                   const Eigen::VectorXd& rhs);

}  // namespace cfisac::alloc
