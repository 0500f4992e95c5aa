#pragma once

#include <functional>
#include <vector>

#include "losses.hpp"
#include "model_core.hpp"

namespace s3lda {

struct SolverConfig {
    double c1 = 1.0;  // weight of the labeled squared-error term
    double c2 = 0.0;  // weight of the unlabeled margin term
    double c = 5.0;   // intercept penalty weight
    double eps_outer = 1e-5;  // DC stop: |dQ| <= eps_outer * (1 + |Q|)
    double eps_inner = 1e-7;  // inner stop: prox-gradient mapping norm
    int max_outer = 50;
    int max_inner = 5000;
    SmoothingParams smoothing;  // initial half-width; annealed x0.1 per outer pass
    double mu_floor = 1e-6;

    void validate() const;
};

struct FitResult {
    LinearModel model;
    LinearModel init_model;              // the initial sparse-LDA estimate
    std::vector<double> objective_trace;  // true non-smoothed Q per outer iterate
    int outer_iters = 0;
    bool converged = false;
    bool ridge_fallback = false;   // initialization fell back to a ridge solve
    bool inner_converged = true;   // false if any subproblem hit max_inner
    int descent_violations = 0;    // trace ascents beyond the DC slack
};

// Q = C1 sum_l (y~ - f)^2 + C2 sum_u U(f) + ||omega||_1 + c |b| / ||omega_hat||_2.
double objective_q(const LinearModel& m, const Dataset& data, const SolverConfig& cfg,
                   const Eigen::VectorXd& omega_hat);

// Cyclic coordinate descent for
//   sum_i (y_i - b - omega'x_i)^2 + lambda ||omega||_1 + intercept_weight |b|,
// exact univariate soft-threshold updates, stop when the largest coordinate
// change in a sweep drops below 1e-9. Thresholded coefficients are exact zeros.
LinearModel lasso_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_tilde,
                                double lambda, double intercept_weight,
                                const LinearModel* warm_start = nullptr);

// Weighted soft threshold: sign(v_j) max(0, |v_j| - t w_j).
Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double t, const Eigen::VectorXd& weights);

// Accelerated proximal gradient with backtracking line search, function-value
// restarts and best-iterate tracking (the returned point never has a larger
// objective than the start).
struct ApgProblem {
    // Evaluates the smooth part at x; fills grad when grad != nullptr.
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)> smooth;
    Eigen::VectorXd l1_weights;
};

struct ApgResult {
    Eigen::VectorXd x;
    double objective = 0.0;  // smooth + weighted l1 at x
    bool converged = false;
    int iters = 0;
};

ApgResult apg_minimize(const ApgProblem& problem, const Eigen::VectorXd& x0, double eps,
                       int max_iters);

// One DC step: minimizes the convex surrogate
//   C1 sum L + C2 sum u1_smoothed + ||omega||_1 + c|b|/||omega_hat||
//     - [grad Q2 at linearization]' (omega, b)
// started at the linearization point.
struct SubproblemResult {
    LinearModel model;
    bool converged = false;
    int iters = 0;
};

SubproblemResult solve_convex_subproblem(const Dataset& data, const SolverConfig& cfg,
                                         const Eigen::VectorXd& omega_hat,
                                         const LinearModel& linearization);

// Initial estimate: l1-penalized least squares on the labeled data, lambda
// picked from the geometric grid {lambda_max 0.5^k, k=0..10} as the smallest
// value giving between 1 and min(n_l - 1, d) nonzeros. Falls back to a ridge
// solve (ridge 1e-4) when every grid point is all-zero.
LinearModel initial_estimate(const Dataset& data, bool* ridge_fallback = nullptr);

// Steps 1-3 of the DC iteration. The intercept-weight reference vector starts
// at the initial estimate and follows omega^(k); convergence is measured on
// the true non-smoothed Q.
FitResult dc_fit(const Dataset& data, const SolverConfig& cfg, const LinearModel* init = nullptr);

}  // namespace s3lda
