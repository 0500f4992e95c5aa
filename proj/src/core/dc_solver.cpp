#include "dc_solver.hpp"

#include <cmath>
#include <limits>

namespace s3lda {

void SolverConfig::validate() const {
    if (c1 < 0 || c2 < 0 || c < 0) throw Error(ErrorCode::Invalid, "solver weights must be nonnegative");
    if (!(eps_outer > 0) || !(eps_inner > 0))
        throw Error(ErrorCode::Invalid, "solver tolerances must be positive");
    if (max_outer < 1 || max_inner < 1)
        throw Error(ErrorCode::Invalid, "solver iteration counts must be at least 1");
    if (!(smoothing.mu_s > 0) || !(mu_floor > 0))
        throw Error(ErrorCode::Invalid, "smoothing half-widths must be positive");
}

double objective_q(const LinearModel& m, const Dataset& data, const SolverConfig& cfg,
                   const Eigen::VectorXd& omega_hat) {
    if (m.dim() != data.d) throw Error(ErrorCode::Invalid, "objective_q: dimension mismatch");
    double q = 0.0;
    if (cfg.c1 > 0 && data.n_labeled() > 0) {
        const Eigen::VectorXd y_tilde = encode_targets(data);
        const Eigen::VectorXd f = (data.x_labeled * m.omega).array() + m.b;
        q += cfg.c1 * (y_tilde - f).squaredNorm();
    }
    if (cfg.c2 > 0 && data.n_unlabeled() > 0) {
        const Eigen::VectorXd f = (data.x_unlabeled * m.omega).array() + m.b;
        double u_sum = 0.0;
        for (Eigen::Index i = 0; i < f.size(); ++i) u_sum += modified_hinge(f[i]);
        q += cfg.c2 * u_sum;
    }
    q += m.omega.lpNorm<1>();
    if (cfg.c > 0) {
        const double norm_hat = omega_hat.norm();
        if (!(norm_hat > 0))
            throw Error(ErrorCode::Invalid, "objective_q: zero initial estimate with c > 0");
        q += cfg.c / norm_hat * std::abs(m.b);
    }
    return q;
}

LinearModel lasso_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_tilde,
                                double lambda, double intercept_weight,
                                const LinearModel* warm_start) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (n != y_tilde.size()) throw Error(ErrorCode::Invalid, "lasso: responses disagree with design");
    if (n < 1) throw Error(ErrorCode::Invalid, "lasso: empty design");
    if (!x.allFinite() || !y_tilde.allFinite() || !std::isfinite(lambda) || !std::isfinite(intercept_weight))
        throw Error(ErrorCode::Invalid, "lasso: non-finite input");
    if (lambda < 0 || intercept_weight < 0)
        throw Error(ErrorCode::Invalid, "lasso: penalties must be nonnegative");

    Eigen::VectorXd omega = Eigen::VectorXd::Zero(d);
    double b = 0.0;
    if (warm_start && warm_start->dim() == d) {
        omega = warm_start->omega;
        b = warm_start->b;
    }
    const Eigen::VectorXd col_sq = x.array().square().colwise().sum();
    Eigen::VectorXd residual = y_tilde - x * omega;
    residual.array() -= b;

    constexpr double kTol = 1e-9;
    constexpr int kMaxSweeps = 20000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (int j = 0; j < d; ++j) {
            if (col_sq[j] == 0.0) continue;  // all-zero column stays at 0
            const double rho = x.col(j).dot(residual) + col_sq[j] * omega[j];
            const double thr = lambda / 2.0;
            double next = 0.0;
            if (rho > thr)
                next = (rho - thr) / col_sq[j];
            else if (rho < -thr)
                next = (rho + thr) / col_sq[j];
            const double change = next - omega[j];
            if (change != 0.0) {
                residual -= change * x.col(j);
                omega[j] = next;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        {
            const double rho_b = residual.sum() + n * b;
            const double thr = intercept_weight / 2.0;
            double next = 0.0;
            if (rho_b > thr)
                next = (rho_b - thr) / n;
            else if (rho_b < -thr)
                next = (rho_b + thr) / n;
            const double change = next - b;
            if (change != 0.0) {
                residual.array() -= change;
                b = next;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        if (max_change < kTol) break;
    }

    LinearModel m;
    m.omega = std::move(omega);
    m.b = b;
    return m;
}

Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double t, const Eigen::VectorXd& weights) {
    if (v.size() != weights.size()) throw Error(ErrorCode::Invalid, "prox_l1: weight length mismatch");
    if (t < 0) throw Error(ErrorCode::Invalid, "prox_l1: negative step");
    Eigen::VectorXd out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double thr = t * weights[j];
        if (thr < 0) throw Error(ErrorCode::Invalid, "prox_l1: negative weight");
        if (v[j] > thr)
            out[j] = v[j] - thr;
        else if (v[j] < -thr)
            out[j] = v[j] + thr;
        else
            out[j] = 0.0;
    }
    return out;
}

namespace {

double weighted_l1(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) s += w[j] * std::abs(x[j]);
    return s;
}

}  // namespace

ApgResult apg_minimize(const ApgProblem& problem, const Eigen::VectorXd& x0, double eps,
                       int max_iters) {
    Eigen::VectorXd x = x0;
    Eigen::VectorXd y = x0;
    Eigen::VectorXd grad(x0.size());
    double t_mom = 1.0;
    double step = 1.0;

    double fx = problem.smooth(x, nullptr) + weighted_l1(x, problem.l1_weights);
    ApgResult best;
    best.x = x;
    best.objective = fx;

    int iter = 0;
    for (; iter < max_iters; ++iter) {
        const double gy = problem.smooth(y, &grad);
        Eigen::VectorXd x_next;
        double smooth_next = 0.0;
        for (int halvings = 0; halvings < 80; ++halvings) {
            x_next = prox_l1(y - step * grad, step, problem.l1_weights);
            const Eigen::VectorXd diff = x_next - y;
            smooth_next = problem.smooth(x_next, nullptr);
            const double quad = gy + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
            if (smooth_next <= quad + 1e-12 * std::abs(quad)) break;
            step *= 0.5;
            if (step < 1e-18) break;
        }
        const double mapping_norm = (y - x_next).norm() / step;
        const double f_next = smooth_next + weighted_l1(x_next, problem.l1_weights);
        if (f_next < best.objective) {
            best.objective = f_next;
            best.x = x_next;
        }
        if (mapping_norm < eps) {
            best.converged = true;
            ++iter;
            break;
        }
        if (f_next > fx) {
            // restart momentum when the objective rises
            t_mom = 1.0;
            y = x_next;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
            y = x_next + ((t_mom - 1.0) / t_next) * (x_next - x);
            t_mom = t_next;
        }
        x = x_next;
        fx = f_next;
    }
    best.iters = iter;
    return best;
}

SubproblemResult solve_convex_subproblem(const Dataset& data, const SolverConfig& cfg,
                                         const Eigen::VectorXd& omega_hat,
                                         const LinearModel& linearization) {
    cfg.validate();
    data.validate();
    const int d = data.d;
    if (linearization.dim() != d)
        throw Error(ErrorCode::Invalid, "subproblem: linearization dimension mismatch");

    const int n_l = data.n_labeled();
    const int n_u = data.n_unlabeled();
    Eigen::VectorXd y_tilde;
    if (cfg.c1 > 0 && n_l > 0) y_tilde = encode_targets(data);

    double intercept_weight = 0.0;
    if (cfg.c > 0) {
        const double norm_hat = omega_hat.norm();
        if (!(norm_hat > 0))
            throw Error(ErrorCode::Invalid, "subproblem: zero initial estimate with c > 0");
        intercept_weight = cfg.c / norm_hat;
    }

    // grad Q2 at the linearization point, over (omega, b)
    Eigen::VectorXd lin_grad = Eigen::VectorXd::Zero(d + 1);
    if (cfg.c2 > 0 && n_u > 0) {
        const Eigen::VectorXd f = (data.x_unlabeled * linearization.omega).array() + linearization.b;
        Eigen::VectorXd sgn(n_u);
        for (int i = 0; i < n_u; ++i) sgn[i] = u2_subgradient(f[i]);
        lin_grad.head(d) = cfg.c2 * (data.x_unlabeled.transpose() * sgn);
        lin_grad[d] = cfg.c2 * sgn.sum();
    }

    const SmoothingParams smoothing = cfg.smoothing;
    ApgProblem problem;
    problem.l1_weights = Eigen::VectorXd::Ones(d + 1);
    problem.l1_weights[d] = intercept_weight;
    problem.smooth = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) -> double {
        const auto omega = theta.head(d);
        const double b = theta[d];
        double value = 0.0;
        if (grad) grad->setZero();
        if (cfg.c1 > 0 && n_l > 0) {
            Eigen::VectorXd r = (data.x_labeled * omega).array() + b;
            r -= y_tilde;
            value += cfg.c1 * r.squaredNorm();
            if (grad) {
                grad->head(d) += 2.0 * cfg.c1 * (data.x_labeled.transpose() * r);
                (*grad)[d] += 2.0 * cfg.c1 * r.sum();
            }
        }
        if (cfg.c2 > 0 && n_u > 0) {
            const Eigen::VectorXd f = (data.x_unlabeled * omega).array() + b;
            double u_sum = 0.0;
            if (grad) {
                Eigen::VectorXd s(n_u);
                for (int i = 0; i < n_u; ++i) {
                    u_sum += u1_smoothed(f[i], smoothing);
                    s[i] = u1_smoothed_derivative(f[i], smoothing);
                }
                grad->head(d) += cfg.c2 * (data.x_unlabeled.transpose() * s);
                (*grad)[d] += cfg.c2 * s.sum();
            } else {
                for (int i = 0; i < n_u; ++i) u_sum += u1_smoothed(f[i], smoothing);
            }
            value += cfg.c2 * u_sum;
        }
        value -= lin_grad.dot(theta);
        if (grad) *grad -= lin_grad;
        return value;
    };

    Eigen::VectorXd theta0(d + 1);
    theta0.head(d) = linearization.omega;
    theta0[d] = linearization.b;
    const ApgResult r = apg_minimize(problem, theta0, cfg.eps_inner, cfg.max_inner);

    SubproblemResult out;
    out.model.omega = r.x.head(d);
    out.model.b = r.x[d];
    out.converged = r.converged;
    out.iters = r.iters;
    return out;
}

namespace {

// Least squares with an intercept and a small ridge on omega only.
LinearModel ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_tilde, double ridge) {
    const int d = static_cast<int>(x.cols());
    const Eigen::RowVectorXd col_means = x.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - col_means;
    const double y_mean = y_tilde.mean();
    const Eigen::VectorXd yc = y_tilde.array() - y_mean;
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += ridge;
    LinearModel m;
    m.omega = gram.ldlt().solve(xc.transpose() * yc);
    m.b = y_mean - col_means * m.omega;
    return m;
}

}  // namespace

LinearModel initial_estimate(const Dataset& data, bool* ridge_fallback) {
    if (ridge_fallback) *ridge_fallback = false;
    const Eigen::VectorXd y_tilde = encode_targets(data);
    const Eigen::MatrixXd& x = data.x_labeled;
    const int n_l = data.n_labeled();
    const int d = data.d;
    if (n_l < 2) throw Error(ErrorCode::Invalid, "initial estimate needs at least 2 labeled points");

    // With a free intercept the zero solution is stationary iff
    // lambda >= 2 max_j |x_j' y~| (coded targets have mean zero).
    const double lambda_max = 2.0 * (x.transpose() * y_tilde).cwiseAbs().maxCoeff();
    const int max_nnz = std::min(n_l - 1, d);

    LinearModel best;
    bool have_best = false;
    LinearModel warm;
    bool have_warm = false;
    LinearModel largest_nonzero;
    bool have_nonzero = false;
    for (int k = 0; k <= 10; ++k) {
        const double lambda = lambda_max * std::pow(0.5, k);
        const LinearModel fit =
            lasso_least_squares(x, y_tilde, lambda, 0.0, have_warm ? &warm : nullptr);
        warm = fit;
        have_warm = true;
        const int nnz = fit.nnz();
        if (nnz >= 1 && !have_nonzero) {
            largest_nonzero = fit;
            have_nonzero = true;
        }
        if (nnz >= 1 && nnz <= max_nnz) {
            best = fit;  // keep overwriting: the last hit is the smallest lambda
            have_best = true;
        }
    }
    if (have_best) return best;
    if (have_nonzero) return largest_nonzero;

    // every grid point collapsed to zero
    LinearModel m = ridge_solve(x, y_tilde, 1e-4);
    if (!(m.omega.norm() > 0))
        throw Error(ErrorCode::Solver, "initial estimate is identically zero even after ridge fallback");
    if (ridge_fallback) *ridge_fallback = true;
    return m;
}

FitResult dc_fit(const Dataset& data, const SolverConfig& cfg, const LinearModel* init) {
    cfg.validate();
    data.validate();
    if (data.count_positive() == 0 || data.count_negative() == 0)
        throw Error(ErrorCode::Invalid, "dc_fit: a class has no labeled members");

    FitResult result;
    if (init) {
        if (init->dim() != data.d) throw Error(ErrorCode::Invalid, "dc_fit: init dimension mismatch");
        result.init_model = *init;
        if (cfg.c > 0 && !(init->omega.norm() > 0)) {
            result.init_model = initial_estimate(data, &result.ridge_fallback);
            result.ridge_fallback = true;
        }
    } else {
        result.init_model = initial_estimate(data, &result.ridge_fallback);
    }

    LinearModel current = result.init_model;
    // reference vector for the intercept weight; follows omega^(k)
    Eigen::VectorXd hat = result.init_model.omega;
    if (cfg.c > 0 && !(hat.norm() > 0))
        throw Error(ErrorCode::Solver, "dc_fit: initial estimate has zero norm");

    const int n_u = data.n_unlabeled();
    double q_prev = objective_q(current, data, cfg, hat);
    result.objective_trace.push_back(q_prev);

    for (int k = 0; k < cfg.max_outer; ++k) {
        SolverConfig step_cfg = cfg;
        step_cfg.smoothing.mu_s = std::max(cfg.smoothing.mu_s * std::pow(0.1, k), cfg.mu_floor);

        // DC descent is guaranteed for this step's own objective, the one with
        // the intercept reference held at hat; check it there, before the
        // reference moves to the new iterate.
        const double q_step_before = objective_q(current, data, cfg, hat);
        const SubproblemResult sub = solve_convex_subproblem(data, step_cfg, hat, current);
        if (!sub.converged) result.inner_converged = false;
        const double q_step_after = objective_q(sub.model, data, cfg, hat);
        const double slack = 10.0 * cfg.eps_outer + cfg.c2 * n_u * step_cfg.smoothing.mu_s / 2.0;
        if (q_step_after > q_step_before + slack) ++result.descent_violations;

        current = sub.model;
        if (current.omega.norm() > 1e-12) hat = current.omega;

        const double q = objective_q(current, data, cfg, hat);
        result.objective_trace.push_back(q);
        result.outer_iters = k + 1;
        if (std::abs(q - q_prev) <= cfg.eps_outer * (1.0 + std::abs(q_prev))) {
            result.converged = true;
            q_prev = q;
            break;
        }
        q_prev = q;
    }

    result.model = current;
    return result;
}

}  // namespace s3lda
