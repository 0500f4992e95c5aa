#include "baselines.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

namespace s3lda {

void PopulationModel::validate() const {
    if (mu.size() == 0 || sigma.rows() != mu.size() || sigma.cols() != mu.size())
        throw Error(ErrorCode::Invalid, "population model has inconsistent shapes");
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw Error(ErrorCode::Invalid, "prior must lie in (0,1)");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::Invalid, "population covariance is not positive definite");
}

double PopulationModel::delta() const {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::Invalid, "population covariance is not positive definite");
    const double quad = mu.dot(llt.solve(mu));
    if (!(quad > 0)) throw Error(ErrorCode::Invalid, "delta undefined: mu' sigma^{-1} mu is not positive");
    return 1.0 / quad;
}

Eigen::MatrixXd PopulationModel::sigma_tilde() const { return sigma + mu * mu.transpose(); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

LinearModel bayes_rule(const Eigen::VectorXd& mu_plus, const Eigen::VectorXd& mu_minus,
                       const Eigen::MatrixXd& sigma, double pi1) {
    if (mu_plus.size() != mu_minus.size() || sigma.rows() != mu_plus.size() ||
        sigma.cols() != mu_plus.size())
        throw Error(ErrorCode::Invalid, "bayes_rule: inconsistent shapes");
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw Error(ErrorCode::Invalid, "bayes_rule: prior must lie in (0,1)");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::Invalid, "bayes_rule: covariance is not positive definite");
    LinearModel m;
    m.omega = llt.solve(mu_plus - mu_minus);
    m.b = -0.5 * (mu_plus + mu_minus).dot(m.omega) + std::log(pi1 / (1.0 - pi1));
    return m;
}

double bayes_error_gaussian(const PopulationModel& pm) {
    if (std::abs(pm.pi1 - 0.5) > 1e-12)
        throw Error(ErrorCode::Invalid, "bayes_error_gaussian assumes equal priors");
    Eigen::LLT<Eigen::MatrixXd> llt(pm.sigma);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::Invalid, "bayes_error_gaussian: covariance is not positive definite");
    const double quad = pm.mu.dot(llt.solve(pm.mu));
    return normal_cdf(-std::sqrt(std::max(0.0, quad)));
}

namespace {

int count_tune_misclassified(const LinearModel& m, const Dataset& tune) {
    int wrong = 0;
    for (int i = 0; i < tune.n_labeled(); ++i)
        if (m.predict(tune.x_labeled.row(i).transpose()) != tune.y[i]) ++wrong;
    return wrong;
}

void check_baseline_inputs(const Dataset& train, const std::vector<double>& lambda_grid,
                           const Dataset& tune) {
    if (lambda_grid.empty()) throw Error(ErrorCode::Invalid, "baseline: empty lambda grid");
    if (train.count_positive() == 0 || train.count_negative() == 0)
        throw Error(ErrorCode::Invalid, "baseline: a training class has no labeled members");
    if (tune.count_positive() == 0 || tune.count_negative() == 0)
        throw Error(ErrorCode::Invalid, "baseline: a tuning class has no labeled members");
    if (train.d != tune.d) throw Error(ErrorCode::Invalid, "baseline: train/tune dimension mismatch");
}

// Ties by misclassification go to the larger lambda.
template <typename FitFn>
LinearModel tune_over_grid(const std::vector<double>& lambda_grid, const Dataset& tune,
                           FitFn&& fit_at, double* chosen_lambda) {
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    LinearModel best;
    double best_lambda = grid.front();
    int best_wrong = std::numeric_limits<int>::max();
    for (const double lambda : grid) {
        const LinearModel m = fit_at(lambda);
        const int wrong = count_tune_misclassified(m, tune);
        if (wrong < best_wrong) {
            best_wrong = wrong;
            best = m;
            best_lambda = lambda;
        }
    }
    if (chosen_lambda) *chosen_lambda = best_lambda;
    return best;
}

}  // namespace

LinearModel l1_lda_fit(const Dataset& train, const std::vector<double>& lambda_grid,
                       const Dataset& tune, double* chosen_lambda) {
    check_baseline_inputs(train, lambda_grid, tune);
    const Eigen::VectorXd y_tilde = encode_targets(train);
    LinearModel warm;
    bool have_warm = false;
    return tune_over_grid(
        lambda_grid, tune,
        [&](double lambda) {
            const LinearModel m =
                lasso_least_squares(train.x_labeled, y_tilde, lambda, 0.0, have_warm ? &warm : nullptr);
            warm = m;
            have_warm = true;
            return m;
        },
        chosen_lambda);
}

namespace {

LinearModel svm_fit_at(const Dataset& train, double lambda, const LinearModel* warm_start) {
    const int d = train.d;
    const int n_l = train.n_labeled();
    Eigen::VectorXd yv(n_l);
    for (int i = 0; i < n_l; ++i) yv[i] = train.y[i];

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
    if (warm_start && warm_start->dim() == d) {
        theta.head(d) = warm_start->omega;
        theta[d] = warm_start->b;
    }
    ApgProblem problem;
    problem.l1_weights = Eigen::VectorXd::Constant(d + 1, lambda);
    problem.l1_weights[d] = 0.0;  // free intercept
    double mu = 1e-3;
    for (int stage = 0; stage < 4; ++stage, mu *= 0.1) {
        problem.smooth = [&, mu](const Eigen::VectorXd& th, Eigen::VectorXd* grad) -> double {
            const Eigen::VectorXd f = (train.x_labeled * th.head(d)).array() + th[d];
            double value = 0.0;
            if (grad) {
                grad->setZero();
                Eigen::VectorXd s(n_l);
                for (int i = 0; i < n_l; ++i) {
                    const double t = 1.0 - yv[i] * f[i];
                    value += smoothed_pos_part(t, mu);
                    s[i] = -yv[i] * smoothed_pos_part_derivative(t, mu);
                }
                grad->head(d) = train.x_labeled.transpose() * s;
                (*grad)[d] = s.sum();
            } else {
                for (int i = 0; i < n_l; ++i) value += smoothed_pos_part(1.0 - yv[i] * f[i], mu);
            }
            return value;
        };
        theta = apg_minimize(problem, theta, 1e-7, 5000).x;
    }
    LinearModel m;
    m.omega = theta.head(d);
    m.b = theta[d];
    return m;
}

}  // namespace

LinearModel l1_svm_fit(const Dataset& train, const std::vector<double>& lambda_grid,
                       const Dataset& tune, double* chosen_lambda) {
    check_baseline_inputs(train, lambda_grid, tune);
    LinearModel warm;
    bool have_warm = false;
    return tune_over_grid(
        lambda_grid, tune,
        [&](double lambda) {
            const LinearModel m = svm_fit_at(train, lambda, have_warm ? &warm : nullptr);
            warm = m;
            have_warm = true;
            return m;
        },
        chosen_lambda);
}

}  // namespace s3lda
