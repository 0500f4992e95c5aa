#pragma once

#include <vector>

#include "dc_solver.hpp"
#include "model_core.hpp"

namespace s3lda {

// Symmetric two-class Gaussian population: class means are +mu and -mu with
// shared covariance sigma.
struct PopulationModel {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    double pi1 = 0.5;

    int dim() const { return static_cast<int>(mu.size()); }
    // delta = 1 / (mu' sigma^{-1} mu); requires mu != 0.
    double delta() const;
    Eigen::MatrixXd sigma_tilde() const;  // sigma + mu mu'
    void validate() const;
};

double normal_cdf(double x);

// omega = sigma^{-1}(mu_plus - mu_minus),
// b = -(mu_plus + mu_minus)' omega / 2 + log(pi1/pi2), by Cholesky solve.
LinearModel bayes_rule(const Eigen::VectorXd& mu_plus, const Eigen::VectorXd& mu_minus,
                       const Eigen::MatrixXd& sigma, double pi1);

// Equal priors, means at +-mu: Phi(-sqrt(mu' sigma^{-1} mu)).
double bayes_error_gaussian(const PopulationModel& pm);

// l1-penalized least squares on the labeled data alone, lambda selected by
// misclassification on the labeled tuning points; ties go to the larger
// (sparser) lambda.
LinearModel l1_lda_fit(const Dataset& train, const std::vector<double>& lambda_grid,
                       const Dataset& tune, double* chosen_lambda = nullptr);

// Penalized linear l1-SVM: sum_i (1 - y_i f(x_i))_+ + lambda ||omega||_1,
// solved by the smoothed proximal-gradient machinery with the Huber
// half-width annealed 1e-3 -> 1e-6; same tuning protocol as l1_lda_fit.
LinearModel l1_svm_fit(const Dataset& train, const std::vector<double>& lambda_grid,
                       const Dataset& tune, double* chosen_lambda = nullptr);

}  // namespace s3lda
