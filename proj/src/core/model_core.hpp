#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace s3lda {

enum class ErrorCode { Io = 1, Parse = 2, Invalid = 3, Solver = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Partially labeled sample. Rows of x_labeled carry labels in {+1,-1};
// rows of x_unlabeled carry none. Both blocks share the dimension d.
struct Dataset {
    Eigen::MatrixXd x_labeled;    // n_l x d
    std::vector<int> y;           // n_l entries, each +1 or -1
    Eigen::MatrixXd x_unlabeled;  // n_u x d
    int d = 0;

    int n_labeled() const { return static_cast<int>(x_labeled.rows()); }
    int n_unlabeled() const { return static_cast<int>(x_unlabeled.rows()); }
    int n_total() const { return n_labeled() + n_unlabeled(); }
    int count_positive() const;
    int count_negative() const;
    void validate() const;
};

Dataset make_dataset(Eigen::MatrixXd x_labeled, std::vector<int> y, Eigen::MatrixXd x_unlabeled);

// f(x) = omega'x + b; the classification rule is sgn(f) with sgn(0) = +1.
struct LinearModel {
    Eigen::VectorXd omega;
    double b = 0.0;

    int dim() const { return static_cast<int>(omega.size()); }
    double decision_value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    // Coefficients produced by the prox are exactly zero; the tolerance only
    // guards accumulated float noise from other construction paths.
    int nnz(double tol = 1e-10) const;
};

// Per-coordinate location/scale so each predictor has mean 0 and variance 1
// over the pooled labeled + unlabeled training covariates.
struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd scales;  // strictly positive

    int dim() const { return static_cast<int>(means.size()); }
};

Standardizer standardize_fit(const Dataset& data);
Dataset standardize_apply(const Standardizer& s, const Dataset& data);
Dataset standardize_unapply(const Standardizer& s, const Dataset& data);

// Rewrites a model fitted on standardized covariates so it acts on raw ones:
// omega_j / scale_j and b - sum_j omega_j mean_j / scale_j. Exact zeros in
// omega stay exact, so variable selection is unaffected.
LinearModel fold_standardizer(const Standardizer& s, const LinearModel& m);

// Class coding y in {+1,-1} -> y~ in {n_l/n+, -n_l/n-}; the coded targets
// always sum to zero.
Eigen::VectorXd encode_targets(const Dataset& data);

// Text formats.
//
// Dataset: header "d=<int>", then one line per observation,
// "<label or ?> v1 v2 ... vd", '?' marking an unlabeled row.
// Model: line 1 "b=<float>", then "omega[<j>]=<float>" for nonzero
// coefficients only (0-based j); floats carry 17 significant digits so a
// write/read round trip is exact. expected_dim < 0 infers the dimension
// from the largest index present.
Dataset read_dataset(const std::string& path);
void write_dataset(const Dataset& data, const std::string& path);
LinearModel read_model(const std::string& path, int expected_dim = -1);
void write_model(const LinearModel& m, const std::string& path);

std::string format_double(double v);  // 17 significant digits

}  // namespace s3lda
