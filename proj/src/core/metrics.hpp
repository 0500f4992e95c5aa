#pragma once

#include <string>
#include <vector>

#include "simgen.hpp"
#include "tuning.hpp"

namespace s3lda {

enum class MethodId {
    S3lda,
    S3ldaOracle,
    L1Lda,
    L1Svm,
    L1LdaComplete,
    L1SvmComplete,
    Bayes,
};

std::string method_name(MethodId id);
MethodId parse_method(const std::string& name);

struct RepRecord {
    int rep = 0;
    bool failed = false;
    std::string error;
    double error_rate = 0.0;
    int fp = 0;
    int fn = 0;
    // chosen tuning parameters; NaN when not applicable (lambda is reported
    // in c1 for the single-penalty baselines)
    double c1 = std::numeric_limits<double>::quiet_NaN();
    double c2 = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
    int dc_violations = 0;  // descent violations across the replication's DC fits
};

struct MethodResult {
    MethodId method = MethodId::Bayes;
    std::vector<RepRecord> reps;
    int failures = 0;
    // over successful replications; NaN markers when undefined
    double mean_error = std::numeric_limits<double>::quiet_NaN();
    double se_error = std::numeric_limits<double>::quiet_NaN();
    double mean_fp = std::numeric_limits<double>::quiet_NaN();
    double mean_fn = std::numeric_limits<double>::quiet_NaN();
};

double misclassification_rate(const LinearModel& m, const Dataset& test);

// Nonzero test |omega_j| > 1e-10: fp counts nonzeros outside the support,
// fn counts zeros inside it.
std::pair<int, int> selection_errors(const Eigen::VectorXd& omega,
                                     const std::vector<int>& true_support);

struct ExperimentSetup {
    SimSpec spec;
    Grid grid;
    SolverConfig solver;
    std::vector<double> baseline_lambda_grid = {8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.125};
    bool labeled_only_tuning = false;
    // The simulated examples are generated with unit within-class variances;
    // empirical standardization is off unless the data need it.
    bool standardize = false;
    int threads = 1;           // 0 = hardware concurrency
    bool record_timing = false;
};

// Runs R replications; replication r draws from stream (seed, r). Per-rep
// method failures are recorded and excluded from that method's summary.
// Results are deterministic given (spec, methods, R) for any thread count.
std::vector<MethodResult> replicate_experiment(const ExperimentSetup& setup,
                                               const std::vector<MethodId>& methods, int R);

void write_results_csv(const ExperimentSetup& setup, const std::vector<MethodResult>& results,
                       const std::string& path);
void write_summary_csv(const ExperimentSetup& setup, const std::vector<MethodResult>& results,
                       const std::string& path);
std::string summary_table(const ExperimentSetup& setup, const std::vector<MethodResult>& results);

}  // namespace s3lda
