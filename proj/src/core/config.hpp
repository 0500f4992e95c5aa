#pragma once

#include <string>
#include <vector>

#include "metrics.hpp"

namespace s3lda {

// Flat sectioned key=value text config with strict validation: unknown
// sections or keys are errors, and seeds are always explicit.
//
//   [simulation] example, seed, d, s, n_train, n_tune, n_test, labeling
//   [grid]       c1, c2, c
//   [solver]     eps_outer, eps_inner, max_outer, max_inner, mu, mu_floor
//   [experiment] methods, replications, output_dir, threads,
//                labeled_only_tuning, baseline_lambda, standardize,
//                record_timing
//   [theory]     mc_n
struct ExperimentConfig {
    bool has_simulation = false;
    SimSpec spec;
    bool seed_set = false;

    Grid grid;
    SolverConfig solver;

    std::vector<MethodId> methods = {
        MethodId::S3lda,        MethodId::S3ldaOracle,  MethodId::L1Lda, MethodId::L1Svm,
        MethodId::L1LdaComplete, MethodId::L1SvmComplete, MethodId::Bayes,
    };
    int replications = 0;  // required for experiments
    std::string output_dir;
    int threads = 0;  // 0 = auto
    bool labeled_only_tuning = false;
    std::vector<double> baseline_lambda_grid = {8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.125};
    bool standardize = false;
    bool record_timing = false;

    int theory_mc_n = 100000;

    void require_seed(const std::string& operation) const;
    void require_simulation(const std::string& operation) const;
    ExperimentSetup to_setup() const;
};

ExperimentConfig read_config(const std::string& path);

}  // namespace s3lda
