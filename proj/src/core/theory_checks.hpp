#pragma once

#include <string>
#include <vector>

#include "baselines.hpp"
#include "rng.hpp"

namespace s3lda {

// Population version of the objective with unlabeled-loss weight C and l1
// weight lambda, minimized under omega' mu = 1 by Monte Carlo approximation.
struct TheoryProblem {
    PopulationModel population;
    double C = 0.0;
    double lambda = 0.0;
    int support_size = 0;  // |{k : (sigma^{-1} mu)_k != 0}| at tolerance 1e-10
    int mc_n = 100000;

    static TheoryProblem make(PopulationModel pm, double C, double lambda, int mc_n = 100000);
};

// sigma^{-1} mu by Cholesky solve.
Eigen::VectorXd population_direction(const PopulationModel& pm);

// Empirical minimizer of
//   (1/m) sum (y - omega'x)^2 + C (1/m) sum (1 - |omega'x|)_+ + lambda ||omega||_1
// subject to omega' mu = 1, via quadratic-penalty continuation
// (rho in {1e2, 1e3, 1e4}, warm-started), inner solves by the DC split of the
// U term with the smoothed proximal gradient, and a final exact projection
// onto the constraint along mu. Samples are (X, Y) with Y = +-delta at equal
// priors and X | Y Gaussian. include_squared = false drops the squared term
// (the U-risk-only problem).
Eigen::VectorXd mc_constrained_minimizer(const TheoryProblem& tp, Rng& rng,
                                         bool include_squared = true, bool* converged = nullptr);

// (lambda sqrt(s) + C sqrt(lambda_max(sigma~))) / lambda_min(sigma~).
double theorem2_bound(const TheoryProblem& tp);

struct Theorem2Report {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // Monte Carlo error budget: 0.05 (1 + rhs)
    bool holds = false;
};

Theorem2Report verify_theorem2(const TheoryProblem& tp, Rng& rng);

struct TheoryCheckRow {
    std::string name;
    double lhs = 0.0;
    double target = 0.0;
    std::string relation;  // "<=" or ">="
    double tolerance = 0.0;
    bool pass = false;
};

// Direction recovery for the population minimizers, the perturbation bound on
// a small (lambda, C) grid, and a joint-rescaling invariance check.
std::vector<TheoryCheckRow> run_theory_suite(std::uint64_t seed, int mc_n = 100000);

std::string format_theory_table(const std::vector<TheoryCheckRow>& rows);
bool all_pass(const std::vector<TheoryCheckRow>& rows);

}  // namespace s3lda
