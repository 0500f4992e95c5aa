#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "model_core.hpp"
#include "rng.hpp"

namespace s3lda {

enum class ExampleId { Ex1, Ex2, Ex3, Ex4 };

std::string example_name(ExampleId id);
ExampleId parse_example(const std::string& name);

struct Labeling {
    enum class Rule { RandomCount, PerClass };
    Rule rule = Rule::RandomCount;
    int keep = 10;
};

// One simulated scenario. Unset sizes (0) and dimension take the
// per-example defaults; s applies to the second example only.
struct SimSpec {
    ExampleId example = ExampleId::Ex1;
    int d = 0;
    double s = std::numeric_limits<double>::quiet_NaN();
    int n_train = 0;
    int n_tune = 0;
    int n_test = 0;
    std::optional<Labeling> labeling;
    std::uint64_t seed = 0;

    // Fills defaults and checks consistency; returns the resolved spec.
    SimSpec resolved() const;
};

struct GeneratedStudy {
    Dataset train;
    Dataset tune;
    Dataset test;        // fully labeled
    Dataset train_full;  // unmasked copies, for the complete-data baselines
    Dataset tune_full;
    std::vector<int> true_support;  // 0-based coordinate indices
    std::optional<PopulationModel> population;
};

// M[i][j] = first_row[|i-j|].
Eigen::MatrixXd toeplitz(const Eigen::VectorXd& first_row);

// Lower Cholesky factor; errors on non-positive-definite input.
Eigen::MatrixXd chol_lower(const Eigen::MatrixXd& sigma);

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol, Rng& rng);

// sqrt((df-2)/df) * t(df): unit variance for df >= 3.
double sample_scaled_t(int df, Rng& rng);

// Keeps labels on a uniformly chosen subset and blanks the rest; covariates
// untouched. For RandomCount with 2 <= keep < n the draw is repeated until
// both classes survive (when the full sample has both).
Dataset mask_labels(const Dataset& full, const Labeling& rule, Rng& rng);

// Deterministic given (spec, replication): replication r reads stream
// (seed, r) with one substream per purpose.
GeneratedStudy generate_example(const SimSpec& spec, std::uint32_t replication = 0);

// Training-set size schedule for the dimension sweep of the third and fourth
// examples; the seven standard dimensions use the published sizes, anything
// else rounds 200 sqrt(d/20).
int sweep_train_size(int d);

}  // namespace s3lda
