#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dc_solver.hpp"
#include "model_core.hpp"
#include "rng.hpp"

namespace s3lda {

struct Grid {
    std::vector<double> c1_values = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> c2_values = {0.0, 0.01, 1.0, 100.0};
    double c = 5.0;

    void validate() const;
};

// Scale of the in-margin band: one quarter of the sum of the 25th and 75th
// percentiles of the pairwise distances |f_i - f_j|, i < j. Percentiles use
// linear interpolation at rank (m-1)p. Above 2e6 pairs a uniform subsample of
// 2e6 pairs is taken from rng (required in that case).
double margin_halfwidth_eta(const std::vector<double>& decision_values, Rng* rng = nullptr);

struct CriterionResult {
    int misclassified = 0;
    int in_margin = 0;
    double score = 0.0;
};

// misclassified over the labeled tuning points plus, unless labeled_only,
// the count of all tuning points with |f| < eta (strict), each normalized by
// its own denominator.
CriterionResult tuning_criterion(const LinearModel& m, const Dataset& tune, double eta,
                                 bool labeled_only = false);

struct TuneCell {
    double c1 = 0.0, c2 = 0.0;
    bool failed = false;
    std::string error;
    int misclassified = 0;
    int in_margin = 0;
    double eta = 0.0;
    double score = 0.0;
    FitResult fit;
};

struct TuneReport {
    std::vector<TuneCell> cells;
    int best_index = -1;
    double eta = 0.0;  // eta of the selected cell

    const TuneCell& best() const;
};

struct TuningOptions {
    bool labeled_only = false;
    // stream identity for deterministic eta pair subsampling
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
};

// Fits dc_fit on every (C1, C2) cell, computes eta once per cell from that
// cell's tuning decision values, and selects the minimum score. Ties break
// toward smaller C2, then smaller C1. A failing cell is recorded and skipped;
// the search fails only when every cell does.
TuneReport grid_search(const Dataset& train, const Dataset& tune, const Grid& grid,
                       const SolverConfig& base_cfg, const TuningOptions& opts = {});

// Index of the candidate with the smallest test misclassification rate; same
// tie-break as grid_search. Candidates are (c1, c2, model) triples.
struct OracleCandidate {
    double c1 = 0.0, c2 = 0.0;
    LinearModel model;
};
int oracle_select(const std::vector<OracleCandidate>& candidates, const Dataset& test);

void write_tune_report_csv(const TuneReport& report, const std::string& path);

}  // namespace s3lda
