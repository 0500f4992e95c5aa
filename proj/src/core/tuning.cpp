#include "tuning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace s3lda {

void Grid::validate() const {
    if (c1_values.empty() || c2_values.empty())
        throw Error(ErrorCode::Invalid, "tuning grid must be nonempty");
    for (double v : c1_values)
        if (!(v >= 0)) throw Error(ErrorCode::Invalid, "C1 grid values must be nonnegative");
    for (double v : c2_values)
        if (!(v >= 0)) throw Error(ErrorCode::Invalid, "C2 grid values must be nonnegative");
    if (!(c >= 0)) throw Error(ErrorCode::Invalid, "intercept weight c must be nonnegative");
}

namespace {

double interpolated_percentile(const std::vector<double>& sorted, double p) {
    const size_t m = sorted.size();
    const double h = (static_cast<double>(m) - 1.0) * p;
    const size_t lo = static_cast<size_t>(std::floor(h));
    if (lo + 1 >= m) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

constexpr std::size_t kMaxPairs = 2000000;

}  // namespace

double margin_halfwidth_eta(const std::vector<double>& decision_values, Rng* rng) {
    const size_t n = decision_values.size();
    if (n < 2) throw Error(ErrorCode::Invalid, "eta needs at least 2 decision values");
    const std::size_t n_pairs = n * (n - 1) / 2;

    std::vector<double> dist;
    if (n_pairs <= kMaxPairs) {
        dist.reserve(n_pairs);
        for (size_t i = 0; i + 1 < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                dist.push_back(std::abs(decision_values[i] - decision_values[j]));
    } else {
        if (!rng)
            throw Error(ErrorCode::Invalid,
                        "eta subsampling requires a deterministic random stream");
        dist.reserve(kMaxPairs);
        while (dist.size() < kMaxPairs) {
            const size_t i = static_cast<size_t>(rng->next_u64() % n);
            const size_t j = static_cast<size_t>(rng->next_u64() % n);
            if (i == j) continue;
            dist.push_back(std::abs(decision_values[i] - decision_values[j]));
        }
    }
    std::sort(dist.begin(), dist.end());
    return (interpolated_percentile(dist, 0.25) + interpolated_percentile(dist, 0.75)) / 4.0;
}

CriterionResult tuning_criterion(const LinearModel& m, const Dataset& tune, double eta,
                                 bool labeled_only) {
    if (tune.n_total() == 0) throw Error(ErrorCode::Invalid, "tuning set is empty");
    if (tune.n_labeled() == 0)
        throw Error(ErrorCode::Invalid, "tuning set has no labeled points");
    CriterionResult r;
    for (int i = 0; i < tune.n_labeled(); ++i) {
        const double f = m.decision_value(tune.x_labeled.row(i).transpose());
        if ((f >= 0 ? 1 : -1) != tune.y[i]) ++r.misclassified;
        if (!labeled_only && std::abs(f) < eta) ++r.in_margin;
    }
    if (!labeled_only) {
        for (int i = 0; i < tune.n_unlabeled(); ++i) {
            const double f = m.decision_value(tune.x_unlabeled.row(i).transpose());
            if (std::abs(f) < eta) ++r.in_margin;
        }
    }
    r.score = static_cast<double>(r.misclassified) / tune.n_labeled();
    if (!labeled_only) r.score += static_cast<double>(r.in_margin) / tune.n_total();
    return r;
}

const TuneCell& TuneReport::best() const {
    if (best_index < 0 || best_index >= static_cast<int>(cells.size()))
        throw Error(ErrorCode::Invalid, "tune report has no selected cell");
    return cells[static_cast<size_t>(best_index)];
}

namespace {

std::vector<double> decision_values_all(const LinearModel& m, const Dataset& data) {
    std::vector<double> values;
    values.reserve(static_cast<size_t>(data.n_total()));
    for (int i = 0; i < data.n_labeled(); ++i)
        values.push_back(m.decision_value(data.x_labeled.row(i).transpose()));
    for (int i = 0; i < data.n_unlabeled(); ++i)
        values.push_back(m.decision_value(data.x_unlabeled.row(i).transpose()));
    return values;
}

// (score, C2, C1) lexicographic; earlier cell wins exact ties.
bool cell_better(const TuneCell& a, const TuneCell& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.c2 != b.c2) return a.c2 < b.c2;
    return a.c1 < b.c1;
}

}  // namespace

TuneReport grid_search(const Dataset& train, const Dataset& tune, const Grid& grid,
                       const SolverConfig& base_cfg, const TuningOptions& opts) {
    grid.validate();
    base_cfg.validate();
    train.validate();
    tune.validate();
    if (train.d != tune.d) throw Error(ErrorCode::Invalid, "grid_search: train/tune dimension mismatch");

    // The initialization uses labeled data alone, so it is shared by every cell.
    bool ridge = false;
    const LinearModel init = initial_estimate(train, &ridge);

    TuneReport report;
    report.cells.reserve(grid.c1_values.size() * grid.c2_values.size());
    std::uint32_t cell_index = 0;
    for (const double c1 : grid.c1_values) {
        for (const double c2 : grid.c2_values) {
            TuneCell cell;
            cell.c1 = c1;
            cell.c2 = c2;
            try {
                SolverConfig cfg = base_cfg;
                cfg.c1 = c1;
                cfg.c2 = c2;
                cfg.c = grid.c;
                cell.fit = dc_fit(train, cfg, &init);
                cell.fit.ridge_fallback = cell.fit.ridge_fallback || ridge;
                const std::vector<double> values = decision_values_all(cell.fit.model, tune);
                Rng eta_rng(opts.seed, opts.stream, rng_purpose::kEtaBase + cell_index);
                cell.eta = margin_halfwidth_eta(values, &eta_rng);
                const CriterionResult crit =
                    tuning_criterion(cell.fit.model, tune, cell.eta, opts.labeled_only);
                cell.misclassified = crit.misclassified;
                cell.in_margin = crit.in_margin;
                cell.score = crit.score;
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
                cell.score = std::numeric_limits<double>::infinity();
            }
            report.cells.push_back(std::move(cell));
            ++cell_index;
        }
    }

    for (size_t i = 0; i < report.cells.size(); ++i) {
        if (report.cells[i].failed) continue;
        if (report.best_index < 0 ||
            cell_better(report.cells[i], report.cells[static_cast<size_t>(report.best_index)]))
            report.best_index = static_cast<int>(i);
    }
    if (report.best_index < 0)
        throw Error(ErrorCode::Solver, "grid_search: every cell failed; first error: " +
                                           (report.cells.empty() ? std::string("empty grid")
                                                                 : report.cells.front().error));
    report.eta = report.cells[static_cast<size_t>(report.best_index)].eta;
    return report;
}

int oracle_select(const std::vector<OracleCandidate>& candidates, const Dataset& test) {
    if (candidates.empty()) throw Error(ErrorCode::Invalid, "oracle_select: no candidates");
    if (test.n_labeled() == 0) throw Error(ErrorCode::Invalid, "oracle_select: empty test set");
    int best = -1;
    double best_error = 0.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        int wrong = 0;
        for (int t = 0; t < test.n_labeled(); ++t)
            if (candidates[i].model.predict(test.x_labeled.row(t).transpose()) != test.y[t]) ++wrong;
        const double err = static_cast<double>(wrong) / test.n_labeled();
        const bool better =
            best < 0 || err < best_error ||
            (err == best_error && (candidates[i].c2 < candidates[static_cast<size_t>(best)].c2 ||
                                   (candidates[i].c2 == candidates[static_cast<size_t>(best)].c2 &&
                                    candidates[i].c1 < candidates[static_cast<size_t>(best)].c1)));
        if (better) {
            best = static_cast<int>(i);
            best_error = err;
        }
    }
    return best;
}

void write_tune_report_csv(const TuneReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write tune report: " + path);
    out << "C1,C2,misclassified,in_margin,eta,score,outer_iters,converged,nnz\n";
    char buf[64];
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    for (const TuneCell& cell : report.cells) {
        if (cell.failed) {
            out << num(cell.c1) << ',' << num(cell.c2) << ",,,,,,failed,\n";
            continue;
        }
        out << num(cell.c1) << ',' << num(cell.c2) << ',' << cell.misclassified << ','
            << cell.in_margin << ',' << num(cell.eta) << ',' << num(cell.score) << ','
            << cell.fit.outer_iters << ',' << (cell.fit.converged ? "true" : "false") << ','
            << cell.fit.model.nnz() << "\n";
    }
    if (!out) throw Error(ErrorCode::Io, "failed while writing tune report: " + path);
}

}  // namespace s3lda
