#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/baselines.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "core/tuning.hpp"

using namespace s3lda;

TEST_CASE("eta hand example") {
    // pairwise distances of {0,1,2,3}: [1,1,1,2,2,3]; q25=1, q75=2
    CHECK(margin_halfwidth_eta({0.0, 1.0, 2.0, 3.0}) == 0.75);
}

TEST_CASE("eta of constant values is zero") {
    CHECK(margin_halfwidth_eta({1.5, 1.5, 1.5}) == 0.0);
}

TEST_CASE("eta needs two values") {
    CHECK_THROWS_AS(margin_halfwidth_eta({1.0}), Error);
}

TEST_CASE("eta is positively homogeneous and translation invariant") {
    Rng rng(61, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 20);
        std::vector<double> values(static_cast<size_t>(n));
        for (double& v : values) v = 3.0 * rng.normal();
        const double eta = margin_halfwidth_eta(values);
        CHECK(eta >= 0.0);

        const double t = 0.1 + 5.0 * rng.uniform01();
        std::vector<double> scaled = values, shifted = values;
        for (double& v : scaled) v *= t;
        const double c = rng.normal();
        for (double& v : shifted) v += c;
        CHECK(margin_halfwidth_eta(scaled) == doctest::Approx(t * eta).epsilon(1e-12));
        CHECK(margin_halfwidth_eta(shifted) == doctest::Approx(eta).epsilon(1e-9));
    }
}

TEST_CASE("eta subsampling is deterministic for a fixed stream") {
    std::vector<double> values(2100);  // 2100*2099/2 > 2e6 pairs
    Rng gen(62, 0);
    for (double& v : values) v = gen.normal();
    Rng r1(7, 3, 9), r2(7, 3, 9), r3(8, 3, 9);
    const double a = margin_halfwidth_eta(values, &r1);
    const double b = margin_halfwidth_eta(values, &r2);
    const double c = margin_halfwidth_eta(values, &r3);
    CHECK(a == b);
    CHECK(a != c);  // different stream, different subsample
    CHECK_THROWS_AS(margin_halfwidth_eta(values), Error);  // stream required above the cap
}

namespace {

Dataset tune_set_2plus2() {
    // 2 labeled (one will be wrong for omega=(1), b=0), 2 unlabeled (one inside margin)
    Eigen::MatrixXd xl(2, 1), xu(2, 1);
    xl << 2.0, 1.0;    // labels +1, +1 -> x=1 classified +1; make second label -1 for a miss
    xu << 0.2, 5.0;    // |f| = 0.2 and 5.0
    return make_dataset(xl, {1, -1}, xu);
}

}  // namespace

TEST_CASE("tuning criterion counts and equal-weight score") {
    LinearModel m;
    m.omega = Eigen::VectorXd::Constant(1, 1.0);
    m.b = 0.0;
    const Dataset tune = tune_set_2plus2();
    const CriterionResult r = tuning_criterion(m, tune, 0.5);
    CHECK(r.misclassified == 1);  // x=1 with label -1
    CHECK(r.in_margin == 1);      // |0.2| < 0.5; |5| is not
    CHECK(r.score == doctest::Approx(1.0 / 2 + 1.0 / 4));
}

TEST_CASE("tuning criterion with eta 0 counts nothing in-margin") {
    LinearModel m;
    m.omega = Eigen::VectorXd::Constant(1, 1.0);
    m.b = -0.2;  // puts the unlabeled x=0.2 exactly on the boundary
    const Dataset tune = tune_set_2plus2();
    const CriterionResult r = tuning_criterion(m, tune, 0.0);
    CHECK(r.in_margin == 0);  // strict inequality
}

TEST_CASE("tuning criterion labeled_only drops the clustering term") {
    LinearModel m;
    m.omega = Eigen::VectorXd::Constant(1, 1.0);
    m.b = 0.0;
    const Dataset tune = tune_set_2plus2();
    const CriterionResult r = tuning_criterion(m, tune, 10.0, /*labeled_only=*/true);
    CHECK(r.in_margin == 0);
    CHECK(r.score == doctest::Approx(0.5));
}

TEST_CASE("perfect separation beyond the margin scores zero") {
    LinearModel m;
    m.omega = Eigen::VectorXd::Constant(1, 1.0);
    m.b = 0.0;
    Eigen::MatrixXd xl(2, 1), xu(1, 1);
    xl << 3.0, -3.0;
    xu << 4.0;
    const Dataset tune = make_dataset(xl, {1, -1}, xu);
    const CriterionResult r = tuning_criterion(m, tune, 1.0);
    CHECK(r.score == 0.0);
}

namespace {

Dataset example1_like(Rng& rng, int n_labeled, int n_unlabeled) {
    Eigen::MatrixXd xl(n_labeled, 2), xu(n_unlabeled, 2);
    std::vector<int> y;
    for (int i = 0; i < n_labeled; ++i) {
        const int label = i % 2 == 0 ? 1 : -1;
        xl(i, 0) = 1.4 * label + rng.normal();
        xl(i, 1) = rng.normal();
        y.push_back(label);
    }
    for (int i = 0; i < n_unlabeled; ++i) {
        const int label = rng.uniform01() < 0.5 ? 1 : -1;
        xu(i, 0) = 1.4 * label + rng.normal();
        xu(i, 1) = rng.normal();
    }
    return make_dataset(xl, y, xu);
}

}  // namespace

TEST_CASE("grid_search on a 1x1 grid selects that cell") {
    Rng rng(63, 0);
    const Dataset train = example1_like(rng, 10, 40);
    const Dataset tune = example1_like(rng, 10, 40);
    Grid grid;
    grid.c1_values = {1.0};
    grid.c2_values = {0.01};
    const TuneReport report = grid_search(train, tune, grid, SolverConfig{});
    CHECK(report.cells.size() == 1);
    CHECK(report.best_index == 0);
    CHECK(report.best().c1 == 1.0);
    CHECK(report.best().c2 == 0.01);
}

TEST_CASE("grid_search breaks exact duplicates toward the first cell") {
    Rng rng(64, 0);
    const Dataset train = example1_like(rng, 10, 30);
    const Dataset tune = example1_like(rng, 10, 30);
    Grid grid;
    grid.c1_values = {1.0, 1.0};
    grid.c2_values = {0.01};
    const TuneReport report = grid_search(train, tune, grid, SolverConfig{});
    CHECK(report.cells.size() == 2);
    CHECK(report.cells[0].score == report.cells[1].score);
    CHECK(report.best_index == 0);
}

TEST_CASE("grid_search selected score never exceeds the (1, 0) cell's score") {
    Rng rng(65, 0);
    const Dataset train = example1_like(rng, 10, 60);
    const Dataset tune = example1_like(rng, 10, 60);
    Grid grid;  // defaults include C1=1 and C2=0
    const TuneReport report = grid_search(train, tune, grid, SolverConfig{});
    double ref_score = std::numeric_limits<double>::infinity();
    for (const TuneCell& cell : report.cells)
        if (!cell.failed && cell.c1 == 1.0 && cell.c2 == 0.0) ref_score = cell.score;
    CHECK(report.best().score <= ref_score);
}

TEST_CASE("grid_search with a C2-only-zero grid predicts exactly like the lasso") {
    Rng rng(66, 0);
    const Dataset train = example1_like(rng, 12, 50);
    const Dataset tune = example1_like(rng, 12, 50);
    const Dataset test = example1_like(rng, 40, 0);
    Grid grid;
    grid.c1_values = {0.5, 1.0, 2.0};
    grid.c2_values = {0.0};
    SolverConfig base;
    base.eps_outer = 1e-9;  // self-consistent intercept reference
    base.eps_inner = 1e-9;
    const TuneReport report = grid_search(train, tune, grid, base);
    const TuneCell& best = report.best();
    REQUIRE(best.fit.model.omega.norm() > 0);

    const LinearModel lasso = lasso_least_squares(
        train.x_labeled, encode_targets(train), 1.0 / best.c1,
        grid.c / (best.c1 * best.fit.model.omega.norm()));
    for (int i = 0; i < test.n_labeled(); ++i)
        CHECK(best.fit.model.predict(test.x_labeled.row(i).transpose()) ==
              lasso.predict(test.x_labeled.row(i).transpose()));
}

TEST_CASE("grid_search eta depends on the cell through its decision values") {
    Rng rng(67, 0);
    const Dataset train = example1_like(rng, 10, 40);
    const Dataset tune = example1_like(rng, 10, 40);
    Grid grid;
    grid.c1_values = {0.25, 4.0};
    grid.c2_values = {0.0};
    const TuneReport report = grid_search(train, tune, grid, SolverConfig{});
    REQUIRE(report.cells.size() == 2);
    CHECK(report.cells[0].eta != report.cells[1].eta);
}

TEST_CASE("oracle_select basics and dominance") {
    Rng rng(68, 0);
    const Dataset test = example1_like(rng, 60, 0);

    OracleCandidate good;
    good.c1 = 1.0;
    good.c2 = 0.0;
    good.model.omega = Eigen::VectorXd::Zero(2);
    good.model.omega[0] = 1.0;
    good.model.b = 0.0;
    OracleCandidate bad = good;
    bad.c1 = 2.0;
    bad.model.omega[0] = -1.0;  // sign-flipped: near-total error

    CHECK(oracle_select({good}, test) == 0);
    CHECK(oracle_select({good, bad}, test) == 0);
    CHECK(oracle_select({bad, good}, test) == 1);
    CHECK_THROWS_AS(oracle_select({}, test), Error);

    // exact tie: same model twice; smaller C2 then smaller C1 wins
    OracleCandidate tie_a = good, tie_b = good;
    tie_a.c1 = 2.0;
    tie_b.c1 = 1.0;
    CHECK(oracle_select({tie_a, tie_b}, test) == 1);
}

TEST_CASE("oracle never loses to the tuned selection on the same grid") {
    Rng rng(69, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const Dataset train = example1_like(rng, 10, 40);
        const Dataset tune = example1_like(rng, 10, 40);
        const Dataset test = example1_like(rng, 200, 0);
        Grid grid;
        grid.c1_values = {0.25, 1.0, 4.0};
        grid.c2_values = {0.0, 1.0};
        const TuneReport report = grid_search(train, tune, grid, SolverConfig{});

        std::vector<OracleCandidate> candidates;
        for (const TuneCell& cell : report.cells)
            if (!cell.failed) candidates.push_back({cell.c1, cell.c2, cell.fit.model});
        const int pick = oracle_select(candidates, test);
        const double oracle_err = misclassification_rate(candidates[pick].model, test);
        const double tuned_err = misclassification_rate(report.best().fit.model, test);
        CHECK(oracle_err <= tuned_err);
    }
}

TEST_CASE("tune report CSV has the documented header") {
    Rng rng(70, 0);
    const Dataset train = example1_like(rng, 10, 30);
    const Dataset tune = example1_like(rng, 10, 30);
    Grid grid;
    grid.c1_values = {1.0};
    grid.c2_values = {0.0, 1.0};
    const TuneReport report = grid_search(train, tune, grid, SolverConfig{});
    const auto path = std::filesystem::temp_directory_path() / "s3lda_tune_report.csv";
    write_tune_report_csv(report, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "C1,C2,misclassified,in_margin,eta,score,outer_iters,converged,nnz");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);
    std::filesystem::remove(path);
}
