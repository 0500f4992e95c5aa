#include "simgen.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace s3lda {

std::string example_name(ExampleId id) {
    switch (id) {
        case ExampleId::Ex1: return "ex1";
        case ExampleId::Ex2: return "ex2";
        case ExampleId::Ex3: return "ex3";
        case ExampleId::Ex4: return "ex4";
    }
    return "ex?";
}

ExampleId parse_example(const std::string& name) {
    if (name == "ex1") return ExampleId::Ex1;
    if (name == "ex2") return ExampleId::Ex2;
    if (name == "ex3") return ExampleId::Ex3;
    if (name == "ex4") return ExampleId::Ex4;
    throw Error(ErrorCode::Parse, "unknown example '" + name + "' (expected ex1..ex4)");
}

int sweep_train_size(int d) {
    switch (d) {
        case 20: return 200;
        case 30: return 244;
        case 40: return 283;
        case 50: return 316;
        case 100: return 447;
        case 200: return 632;
        case 500: return 1000;
        default: return static_cast<int>(std::lround(200.0 * std::sqrt(d / 20.0)));
    }
}

SimSpec SimSpec::resolved() const {
    SimSpec s = *this;
    switch (s.example) {
        case ExampleId::Ex1:
            if (s.d == 0) s.d = 2;
            if (s.d != 2) throw Error(ErrorCode::Invalid, "ex1 requires d = 2");
            if (s.n_train == 0) s.n_train = 200;
            if (s.n_tune == 0) s.n_tune = 200;
            if (s.n_test == 0) s.n_test = 3000;
            if (!s.labeling) s.labeling = Labeling{Labeling::Rule::RandomCount, 10};
            break;
        case ExampleId::Ex2:
            if (s.d == 0) s.d = 100;
            if (s.d < 3) throw Error(ErrorCode::Invalid, "ex2 requires d >= 3");
            if (std::isnan(s.s)) s.s = 1.3;
            if (!(s.s >= 0)) throw Error(ErrorCode::Invalid, "ex2 signal level must be nonnegative");
            if (s.n_train == 0) s.n_train = 200;
            if (s.n_tune == 0) s.n_tune = 200;
            if (s.n_test == 0) s.n_test = 3000;
            if (!s.labeling) s.labeling = Labeling{Labeling::Rule::RandomCount, 10};
            break;
        case ExampleId::Ex3:
        case ExampleId::Ex4:
            if (s.d == 0) s.d = 100;
            if (s.d < 10) throw Error(ErrorCode::Invalid, "ex3/ex4 require d >= 10");
            if (s.n_train == 0) s.n_train = sweep_train_size(s.d);
            if (s.n_tune == 0) s.n_tune = s.n_train;
            if (s.n_test == 0) {
                s.n_test = 10000 - s.n_train - s.n_tune;
                if (s.n_test <= 0) throw Error(ErrorCode::Invalid, "ex3/ex4 sizes exceed 10000 instances");
            }
            if (!s.labeling) s.labeling = Labeling{Labeling::Rule::PerClass, 10};
            break;
    }
    if (s.n_train <= 0 || s.n_tune <= 0 || s.n_test <= 0)
        throw Error(ErrorCode::Invalid, "sample sizes must be positive");
    if (s.labeling->keep < 0) throw Error(ErrorCode::Invalid, "labeling keep count must be nonnegative");
    if (!std::isnan(s.s) && s.example != ExampleId::Ex2)
        throw Error(ErrorCode::Invalid, "signal level s applies to ex2 only");
    return s;
}

Eigen::MatrixXd toeplitz(const Eigen::VectorXd& first_row) {
    if (first_row.size() == 0) throw Error(ErrorCode::Invalid, "toeplitz: empty first row");
    if (first_row[0] != 1.0) throw Error(ErrorCode::Invalid, "toeplitz: first element must be 1");
    const int n = static_cast<int>(first_row.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = first_row[std::abs(i - j)];
    return m;
}

Eigen::MatrixXd chol_lower(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols()) throw Error(ErrorCode::Invalid, "chol_lower: matrix not square");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
        throw Error(ErrorCode::Invalid, "chol_lower: matrix not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::Invalid, "chol_lower: matrix not positive definite");
    return llt.matrixL();
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol, Rng& rng) {
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean + chol * z;
}

double sample_scaled_t(int df, Rng& rng) {
    if (df < 3) throw Error(ErrorCode::Invalid, "scaled t requires df >= 3");
    return std::sqrt((df - 2.0) / df) * rng.student_t(df);
}

Dataset mask_labels(const Dataset& full, const Labeling& rule, Rng& rng) {
    full.validate();
    const int n = full.n_labeled();
    if (full.n_unlabeled() != 0)
        throw Error(ErrorCode::Invalid, "mask_labels expects a fully labeled sample");

    std::vector<char> keep(static_cast<size_t>(n), 0);
    if (rule.rule == Labeling::Rule::RandomCount) {
        if (rule.keep > n) throw Error(ErrorCode::Invalid, "mask_labels: keep count exceeds sample size");
        const bool has_both = full.count_positive() > 0 && full.count_negative() > 0;
        const bool condition_on_both = has_both && rule.keep >= 2 && rule.keep < n;
        std::vector<int> indices(static_cast<size_t>(n));
        for (int attempt = 0; attempt < 10000; ++attempt) {
            for (int i = 0; i < n; ++i) indices[static_cast<size_t>(i)] = i;
            // partial Fisher-Yates: the first `keep` entries are the kept subset
            for (int i = 0; i < rule.keep; ++i) {
                const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
                std::swap(indices[static_cast<size_t>(i)], indices[static_cast<size_t>(j)]);
            }
            std::fill(keep.begin(), keep.end(), 0);
            int pos = 0, neg = 0;
            for (int i = 0; i < rule.keep; ++i) {
                keep[static_cast<size_t>(indices[static_cast<size_t>(i)])] = 1;
                (full.y[static_cast<size_t>(indices[static_cast<size_t>(i)])] > 0 ? pos : neg) += 1;
            }
            if (!condition_on_both || (pos > 0 && neg > 0)) break;
        }
    } else {
        std::vector<int> pos_idx, neg_idx;
        for (int i = 0; i < n; ++i) (full.y[static_cast<size_t>(i)] > 0 ? pos_idx : neg_idx).push_back(i);
        if (rule.keep > static_cast<int>(pos_idx.size()) || rule.keep > static_cast<int>(neg_idx.size()))
            throw Error(ErrorCode::Invalid, "mask_labels: keep-per-class exceeds a class size");
        for (auto* group : {&pos_idx, &neg_idx}) {
            auto& idx = *group;
            const int g = static_cast<int>(idx.size());
            for (int i = 0; i < rule.keep; ++i) {
                const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(g - i));
                std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
            }
            for (int i = 0; i < rule.keep; ++i) keep[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
        }
    }

    int n_keep = 0;
    for (char k : keep) n_keep += k;
    Eigen::MatrixXd xl(n_keep, full.d), xu(n - n_keep, full.d);
    std::vector<int> y;
    y.reserve(static_cast<size_t>(n_keep));
    int li = 0, ui = 0;
    for (int i = 0; i < n; ++i) {
        if (keep[static_cast<size_t>(i)]) {
            xl.row(li++) = full.x_labeled.row(i);
            y.push_back(full.y[static_cast<size_t>(i)]);
        } else {
            xu.row(ui++) = full.x_labeled.row(i);
        }
    }
    return make_dataset(std::move(xl), std::move(y), std::move(xu));
}

namespace {

// Mean pattern of the correlated 10-coordinate block: +1/2.7 on odd
// positions (1-based), -1/2.7 on even ones.
Eigen::VectorXd block_mean_pattern() {
    Eigen::VectorXd v(10);
    for (int j = 0; j < 10; ++j) v[j] = ((j % 2 == 0) ? 1.0 : -1.0) / 2.7;
    return v;
}

Eigen::MatrixXd block_toeplitz() {
    Eigen::VectorXd row(10);
    for (int j = 0; j < 10; ++j) row[j] = std::pow(0.8, j);
    return toeplitz(row);
}

}  // namespace

GeneratedStudy generate_example(const SimSpec& raw_spec, std::uint32_t replication) {
    const SimSpec spec = raw_spec.resolved();
    const int d = spec.d;
    const int n_total = spec.n_train + spec.n_tune + spec.n_test;

    Rng gen(spec.seed, replication, rng_purpose::kGeneration);

    Eigen::MatrixXd x(n_total, d);
    std::vector<int> y(static_cast<size_t>(n_total));

    Eigen::MatrixXd block_chol;
    if (spec.example == ExampleId::Ex3 || spec.example == ExampleId::Ex4)
        block_chol = chol_lower(block_toeplitz());
    const Eigen::VectorXd pattern = block_mean_pattern();

    for (int i = 0; i < n_total; ++i) {
        const int label = gen.uniform01() < 0.5 ? 1 : -1;
        y[static_cast<size_t>(i)] = label;
        switch (spec.example) {
            case ExampleId::Ex1:
                x(i, 0) = 1.4 * label + gen.normal();
                x(i, 1) = gen.normal();
                break;
            case ExampleId::Ex2:
                x(i, 0) = spec.s * label + gen.normal();
                x(i, 1) = -spec.s * label + gen.normal();
                for (int j = 2; j < d; ++j) x(i, j) = gen.normal();
                break;
            case ExampleId::Ex3: {
                Eigen::VectorXd z(10);
                for (int j = 0; j < 10; ++j) z[j] = gen.normal();
                x.row(i).head(10) = (label * pattern + block_chol * z).transpose();
                for (int j = 10; j < d; ++j) x(i, j) = gen.normal();
                break;
            }
            case ExampleId::Ex4: {
                Eigen::VectorXd z(10);
                for (int j = 0; j < 10; ++j) z[j] = sample_scaled_t(5, gen);
                x.row(i).head(10) = (label * pattern + block_chol * z).transpose();
                for (int j = 10; j < d; ++j) x(i, j) = gen.normal();
                break;
            }
        }
    }

    const auto slice = [&](int begin, int count) {
        Eigen::MatrixXd xs = x.middleRows(begin, count);
        std::vector<int> ys(y.begin() + begin, y.begin() + begin + count);
        return make_dataset(std::move(xs), std::move(ys), Eigen::MatrixXd(0, d));
    };

    GeneratedStudy study;
    study.train_full = slice(0, spec.n_train);
    study.tune_full = slice(spec.n_train, spec.n_tune);
    study.test = slice(spec.n_train + spec.n_tune, spec.n_test);

    Rng mask_train_rng(spec.seed, replication, rng_purpose::kMaskTrain);
    Rng mask_tune_rng(spec.seed, replication, rng_purpose::kMaskTune);
    study.train = mask_labels(study.train_full, *spec.labeling, mask_train_rng);
    study.tune = mask_labels(study.tune_full, *spec.labeling, mask_tune_rng);

    switch (spec.example) {
        case ExampleId::Ex1: {
            study.true_support = {0};
            PopulationModel pm;
            pm.mu = Eigen::VectorXd::Zero(d);
            pm.mu[0] = 1.4;
            pm.sigma = Eigen::MatrixXd::Identity(d, d);
            study.population = pm;
            break;
        }
        case ExampleId::Ex2: {
            study.true_support = {0, 1};
            PopulationModel pm;
            pm.mu = Eigen::VectorXd::Zero(d);
            pm.mu[0] = spec.s;
            pm.mu[1] = -spec.s;
            pm.sigma = Eigen::MatrixXd::Identity(d, d);
            study.population = pm;
            break;
        }
        case ExampleId::Ex3: {
            study.true_support.resize(10);
            for (int j = 0; j < 10; ++j) study.true_support[static_cast<size_t>(j)] = j;
            PopulationModel pm;
            pm.mu = Eigen::VectorXd::Zero(d);
            pm.mu.head(10) = pattern;
            pm.sigma = Eigen::MatrixXd::Identity(d, d);
            pm.sigma.topLeftCorner(10, 10) = block_toeplitz();
            study.population = pm;
            break;
        }
        case ExampleId::Ex4: {
            study.true_support.resize(10);
            for (int j = 0; j < 10; ++j) study.true_support[static_cast<size_t>(j)] = j;
            // heavy-tailed block: no Gaussian population to report
            break;
        }
    }
    return study;
}

}  // namespace s3lda
