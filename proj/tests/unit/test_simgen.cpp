#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/simgen.hpp"

using namespace s3lda;

TEST_CASE("toeplitz construction") {
    Eigen::VectorXd row2(2);
    row2 << 1.0, 0.8;
    const Eigen::MatrixXd m2 = toeplitz(row2);
    CHECK(m2(0, 0) == 1.0);
    CHECK(m2(0, 1) == 0.8);
    CHECK(m2(1, 0) == 0.8);
    CHECK(m2(1, 1) == 1.0);

    CHECK(toeplitz(Eigen::VectorXd::Ones(1))(0, 0) == 1.0);

    Eigen::VectorXd row3(3);
    row3 << 1.0, 0.8, 0.64;
    const Eigen::MatrixXd m3 = toeplitz(row3);
    CHECK(m3(0, 2) == 0.64);
    CHECK(m3(2, 0) == 0.64);
    CHECK(m3.isApprox(m3.transpose()));

    CHECK_THROWS_AS(toeplitz(Eigen::VectorXd(0)), Error);
    Eigen::VectorXd bad(2);
    bad << 2.0, 0.5;
    CHECK_THROWS_AS(toeplitz(bad), Error);
}

TEST_CASE("cholesky factor basics and reconstruction") {
    CHECK(chol_lower(Eigen::MatrixXd::Identity(3, 3)).isApprox(Eigen::MatrixXd::Identity(3, 3)));

    Eigen::MatrixXd diag(2, 2);
    diag << 4.0, 0.0, 0.0, 9.0;
    const Eigen::MatrixXd l = chol_lower(diag);
    CHECK(l(0, 0) == 2.0);
    CHECK(l(1, 1) == 3.0);

    Eigen::VectorXd row(10);
    for (int j = 0; j < 10; ++j) row[j] = std::pow(0.8, j);
    const Eigen::MatrixXd t = toeplitz(row);
    const Eigen::MatrixXd lt = chol_lower(t);
    CHECK((lt * lt.transpose() - t).norm() < 1e-10);

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(chol_lower(indef), Error);
}

TEST_CASE("mvn sampling with a zero factor returns the mean exactly") {
    Rng rng(71, 0);
    Eigen::VectorXd mean(3);
    mean << 1.0, -2.0, 0.5;
    const Eigen::VectorXd x = sample_mvn(mean, Eigen::MatrixXd::Zero(3, 3), rng);
    CHECK((x - mean).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mvn sample mean concentrates") {
    Rng rng(72, 0);
    Eigen::VectorXd mean(2);
    mean << 0.3, -0.7;
    const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sample_mvn(mean, chol, rng);
    const Eigen::VectorXd avg = sum / n;
    CHECK(std::abs(avg[0] - mean[0]) < 0.02);
    CHECK(std::abs(avg[1] - mean[1]) < 0.02);
}

TEST_CASE("scaled t(5) draws have unit variance") {
    Rng rng(73, 0);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = sample_scaled_t(5, rng);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(var > 0.9);
    CHECK(var < 1.1);
    CHECK_THROWS_AS(sample_scaled_t(2, rng), Error);
}

TEST_CASE("block covariance of the correlated example matches its Toeplitz target") {
    SimSpec spec;
    spec.example = ExampleId::Ex3;
    spec.d = 20;
    spec.seed = 99;
    // 1e5 block draws through the generator path
    Rng rng(74, 0);
    Eigen::VectorXd row(10);
    for (int j = 0; j < 10; ++j) row[j] = std::pow(0.8, j);
    const Eigen::MatrixXd target = toeplitz(row);
    const Eigen::MatrixXd chol = chol_lower(target);
    const int n = 100000;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(10, 10);
    Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(10);
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd z(10);
        for (int j = 0; j < 10; ++j) z[j] = rng.normal();
        draws.push_back(chol * z);
        mean_acc += draws.back();
    }
    mean_acc /= n;
    for (const auto& v : draws) cov += (v - mean_acc) * (v - mean_acc).transpose();
    cov /= (n - 1);
    CHECK((cov - target).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("mask_labels keep-all and keep-none") {
    Eigen::MatrixXd x(4, 1);
    x << 1.0, 2.0, 3.0, 4.0;
    const Dataset full = make_dataset(x, {1, -1, 1, -1}, Eigen::MatrixXd(0, 1));
    Rng rng(75, 0);
    const Dataset all = mask_labels(full, {Labeling::Rule::RandomCount, 4}, rng);
    CHECK(all.n_unlabeled() == 0);
    CHECK(all.n_labeled() == 4);
    const Dataset none = mask_labels(full, {Labeling::Rule::RandomCount, 0}, rng);
    CHECK(none.n_labeled() == 0);
    CHECK(none.n_unlabeled() == 4);
}

TEST_CASE("mask_labels per-class counting") {
    Rng gen(76, 0);
    Eigen::MatrixXd x(200, 2);
    std::vector<int> y;
    for (int i = 0; i < 200; ++i) {
        x(i, 0) = gen.normal();
        x(i, 1) = gen.normal();
        y.push_back(i < 100 ? 1 : -1);
    }
    const Dataset full = make_dataset(x, y, Eigen::MatrixXd(0, 2));
    Rng rng(77, 0);
    const Dataset masked = mask_labels(full, {Labeling::Rule::PerClass, 10}, rng);
    CHECK(masked.n_labeled() == 20);
    CHECK(masked.n_unlabeled() == 180);
    CHECK(masked.count_positive() == 10);
    CHECK(masked.count_negative() == 10);

    CHECK_THROWS_AS(mask_labels(full, {Labeling::Rule::PerClass, 101}, rng), Error);
}

TEST_CASE("mask_labels random_count keeps both classes when feasible") {
    Rng gen(78, 0);
    Eigen::MatrixXd x(50, 1);
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        x(i, 0) = gen.normal();
        y.push_back(i < 25 ? 1 : -1);
    }
    const Dataset full = make_dataset(x, y, Eigen::MatrixXd(0, 1));
    for (int trial = 0; trial < 50; ++trial) {
        Rng rng(79, static_cast<std::uint32_t>(trial));
        const Dataset masked = mask_labels(full, {Labeling::Rule::RandomCount, 3}, rng);
        CHECK(masked.count_positive() >= 1);
        CHECK(masked.count_negative() >= 1);
    }
}

TEST_CASE("example 1 defaults match the published split") {
    SimSpec spec;
    spec.example = ExampleId::Ex1;
    spec.seed = 12345;
    const GeneratedStudy study = generate_example(spec);
    CHECK(study.train.d == 2);
    CHECK(study.train.n_labeled() == 10);
    CHECK(study.train.n_unlabeled() == 190);
    CHECK(study.tune.n_labeled() == 10);
    CHECK(study.tune.n_unlabeled() == 190);
    CHECK(study.test.n_labeled() == 3000);
    CHECK(study.test.n_unlabeled() == 0);
    CHECK(study.true_support == std::vector<int>{0});
    REQUIRE(study.population.has_value());
    CHECK(bayes_error_gaussian(*study.population) == doctest::Approx(normal_cdf(-1.4)));
}

TEST_CASE("example 2 population bayes error matches the closed form") {
    SimSpec spec;
    spec.example = ExampleId::Ex2;
    spec.s = 1.3;
    spec.seed = 4242;
    const GeneratedStudy study = generate_example(spec);
    CHECK(study.train.d == 100);
    CHECK(study.true_support == std::vector<int>{0, 1});
    REQUIRE(study.population.has_value());
    CHECK(bayes_error_gaussian(*study.population) ==
          doctest::Approx(normal_cdf(-1.3 * std::sqrt(2.0))));
}

TEST_CASE("example 3 dimension sweep sizes") {
    CHECK(sweep_train_size(20) == 200);
    CHECK(sweep_train_size(30) == 244);
    CHECK(sweep_train_size(40) == 283);
    CHECK(sweep_train_size(50) == 316);
    CHECK(sweep_train_size(100) == 447);
    CHECK(sweep_train_size(200) == 632);
    CHECK(sweep_train_size(500) == 1000);

    SimSpec spec;
    spec.example = ExampleId::Ex3;
    spec.d = 20;
    spec.seed = 7;
    const GeneratedStudy study = generate_example(spec);
    CHECK(study.train.n_total() == 200);
    CHECK(study.tune.n_total() == 200);
    CHECK(study.test.n_labeled() == 10000 - 400);
    CHECK(study.train.n_labeled() == 20);  // 10 per class
    CHECK(static_cast<int>(study.true_support.size()) == 10);
    REQUIRE(study.population.has_value());
    CHECK(bayes_error_gaussian(*study.population) < 0.05);
}

TEST_CASE("example 4 has no Gaussian population") {
    SimSpec spec;
    spec.example = ExampleId::Ex4;
    spec.d = 20;
    spec.seed = 7;
    const GeneratedStudy study = generate_example(spec);
    CHECK_FALSE(study.population.has_value());
    CHECK(study.train.n_labeled() == 20);
}

TEST_CASE("example 2 with zero signal leaves the bayes rule at chance level") {
    SimSpec spec;
    spec.example = ExampleId::Ex2;
    spec.s = 0.0;
    spec.d = 10;
    spec.seed = 90;
    const GeneratedStudy study = generate_example(spec);
    // mu = 0: the "rule" is sign(0) = +1 everywhere
    int plus = 0;
    for (int i = 0; i < study.test.n_labeled(); ++i)
        if (study.test.y[i] > 0) ++plus;
    const double frac_minus = 1.0 - static_cast<double>(plus) / study.test.n_labeled();
    CHECK(std::abs(frac_minus - 0.5) < 0.02);
}

TEST_CASE("same seed gives a bit-identical study, different replication differs") {
    SimSpec spec;
    spec.example = ExampleId::Ex1;
    spec.seed = 31337;
    const GeneratedStudy a = generate_example(spec, 3);
    const GeneratedStudy b = generate_example(spec, 3);
    const GeneratedStudy c = generate_example(spec, 4);

    const auto serialize = [](const GeneratedStudy& s) {
        const auto tmp = std::filesystem::temp_directory_path() / "s3lda_study_cmp.txt";
        write_dataset(s.train, tmp.string());
        std::ifstream in(tmp);
        std::stringstream ss;
        ss << in.rdbuf();
        std::filesystem::remove(tmp);
        return ss.str();
    };
    const std::string sa = serialize(a), sb = serialize(b), sc = serialize(c);
    CHECK(sa == sb);
    CHECK(sa != sc);
    CHECK((a.tune.x_labeled - b.tune.x_labeled).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.test.x_labeled - b.test.x_labeled).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spec validation rejects inconsistent fields") {
    SimSpec bad;
    bad.example = ExampleId::Ex1;
    bad.d = 5;
    CHECK_THROWS_AS(bad.resolved(), Error);

    SimSpec bad_s;
    bad_s.example = ExampleId::Ex3;
    bad_s.d = 20;
    bad_s.s = 1.0;  // signal level is an Ex2 concept
    CHECK_THROWS_AS(bad_s.resolved(), Error);

    SimSpec small;
    small.example = ExampleId::Ex4;
    small.d = 5;
    CHECK_THROWS_AS(small.resolved(), Error);
}
