#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/config.hpp"

using namespace s3lda;

namespace {

std::string write_temp_config(const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / "s3lda_test_config.ini";
    std::ofstream out(path);
    out << body;
    return path.string();
}

}  // namespace

TEST_CASE("a full config parses with every section") {
    const std::string path = write_temp_config(
        "# comment\n"
        "[simulation]\n"
        "example = ex2\n"
        "seed = 42\n"
        "s = 1.3\n"
        "labeling = random_count:10\n"
        "\n"
        "[grid]\n"
        "c1 = 0.5, 1, 2\n"
        "c2 = 0, 1\n"
        "c = 5\n"
        "\n"
        "[solver]\n"
        "eps_outer = 1e-6\n"
        "max_inner = 2000\n"
        "\n"
        "[experiment]\n"
        "methods = s3lda, bayes\n"
        "replications = 7\n"
        "threads = auto\n"
        "labeled_only_tuning = true\n"
        "\n"
        "[theory]\n"
        "mc_n = 20000\n");
    const ExperimentConfig cfg = read_config(path);
    CHECK(cfg.spec.example == ExampleId::Ex2);
    CHECK(cfg.spec.seed == 42);
    CHECK(cfg.seed_set);
    CHECK(cfg.spec.s == 1.3);
    CHECK(cfg.spec.labeling->rule == Labeling::Rule::RandomCount);
    CHECK(cfg.grid.c1_values == std::vector<double>{0.5, 1.0, 2.0});
    CHECK(cfg.grid.c2_values == std::vector<double>{0.0, 1.0});
    CHECK(cfg.solver.eps_outer == 1e-6);
    CHECK(cfg.solver.max_inner == 2000);
    CHECK(cfg.solver.c == 5.0);
    CHECK(cfg.methods == std::vector<MethodId>{MethodId::S3lda, MethodId::Bayes});
    CHECK(cfg.replications == 7);
    CHECK(cfg.threads == 0);
    CHECK(cfg.labeled_only_tuning);
    CHECK(cfg.theory_mc_n == 20000);
    std::filesystem::remove(path);
}

TEST_CASE("defaults match the published tuning grid") {
    const std::string path = write_temp_config("[simulation]\nexample = ex1\nseed = 1\n");
    const ExperimentConfig cfg = read_config(path);
    CHECK(cfg.grid.c1_values == std::vector<double>{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
    CHECK(cfg.grid.c2_values == std::vector<double>{0.0, 0.01, 1.0, 100.0});
    CHECK(cfg.grid.c == 5.0);
    CHECK(cfg.solver.eps_outer == 1e-5);
    CHECK(cfg.solver.eps_inner == 1e-7);
    CHECK(cfg.solver.max_outer == 50);
    CHECK(cfg.solver.max_inner == 5000);
    CHECK(cfg.methods.size() == 7);
    std::filesystem::remove(path);
}

TEST_CASE("unknown keys and sections are rejected with line numbers") {
    const std::string path = write_temp_config("[simulation]\nexample = ex1\nseed = 1\ntypo = 3\n");
    try {
        read_config(path);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Parse);
        CHECK(std::string(e.what()).find(":4:") != std::string::npos);
        CHECK(std::string(e.what()).find("typo") != std::string::npos);
    }
    std::filesystem::remove(path);

    const std::string path2 = write_temp_config("[simulations]\nexample = ex1\n");
    CHECK_THROWS_AS(read_config(path2), Error);
    std::filesystem::remove(path2);
}

TEST_CASE("malformed values are rejected") {
    for (const std::string body :
         {std::string("[simulation]\nexample = ex9\nseed = 1\n"),
          std::string("[simulation]\nexample = ex1\nseed = abc\n"),
          std::string("[simulation]\nexample = ex1\nseed = 1\nlabeling = sometimes:3\n"),
          std::string("[experiment]\nthreads = -2\n"),
          std::string("[experiment]\nmethods = s3lda, warp_drive\n"),
          std::string("[grid]\nc1 = 1, two\n"), std::string("no section line\n"),
          std::string("[simulation]\nexample = ex1\nexample = ex2\n")}) {
        const std::string path = write_temp_config(body);
        CHECK_THROWS_AS(read_config(path), Error);
        std::filesystem::remove(path);
    }
    CHECK_THROWS_AS(read_config("/nonexistent/config.ini"), Error);
}

TEST_CASE("seed requirement is enforced per operation") {
    const std::string path = write_temp_config("[simulation]\nexample = ex1\n");
    const ExperimentConfig cfg = read_config(path);
    CHECK_THROWS_AS(cfg.require_seed("simulate"), Error);
    std::filesystem::remove(path);
}
