// Command-line front end. Links against the shared C API only.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include "s3lda/s3lda.h"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;

int exit_code(s3lda_status status) {
    switch (status) {
        case S3LDA_OK: return 0;
        case S3LDA_ERR_IO:
        case S3LDA_ERR_PARSE:
        case S3LDA_ERR_INVALID: return kExitParse;
        case S3LDA_ERR_SOLVER: return kExitSolver;
    }
    return kExitParse;
}

int fail(s3lda_status status) {
    std::fprintf(stderr, "error: %s\n", s3lda_last_error());
    return exit_code(status);
}

struct ConfigDeleter {
    void operator()(s3lda_config* c) const { s3lda_config_free(c); }
};
struct DatasetDeleter {
    void operator()(s3lda_dataset* d) const { s3lda_dataset_free(d); }
};
struct ModelDeleter {
    void operator()(s3lda_model* m) const { s3lda_model_free(m); }
};

using ConfigPtr = std::unique_ptr<s3lda_config, ConfigDeleter>;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int threads = -1;  // -1: not given
    bool have_seed = false;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out) {
    cmd->add_option("--config", opts.config_path, "configuration file")->required();
    if (with_out) cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads (default: auto)");
    cmd->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
        opts.have_seed = true;
    });
}

ConfigPtr load_config(const CommonOpts& opts, s3lda_status& status) {
    s3lda_config* raw = nullptr;
    status = s3lda_config_read(opts.config_path.c_str(), &raw);
    ConfigPtr cfg(raw);
    if (status != S3LDA_OK) return cfg;
    if (opts.have_seed) s3lda_config_set_seed(cfg.get(), opts.seed);
    int threads = opts.threads;
    if (threads < 0) {
        if (const char* env = std::getenv("S3LDA_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end && *end == '\0' && v >= 0) threads = static_cast<int>(v);
        }
    }
    if (threads >= 0) status = s3lda_config_set_threads(cfg.get(), threads);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-supervised sparse LDA: simulation, fitting and verification"};
    app.require_subcommand(1);

    CommonOpts sim_opts, fit_opts, exp_opts, theory_opts;
    std::string train_path, tune_path;

    CLI::App* sim = app.add_subcommand("simulate", "write train/tune/test fixture datasets");
    add_common(sim, sim_opts, true);

    CLI::App* fit = app.add_subcommand("fit", "grid-search fit on train/tune dataset files");
    add_common(fit, fit_opts, true);
    fit->add_option("--train", train_path, "training dataset file")->required();
    fit->add_option("--tune", tune_path, "tuning dataset file")->required();

    CLI::App* exp = app.add_subcommand("experiment", "run the replication study");
    add_common(exp, exp_opts, true);

    CLI::App* theory = app.add_subcommand("theory", "numerical checks of the population results");
    add_common(theory, theory_opts, false);

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        s3lda_status status;
        ConfigPtr cfg = load_config(sim_opts, status);
        if (status != S3LDA_OK) return fail(status);
        const std::string out = sim_opts.out_dir.empty() ? "." : sim_opts.out_dir;
        status = s3lda_simulate(cfg.get(), out.c_str());
        if (status != S3LDA_OK) return fail(status);
        std::printf("wrote %s/train.txt, tune.txt, test.txt\n", out.c_str());
        return 0;
    }

    if (fit->parsed()) {
        s3lda_status status;
        ConfigPtr cfg = load_config(fit_opts, status);
        if (status != S3LDA_OK) return fail(status);

        s3lda_dataset* train_raw = nullptr;
        status = s3lda_dataset_read(train_path.c_str(), &train_raw);
        std::unique_ptr<s3lda_dataset, DatasetDeleter> train(train_raw);
        if (status != S3LDA_OK) return fail(status);
        s3lda_dataset* tune_raw = nullptr;
        status = s3lda_dataset_read(tune_path.c_str(), &tune_raw);
        std::unique_ptr<s3lda_dataset, DatasetDeleter> tune(tune_raw);
        if (status != S3LDA_OK) return fail(status);

        const std::string out = fit_opts.out_dir.empty() ? "." : fit_opts.out_dir;
        std::filesystem::create_directories(out);
        const std::string model_path = out + "/model.txt";
        const std::string report_path = out + "/tune_report.csv";
        s3lda_model* model_raw = nullptr;
        status = s3lda_fit(cfg.get(), train.get(), tune.get(), &model_raw, report_path.c_str());
        std::unique_ptr<s3lda_model, ModelDeleter> model(model_raw);
        if (status != S3LDA_OK) return fail(status);
        status = s3lda_model_write(model.get(), model_path.c_str());
        if (status != S3LDA_OK) return fail(status);
        std::printf("model: %s (nnz=%d, b=%.6g)\nreport: %s\n", model_path.c_str(),
                    s3lda_model_nnz(model.get()), s3lda_model_intercept(model.get()),
                    report_path.c_str());
        return 0;
    }

    if (exp->parsed()) {
        s3lda_status status;
        ConfigPtr cfg = load_config(exp_opts, status);
        if (status != S3LDA_OK) return fail(status);
        char* summary = nullptr;
        status = s3lda_experiment(cfg.get(), exp_opts.out_dir.empty() ? nullptr : exp_opts.out_dir.c_str(),
                                  &summary);
        if (summary) {
            std::fputs(summary, stdout);
            s3lda_string_free(summary);
        }
        if (status != S3LDA_OK) return fail(status);
        return 0;
    }

    if (theory->parsed()) {
        s3lda_status status;
        ConfigPtr cfg = load_config(theory_opts, status);
        if (status != S3LDA_OK) return fail(status);
        char* table = nullptr;
        int all_pass = 0;
        status = s3lda_theory(cfg.get(), &table, &all_pass);
        if (table) {
            std::fputs(table, stdout);
            s3lda_string_free(table);
        }
        if (status != S3LDA_OK) return fail(status);
        return all_pass ? 0 : 1;
    }

    return kExitParse;
}
