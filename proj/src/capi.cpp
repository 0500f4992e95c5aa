#include "s3lda/s3lda.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/metrics.hpp"
#include "core/theory_checks.hpp"
#include "core/tuning.hpp"

struct s3lda_dataset {
    s3lda::Dataset data;
};
struct s3lda_model {
    s3lda::LinearModel model;
};
struct s3lda_config {
    s3lda::ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error = "";

s3lda_status to_status(s3lda::ErrorCode code) {
    switch (code) {
        case s3lda::ErrorCode::Io: return S3LDA_ERR_IO;
        case s3lda::ErrorCode::Parse: return S3LDA_ERR_PARSE;
        case s3lda::ErrorCode::Invalid: return S3LDA_ERR_INVALID;
        case s3lda::ErrorCode::Solver: return S3LDA_ERR_SOLVER;
    }
    return S3LDA_ERR_INVALID;
}

template <typename Fn>
s3lda_status guarded(Fn&& fn) {
    try {
        fn();
        return S3LDA_OK;
    } catch (const s3lda::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return S3LDA_ERR_INVALID;
    }
}

s3lda_status invalid_argument(const char* msg) {
    g_last_error = msg;
    return S3LDA_ERR_INVALID;
}

char* copy_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* s3lda_last_error(void) { return g_last_error.c_str(); }

s3lda_status s3lda_dataset_read(const char* path, s3lda_dataset** out) {
    if (!path || !out) return invalid_argument("null argument");
    *out = nullptr;
    return guarded([&] { *out = new s3lda_dataset{s3lda::read_dataset(path)}; });
}

s3lda_status s3lda_dataset_write(const s3lda_dataset* ds, const char* path) {
    if (!ds || !path) return invalid_argument("null argument");
    return guarded([&] { s3lda::write_dataset(ds->data, path); });
}

void s3lda_dataset_free(s3lda_dataset* ds) { delete ds; }

int s3lda_dataset_dim(const s3lda_dataset* ds) { return ds ? ds->data.d : 0; }
int s3lda_dataset_n_labeled(const s3lda_dataset* ds) { return ds ? ds->data.n_labeled() : 0; }
int s3lda_dataset_n_unlabeled(const s3lda_dataset* ds) { return ds ? ds->data.n_unlabeled() : 0; }

s3lda_status s3lda_model_read(const char* path, int dim, s3lda_model** out) {
    if (!path || !out) return invalid_argument("null argument");
    if (dim < 0) return invalid_argument("dim must be nonnegative");
    *out = nullptr;
    return guarded([&] { *out = new s3lda_model{s3lda::read_model(path, dim == 0 ? -1 : dim)}; });
}

s3lda_status s3lda_model_write(const s3lda_model* m, const char* path) {
    if (!m || !path) return invalid_argument("null argument");
    return guarded([&] { s3lda::write_model(m->model, path); });
}

void s3lda_model_free(s3lda_model* m) { delete m; }

int s3lda_model_dim(const s3lda_model* m) { return m ? m->model.dim() : 0; }
double s3lda_model_intercept(const s3lda_model* m) { return m ? m->model.b : 0.0; }
int s3lda_model_nnz(const s3lda_model* m) { return m ? m->model.nnz() : 0; }

s3lda_status s3lda_model_coefficients(const s3lda_model* m, double* out, size_t len) {
    if (!m || !out) return invalid_argument("null argument");
    if (len != static_cast<size_t>(m->model.dim()))
        return invalid_argument("coefficient buffer length mismatch");
    for (size_t j = 0; j < len; ++j) out[j] = m->model.omega[static_cast<Eigen::Index>(j)];
    return S3LDA_OK;
}

s3lda_status s3lda_model_decision(const s3lda_model* m, const double* x, size_t len, double* out) {
    if (!m || !x || !out) return invalid_argument("null argument");
    return guarded([&] {
        const Eigen::Map<const Eigen::VectorXd> xv(x, static_cast<Eigen::Index>(len));
        *out = m->model.decision_value(xv);
    });
}

s3lda_status s3lda_model_predict(const s3lda_model* m, const double* x, size_t len,
                                 int* label_out) {
    if (!m || !x || !label_out) return invalid_argument("null argument");
    return guarded([&] {
        const Eigen::Map<const Eigen::VectorXd> xv(x, static_cast<Eigen::Index>(len));
        *label_out = m->model.predict(xv);
    });
}

s3lda_status s3lda_config_read(const char* path, s3lda_config** out) {
    if (!path || !out) return invalid_argument("null argument");
    *out = nullptr;
    return guarded([&] { *out = new s3lda_config{s3lda::read_config(path)}; });
}

void s3lda_config_free(s3lda_config* cfg) { delete cfg; }

void s3lda_config_set_seed(s3lda_config* cfg, uint64_t seed) {
    if (!cfg) return;
    cfg->config.spec.seed = seed;
    cfg->config.seed_set = true;
}

s3lda_status s3lda_config_set_threads(s3lda_config* cfg, int threads) {
    if (!cfg) return invalid_argument("null argument");
    if (threads < 0) return invalid_argument("threads must be nonnegative");
    cfg->config.threads = threads;
    return S3LDA_OK;
}

s3lda_status s3lda_config_set_output_dir(s3lda_config* cfg, const char* dir) {
    if (!cfg || !dir) return invalid_argument("null argument");
    cfg->config.output_dir = dir;
    return S3LDA_OK;
}

s3lda_status s3lda_simulate(const s3lda_config* cfg, const char* out_dir) {
    if (!cfg || !out_dir) return invalid_argument("null argument");
    return guarded([&] {
        cfg->config.require_simulation("simulate");
        cfg->config.require_seed("simulate");
        const s3lda::GeneratedStudy study = s3lda::generate_example(cfg->config.spec);
        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        s3lda::write_dataset(study.train, (dir / "train.txt").string());
        s3lda::write_dataset(study.tune, (dir / "tune.txt").string());
        s3lda::write_dataset(study.test, (dir / "test.txt").string());
    });
}

s3lda_status s3lda_fit(const s3lda_config* cfg, const s3lda_dataset* train,
                       const s3lda_dataset* tune, s3lda_model** model_out,
                       const char* tune_report_csv) {
    if (!cfg || !train || !tune || !model_out) return invalid_argument("null argument");
    *model_out = nullptr;
    return guarded([&] {
        s3lda::Standardizer std_tr;
        if (cfg->config.standardize) {
            std_tr = s3lda::standardize_fit(train->data);
        } else {
            std_tr.means = Eigen::VectorXd::Zero(train->data.d);
            std_tr.scales = Eigen::VectorXd::Ones(train->data.d);
        }
        const s3lda::Dataset train_s = s3lda::standardize_apply(std_tr, train->data);
        const s3lda::Dataset tune_s = s3lda::standardize_apply(std_tr, tune->data);
        s3lda::TuningOptions opts;
        opts.labeled_only = cfg->config.labeled_only_tuning;
        opts.seed = cfg->config.spec.seed;
        const s3lda::TuneReport report =
            s3lda::grid_search(train_s, tune_s, cfg->config.grid, cfg->config.solver, opts);
        if (tune_report_csv) s3lda::write_tune_report_csv(report, tune_report_csv);
        *model_out = new s3lda_model{s3lda::fold_standardizer(std_tr, report.best().fit.model)};
    });
}

s3lda_status s3lda_experiment(const s3lda_config* cfg, const char* out_dir,
                              char** summary_text_out) {
    if (!cfg) return invalid_argument("null argument");
    if (summary_text_out) *summary_text_out = nullptr;
    return guarded([&] {
        cfg->config.require_simulation("experiment");
        cfg->config.require_seed("experiment");
        if (cfg->config.replications < 1)
            throw s3lda::Error(s3lda::ErrorCode::Invalid,
                               "experiment requires [experiment] replications >= 1");
        std::string dir = out_dir ? out_dir : cfg->config.output_dir;
        if (dir.empty())
            throw s3lda::Error(s3lda::ErrorCode::Invalid,
                               "experiment requires an output directory (output_dir or --out)");
        const s3lda::ExperimentSetup setup = cfg->config.to_setup();
        const std::vector<s3lda::MethodResult> results =
            s3lda::replicate_experiment(setup, cfg->config.methods, cfg->config.replications);
        std::filesystem::create_directories(dir);
        const std::filesystem::path base(dir);
        s3lda::write_results_csv(setup, results, (base / "results.csv").string());
        s3lda::write_summary_csv(setup, results, (base / "summary.csv").string());
        if (summary_text_out) *summary_text_out = copy_string(s3lda::summary_table(setup, results));
        bool any_ok = false;
        for (const s3lda::MethodResult& r : results)
            if (r.failures < static_cast<int>(r.reps.size())) any_ok = true;
        if (!any_ok)
            throw s3lda::Error(s3lda::ErrorCode::Solver, "every method failed in every replication");
    });
}

s3lda_status s3lda_theory(const s3lda_config* cfg, char** table_out, int* all_pass_out) {
    if (!cfg || !all_pass_out) return invalid_argument("null argument");
    if (table_out) *table_out = nullptr;
    *all_pass_out = 0;
    return guarded([&] {
        cfg->config.require_seed("theory");
        const std::vector<s3lda::TheoryCheckRow> rows =
            s3lda::run_theory_suite(cfg->config.spec.seed, cfg->config.theory_mc_n);
        if (table_out) *table_out = copy_string(s3lda::format_theory_table(rows));
        *all_pass_out = s3lda::all_pass(rows) ? 1 : 0;
    });
}

void s3lda_string_free(char* s) { delete[] s; }

}  // extern "C"
