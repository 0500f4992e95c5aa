#include "metrics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace s3lda {

std::string method_name(MethodId id) {
    switch (id) {
        case MethodId::S3lda: return "s3lda";
        case MethodId::S3ldaOracle: return "s3lda_oracle";
        case MethodId::L1Lda: return "l1_lda";
        case MethodId::L1Svm: return "l1_svm";
        case MethodId::L1LdaComplete: return "l1_lda_complete";
        case MethodId::L1SvmComplete: return "l1_svm_complete";
        case MethodId::Bayes: return "bayes";
    }
    return "unknown";
}

MethodId parse_method(const std::string& name) {
    if (name == "s3lda") return MethodId::S3lda;
    if (name == "s3lda_oracle") return MethodId::S3ldaOracle;
    if (name == "l1_lda") return MethodId::L1Lda;
    if (name == "l1_svm") return MethodId::L1Svm;
    if (name == "l1_lda_complete") return MethodId::L1LdaComplete;
    if (name == "l1_svm_complete") return MethodId::L1SvmComplete;
    if (name == "bayes") return MethodId::Bayes;
    throw Error(ErrorCode::Parse, "unknown method '" + name + "'");
}

double misclassification_rate(const LinearModel& m, const Dataset& test) {
    if (test.n_labeled() == 0) throw Error(ErrorCode::Invalid, "misclassification_rate: empty test set");
    int wrong = 0;
    for (int i = 0; i < test.n_labeled(); ++i)
        if (m.predict(test.x_labeled.row(i).transpose()) != test.y[i]) ++wrong;
    return static_cast<double>(wrong) / test.n_labeled();
}

std::pair<int, int> selection_errors(const Eigen::VectorXd& omega,
                                     const std::vector<int>& true_support) {
    constexpr double kTol = 1e-10;
    std::vector<char> in_support(static_cast<size_t>(omega.size()), 0);
    for (int j : true_support) {
        if (j < 0 || j >= omega.size())
            throw Error(ErrorCode::Invalid, "selection_errors: support index out of range");
        in_support[static_cast<size_t>(j)] = 1;
    }
    int fp = 0, fn = 0;
    for (Eigen::Index j = 0; j < omega.size(); ++j) {
        const bool nonzero = std::abs(omega[j]) > kTol;
        if (nonzero && !in_support[static_cast<size_t>(j)]) ++fp;
        if (!nonzero && in_support[static_cast<size_t>(j)]) ++fn;
    }
    return {fp, fn};
}

namespace {

struct RepOutputs {
    std::vector<RepRecord> records;  // one per requested method, in order
};

class Timer {
public:
    void start() { t0_ = std::chrono::steady_clock::now(); }
    double stop() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

bool needs_grid(const std::vector<MethodId>& methods) {
    for (MethodId m : methods)
        if (m == MethodId::S3lda || m == MethodId::S3ldaOracle) return true;
    return false;
}

RepOutputs run_replication(const ExperimentSetup& setup, const std::vector<MethodId>& methods,
                           int rep) {
    const SimSpec spec = setup.spec.resolved();
    const GeneratedStudy study = generate_example(spec, static_cast<std::uint32_t>(rep));

    Standardizer std_tr;
    if (setup.standardize) {
        std_tr = standardize_fit(study.train);
    } else {
        std_tr.means = Eigen::VectorXd::Zero(study.train.d);
        std_tr.scales = Eigen::VectorXd::Ones(study.train.d);
    }
    const Dataset train_s = standardize_apply(std_tr, study.train);
    const Dataset tune_s = standardize_apply(std_tr, study.tune);
    // identical covariates, so the same standardizer applies
    const Dataset train_full_s = standardize_apply(std_tr, study.train_full);
    const Dataset tune_full_s = standardize_apply(std_tr, study.tune_full);

    // One grid search serves both the tuned and oracle variants.
    TuneReport grid_report;
    bool grid_ok = false;
    std::string grid_error;
    double grid_seconds = 0.0;
    int grid_violations = 0;
    if (needs_grid(methods)) {
        Timer t;
        t.start();
        try {
            TuningOptions opts;
            opts.labeled_only = setup.labeled_only_tuning;
            opts.seed = spec.seed;
            opts.stream = static_cast<std::uint32_t>(rep);
            grid_report = grid_search(train_s, tune_s, setup.grid, setup.solver, opts);
            grid_ok = true;
            for (const TuneCell& cell : grid_report.cells)
                if (!cell.failed) grid_violations += cell.fit.descent_violations;
        } catch (const std::exception& e) {
            grid_error = e.what();
        }
        grid_seconds = t.stop();
    }

    RepOutputs out;
    out.records.reserve(methods.size());
    for (MethodId method : methods) {
        RepRecord rec;
        rec.rep = rep;
        Timer t;
        t.start();
        try {
            LinearModel model;
            switch (method) {
                case MethodId::S3lda: {
                    if (!grid_ok) throw Error(ErrorCode::Solver, grid_error);
                    const TuneCell& best = grid_report.best();
                    model = fold_standardizer(std_tr, best.fit.model);
                    rec.c1 = best.c1;
                    rec.c2 = best.c2;
                    rec.dc_violations = grid_violations;
                    break;
                }
                case MethodId::S3ldaOracle: {
                    if (!grid_ok) throw Error(ErrorCode::Solver, grid_error);
                    std::vector<OracleCandidate> candidates;
                    for (const TuneCell& cell : grid_report.cells) {
                        if (cell.failed) continue;
                        candidates.push_back(
                            {cell.c1, cell.c2, fold_standardizer(std_tr, cell.fit.model)});
                    }
                    const int pick = oracle_select(candidates, study.test);
                    model = candidates[static_cast<size_t>(pick)].model;
                    rec.c1 = candidates[static_cast<size_t>(pick)].c1;
                    rec.c2 = candidates[static_cast<size_t>(pick)].c2;
                    rec.dc_violations = grid_violations;
                    break;
                }
                case MethodId::L1Lda: {
                    double lambda = 0;
                    model = fold_standardizer(
                        std_tr, l1_lda_fit(train_s, setup.baseline_lambda_grid, tune_s, &lambda));
                    rec.c1 = lambda;
                    break;
                }
                case MethodId::L1Svm: {
                    double lambda = 0;
                    model = fold_standardizer(
                        std_tr, l1_svm_fit(train_s, setup.baseline_lambda_grid, tune_s, &lambda));
                    rec.c1 = lambda;
                    break;
                }
                case MethodId::L1LdaComplete: {
                    double lambda = 0;
                    model = fold_standardizer(
                        std_tr,
                        l1_lda_fit(train_full_s, setup.baseline_lambda_grid, tune_full_s, &lambda));
                    rec.c1 = lambda;
                    break;
                }
                case MethodId::L1SvmComplete: {
                    double lambda = 0;
                    model = fold_standardizer(
                        std_tr,
                        l1_svm_fit(train_full_s, setup.baseline_lambda_grid, tune_full_s, &lambda));
                    rec.c1 = lambda;
                    break;
                }
                case MethodId::Bayes: {
                    if (!study.population)
                        throw Error(ErrorCode::Invalid,
                                    "bayes method unavailable: no Gaussian population for this example");
                    const PopulationModel& pm = *study.population;
                    model = bayes_rule(pm.mu, Eigen::VectorXd(-pm.mu), pm.sigma, pm.pi1);
                    break;
                }
            }
            rec.error_rate = misclassification_rate(model, study.test);
            const auto [fp, fn] = selection_errors(model.omega, study.true_support);
            rec.fp = fp;
            rec.fn = fn;
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        rec.seconds = t.stop();
        if (method == MethodId::S3lda || method == MethodId::S3ldaOracle)
            rec.seconds += grid_seconds;
        out.records.push_back(std::move(rec));
    }
    return out;
}

void summarize(MethodResult& r) {
    std::vector<const RepRecord*> ok;
    for (const RepRecord& rec : r.reps)
        if (!rec.failed) ok.push_back(&rec);
    r.failures = static_cast<int>(r.reps.size() - ok.size());
    if (ok.empty()) return;
    const double n = static_cast<double>(ok.size());
    double sum_err = 0, sum_fp = 0, sum_fn = 0;
    for (const RepRecord* rec : ok) {
        sum_err += rec->error_rate;
        sum_fp += rec->fp;
        sum_fn += rec->fn;
    }
    r.mean_error = sum_err / n;
    r.mean_fp = sum_fp / n;
    r.mean_fn = sum_fn / n;
    if (ok.size() >= 2) {
        double ss = 0;
        for (const RepRecord* rec : ok) {
            const double dev = rec->error_rate - r.mean_error;
            ss += dev * dev;
        }
        r.se_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
}

}  // namespace

std::vector<MethodResult> replicate_experiment(const ExperimentSetup& setup,
                                               const std::vector<MethodId>& methods, int R) {
    if (R < 1) throw Error(ErrorCode::Invalid, "replications must be at least 1");
    if (methods.empty()) throw Error(ErrorCode::Invalid, "no methods requested");
    setup.spec.resolved();  // fail fast on a bad spec
    setup.grid.validate();
    setup.solver.validate();

    std::vector<RepOutputs> per_rep(static_cast<size_t>(R));
    int threads = setup.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, R));

    if (threads == 1) {
        for (int rep = 0; rep < R; ++rep)
            per_rep[static_cast<size_t>(rep)] = run_replication(setup, methods, rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= R) return;
                    per_rep[static_cast<size_t>(rep)] = run_replication(setup, methods, rep);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    std::vector<MethodResult> results(methods.size());
    for (size_t m = 0; m < methods.size(); ++m) {
        results[m].method = methods[m];
        results[m].reps.reserve(static_cast<size_t>(R));
        for (int rep = 0; rep < R; ++rep)
            results[m].reps.push_back(per_rep[static_cast<size_t>(rep)].records[m]);
        summarize(results[m]);
    }
    return results;
}

namespace {

std::string num6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string opt_num(double v) { return std::isnan(v) ? std::string() : num6(v); }

std::string spec_s_field(const SimSpec& spec) {
    return spec.example == ExampleId::Ex2 ? num6(spec.s) : std::string();
}

}  // namespace

void write_results_csv(const ExperimentSetup& setup, const std::vector<MethodResult>& results,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write results csv: " + path);
    const SimSpec spec = setup.spec.resolved();
    out << "method,example,d,s,rep,error,fp,fn,C1,C2,seconds\n";
    for (const MethodResult& r : results) {
        for (const RepRecord& rec : r.reps) {
            out << method_name(r.method) << ',' << example_name(spec.example) << ',' << spec.d << ','
                << spec_s_field(spec) << ',' << rec.rep << ',';
            if (rec.failed) {
                out << ",,,,,";
            } else {
                out << num6(rec.error_rate) << ',' << rec.fp << ',' << rec.fn << ','
                    << opt_num(rec.c1) << ',' << opt_num(rec.c2) << ',';
            }
            if (setup.record_timing && !rec.failed) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.3f", rec.seconds);
                out << buf;
            }
            out << "\n";
        }
    }
    if (!out) throw Error(ErrorCode::Io, "failed while writing results csv: " + path);
}

void write_summary_csv(const ExperimentSetup& setup, const std::vector<MethodResult>& results,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write summary csv: " + path);
    const SimSpec spec = setup.spec.resolved();
    out << "method,example,d,s,mean_error,se_error,mean_fp,mean_fn,failures\n";
    for (const MethodResult& r : results) {
        out << method_name(r.method) << ',' << example_name(spec.example) << ',' << spec.d << ','
            << spec_s_field(spec) << ',';
        if (std::isnan(r.mean_error))
            out << "NA,";
        else
            out << num6(r.mean_error) << ',';
        out << (std::isnan(r.se_error) ? std::string("NA") : num6(r.se_error)) << ','
            << (std::isnan(r.mean_fp) ? std::string("NA") : num6(r.mean_fp)) << ','
            << (std::isnan(r.mean_fn) ? std::string("NA") : num6(r.mean_fn)) << ',' << r.failures
            << "\n";
    }
    if (!out) throw Error(ErrorCode::Io, "failed while writing summary csv: " + path);
}

std::string summary_table(const ExperimentSetup& setup, const std::vector<MethodResult>& results) {
    const SimSpec spec = setup.spec.resolved();
    std::ostringstream out;
    out << "example " << example_name(spec.example) << "  d=" << spec.d;
    if (spec.example == ExampleId::Ex2) out << "  s=" << num6(spec.s);
    out << "  R=" << (results.empty() ? 0 : static_cast<int>(results.front().reps.size())) << "\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s %10s %10s %8s %8s %9s\n", "method", "mean_err",
                  "se_err", "FP", "FN", "failures");
    out << line;
    for (const MethodResult& r : results) {
        const auto cell = [](double v) { return std::isnan(v) ? std::string("NA") : num6(v); };
        std::snprintf(line, sizeof(line), "%-18s %10s %10s %8s %8s %9d\n",
                      method_name(r.method).c_str(), cell(r.mean_error).c_str(),
                      cell(r.se_error).c_str(), cell(r.mean_fp).c_str(), cell(r.mean_fn).c_str(),
                      r.failures);
        out << line;
    }
    return out.str();
}

}  // namespace s3lda
