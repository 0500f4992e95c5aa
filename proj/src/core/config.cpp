#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace s3lda {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Entry {
    std::string value;
    int line = 0;
};

struct RawConfig {
    std::string path;
    // section -> key -> entry
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, Entry>>>> sections;

    const std::vector<std::pair<std::string, Entry>>* find(const std::string& section) const {
        for (const auto& [name, entries] : sections)
            if (name == section) return &entries;
        return nullptr;
    }
};

[[noreturn]] void fail(const RawConfig& raw, int line, const std::string& msg) {
    throw Error(ErrorCode::Parse, raw.path + ":" + std::to_string(line) + ": " + msg);
}

RawConfig parse_raw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config file: " + path);
    RawConfig raw;
    raw.path = path;
    std::string line;
    int line_no = 0;
    int current = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(raw, line_no, "malformed section header");
            const std::string name = trim(t.substr(1, t.size() - 2));
            if (name.empty()) fail(raw, line_no, "empty section name");
            for (const auto& [existing, _] : raw.sections)
                if (existing == name) fail(raw, line_no, "duplicate section [" + name + "]");
            raw.sections.emplace_back(name, std::vector<std::pair<std::string, Entry>>{});
            current = static_cast<int>(raw.sections.size()) - 1;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(raw, line_no, "expected 'key = value'");
        if (current < 0) fail(raw, line_no, "key outside of any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail(raw, line_no, "empty key");
        auto& entries = raw.sections[static_cast<size_t>(current)].second;
        for (const auto& [existing, _] : entries)
            if (existing == key) fail(raw, line_no, "duplicate key '" + key + "'");
        entries.emplace_back(key, Entry{value, line_no});
    }
    return raw;
}

class SectionReader {
public:
    SectionReader(const RawConfig& raw, const std::string& name) : raw_(raw), name_(name) {
        entries_ = raw.find(name);
        if (entries_) used_.assign(entries_->size(), false);
    }

    bool present() const { return entries_ != nullptr; }

    const Entry* get(const std::string& key) {
        if (!entries_) return nullptr;
        for (size_t i = 0; i < entries_->size(); ++i) {
            if ((*entries_)[i].first == key) {
                used_[i] = true;
                return &(*entries_)[i].second;
            }
        }
        return nullptr;
    }

    double number(const std::string& key, double fallback) {
        const Entry* e = get(key);
        if (!e) return fallback;
        try {
            size_t pos = 0;
            const double v = std::stod(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument(e->value);
            return v;
        } catch (const std::exception&) {
            fail(raw_, e->line, "bad number for '" + key + "': '" + e->value + "'");
        }
    }

    int integer(const std::string& key, int fallback) {
        const Entry* e = get(key);
        if (!e) return fallback;
        try {
            size_t pos = 0;
            const long v = std::stol(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument(e->value);
            return static_cast<int>(v);
        } catch (const std::exception&) {
            fail(raw_, e->line, "bad integer for '" + key + "': '" + e->value + "'");
        }
    }

    bool boolean(const std::string& key, bool fallback) {
        const Entry* e = get(key);
        if (!e) return fallback;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        fail(raw_, e->line, "bad boolean for '" + key + "': expected true or false");
    }

    std::vector<double> number_list(const std::string& key, std::vector<double> fallback) {
        const Entry* e = get(key);
        if (!e) return fallback;
        std::vector<double> out;
        std::stringstream ss(e->value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) fail(raw_, e->line, "empty entry in list '" + key + "'");
            try {
                size_t pos = 0;
                out.push_back(std::stod(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                fail(raw_, e->line, "bad number '" + tok + "' in list '" + key + "'");
            }
        }
        if (out.empty()) fail(raw_, e->line, "list '" + key + "' is empty");
        return out;
    }

    void finish() {
        if (!entries_) return;
        for (size_t i = 0; i < entries_->size(); ++i)
            if (!used_[i])
                fail(raw_, (*entries_)[i].second.line,
                     "unknown key '" + (*entries_)[i].first + "' in section [" + name_ + "]");
    }

    const RawConfig& raw() const { return raw_; }

private:
    const RawConfig& raw_;
    std::string name_;
    const std::vector<std::pair<std::string, Entry>>* entries_ = nullptr;
    std::vector<bool> used_;
};

Labeling parse_labeling(const RawConfig& raw, const Entry& e) {
    const auto colon = e.value.find(':');
    if (colon == std::string::npos)
        fail(raw, e.line, "labeling must be 'random_count:<k>' or 'per_class:<k>'");
    const std::string rule = trim(e.value.substr(0, colon));
    const std::string count = trim(e.value.substr(colon + 1));
    Labeling lab;
    if (rule == "random_count")
        lab.rule = Labeling::Rule::RandomCount;
    else if (rule == "per_class")
        lab.rule = Labeling::Rule::PerClass;
    else
        fail(raw, e.line, "unknown labeling rule '" + rule + "'");
    try {
        size_t pos = 0;
        lab.keep = std::stoi(count, &pos);
        if (pos != count.size()) throw std::invalid_argument(count);
    } catch (const std::exception&) {
        fail(raw, e.line, "bad labeling count '" + count + "'");
    }
    return lab;
}

}  // namespace

ExperimentConfig read_config(const std::string& path) {
    const RawConfig raw = parse_raw(path);
    for (const auto& [name, _] : raw.sections) {
        if (name != "simulation" && name != "grid" && name != "solver" && name != "experiment" &&
            name != "theory")
            throw Error(ErrorCode::Parse, path + ": unknown section [" + name + "]");
    }

    ExperimentConfig cfg;

    SectionReader sim(raw, "simulation");
    if (sim.present()) {
        cfg.has_simulation = true;
        if (const Entry* e = sim.get("example")) cfg.spec.example = parse_example(e->value);
        if (const Entry* e = sim.get("seed")) {
            try {
                size_t pos = 0;
                cfg.spec.seed = std::stoull(e->value, &pos);
                if (pos != e->value.size()) throw std::invalid_argument(e->value);
                cfg.seed_set = true;
            } catch (const std::exception&) {
                throw Error(ErrorCode::Parse,
                            path + ":" + std::to_string(e->line) + ": bad seed '" + e->value + "'");
            }
        }
        cfg.spec.d = sim.integer("d", 0);
        cfg.spec.s = sim.number("s", std::numeric_limits<double>::quiet_NaN());
        cfg.spec.n_train = sim.integer("n_train", 0);
        cfg.spec.n_tune = sim.integer("n_tune", 0);
        cfg.spec.n_test = sim.integer("n_test", 0);
        if (const Entry* e = sim.get("labeling")) cfg.spec.labeling = parse_labeling(raw, *e);
        sim.finish();
    }

    SectionReader grid(raw, "grid");
    cfg.grid.c1_values = grid.number_list("c1", cfg.grid.c1_values);
    cfg.grid.c2_values = grid.number_list("c2", cfg.grid.c2_values);
    cfg.grid.c = grid.number("c", cfg.grid.c);
    grid.finish();

    SectionReader solver(raw, "solver");
    cfg.solver.eps_outer = solver.number("eps_outer", cfg.solver.eps_outer);
    cfg.solver.eps_inner = solver.number("eps_inner", cfg.solver.eps_inner);
    cfg.solver.max_outer = solver.integer("max_outer", cfg.solver.max_outer);
    cfg.solver.max_inner = solver.integer("max_inner", cfg.solver.max_inner);
    cfg.solver.smoothing.mu_s = solver.number("mu", cfg.solver.smoothing.mu_s);
    cfg.solver.mu_floor = solver.number("mu_floor", cfg.solver.mu_floor);
    cfg.solver.c = cfg.grid.c;
    solver.finish();

    SectionReader exp(raw, "experiment");
    if (const Entry* e = exp.get("methods")) {
        std::vector<MethodId> methods;
        std::stringstream ss(e->value);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            methods.push_back(parse_method(tok));
        }
        if (methods.empty())
            throw Error(ErrorCode::Parse, path + ":" + std::to_string(e->line) + ": empty method list");
        cfg.methods = std::move(methods);
    }
    cfg.replications = exp.integer("replications", 0);
    if (const Entry* e = exp.get("output_dir")) cfg.output_dir = e->value;
    if (const Entry* e = exp.get("threads")) {
        if (e->value == "auto") {
            cfg.threads = 0;
        } else {
            try {
                size_t pos = 0;
                cfg.threads = std::stoi(e->value, &pos);
                if (pos != e->value.size() || cfg.threads < 1) throw std::invalid_argument(e->value);
            } catch (const std::exception&) {
                throw Error(ErrorCode::Parse, path + ":" + std::to_string(e->line) +
                                                  ": threads must be 'auto' or a positive integer");
            }
        }
    }
    cfg.labeled_only_tuning = exp.boolean("labeled_only_tuning", false);
    cfg.baseline_lambda_grid = exp.number_list("baseline_lambda", cfg.baseline_lambda_grid);
    cfg.standardize = exp.boolean("standardize", false);
    cfg.record_timing = exp.boolean("record_timing", false);
    exp.finish();

    SectionReader theory(raw, "theory");
    cfg.theory_mc_n = theory.integer("mc_n", cfg.theory_mc_n);
    theory.finish();

    return cfg;
}

void ExperimentConfig::require_seed(const std::string& operation) const {
    if (!seed_set)
        throw Error(ErrorCode::Invalid,
                    operation + " requires an explicit seed ([simulation] seed or --seed)");
}

void ExperimentConfig::require_simulation(const std::string& operation) const {
    if (!has_simulation)
        throw Error(ErrorCode::Invalid, operation + " requires a [simulation] section");
}

ExperimentSetup ExperimentConfig::to_setup() const {
    ExperimentSetup setup;
    setup.spec = spec;
    setup.grid = grid;
    setup.solver = solver;
    setup.baseline_lambda_grid = baseline_lambda_grid;
    setup.labeled_only_tuning = labeled_only_tuning;
    setup.standardize = standardize;
    setup.threads = threads;
    setup.record_timing = record_timing;
    return setup;
}

}  // namespace s3lda
