#include "model_core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace s3lda {

int Dataset::count_positive() const {
    int c = 0;
    for (int v : y)
        if (v > 0) ++c;
    return c;
}

int Dataset::count_negative() const {
    int c = 0;
    for (int v : y)
        if (v < 0) ++c;
    return c;
}

void Dataset::validate() const {
    if (d <= 0) throw Error(ErrorCode::Invalid, "dataset dimension must be positive");
    if (x_labeled.rows() != static_cast<Eigen::Index>(y.size()))
        throw Error(ErrorCode::Invalid, "labeled covariates and labels disagree in length");
    if (x_labeled.rows() > 0 && x_labeled.cols() != d)
        throw Error(ErrorCode::Invalid, "labeled covariates have wrong dimension");
    if (x_unlabeled.rows() > 0 && x_unlabeled.cols() != d)
        throw Error(ErrorCode::Invalid, "unlabeled covariates have wrong dimension");
    for (int v : y)
        if (v != 1 && v != -1) throw Error(ErrorCode::Invalid, "labels must be +1 or -1");
}

Dataset make_dataset(Eigen::MatrixXd x_labeled, std::vector<int> y, Eigen::MatrixXd x_unlabeled) {
    Dataset ds;
    ds.d = static_cast<int>(x_labeled.rows() > 0 ? x_labeled.cols() : x_unlabeled.cols());
    ds.x_labeled = std::move(x_labeled);
    ds.y = std::move(y);
    ds.x_unlabeled = std::move(x_unlabeled);
    if (ds.x_labeled.rows() == 0) ds.x_labeled.resize(0, ds.d);
    if (ds.x_unlabeled.rows() == 0) ds.x_unlabeled.resize(0, ds.d);
    ds.validate();
    return ds;
}

double LinearModel::decision_value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != omega.size())
        throw Error(ErrorCode::Invalid, "decision_value: dimension mismatch");
    return omega.dot(x) + b;
}

int LinearModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return decision_value(x) >= 0.0 ? 1 : -1;
}

int LinearModel::nnz(double tol) const {
    int c = 0;
    for (Eigen::Index j = 0; j < omega.size(); ++j)
        if (std::abs(omega[j]) > tol) ++c;
    return c;
}

Standardizer standardize_fit(const Dataset& data) {
    data.validate();
    const int n = data.n_total();
    if (n < 2) throw Error(ErrorCode::Invalid, "standardize_fit requires at least 2 observations");
    const int d = data.d;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    if (data.n_labeled() > 0) sum += data.x_labeled.colwise().sum().transpose();
    if (data.n_unlabeled() > 0) sum += data.x_unlabeled.colwise().sum().transpose();
    const Eigen::VectorXd means = sum / static_cast<double>(n);

    Eigen::VectorXd ss = Eigen::VectorXd::Zero(d);
    if (data.n_labeled() > 0)
        ss += (data.x_labeled.rowwise() - means.transpose()).array().square().colwise().sum().matrix().transpose();
    if (data.n_unlabeled() > 0)
        ss += (data.x_unlabeled.rowwise() - means.transpose()).array().square().colwise().sum().matrix().transpose();

    Standardizer s;
    s.means = means;
    s.scales.resize(d);
    for (int j = 0; j < d; ++j) {
        const double var = ss[j] / static_cast<double>(n - 1);
        if (!(var > 0.0))
            throw Error(ErrorCode::Invalid,
                        "degenerate feature: coordinate " + std::to_string(j) + " has zero variance");
        s.scales[j] = std::sqrt(var);
    }
    return s;
}

Dataset standardize_apply(const Standardizer& s, const Dataset& data) {
    if (s.dim() != data.d) throw Error(ErrorCode::Invalid, "standardize_apply: dimension mismatch");
    Dataset out = data;
    const auto m = s.means.transpose();
    const auto inv = s.scales.cwiseInverse().transpose();
    if (out.x_labeled.rows() > 0)
        out.x_labeled = ((out.x_labeled.rowwise() - m).array().rowwise() * inv.array()).matrix();
    if (out.x_unlabeled.rows() > 0)
        out.x_unlabeled = ((out.x_unlabeled.rowwise() - m).array().rowwise() * inv.array()).matrix();
    return out;
}

Dataset standardize_unapply(const Standardizer& s, const Dataset& data) {
    if (s.dim() != data.d) throw Error(ErrorCode::Invalid, "standardize_unapply: dimension mismatch");
    Dataset out = data;
    const auto m = s.means.transpose();
    const auto sc = s.scales.transpose();
    if (out.x_labeled.rows() > 0)
        out.x_labeled = ((out.x_labeled.array().rowwise() * sc.array()).rowwise() + m.array()).matrix();
    if (out.x_unlabeled.rows() > 0)
        out.x_unlabeled = ((out.x_unlabeled.array().rowwise() * sc.array()).rowwise() + m.array()).matrix();
    return out;
}

LinearModel fold_standardizer(const Standardizer& s, const LinearModel& m) {
    if (s.dim() != m.dim()) throw Error(ErrorCode::Invalid, "fold_standardizer: dimension mismatch");
    LinearModel out;
    out.omega = m.omega.cwiseQuotient(s.scales);
    out.b = m.b - out.omega.dot(s.means);
    return out;
}

Eigen::VectorXd encode_targets(const Dataset& data) {
    data.validate();
    const int n_pos = data.count_positive();
    const int n_neg = data.count_negative();
    if (n_pos == 0 || n_neg == 0)
        throw Error(ErrorCode::Invalid, "encode_targets: a class has no labeled members");
    const double n_l = static_cast<double>(data.n_labeled());
    Eigen::VectorXd out(data.n_labeled());
    for (int i = 0; i < data.n_labeled(); ++i)
        out[i] = data.y[i] > 0 ? n_l / n_pos : -n_l / n_neg;
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double parse_double_token(const std::string& tok, const std::string& path, int line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::Parse,
                    path + ":" + std::to_string(line_no) + ": bad numeric token '" + tok + "'");
    }
}

}  // namespace

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open dataset file: " + path);

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw Error(ErrorCode::Parse, path + ":1: missing header line");
    ++line_no;
    if (line.rfind("d=", 0) != 0)
        throw Error(ErrorCode::Parse, path + ":1: header must be 'd=<int>'");
    int d = 0;
    try {
        d = std::stoi(line.substr(2));
    } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, path + ":1: bad dimension in header");
    }
    if (d <= 0) throw Error(ErrorCode::Parse, path + ":1: dimension must be positive");

    std::vector<std::vector<double>> lab_rows, unlab_rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;  // blank line
        int label = 0;
        bool labeled = true;
        if (tok == "?") {
            labeled = false;
        } else if (tok == "+1" || tok == "1") {
            label = 1;
        } else if (tok == "-1") {
            label = -1;
        } else {
            throw Error(ErrorCode::Parse,
                        path + ":" + std::to_string(line_no) + ": bad label token '" + tok + "'");
        }
        std::vector<double> row;
        row.reserve(d);
        while (ss >> tok) row.push_back(parse_double_token(tok, path, line_no));
        if (static_cast<int>(row.size()) != d)
            throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(d) + " values, got " +
                                              std::to_string(row.size()));
        if (labeled) {
            lab_rows.push_back(std::move(row));
            labels.push_back(label);
        } else {
            unlab_rows.push_back(std::move(row));
        }
    }

    Dataset ds;
    ds.d = d;
    ds.x_labeled.resize(static_cast<Eigen::Index>(lab_rows.size()), d);
    for (size_t i = 0; i < lab_rows.size(); ++i)
        for (int j = 0; j < d; ++j) ds.x_labeled(static_cast<Eigen::Index>(i), j) = lab_rows[i][j];
    ds.x_unlabeled.resize(static_cast<Eigen::Index>(unlab_rows.size()), d);
    for (size_t i = 0; i < unlab_rows.size(); ++i)
        for (int j = 0; j < d; ++j) ds.x_unlabeled(static_cast<Eigen::Index>(i), j) = unlab_rows[i][j];
    ds.y = std::move(labels);
    ds.validate();
    return ds;
}

void write_dataset(const Dataset& data, const std::string& path) {
    data.validate();
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write dataset file: " + path);
    out << "d=" << data.d << "\n";
    for (int i = 0; i < data.n_labeled(); ++i) {
        out << (data.y[i] > 0 ? "+1" : "-1");
        for (int j = 0; j < data.d; ++j) out << ' ' << format_double(data.x_labeled(i, j));
        out << "\n";
    }
    for (int i = 0; i < data.n_unlabeled(); ++i) {
        out << '?';
        for (int j = 0; j < data.d; ++j) out << ' ' << format_double(data.x_unlabeled(i, j));
        out << "\n";
    }
    if (!out) throw Error(ErrorCode::Io, "failed while writing dataset file: " + path);
}

LinearModel read_model(const std::string& path, int expected_dim) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open model file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("b=", 0) != 0)
        throw Error(ErrorCode::Parse, path + ":1: first line must be 'b=<float>'");
    LinearModel m;
    m.b = parse_double_token(line.substr(2), path, 1);

    std::vector<std::pair<int, double>> coefs;
    int max_index = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.rfind("omega[", 0) != 0)
            throw Error(ErrorCode::Parse,
                        path + ":" + std::to_string(line_no) + ": expected 'omega[<j>]=<float>'");
        const auto close = line.find(']');
        const auto eq = line.find('=', close == std::string::npos ? 0 : close);
        if (close == std::string::npos || eq == std::string::npos || eq != close + 1)
            throw Error(ErrorCode::Parse,
                        path + ":" + std::to_string(line_no) + ": expected 'omega[<j>]=<float>'");
        int j = -1;
        try {
            j = std::stoi(line.substr(6, close - 6));
        } catch (const std::exception&) {
            throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": bad index");
        }
        if (j < 0) throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) + ": bad index");
        coefs.emplace_back(j, parse_double_token(line.substr(eq + 1), path, line_no));
        max_index = std::max(max_index, j);
    }

    const int dim = expected_dim >= 0 ? expected_dim : max_index + 1;
    if (max_index >= dim)
        throw Error(ErrorCode::Parse, path + ": coefficient index " + std::to_string(max_index) +
                                          " outside dimension " + std::to_string(dim));
    m.omega = Eigen::VectorXd::Zero(dim);
    for (const auto& [j, v] : coefs) m.omega[j] = v;
    return m;
}

void write_model(const LinearModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write model file: " + path);
    out << "b=" << format_double(m.b) << "\n";
    for (int j = 0; j < m.dim(); ++j)
        if (m.omega[j] != 0.0) out << "omega[" << j << "]=" << format_double(m.omega[j]) << "\n";
    if (!out) throw Error(ErrorCode::Io, "failed while writing model file: " + path);
}

}  // namespace s3lda
