#include "interstitial/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "interstitial/rng.hpp"

namespace interstitial::learn {

namespace {

double sign_of(Label label) { return label == Label::yes ? 1.0 : -1.0; }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

ReportRow class_row(const char* name, Label cls, const std::vector<Label>& predicted, const std::vector<Label>& truth) {
    std::size_t tp = 0;
    std::size_t predicted_count = 0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        tp += predicted[i] == cls && truth[i] == cls;
        predicted_count += predicted[i] == cls;
        support += truth[i] == cls;
    }
    ReportRow row;
    row.name = name;
    row.support = support;
    row.precision = predicted_count ? static_cast<double>(tp) / static_cast<double>(predicted_count) : 0.0;
    row.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
    const double pr = row.precision + row.recall;
    row.f1 = pr > 0.0 ? 2.0 * row.precision * row.recall / pr : 0.0;
    return row;
}

}  // namespace

Split split(const std::vector<LabeledExample>& examples, double test_ratio, std::uint64_t seed) {
    if (!(test_ratio > 0.0 && test_ratio < 1.0)) throw std::invalid_argument("split: test_ratio must be in (0, 1)");
    std::vector<LabeledExample> labeled;
    for (const auto& e : examples) {
        if (e.label != Label::unlabeled) labeled.push_back(e);
    }
    if (labeled.empty()) throw std::invalid_argument("split: no labeled examples");
    Rng rng(seed);
    rng.shuffle(labeled);
    const auto n_test = std::min(labeled.size(), static_cast<std::size_t>(std::ceil(labeled.size() * test_ratio)));
    Split out;
    out.test.assign(std::make_move_iterator(labeled.begin()), std::make_move_iterator(labeled.begin() + n_test));
    out.train.assign(std::make_move_iterator(labeled.begin() + n_test), std::make_move_iterator(labeled.end()));
    return out;
}

SvmModel train_linear_svm(const std::vector<LabeledExample>& train, const SvmParams& params) {
    if (!(params.C > 0.0)) throw std::invalid_argument("train_linear_svm: C must be > 0");
    if (params.epochs < 1) throw std::invalid_argument("train_linear_svm: epochs must be >= 1");
    if (train.empty()) throw std::invalid_argument("train_linear_svm: empty training set");
    const std::size_t dim = train.front().vector.values.size();
    bool has_yes = false;
    bool has_no = false;
    for (const auto& e : train) {
        if (e.label == Label::unlabeled) throw std::invalid_argument("train_linear_svm: unlabeled example " + e.source);
        if (e.vector.values.size() != dim) throw std::invalid_argument("train_linear_svm: dimension mismatch at " + e.source);
        if (e.vector.vocab_hash != train.front().vector.vocab_hash) {
            throw std::invalid_argument("train_linear_svm: vocabulary mismatch at " + e.source);
        }
        has_yes |= e.label == Label::yes;
        has_no |= e.label == Label::no;
    }
    if (!has_yes || !has_no) throw std::invalid_argument("train_linear_svm: training set needs both classes");

    const double n = static_cast<double>(train.size());
    const double lambda = 1.0 / (params.C * n);
    // Starting the schedule one epoch in keeps the first bias steps bounded.
    const double t0 = n;

    SvmModel model;
    model.weights.assign(dim, 0.0);
    model.params = params;
    model.vocab_hash = train.front().vector.vocab_hash;

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(params.seed);
    double t = 0.0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (const auto i : order) {
            t += 1.0;
            const double eta = 1.0 / (lambda * (t + t0));
            const auto& x = train[i].vector.values;
            const double y = sign_of(train[i].label);
            const double margin = y * (dot(model.weights, x) + model.bias);
            const double shrink = 1.0 - eta * lambda;
            for (auto& w : model.weights) w *= shrink;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < dim; ++j) model.weights[j] += eta * y * x[j];
                model.bias += eta * y;
            }
        }
    }
    return model;
}

double decision_value(const SvmModel& model, const std::vector<double>& x) {
    if (x.size() != model.weights.size()) {
        throw std::invalid_argument("predict: feature vector has " + std::to_string(x.size()) + " values, model expects " +
                                    std::to_string(model.weights.size()));
    }
    return dot(model.weights, x) + model.bias;
}

Label predict(const SvmModel& model, const std::vector<double>& x) {
    return decision_value(model, x) >= 0.0 ? Label::yes : Label::no;
}

Label predict(const SvmModel& model, const features::FeatureVector& x) {
    if (!model.vocab_hash.empty() && !x.vocab_hash.empty() && model.vocab_hash != x.vocab_hash) {
        throw std::invalid_argument("predict: feature vector was built over a different vocabulary");
    }
    return predict(model, x.values);
}

double mean_hinge_loss(const SvmModel& model, const std::vector<LabeledExample>& examples) {
    if (examples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& e : examples) {
        total += std::max(0.0, 1.0 - sign_of(e.label) * decision_value(model, e.vector.values));
    }
    return total / static_cast<double>(examples.size());
}

std::vector<Label> label_spread(const std::vector<std::vector<double>>& vectors, const std::vector<Label>& partial,
                                const SpreadParams& params) {
    const std::size_t n = vectors.size();
    if (partial.size() != n) throw std::invalid_argument("label_spread: label count does not match vector count");
    if (params.k < 1) throw std::invalid_argument("label_spread: k must be >= 1");
    if (static_cast<std::size_t>(params.k) >= n) throw std::invalid_argument("label_spread: k must be < number of points");
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw std::invalid_argument("label_spread: alpha must be in (0, 1)");
    if (params.iterations < 0) throw std::invalid_argument("label_spread: iterations must be >= 0");
    if (std::find(partial.begin(), partial.end(), Label::yes) == partial.end() ||
        std::find(partial.begin(), partial.end(), Label::no) == partial.end()) {
        throw std::invalid_argument("label_spread: need at least one labeled example per class");
    }
    const std::size_t dim = vectors.front().size();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (vectors[i].size() != dim) throw std::invalid_argument("label_spread: dimension mismatch");
        norms[i] = std::sqrt(dot(vectors[i], vectors[i]));
    }

    std::vector<double> sim(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double denom = norms[i] * norms[j];
            const double c = denom > 0.0 ? dot(vectors[i], vectors[j]) / denom : 0.0;
            sim[i * n + j] = sim[j * n + i] = std::max(c, 0.0);
        }
    }

    // Symmetric k-NN: keep an edge when either endpoint lists the other.
    std::vector<double> w(n * n, 0.0);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        std::partial_sort(idx.begin(), idx.begin() + params.k, idx.end(), [&](std::size_t a, std::size_t b) {
            if (sim[i * n + a] != sim[i * n + b]) return sim[i * n + a] > sim[i * n + b];
            return a < b;
        });
        for (int m = 0; m < params.k; ++m) {
            const auto j = idx[static_cast<std::size_t>(m)];
            w[i * n + j] = w[j * n + i] = sim[i * n + j];
        }
    }

    std::vector<double> d_inv_sqrt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double deg = std::accumulate(w.begin() + static_cast<std::ptrdiff_t>(i * n),
                                           w.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), 0.0);
        d_inv_sqrt[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) w[i * n + j] *= d_inv_sqrt[i] * d_inv_sqrt[j];
    }

    // Column 0: no, column 1: yes.
    std::vector<double> y(n * 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (partial[i] == Label::no) y[2 * i] = 1.0;
        if (partial[i] == Label::yes) y[2 * i + 1] = 1.0;
    }
    std::vector<double> f = y;
    std::vector<double> next(n * 2);
    for (int it = 0; it < params.iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double a = 0.0;
            double b = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double s = w[i * n + j];
                if (s == 0.0) continue;
                a += s * f[2 * j];
                b += s * f[2 * j + 1];
            }
            next[2 * i] = params.alpha * a + (1.0 - params.alpha) * y[2 * i];
            next[2 * i + 1] = params.alpha * b + (1.0 - params.alpha) * y[2 * i + 1];
        }
        f.swap(next);
    }

    std::vector<Label> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double no = f[2 * i];
        const double yes = f[2 * i + 1];
        out[i] = (no == 0.0 && yes == 0.0) ? Label::unlabeled : (yes > no ? Label::yes : Label::no);
    }
    return out;
}

EvaluationReport evaluate(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("evaluate: prediction and truth lengths differ");
    if (truth.empty()) throw std::invalid_argument("evaluate: empty input");
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == Label::unlabeled || truth[i] == Label::unlabeled) {
            throw std::invalid_argument("evaluate: labels must be yes or no (index " + std::to_string(i) + ")");
        }
    }
    EvaluationReport report;
    report.no = class_row("no", Label::no, predicted, truth);
    report.yes = class_row("yes", Label::yes, predicted, truth);
    const double total = static_cast<double>(report.no.support + report.yes.support);
    auto weighted = [&](double ReportRow::*field) {
        return (report.no.*field * report.no.support + report.yes.*field * report.yes.support) / total;
    };
    report.weighted = {"avg / total", weighted(&ReportRow::precision), weighted(&ReportRow::recall),
                       weighted(&ReportRow::f1), report.no.support + report.yes.support};
    return report;
}

std::string format_report(const EvaluationReport& report) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof(line), "%11s %11s %9s %9s %9s\n\n", "", "precision", "recall", "f1-score", "support");
    out += line;
    auto row = [&](const ReportRow& r) {
        std::snprintf(line, sizeof(line), "%11s %11.2f %9.2f %9.2f %9zu\n", r.name.c_str(), r.precision, r.recall, r.f1,
                      r.support);
        out += line;
    };
    row(report.no);
    row(report.yes);
    out += "\n";
    row(report.weighted);
    return out;
}

}  // namespace interstitial::learn
