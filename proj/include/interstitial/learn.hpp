#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "interstitial/features.hpp"
#include "interstitial/label.hpp"

namespace interstitial::learn {

struct LabeledExample {
    features::FeatureVector vector;
    Label label = Label::unlabeled;
    std::string source;
};

struct SvmParams {
    double C = 1.0;
    int epochs = 200;
    std::uint64_t seed = 0;
    friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    SvmParams params;
    std::string vocab_hash;

    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct Split {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
};

/// Drops unlabeled examples, shuffles with `seed`, and takes the first
/// ceil(n * test_ratio) as the test set.
Split split(const std::vector<LabeledExample>& examples, double test_ratio, std::uint64_t seed);

/// Soft-margin linear SVM, (1/2)|w|^2 + C * sum hinge(y (w.x + b)), trained by
/// per-example subgradient steps over `epochs` seed-ordered passes.
/// yes -> +1, no -> -1; the bias is not regularized.
SvmModel train_linear_svm(const std::vector<LabeledExample>& train, const SvmParams& params = {});

double decision_value(const SvmModel& model, const std::vector<double>& x);

/// yes when w.x + b >= 0.
Label predict(const SvmModel& model, const features::FeatureVector& x);
Label predict(const SvmModel& model, const std::vector<double>& x);

/// Mean hinge loss over the examples.
double mean_hinge_loss(const SvmModel& model, const std::vector<LabeledExample>& examples);

struct SpreadParams {
    int k = 7;
    double alpha = 0.2;
    int iterations = 30;
};

/// Label spreading over a symmetric k-NN cosine-similarity graph with
/// normalized affinity S = D^-1/2 W D^-1/2, iterating F <- alpha S F + (1 - alpha) Y.
/// Rows whose propagated mass stays zero come back unlabeled.
std::vector<Label> label_spread(const std::vector<std::vector<double>>& vectors,
                                const std::vector<Label>& partial,
                                const SpreadParams& params = {});

struct ReportRow {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvaluationReport {
    ReportRow no;
    ReportRow yes;
    ReportRow weighted;  // support-weighted mean of the class rows
};

EvaluationReport evaluate(const std::vector<Label>& predicted, const std::vector<Label>& truth);

/// Fixed-width table: header, a row per class, and "avg / total".
std::string format_report(const EvaluationReport& report);

}  // namespace interstitial::learn
