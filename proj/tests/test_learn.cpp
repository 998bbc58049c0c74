#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "interstitial/learn.hpp"

using namespace interstitial;
using namespace interstitial::learn;

namespace {

LabeledExample example(std::vector<double> v, Label label, std::string source = "", std::string hash = "h") {
    return {{std::move(hash), std::move(v)}, label, std::move(source)};
}

std::vector<LabeledExample> toy_set() {
    std::vector<LabeledExample> out;
    for (int i = 0; i < 10; ++i) {
        out.push_back(example({0, 1}, Label::no));
        out.push_back(example({1, 0}, Label::yes));
    }
    return out;
}

std::vector<Label> repeat(Label l, std::size_t n) { return std::vector<Label>(n, l); }

std::vector<Label> concat(std::vector<Label> a, const std::vector<Label>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// Dense reference: full sort of neighbours, explicit matrices, plain iteration.
std::vector<Label> spread_oracle(const std::vector<std::vector<double>>& x, const std::vector<Label>& y0, int k,
                                 double alpha, int iters) {
    const std::size_t n = x.size();
    auto cosine = [&](std::size_t i, std::size_t j) {
        double ab = 0, aa = 0, bb = 0;
        for (std::size_t d = 0; d < x[i].size(); ++d) {
            ab += x[i][d] * x[j][d];
            aa += x[i][d] * x[i][d];
            bb += x[j][d] * x[j][d];
        }
        return aa > 0 && bb > 0 ? std::max(0.0, ab / std::sqrt(aa * bb)) : 0.0;
    };
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> cand;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) cand.push_back({-cosine(i, j), j});
        std::sort(cand.begin(), cand.end());
        for (int m = 0; m < k; ++m) {
            const auto j = cand[static_cast<std::size_t>(m)].second;
            w[i][j] = w[j][i] = cosine(i, j);
        }
    }
    std::vector<double> deg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) deg[i] = std::accumulate(w[i].begin(), w[i].end(), 0.0);
    std::vector<std::array<double, 2>> y(n, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        if (y0[i] == Label::no) y[i][0] = 1;
        if (y0[i] == Label::yes) y[i][1] = 1;
    }
    auto f = y;
    for (int it = 0; it < iters; ++it) {
        auto next = y;
        for (std::size_t i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                double s = 0;
                for (std::size_t j = 0; j < n; ++j)
                    if (w[i][j] > 0) s += w[i][j] / std::sqrt(deg[i] * deg[j]) * f[j][static_cast<std::size_t>(c)];
                next[i][static_cast<std::size_t>(c)] = alpha * s + (1 - alpha) * y[i][static_cast<std::size_t>(c)];
            }
        }
        f = next;
    }
    std::vector<Label> out;
    for (const auto& r : f) out.push_back(r[0] == 0 && r[1] == 0 ? Label::unlabeled : (r[1] > r[0] ? Label::yes : Label::no));
    return out;
}

}  // namespace

TEST_CASE("split") {
    std::vector<LabeledExample> ex;
    for (int i = 0; i < 10; ++i) ex.push_back(example({double(i)}, i % 2 ? Label::yes : Label::no, std::to_string(i)));
    ex.push_back(example({99}, Label::unlabeled, "u"));

    const auto a = split(ex, 0.3, 5);
    CHECK(a.test.size() == 3);
    CHECK(a.train.size() == 7);
    const auto b = split(ex, 0.3, 5);
    auto sources = [](const std::vector<LabeledExample>& v) {
        std::vector<std::string> s;
        for (const auto& e : v) s.push_back(e.source);
        return s;
    };
    CHECK(sources(a.test) == sources(b.test));
    CHECK(sources(a.train) == sources(b.train));
    for (const auto& e : a.test) CHECK(e.label != Label::unlabeled);
    for (const auto& e : a.train) CHECK(e.label != Label::unlabeled);

    std::vector<LabeledExample> many;
    for (int i = 0; i < 106; ++i) many.push_back(example({double(i)}, Label::yes));
    CHECK(split(many, 0.5, 1).test.size() == 53);

    CHECK_THROWS_AS(split({example({1}, Label::unlabeled)}, 0.3, 1), std::invalid_argument);
    CHECK_THROWS_AS(split(ex, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(split(ex, 1.0, 1), std::invalid_argument);
}

TEST_CASE("train_linear_svm on the separable toy set") {
    const auto data = toy_set();
    const auto m = train_linear_svm(data);
    for (const auto& e : data) CHECK(predict(m, e.vector) == e.label);
    CHECK(mean_hinge_loss(m, data) == 0.0);
    CHECK(m.vocab_hash == "h");

    SUBCASE("same seed gives identical weights") {
        CHECK(train_linear_svm(data) == m);
        SvmParams p;
        p.seed = 9;
        CHECK(train_linear_svm(data, p) == train_linear_svm(data, p));
    }
    SUBCASE("invalid training sets") {
        std::vector<LabeledExample> only_yes = {example({1, 0}, Label::yes), example({0, 1}, Label::yes)};
        CHECK_THROWS_AS(train_linear_svm(only_yes), std::invalid_argument);
        auto mixed = data;
        mixed.push_back(example({1, 0, 0}, Label::yes));
        CHECK_THROWS_AS(train_linear_svm(mixed), std::invalid_argument);
        auto other_vocab = data;
        other_vocab.push_back(example({1, 0}, Label::yes, "", "other"));
        CHECK_THROWS_AS(train_linear_svm(other_vocab), std::invalid_argument);
        auto unlabeled = data;
        unlabeled.push_back(example({1, 0}, Label::unlabeled));
        CHECK_THROWS_AS(train_linear_svm(unlabeled), std::invalid_argument);
        CHECK_THROWS_AS(train_linear_svm({}), std::invalid_argument);
    }
}

TEST_CASE("train_linear_svm separates random separable data") {
    std::mt19937 gen(31);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<LabeledExample> data;
    for (int i = 0; i < 60; ++i) {
        const bool yes = i % 2 == 0;
        data.push_back(example({(yes ? 1.0 : -1.0) + noise(gen), noise(gen), noise(gen)}, yes ? Label::yes : Label::no));
    }
    const auto m = train_linear_svm(data);
    for (const auto& e : data) CHECK(predict(m, e.vector) == e.label);
}

TEST_CASE("predict") {
    SvmModel m;
    m.weights = {1, 0};
    m.vocab_hash = "h";
    CHECK(predict(m, std::vector<double>{1, 0}) == Label::yes);
    CHECK(predict(m, std::vector<double>{-1, 0}) == Label::no);
    CHECK(predict(m, std::vector<double>{0, 5}) == Label::yes);
    m.bias = -0.5;
    CHECK(predict(m, std::vector<double>{0.5, 0}) == Label::yes);
    CHECK_THROWS_AS(predict(m, std::vector<double>{1}), std::invalid_argument);
    CHECK_THROWS_AS(predict(m, features::FeatureVector{"other", {1, 0}}), std::invalid_argument);
}

TEST_CASE("an always-zero feature does not change predictions") {
    std::mt19937 gen(2);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<LabeledExample> narrow, wide;
    for (int i = 0; i < 40; ++i) {
        const double a = g(gen), b = g(gen);
        const Label l = a + 0.3 * b > 0 ? Label::yes : Label::no;
        narrow.push_back(example({a, b}, l));
        wide.push_back(example({a, 0.0, b}, l));
    }
    const auto mn = train_linear_svm(narrow);
    const auto mw = train_linear_svm(wide);
    CHECK(mw.weights[1] == 0.0);
    for (int i = 0; i < 40; ++i) CHECK(predict(mn, narrow[i].vector) == predict(mw, wide[i].vector));
}

TEST_CASE("label_spread") {
    std::mt19937 gen(17);
    std::normal_distribution<double> jitter(0.0, 0.05);
    std::vector<std::vector<double>> x;
    std::vector<Label> partial;
    for (int i = 0; i < 10; ++i) {
        x.push_back({1.0 + jitter(gen), std::abs(jitter(gen)), std::abs(jitter(gen))});
        partial.push_back(i == 0 ? Label::yes : Label::unlabeled);
    }
    for (int i = 0; i < 10; ++i) {
        x.push_back({std::abs(jitter(gen)), std::abs(jitter(gen)), 1.0 + jitter(gen)});
        partial.push_back(i == 0 ? Label::no : Label::unlabeled);
    }
    const SpreadParams params{5, 0.9, 50};

    SUBCASE("clusters take their seed's label") {
        const auto out = label_spread(x, partial, params);
        for (int i = 0; i < 10; ++i) CHECK(out[static_cast<std::size_t>(i)] == Label::yes);
        for (int i = 10; i < 20; ++i) CHECK(out[static_cast<std::size_t>(i)] == Label::no);
        CHECK(out == spread_oracle(x, partial, params.k, params.alpha, params.iterations));
    }
    SUBCASE("small alpha keeps seeds") {
        const auto out = label_spread(x, partial, {5, 1e-6, 50});
        CHECK(out[0] == Label::yes);
        CHECK(out[10] == Label::no);
    }
    SUBCASE("permuting the inputs permutes the output") {
        const auto base = label_spread(x, partial, params);
        std::vector<std::size_t> perm(x.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (int r = 0; r < 5; ++r) {
            std::shuffle(perm.begin(), perm.end(), gen);
            std::vector<std::vector<double>> px;
            std::vector<Label> pl;
            for (auto p : perm) {
                px.push_back(x[p]);
                pl.push_back(partial[p]);
            }
            const auto out = label_spread(px, pl, params);
            for (std::size_t i = 0; i < perm.size(); ++i) CHECK(out[i] == base[perm[i]]);
        }
    }
    SUBCASE("matches the dense reference on random graphs") {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int r = 0; r < 20; ++r) {
            std::vector<std::vector<double>> rx(15, std::vector<double>(4));
            for (auto& v : rx)
                for (auto& c : v) c = u(gen);
            std::vector<Label> rl(15, Label::unlabeled);
            rl[0] = Label::yes;
            rl[1] = Label::no;
            rl[2] = Label::no;
            const int k = 1 + r % 5;
            CHECK(label_spread(rx, rl, {k, 0.5, 20}) == spread_oracle(rx, rl, k, 0.5, 20));
        }
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(label_spread(x, partial, {0, 0.2, 10}), std::invalid_argument);
        CHECK_THROWS_AS(label_spread(x, partial, {20, 0.2, 10}), std::invalid_argument);
        CHECK_THROWS_AS(label_spread(x, partial, {5, 1.0, 10}), std::invalid_argument);
        CHECK_THROWS_AS(label_spread(x, std::vector<Label>(20, Label::unlabeled), params), std::invalid_argument);
        CHECK_THROWS_AS(label_spread(x, std::vector<Label>(3, Label::yes), params), std::invalid_argument);
    }
}

TEST_CASE("evaluate reproduces the all-no reference report") {
    const auto truth = concat(repeat(Label::no, 21), repeat(Label::yes, 32));
    const auto r = evaluate(repeat(Label::no, 53), truth);
    CHECK(round2(r.no.precision) == 0.40);
    CHECK(round2(r.no.recall) == 1.00);
    CHECK(round2(r.no.f1) == 0.57);
    CHECK(r.no.support == 21);
    CHECK(r.yes.precision == 0.0);
    CHECK(r.yes.recall == 0.0);
    CHECK(r.yes.f1 == 0.0);
    CHECK(r.yes.support == 32);
    CHECK(round2(r.weighted.precision) == 0.16);
    CHECK(round2(r.weighted.recall) == 0.40);
    CHECK(round2(r.weighted.f1) == 0.22);
    CHECK(r.weighted.support == 53);

    const auto table = format_report(r);
    CHECK(table.find("avg / total        0.16      0.40      0.22        53") != std::string::npos);
    CHECK(table.find("no        0.40      1.00      0.57        21") != std::string::npos);
}

TEST_CASE("evaluate edge cases") {
    const auto perfect = evaluate({Label::yes, Label::no, Label::no}, {Label::yes, Label::no, Label::no});
    for (const auto& row : {perfect.no, perfect.yes, perfect.weighted}) {
        CHECK(row.precision == 1.0);
        CHECK(row.recall == 1.0);
        CHECK(row.f1 == 1.0);
    }
    const auto swapped = evaluate({Label::yes, Label::no}, {Label::no, Label::yes});
    for (const auto& row : {swapped.no, swapped.yes, swapped.weighted}) {
        CHECK(row.precision == 0.0);
        CHECK(row.recall == 0.0);
    }
    CHECK_THROWS_AS(evaluate({Label::yes}, {Label::yes, Label::no}), std::invalid_argument);
    CHECK_THROWS_AS(evaluate({Label::unlabeled}, {Label::yes}), std::invalid_argument);
}
