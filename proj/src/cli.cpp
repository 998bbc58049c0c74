#include "interstitial/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "interstitial/corpus.hpp"
#include "interstitial/features.hpp"
#include "interstitial/io.hpp"
#include "interstitial/learn.hpp"
#include "interstitial/synth.hpp"

namespace interstitial::cli {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig apply_config(const json& j, RunConfig c) {
    if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");
    auto& a = c.analysis;
    const std::map<std::string, std::function<void(const json&)>> setters = {
        {"canny_low", [&](const json& v) { a.canny.low = v.get<double>(); }},
        {"canny_high", [&](const json& v) { a.canny.high = v.get<double>(); }},
        {"canny_sigma", [&](const json& v) { a.canny.sigma = v.get<double>(); }},
        {"rho_res", [&](const json& v) { a.hough.rho_res = v.get<double>(); }},
        {"theta_res", [&](const json& v) { a.hough.theta_res = v.get<double>(); }},
        {"votes_threshold", [&](const json& v) { a.hough.votes_threshold = v.get<int>(); }},
        {"theta_tol", [&](const json& v) { a.theta_tol = a.rule.theta_tol = v.get<double>(); }},
        {"persist_low", [&](const json& v) { a.rule.persist_low = v.get<int>(); }},
        {"persist_high", [&](const json& v) { a.rule.persist_high = v.get<int>(); }},
        {"numdiffs_threshold", [&](const json& v) { a.rule.numdiffs_threshold = v.get<int>(); }},
        {"label_lo", [&](const json& v) { a.thresholds.lo = v.get<double>(); }},
        {"label_hi", [&](const json& v) { a.thresholds.hi = v.get<double>(); }},
        {"diff_tol", [&](const json& v) { a.diff_tol = v.get<double>(); }},
        {"dedupe", [&](const json& v) { a.dedupe = v.get<bool>(); }},
        {"seed", [&](const json& v) { c.seed = v.get<std::uint64_t>(); }},
        {"workers", [&](const json& v) { c.workers = v.get<int>(); }},
        {"json", [&](const json& v) { c.json = v.get<bool>(); }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw std::runtime_error("config: unknown key '" + key + "'");
        try {
            it->second(value);
        } catch (const json::exception&) {
            throw std::runtime_error("config: key '" + key + "' has the wrong type");
        }
    }
    return c;
}

json to_json(const RunConfig& c) {
    const auto& a = c.analysis;
    return {{"canny_low", a.canny.low},
            {"canny_high", a.canny.high},
            {"canny_sigma", a.canny.sigma},
            {"rho_res", a.hough.rho_res},
            {"theta_res", a.hough.theta_res},
            {"votes_threshold", a.hough.votes_threshold},
            {"theta_tol", a.theta_tol},
            {"persist_low", a.rule.persist_low},
            {"persist_high", a.rule.persist_high},
            {"numdiffs_threshold", a.rule.numdiffs_threshold},
            {"label_lo", a.thresholds.lo},
            {"label_hi", a.thresholds.hi},
            {"diff_tol", a.diff_tol},
            {"dedupe", a.dedupe},
            {"seed", c.seed},
            {"workers", c.workers},
            {"json", c.json}};
}

namespace {

// Flag values; unset ones fall back to the config file, then defaults.
struct Overrides {
    std::optional<std::string> config_path;
    std::optional<double> canny_low, canny_high, canny_sigma, rho_res, theta_res, theta_tol;
    std::optional<int> votes, persist_low, persist_high, numdiffs_threshold, workers;
    std::optional<double> label_lo, label_hi, diff_tol;
    std::optional<std::uint64_t> seed;
    bool dedupe = false;
    bool json = false;

    RunConfig resolve() const {
        RunConfig c;
        if (config_path) c = apply_config(io::read_json_file(*config_path), c);
        auto& a = c.analysis;
        if (canny_low) a.canny.low = *canny_low;
        if (canny_high) a.canny.high = *canny_high;
        if (canny_sigma) a.canny.sigma = *canny_sigma;
        if (rho_res) a.hough.rho_res = *rho_res;
        if (theta_res) a.hough.theta_res = *theta_res;
        if (votes) a.hough.votes_threshold = *votes;
        if (theta_tol) a.theta_tol = a.rule.theta_tol = *theta_tol;
        if (persist_low) a.rule.persist_low = *persist_low;
        if (persist_high) a.rule.persist_high = *persist_high;
        if (numdiffs_threshold) a.rule.numdiffs_threshold = *numdiffs_threshold;
        if (label_lo) a.thresholds.lo = *label_lo;
        if (label_hi) a.thresholds.hi = *label_hi;
        if (diff_tol) a.diff_tol = *diff_tol;
        if (dedupe) a.dedupe = true;
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (json) c.json = true;
        if (c.workers < 1) throw std::runtime_error("--workers must be >= 1");
        if (a.diff_tol < 0.0) throw std::runtime_error("--diff-tol must be >= 0");
        // Rejects lo > hi up front rather than per bundle.
        heuristics::label_from_score(0.0, a.thresholds);
        return c;
    }
};

json analysis_json(const heuristics::BundleAnalysis& analysis, const fs::path& dir, const std::string& url) {
    json j = io::to_json(analysis);
    j["bundle"] = dir.string();
    j["url"] = url;
    return j;
}

int exit_for(Label label) {
    switch (label) {
        case Label::yes: return kExitYes;
        case Label::no: return kExitNo;
        case Label::unlabeled: return kExitUnlabeled;
    }
    return kExitError;
}

int cmd_analyze(const fs::path& dir, const RunConfig& config, std::ostream& out) {
    const auto bundle = corpus::read_bundle(dir);
    const auto analysis = heuristics::analyze_bundle(bundle, config.analysis);
    out << analysis_json(analysis, dir, bundle.url).dump(2) << '\n';
    return exit_for(analysis.label);
}

int cmd_scan(const fs::path& manifest_path, const std::optional<fs::path>& out_path, const RunConfig& config,
             std::ostream& out, std::ostream& err) {
    auto entries = corpus::read_manifest(manifest_path, config.analysis.thresholds);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            auto& e = entries[i];
            e.cv_score.reset();
            e.cv_label.reset();
            e.error.reset();
            try {
                const auto bundle = corpus::read_bundle(corpus::resolve_bundle_path(e, manifest_path));
                const auto analysis = heuristics::analyze_bundle(bundle, config.analysis);
                e.cv_score = analysis.confidence;
                e.cv_label = analysis.label;
                if (e.url.empty()) e.url = bundle.url;
            } catch (const std::exception& ex) {
                e.error = ex.what();
                std::lock_guard lock(log_mutex);
                err << "scan: " << e.bundle_path << ": " << ex.what() << '\n';
            }
        }
    };
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.workers), std::max<std::size_t>(entries.size(), 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    corpus::write_manifest(entries, out_path.value_or(manifest_path));

    std::size_t yes = 0, no = 0, unlabeled = 0, errors = 0;
    for (const auto& e : entries) {
        if (e.error) ++errors;
        else if (e.cv_label == Label::yes) ++yes;
        else if (e.cv_label == Label::no) ++no;
        else ++unlabeled;
    }
    if (config.json) {
        out << json{{"bundles", entries.size()}, {"yes", yes}, {"no", no}, {"unlabeled", unlabeled}, {"errors", errors}}.dump()
            << '\n';
    } else {
        out << "scanned " << entries.size() << " bundles: yes=" << yes << " no=" << no << " unlabeled=" << unlabeled
            << " errors=" << errors << '\n';
    }
    return kExitOk;
}

int cmd_features(const fs::path& manifest_path, const fs::path& out_path, const std::string& label_source,
                 const std::string& snapshots, const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto entries = corpus::read_manifest(manifest_path, config.analysis.thresholds);
    std::vector<features::PairFrequencies> docs;
    io::FeatureTable table;
    std::vector<const corpus::ManifestEntry*> used;
    for (const auto& e : entries) {
        if (e.error) {
            err << "features: skipping " << e.bundle_path << " (scan error)\n";
            continue;
        }
        const auto html = corpus::read_html_snapshots(corpus::resolve_bundle_path(e, manifest_path));
        features::PairCounts counts;
        const std::size_t take = snapshots == "all" ? html.size() : std::min<std::size_t>(html.size(), 1);
        for (std::size_t i = 0; i < take; ++i) {
            for (const auto& [k, n] : features::parse_html_pairs(html[i])) counts[k] += n;
        }
        if (html.empty()) err << "features: " << e.bundle_path << " has no HTML snapshot\n";
        docs.push_back(features::pair_frequencies(counts));
        used.push_back(&e);
    }
    table.vocab = features::build_vocabulary(docs);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        learn::LabeledExample ex;
        ex.source = used[i]->bundle_path;
        ex.vector = features::vectorize(docs[i], table.vocab);
        const auto& label = label_source == "cv" ? used[i]->cv_label : used[i]->truth_label;
        ex.label = label.value_or(Label::unlabeled);
        table.rows.push_back(std::move(ex));
        table.urls.push_back(used[i]->url);
    }
    io::write_json_file(io::to_json(table), out_path);
    out << "wrote " << table.rows.size() << " feature rows over " << table.vocab.size() << " pairs to " << out_path.string()
        << '\n';
    return kExitOk;
}

std::vector<learn::LabeledExample> labeled_rows(const io::FeatureTable& table) {
    std::vector<learn::LabeledExample> rows;
    for (const auto& r : table.rows) {
        if (r.label != Label::unlabeled) rows.push_back(r);
    }
    return rows;
}

int cmd_train(const fs::path& features_path, const fs::path& model_path, double test_ratio, bool use_all,
              learn::SvmParams svm, const RunConfig& config, std::ostream& out) {
    const auto table = io::feature_table_from_json(io::read_json_file(features_path));
    auto train = use_all ? labeled_rows(table) : learn::split(table.rows, test_ratio, config.seed).train;
    svm.seed = config.seed;
    const auto model = learn::train_linear_svm(train, svm);
    io::write_json_file(io::to_json(model), model_path);
    std::size_t correct = 0;
    for (const auto& e : train) correct += learn::predict(model, e.vector) == e.label;
    const double accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    if (config.json) {
        out << json{{"train_size", train.size()}, {"dimensions", model.weights.size()}, {"train_accuracy", accuracy},
                    {"hinge_loss", learn::mean_hinge_loss(model, train)}}
                   .dump()
            << '\n';
    } else {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "trained on %zu examples (%zu dimensions); training accuracy %.4f\n", train.size(),
                      model.weights.size(), accuracy);
        out << buf;
    }
    return kExitOk;
}

void print_report(const learn::EvaluationReport& report, const RunConfig& config, std::ostream& out) {
    if (config.json) {
        out << io::to_json(report).dump(2) << '\n';
    } else {
        out << learn::format_report(report);
    }
}

struct EvalArgs {
    std::optional<std::string> model, features, predictions, truth, predictions_out;
    double test_ratio = 0.3;
    bool all = false;
};

int cmd_eval(const EvalArgs& args, const RunConfig& config, std::ostream& out) {
    if (args.predictions || args.truth) {
        if (!args.predictions || !args.truth) throw std::runtime_error("eval: --predictions and --truth go together");
        print_report(learn::evaluate(io::read_label_file(*args.predictions), io::read_label_file(*args.truth)), config, out);
        return kExitOk;
    }
    if (!args.model || !args.features) {
        throw std::runtime_error("eval: give --model and --features, or --predictions and --truth");
    }
    const auto model = io::model_from_json(io::read_json_file(*args.model));
    const auto table = io::feature_table_from_json(io::read_json_file(*args.features));
    if (table.vocab.hash() != model.vocab_hash) {
        throw std::runtime_error("eval: model and feature table use different vocabularies");
    }
    const auto test = args.all ? labeled_rows(table) : learn::split(table.rows, args.test_ratio, config.seed).test;
    std::vector<Label> predicted, truth;
    for (const auto& e : test) {
        predicted.push_back(learn::predict(model, e.vector));
        truth.push_back(e.label);
    }
    if (args.predictions_out) io::write_label_file(predicted, *args.predictions_out);
    print_report(learn::evaluate(predicted, truth), config, out);
    return kExitOk;
}

std::pair<int, int> parse_viewport(const std::string& text) {
    static const std::regex re(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw std::runtime_error("--viewport must look like 1280x800");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

int cmd_synth(int n, double fraction, const fs::path& out_dir, const std::string& viewport, int steps,
              const RunConfig& config, std::ostream& out) {
    synth::CorpusOptions options;
    std::tie(options.viewport_w, options.viewport_h) = parse_viewport(viewport);
    options.steps = steps;
    const auto entries = synth::generate_corpus(n, fraction, config.seed, out_dir, options);
    const auto yes = std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.truth_label == Label::yes; });
    out << "wrote " << entries.size() << " bundles (" << yes << " yes, " << entries.size() - static_cast<std::size_t>(yes)
        << " no) to " << out_dir.string() << '\n';
    out << "suggested --votes for this viewport: "
        << synth::scaled_votes_threshold(options.viewport_w, options.viewport_h) << '\n';
    return kExitOk;
}

int cmd_spread(const fs::path& features_path, const fs::path& out_path, learn::SpreadParams params, std::ostream& out) {
    auto table = io::feature_table_from_json(io::read_json_file(features_path));
    std::vector<std::vector<double>> vectors;
    std::vector<Label> labels;
    for (const auto& r : table.rows) {
        vectors.push_back(r.vector.values);
        labels.push_back(r.label);
    }
    const auto spread = learn::label_spread(vectors, labels, params);
    std::size_t filled = 0;
    for (std::size_t i = 0; i < spread.size(); ++i) {
        if (table.rows[i].label == Label::unlabeled && spread[i] != Label::unlabeled) ++filled;
        // Seed rows keep their given label.
        if (table.rows[i].label == Label::unlabeled) table.rows[i].label = spread[i];
    }
    io::write_json_file(io::to_json(table), out_path);
    out << "labeled " << filled << " of " << table.rows.size() << " rows by spreading\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interstitial detection pipeline over scroll-capture bundles", "interstitial"};
    app.require_subcommand(1);
    Overrides ov;
    app.add_option("--config", ov.config_path, "JSON config file (flags take precedence)");
    app.add_flag("--json", ov.json, "Machine-readable output");
    app.add_option("--seed", ov.seed, "Seed for every randomized step");
    app.add_option("--workers", ov.workers, "Worker threads for scan");
    app.add_option("--canny-low", ov.canny_low, "Canny low threshold [50]");
    app.add_option("--canny-high", ov.canny_high, "Canny high threshold [150]");
    app.add_option("--canny-sigma", ov.canny_sigma, "Canny smoothing sigma [1.4]");
    app.add_option("--rho-res", ov.rho_res, "Hough rho resolution in px [1]");
    app.add_option("--theta-res", ov.theta_res, "Hough theta resolution in rad [pi/180]");
    app.add_option("--votes", ov.votes, "Hough vote threshold [400]");
    app.add_option("--theta-tol", ov.theta_tol, "Orientation tolerance in rad [0.005]");
    app.add_option("--persist-low", ov.persist_low, "Persistence count threshold [1]");
    app.add_option("--persist-high", ov.persist_high, "Strong persistence count threshold [4]");
    app.add_option("--numdiffs-threshold", ov.numdiffs_threshold, "Mid-region match threshold [2]");
    app.add_option("--label-lo", ov.label_lo, "Scores below this are 'no' [0.3]");
    app.add_option("--label-hi", ov.label_hi, "Scores above this are 'yes' [0.75]");
    app.add_option("--diff-tol", ov.diff_tol, "Mid-region mean absolute difference tolerance [0]");
    app.add_flag("--dedupe", ov.dedupe, "Drop repeated trailing screenshots before scoring");

    std::string bundle_dir;
    auto* analyze = app.add_subcommand("analyze", "Score one bundle; exit 0 yes, 1 no, 2 unlabeled");
    analyze->add_option("bundle", bundle_dir, "Bundle directory")->required();

    std::string manifest;
    std::optional<std::string> scan_out;
    auto* scan = app.add_subcommand("scan", "Score every bundle in a manifest");
    scan->add_option("manifest", manifest, "Manifest (JSONL)")->required();
    scan->add_option("--out", scan_out, "Labeled manifest path (default: rewrite input)");

    std::string features_out, label_source = "truth", snapshots = "first";
    auto* feats = app.add_subcommand("features", "Extract HTML pair-frequency features");
    feats->add_option("manifest", manifest, "Manifest (JSONL)")->required();
    feats->add_option("--out", features_out, "Feature table (JSON)")->required();
    feats->add_option("--label-source", label_source, "Row labels from truth_label or cv_label")
        ->check(CLI::IsMember({"truth", "cv"}));
    feats->add_option("--snapshots", snapshots, "Use the first HTML snapshot or all of them")
        ->check(CLI::IsMember({"first", "all"}));

    std::string features_in, model_path;
    double test_ratio = 0.3;
    bool use_all = false;
    learn::SvmParams svm;
    auto* train = app.add_subcommand("train", "Train a linear SVM on a feature table");
    train->add_option("features", features_in, "Feature table (JSON)")->required();
    train->add_option("--model", model_path, "Model output (JSON)")->required();
    train->add_option("--test-ratio", test_ratio, "Held-out fraction [0.3]");
    train->add_flag("--all", use_all, "Train on every labeled row");
    train->add_option("--C", svm.C, "Hinge-loss weight [1.0]");
    train->add_option("--epochs", svm.epochs, "Training epochs [200]");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Precision/recall/F1 report");
    eval->add_option("--model", eval_args.model, "Model (JSON)");
    eval->add_option("--features", eval_args.features, "Feature table (JSON)");
    eval->add_option("--test-ratio", eval_args.test_ratio, "Held-out fraction used at training [0.3]");
    eval->add_flag("--all", eval_args.all, "Evaluate on every labeled row");
    eval->add_option("--predictions", eval_args.predictions, "Predicted labels, one per line");
    eval->add_option("--truth", eval_args.truth, "True labels, one per line");
    eval->add_option("--predictions-out", eval_args.predictions_out, "Write model predictions here");

    int n = 10;
    double fraction = 0.5;
    std::string synth_out, viewport = "1280x800";
    int steps = 6;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
    synth_cmd->add_option("--n", n, "Number of bundles [10]");
    synth_cmd->add_option("--interstitial-frac", fraction, "Fraction with an interstitial [0.5]");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--viewport", viewport, "Viewport WxH [1280x800]");
    synth_cmd->add_option("--steps", steps, "Screenshots per bundle [6]");

    std::string spread_out;
    learn::SpreadParams spread_params;
    auto* spread = app.add_subcommand("spread", "Fill unlabeled feature rows by label spreading");
    spread->add_option("features", features_in, "Feature table (JSON)")->required();
    spread->add_option("--out", spread_out, "Output feature table")->required();
    spread->add_option("--k", spread_params.k, "Neighbors per point [7]");
    spread->add_option("--alpha", spread_params.alpha, "Propagation weight in (0,1) [0.2]");
    spread->add_option("--iters", spread_params.iterations, "Iterations [30]");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : std::max(code, static_cast<int>(kExitError));
    }

    try {
        const auto config = ov.resolve();
        if (*analyze) return cmd_analyze(bundle_dir, config, out);
        if (*scan) return cmd_scan(manifest, scan_out ? std::optional<fs::path>(*scan_out) : std::nullopt, config, out, err);
        if (*feats) return cmd_features(manifest, features_out, label_source, snapshots, config, out, err);
        if (*train) return cmd_train(features_in, model_path, test_ratio, use_all, svm, config, out);
        if (*eval) return cmd_eval(eval_args, config, out);
        if (*synth_cmd) return cmd_synth(n, fraction, synth_out, viewport, steps, config, out);
        if (*spread) return cmd_spread(features_in, spread_out, spread_params, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace interstitial::cli
