#include "interstitial/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace interstitial::io {

namespace fs = std::filesystem;

namespace {

Label label_from_json(const json& j) {
    const auto label = parse_label(j.get<std::string>());
    if (!label) throw std::runtime_error("unknown label '" + j.get<std::string>() + "'");
    return *label;
}

json row_to_json(const learn::ReportRow& r) {
    return {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}, {"support", r.support}};
}

}  // namespace

json to_json(const features::FeatureVector& v) { return {{"vocab_hash", v.vocab_hash}, {"values", v.values}}; }

features::FeatureVector feature_vector_from_json(const json& j) {
    return {j.at("vocab_hash").get<std::string>(), j.at("values").get<std::vector<double>>()};
}

json to_json(const learn::SvmModel& model) {
    return {{"weights", model.weights},        {"bias", model.bias},
            {"C", model.params.C},             {"epochs", model.params.epochs},
            {"seed", model.params.seed},       {"vocab_hash", model.vocab_hash}};
}

learn::SvmModel model_from_json(const json& j) {
    learn::SvmModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.params.C = j.at("C").get<double>();
    m.params.epochs = j.at("epochs").get<int>();
    m.params.seed = j.at("seed").get<std::uint64_t>();
    m.vocab_hash = j.at("vocab_hash").get<std::string>();
    return m;
}

json to_json(const learn::EvaluationReport& report) {
    return {{"no", row_to_json(report.no)}, {"yes", row_to_json(report.yes)}, {"avg_total", row_to_json(report.weighted)}};
}

json to_json(const heuristics::BundleAnalysis& a) {
    json lines = json::array();
    for (const auto& frame : a.per_image_lines) {
        json f = json::array();
        for (const auto& l : frame) f.push_back({{"rho", l.rho}, {"theta", l.theta}, {"votes", l.votes}});
        lines.push_back(std::move(f));
    }
    json candidates = json::array();
    for (const auto& [q, count] : a.candidates.counts) {
        candidates.push_back({{"rho_bin", q.rho_bin},
                              {"theta_bin", q.theta_bin},
                              {"rho", a.candidates.rho(q)},
                              {"theta", a.candidates.theta(q)},
                              {"count", count}});
    }
    return {{"frames", a.frames},
            {"per_image_lines", std::move(lines)},
            {"candidates", std::move(candidates)},
            {"numdiffs", a.numdiffs},
            {"points", a.points},
            {"confidence", a.confidence},
            {"label", std::string(to_string(a.label))}};
}

json to_json(const FeatureTable& table) {
    json vocab = json::array();
    for (const auto& p : table.vocab.pairs()) vocab.push_back({p.tag, p.attribute});
    json rows = json::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        rows.push_back({{"source", r.source},
                        {"url", i < table.urls.size() ? table.urls[i] : std::string{}},
                        {"label", std::string(to_string(r.label))},
                        {"vector", to_json(r.vector)}});
    }
    return {{"vocab_hash", table.vocab.hash()}, {"vocab", std::move(vocab)}, {"rows", std::move(rows)}};
}

FeatureTable feature_table_from_json(const json& j) {
    FeatureTable table;
    std::vector<features::TagAttr> pairs;
    for (const auto& p : j.at("vocab")) pairs.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
    table.vocab = features::Vocabulary(std::move(pairs));
    const auto hash = table.vocab.hash();
    if (j.contains("vocab_hash") && j["vocab_hash"].get<std::string>() != hash) {
        throw std::runtime_error("feature table: vocab_hash does not match its vocabulary");
    }
    for (const auto& r : j.at("rows")) {
        learn::LabeledExample e;
        e.source = r.at("source").get<std::string>();
        e.label = label_from_json(r.at("label"));
        e.vector = feature_vector_from_json(r.at("vector"));
        if (e.vector.vocab_hash != hash || e.vector.values.size() != table.vocab.size()) {
            throw std::runtime_error("feature table: row '" + e.source + "' does not match the vocabulary");
        }
        table.urls.push_back(r.value("url", std::string{}));
        table.rows.push_back(std::move(e));
    }
    return table;
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<Label> read_label_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<Label> labels;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) continue;
        const auto label = parse_label(word);
        if (!label || *label == Label::unlabeled) {
            throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": expected yes or no");
        }
        labels.push_back(*label);
    }
    return labels;
}

void write_label_file(const std::vector<Label>& labels, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (auto l : labels) out << to_string(l) << '\n';
}

}  // namespace interstitial::io
