#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "interstitial/features.hpp"
#include "interstitial/heuristics.hpp"
#include "interstitial/learn.hpp"

// JSON encodings of the pipeline's artifacts.
namespace interstitial::io {

using nlohmann::json;

json to_json(const features::FeatureVector& v);
features::FeatureVector feature_vector_from_json(const json& j);

json to_json(const learn::SvmModel& model);
learn::SvmModel model_from_json(const json& j);

json to_json(const learn::EvaluationReport& report);

json to_json(const heuristics::BundleAnalysis& analysis);

/// Feature rows for a corpus, all projected onto one vocabulary:
/// {"vocab_hash", "vocab": [[tag, attr], ...], "rows": [{"source", "url", "label", "vector"}]}
struct FeatureTable {
    features::Vocabulary vocab;
    std::vector<learn::LabeledExample> rows;
    std::vector<std::string> urls;
};

json to_json(const FeatureTable& table);
FeatureTable feature_table_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const json& j, const std::filesystem::path& path);

/// One "yes"/"no" label per line.
std::vector<Label> read_label_file(const std::filesystem::path& path);
void write_label_file(const std::vector<Label>& labels, const std::filesystem::path& path);

}  // namespace interstitial::io
