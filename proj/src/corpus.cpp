#include "interstitial/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "interstitial/heuristics.hpp"
#include "interstitial/png_io.hpp"

namespace interstitial::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BundleError(path, "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BundleError(path, "cannot write");
    out << text;
}

json parse_json_file(const fs::path& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw BundleError(path, std::string("invalid JSON: ") + e.what());
    }
}

// Files named <digits><ext> in dir, keyed by numeric index.
std::map<std::size_t, fs::path> numbered_files(const fs::path& dir, const std::string& ext) {
    std::map<std::size_t, fs::path> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
        const auto stem = entry.path().stem().string();
        if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw BundleError(entry.path(), "unexpected file name; expected zero-padded index");
        }
        const auto index = static_cast<std::size_t>(std::stoull(stem));
        if (!files.emplace(index, entry.path()).second) {
            throw BundleError(entry.path(), "duplicate index");
        }
    }
    return files;
}

void require_contiguous(const std::map<std::size_t, fs::path>& files, const fs::path& dir) {
    std::size_t expected = 0;
    for (const auto& [index, path] : files) {
        if (index != expected) {
            throw BundleError(dir, "index " + std::to_string(expected) + " missing (indices must be contiguous from 000)");
        }
        ++expected;
    }
}

template <typename T>
T required(const json& meta, const char* key, const fs::path& path) {
    if (!meta.contains(key)) throw BundleError(path, std::string("missing field '") + key + "'");
    try {
        return meta.at(key).get<T>();
    } catch (const json::exception&) {
        throw BundleError(path, std::string("field '") + key + "' has the wrong type");
    }
}

std::vector<std::string> load_html(const fs::path& dir, std::size_t n_shots) {
    const auto html_dir = dir / "html";
    const auto html = numbered_files(html_dir, ".html");
    std::vector<std::string> snapshots;
    if (html.empty()) return snapshots;
    require_contiguous(html, html_dir);
    if (html.size() != 1 && html.size() != n_shots) {
        throw BundleError(html_dir, "expected 000.html only or one snapshot per screenshot");
    }
    for (const auto& [index, path] : html) snapshots.push_back(slurp(path));
    return snapshots;
}

}  // namespace

std::vector<std::string> read_html_snapshots(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw BundleError(dir, "not a directory");
    const auto meta_path = dir / "meta.json";
    if (!fs::exists(meta_path)) throw BundleError(meta_path, "missing");
    const json meta = parse_json_file(meta_path);
    return load_html(dir, required<std::size_t>(meta, "steps", meta_path));
}

std::string shot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03zu.png", index);
    return buf;
}

std::string html_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03zu.html", index);
    return buf;
}

void validate(const CaptureBundle& bundle) {
    if (bundle.screenshots.empty()) throw std::invalid_argument("bundle has no screenshots");
    const auto& first = bundle.screenshots.front();
    for (std::size_t i = 1; i < bundle.screenshots.size(); ++i) {
        const auto& s = bundle.screenshots[i];
        if (s.width() != first.width() || s.height() != first.height()) {
            throw std::invalid_argument("screenshot " + std::to_string(i) + " differs in size from screenshot 0");
        }
    }
    const auto n_html = bundle.html_snapshots.size();
    if (n_html > 1 && n_html != bundle.screenshots.size()) {
        throw std::invalid_argument("html snapshot count must be 0, 1, or the screenshot count");
    }
}

CaptureBundle read_bundle(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw BundleError(dir, "not a directory");
    const auto meta_path = dir / "meta.json";
    if (!fs::exists(meta_path)) throw BundleError(meta_path, "missing");
    const json meta = parse_json_file(meta_path);

    CaptureBundle bundle;
    bundle.url = required<std::string>(meta, "url", meta_path);
    bundle.viewport_w = required<int>(meta, "viewport_w", meta_path);
    bundle.viewport_h = required<int>(meta, "viewport_h", meta_path);
    bundle.scroll_height = required<int>(meta, "scroll_height", meta_path);
    bundle.step_px = required<int>(meta, "step_px", meta_path);
    const auto steps = required<std::size_t>(meta, "steps", meta_path);
    bundle.captured_at = meta.value("captured_at", std::string{});

    const auto shots_dir = dir / "shots";
    const auto shots = numbered_files(shots_dir, ".png");
    if (shots.empty()) throw BundleError(shots_dir, "no screenshots");
    require_contiguous(shots, shots_dir);
    if (shots.size() != steps) {
        throw BundleError(meta_path, "steps = " + std::to_string(steps) + " but shots/ holds " +
                                         std::to_string(shots.size()) + " screenshots");
    }
    for (const auto& [index, path] : shots) {
        try {
            bundle.screenshots.push_back(imaging::read_png(path));
        } catch (const imaging::PngError& e) {
            throw BundleError(path, e.what());
        }
        const auto& s = bundle.screenshots.back();
        const auto& f = bundle.screenshots.front();
        if (s.width() != f.width() || s.height() != f.height()) {
            throw BundleError(path, "dimensions " + std::to_string(s.width()) + "x" + std::to_string(s.height()) +
                                        " differ from " + shot_name(0));
        }
    }

    bundle.html_snapshots = load_html(dir, shots.size());

    const auto truth_path = dir / "truth.json";
    if (fs::exists(truth_path)) {
        const json t = parse_json_file(truth_path);
        GroundTruth truth;
        truth.has_interstitial = required<bool>(t, "has_interstitial", truth_path);
        if (t.contains("box") && !t.at("box").is_null()) {
            const auto b = required<std::vector<int>>(t, "box", truth_path);
            if (b.size() != 4) throw BundleError(truth_path, "box must be [x, y, w, h]");
            truth.box = Box{b[0], b[1], b[2], b[3]};
        }
        bundle.truth = truth;
    }
    return bundle;
}

void write_bundle(const CaptureBundle& bundle, const fs::path& dir) {
    validate(bundle);
    fs::create_directories(dir / "shots");
    json meta = {
        {"url", bundle.url},
        {"viewport_w", bundle.viewport_w},
        {"viewport_h", bundle.viewport_h},
        {"scroll_height", bundle.scroll_height},
        {"step_px", bundle.step_px},
        {"steps", bundle.screenshots.size()},
        {"captured_at", bundle.captured_at},
    };
    spit(dir / "meta.json", meta.dump(2) + "\n");
    for (std::size_t i = 0; i < bundle.screenshots.size(); ++i) {
        imaging::write_png(bundle.screenshots[i], dir / "shots" / shot_name(i));
    }
    if (!bundle.html_snapshots.empty()) {
        fs::create_directories(dir / "html");
        for (std::size_t i = 0; i < bundle.html_snapshots.size(); ++i) {
            spit(dir / "html" / html_name(i), bundle.html_snapshots[i]);
        }
    }
    if (bundle.truth) {
        json t = {{"has_interstitial", bundle.truth->has_interstitial}};
        if (bundle.truth->box) {
            const auto& b = *bundle.truth->box;
            t["box"] = {b.x, b.y, b.w, b.h};
        }
        spit(dir / "truth.json", t.dump(2) + "\n");
    }
}

CaptureBundle dedupe_trailing(CaptureBundle bundle) {
    const bool per_step_html =
        bundle.html_snapshots.size() > 1 && bundle.html_snapshots.size() == bundle.screenshots.size();
    auto& shots = bundle.screenshots;
    while (shots.size() > 1 && shots[shots.size() - 1] == shots[shots.size() - 2]) {
        shots.pop_back();
        if (per_step_html) bundle.html_snapshots.pop_back();
    }
    return bundle;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path, ScoreThresholds thresholds) {
    std::ifstream in(path);
    if (!in) throw ManifestError(0, "cannot open " + path.string());
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ManifestError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ManifestError(line_no, "expected a JSON object");
        ManifestEntry e;
        try {
            e.bundle_path = j.at("bundle_path").get<std::string>();
            e.url = j.value("url", std::string{});
            if (j.contains("cv_score") && !j["cv_score"].is_null()) e.cv_score = j["cv_score"].get<double>();
            if (j.contains("cv_label") && !j["cv_label"].is_null()) {
                e.cv_label = parse_label(j["cv_label"].get<std::string>());
                if (!e.cv_label) throw ManifestError(line_no, "unknown cv_label");
            }
            if (j.contains("truth_label") && !j["truth_label"].is_null()) {
                e.truth_label = parse_label(j["truth_label"].get<std::string>());
                if (!e.truth_label || *e.truth_label == Label::unlabeled) {
                    throw ManifestError(line_no, "truth_label must be yes or no");
                }
            }
            if (j.contains("error") && !j["error"].is_null()) e.error = j["error"].get<std::string>();
        } catch (const json::exception& ex) {
            throw ManifestError(line_no, ex.what());
        }
        if (e.cv_score && e.cv_label && heuristics::label_from_score(*e.cv_score, thresholds) != *e.cv_label) {
            throw ManifestError(line_no, "cv_label '" + std::string(to_string(*e.cv_label)) +
                                             "' is inconsistent with cv_score " + std::to_string(*e.cv_score));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ManifestError(0, "cannot write " + path.string());
    for (const auto& e : entries) {
        json j = {{"bundle_path", e.bundle_path}, {"url", e.url}};
        if (e.cv_score) j["cv_score"] = *e.cv_score;
        if (e.cv_label) j["cv_label"] = std::string(to_string(*e.cv_label));
        if (e.truth_label) j["truth_label"] = std::string(to_string(*e.truth_label));
        if (e.error) j["error"] = *e.error;
        out << j.dump() << '\n';
    }
}

fs::path resolve_bundle_path(const ManifestEntry& entry, const fs::path& manifest_path) {
    fs::path p(entry.bundle_path);
    if (p.is_absolute()) return p;
    return manifest_path.parent_path() / p;
}

}  // namespace interstitial::corpus
