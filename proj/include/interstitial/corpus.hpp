#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "interstitial/imaging.hpp"
#include "interstitial/label.hpp"

namespace interstitial::corpus {

/// Raised for any malformed bundle; path() names the offending file.
class BundleError : public std::runtime_error {
public:
    BundleError(std::filesystem::path path, const std::string& message)
        : std::runtime_error(path.string() + ": " + message), path_(std::move(path)) {}
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    friend bool operator==(const Box&, const Box&) = default;
};

struct GroundTruth {
    bool has_interstitial = false;
    std::optional<Box> box;
    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct CaptureBundle {
    std::string url;
    int viewport_w = 0;
    int viewport_h = 0;
    int scroll_height = 0;
    int step_px = 0;
    std::string captured_at;
    std::vector<imaging::RgbRaster> screenshots;
    /// Empty, a single first-load snapshot, or one per screenshot.
    std::vector<std::string> html_snapshots;
    std::optional<GroundTruth> truth;
};

/// Checks the bundle invariants; throws std::invalid_argument.
void validate(const CaptureBundle& bundle);

/// On-disk layout:
///   meta.json         {url, viewport_w, viewport_h, scroll_height, step_px, steps, captured_at}
///   shots/NNN.png     zero-padded, 0-based, contiguous
///   html/NNN.html     one per shot, or html/000.html only, or absent
///   truth.json        optional {has_interstitial, box: [x, y, w, h]}
CaptureBundle read_bundle(const std::filesystem::path& dir);
void write_bundle(const CaptureBundle& bundle, const std::filesystem::path& dir);

/// HTML snapshots only, without decoding screenshots.
std::vector<std::string> read_html_snapshots(const std::filesystem::path& dir);

/// Drops trailing screenshots whose pixels repeat their predecessor, together
/// with their per-step HTML snapshots. The first screenshot always survives.
CaptureBundle dedupe_trailing(CaptureBundle bundle);

std::string shot_name(std::size_t index);
std::string html_name(std::size_t index);

struct ManifestEntry {
    std::string bundle_path;
    std::string url;
    std::optional<double> cv_score;
    std::optional<Label> cv_label;
    std::optional<Label> truth_label;
    std::optional<std::string> error;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

class ManifestError : public std::runtime_error {
public:
    ManifestError(std::size_t line, const std::string& message)
        : std::runtime_error("manifest line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// JSONL, one entry per line. Blank lines are ignored. A cv_label that
/// disagrees with cv_score under `thresholds` is rejected.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path, ScoreThresholds thresholds = {});
void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);

/// bundle_path resolved against the manifest's directory when relative.
std::filesystem::path resolve_bundle_path(const ManifestEntry& entry, const std::filesystem::path& manifest_path);

}  // namespace interstitial::corpus
