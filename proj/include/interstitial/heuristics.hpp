#pragma once

#include <compare>
#include <map>
#include <vector>

#include "interstitial/corpus.hpp"
#include "interstitial/imaging.hpp"
#include "interstitial/label.hpp"

namespace interstitial::heuristics {

using imaging::PolarLine;
using imaging::RgbRaster;

/// A line snapped to its accumulator bin so it can be matched across frames.
struct QuantizedLine {
    long rho_bin = 0;
    long theta_bin = 0;
    auto operator<=>(const QuantizedLine&) const = default;
};

QuantizedLine quantize(const PolarLine& line, double rho_res, double theta_res);

/// Number of frames in which each quantized line was seen.
struct LineCandidateMap {
    double rho_res = 1.0;
    double theta_res = imaging::HoughParams{}.theta_res;
    std::map<QuantizedLine, int> counts;

    double rho(const QuantizedLine& q) const { return q.rho_bin * rho_res; }
    double theta(const QuantizedLine& q) const { return q.theta_bin * theta_res; }
};

constexpr double kHorizontalTheta = 1.57;
constexpr double kDefaultThetaTol = 0.005;

bool is_vertical(double theta, double theta_tol = kDefaultThetaTol);
bool is_horizontal(double theta, double theta_tol = kDefaultThetaTol);

/// Keeps axis-aligned lines, order preserved.
std::vector<PolarLine> filter_lines(const std::vector<PolarLine>& lines, double theta_tol = kDefaultThetaTol);

/// Lines are deduplicated within a frame before counting.
LineCandidateMap accumulate_candidates(const std::vector<std::vector<PolarLine>>& per_image_lines,
                                       double rho_res, double theta_res);

/// Compares the central 50% x 50% window by mean absolute channel difference.
bool mid_region_same(const RgbRaster& a, const RgbRaster& b, double tol = 0.0);

/// Consecutive pairs whose mid regions match.
int count_mid_diffs(const std::vector<RgbRaster>& screenshots, double tol = 0.0);

/// Scoring thresholds. Defaults are the reference values.
struct ConfidenceRule {
    int persist_low = 1;         // "persisted" means count > persist_low
    int persist_high = 4;        // strongly persisted: count > persist_high
    int numdiffs_threshold = 2;  // bonus when numdiffs > this
    double theta_tol = kDefaultThetaTol;
};

constexpr int kMaxConfidencePoints = 9;

/// Raw points in [0, 9]; see calculate_confidence.
int confidence_points(const LineCandidateMap& candidates, int numdiffs, const ConfidenceRule& rule = {});

/// Point score:
///   +1  any line with count > 1
///   +2  any line with count > 4
///   +2  more than one vertical and more than one horizontal line with count > 1
///   +2  the same with count > 4
///   +2  numdiffs > 2
/// divided by 9. An empty candidate map scores 0 regardless of numdiffs.
double calculate_confidence(const LineCandidateMap& candidates, int numdiffs, const ConfidenceRule& rule = {});

/// Throws std::invalid_argument unless 0 <= lo <= hi <= 1.
Label label_from_score(double score, ScoreThresholds thresholds = {});

struct AnalysisParams {
    imaging::CannyParams canny;
    imaging::HoughParams hough;
    double theta_tol = kDefaultThetaTol;
    ConfidenceRule rule;
    ScoreThresholds thresholds;
    double diff_tol = 0.0;
    bool dedupe = false;
};

struct BundleAnalysis {
    std::size_t frames = 0;  // after optional dedupe
    std::vector<std::vector<PolarLine>> per_image_lines;
    LineCandidateMap candidates;
    int numdiffs = 0;
    int points = 0;
    double confidence = 0.0;
    Label label = Label::unlabeled;
};

/// Lines surviving the orientation filter for one screenshot.
std::vector<PolarLine> detect_lines(const RgbRaster& screenshot, const AnalysisParams& params);

BundleAnalysis analyze_bundle(const corpus::CaptureBundle& bundle, const AnalysisParams& params = {});

}  // namespace interstitial::heuristics
