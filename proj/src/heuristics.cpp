#include "interstitial/heuristics.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace interstitial::heuristics {

QuantizedLine quantize(const PolarLine& line, double rho_res, double theta_res) {
    return {std::lround(line.rho / rho_res), std::lround(line.theta / theta_res)};
}

bool is_vertical(double theta, double theta_tol) { return std::fabs(theta) < theta_tol; }

bool is_horizontal(double theta, double theta_tol) { return std::fabs(kHorizontalTheta - theta) < theta_tol; }

std::vector<PolarLine> filter_lines(const std::vector<PolarLine>& lines, double theta_tol) {
    if (!(theta_tol > 0.0)) throw std::invalid_argument("filter_lines: theta_tol must be > 0");
    std::vector<PolarLine> kept;
    for (const auto& line : lines) {
        if (is_vertical(line.theta, theta_tol) || is_horizontal(line.theta, theta_tol)) kept.push_back(line);
    }
    return kept;
}

LineCandidateMap accumulate_candidates(const std::vector<std::vector<PolarLine>>& per_image_lines,
                                       double rho_res, double theta_res) {
    if (!(rho_res > 0.0) || !(theta_res > 0.0)) {
        throw std::invalid_argument("accumulate_candidates: resolutions must be > 0");
    }
    LineCandidateMap map;
    map.rho_res = rho_res;
    map.theta_res = theta_res;
    for (const auto& lines : per_image_lines) {
        std::set<QuantizedLine> seen;
        for (const auto& line : lines) seen.insert(quantize(line, rho_res, theta_res));
        for (const auto& q : seen) ++map.counts[q];
    }
    return map;
}

bool mid_region_same(const RgbRaster& a, const RgbRaster& b, double tol) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("mid_region_same: rasters differ in size");
    }
    const int x0 = a.width() / 4;
    const int x1 = a.width() - a.width() / 4;
    const int y0 = a.height() / 4;
    const int y1 = a.height() - a.height() / 4;
    std::uint64_t total = 0;
    for (int y = y0; y < y1; ++y) {
        const auto* pa = a.at(x0, y);
        const auto* pb = b.at(x0, y);
        for (int i = 0, n = 3 * (x1 - x0); i < n; ++i) total += static_cast<std::uint64_t>(std::abs(pa[i] - pb[i]));
        if (tol == 0.0 && total != 0) return false;
    }
    const double samples = 3.0 * (x1 - x0) * (y1 - y0);
    return static_cast<double>(total) / samples <= tol;
}

int count_mid_diffs(const std::vector<RgbRaster>& screenshots, double tol) {
    int same = 0;
    for (std::size_t i = 1; i < screenshots.size(); ++i) {
        if (mid_region_same(screenshots[i - 1], screenshots[i], tol)) ++same;
    }
    return same;
}

int confidence_points(const LineCandidateMap& candidates, int numdiffs, const ConfidenceRule& rule) {
    if (candidates.counts.empty()) return 0;

    bool persisted = false;
    bool strongly_persisted = false;
    int vertical = 0;
    int horizontal = 0;
    int vertical_strong = 0;
    int horizontal_strong = 0;
    for (const auto& [line, count] : candidates.counts) {
        strongly_persisted |= count > rule.persist_high;
        if (count <= rule.persist_low) continue;
        persisted = true;
        const bool vert = line.theta_bin == 0;
        const bool horz = is_horizontal(candidates.theta(line), rule.theta_tol);
        vertical += vert;
        horizontal += horz;
        if (count > rule.persist_high) {
            vertical_strong += vert;
            horizontal_strong += horz;
        }
    }

    int points = 0;
    if (persisted) points += 1;
    if (strongly_persisted) points += 2;
    if (vertical > 1 && horizontal > 1) points += 2;
    if (vertical_strong > 1 && horizontal_strong > 1) points += 2;
    if (numdiffs > rule.numdiffs_threshold) points += 2;
    return points;
}

double calculate_confidence(const LineCandidateMap& candidates, int numdiffs, const ConfidenceRule& rule) {
    return static_cast<double>(confidence_points(candidates, numdiffs, rule)) / kMaxConfidencePoints;
}

Label label_from_score(double score, ScoreThresholds thresholds) {
    if (!(0.0 <= thresholds.lo && thresholds.lo <= thresholds.hi && thresholds.hi <= 1.0)) {
        throw std::invalid_argument("label_from_score: thresholds must satisfy 0 <= lo <= hi <= 1");
    }
    if (score < thresholds.lo) return Label::no;
    if (score > thresholds.hi) return Label::yes;
    return Label::unlabeled;
}

std::vector<PolarLine> detect_lines(const RgbRaster& screenshot, const AnalysisParams& params) {
    const auto gray = imaging::to_grayscale(screenshot);
    const auto edges = imaging::canny_edges(gray, params.canny);
    return filter_lines(imaging::hough_lines(edges, params.hough), params.theta_tol);
}

BundleAnalysis analyze_bundle(const corpus::CaptureBundle& input, const AnalysisParams& params) {
    if (input.screenshots.empty()) throw std::invalid_argument("analyze_bundle: bundle has no screenshots");
    const corpus::CaptureBundle* bundle = &input;
    corpus::CaptureBundle deduped;
    if (params.dedupe) {
        deduped = corpus::dedupe_trailing(input);
        bundle = &deduped;
    }

    BundleAnalysis result;
    result.frames = bundle->screenshots.size();
    result.per_image_lines.reserve(result.frames);
    for (const auto& shot : bundle->screenshots) result.per_image_lines.push_back(detect_lines(shot, params));
    result.candidates = accumulate_candidates(result.per_image_lines, params.hough.rho_res, params.hough.theta_res);
    result.numdiffs = count_mid_diffs(bundle->screenshots, params.diff_tol);
    result.points = confidence_points(result.candidates, result.numdiffs, params.rule);
    result.confidence = static_cast<double>(result.points) / kMaxConfidencePoints;
    result.label = label_from_score(result.confidence, params.thresholds);
    return result;
}

}  // namespace interstitial::heuristics
