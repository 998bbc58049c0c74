#pragma once

// Test-only helpers: fixtures and independent reference implementations.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <unistd.h>

#include "interstitial/imaging.hpp"

namespace testing_support {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("interstitial_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline interstitial::imaging::RgbRaster solid(int w, int h, std::uint8_t v) {
    interstitial::imaging::RgbRaster img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.set(x, y, v, v, v);
    return img;
}

/// Dense-accumulator Hough written directly from the definition: for every
/// edge pixel and every theta = t * theta_res below pi, the nearest rho bin
/// gets a vote.
inline std::vector<interstitial::imaging::PolarLine> naive_hough(const interstitial::imaging::EdgeRaster& edges,
                                                                 double rho_res, double theta_res, int threshold) {
    std::map<std::pair<int, long>, int> votes;
    for (int y = 0; y < edges.height(); ++y) {
        for (int x = 0; x < edges.width(); ++x) {
            if (!edges.at(x, y)) continue;
            for (int t = 0; t * theta_res < std::numbers::pi; ++t) {
                const double theta = t * theta_res;
                const double rho = x * std::cos(theta) + y * std::sin(theta);
                ++votes[{t, std::lround(rho / rho_res)}];
            }
        }
    }
    const double diag = std::hypot(edges.width(), edges.height());
    std::vector<interstitial::imaging::PolarLine> out;
    for (const auto& [key, v] : votes) {
        if (v < threshold) continue;
        out.push_back({std::clamp(key.second * rho_res, -diag, diag), key.first * theta_res, v});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(b.votes, a.rho, a.theta) < std::tie(a.votes, b.rho, b.theta);
    });
    return out;
}

/// Line-by-line transliteration of the reference scoring pseudocode, over
/// (rho, theta) tuples with real-valued theta.
inline double pseudocode_confidence(const std::map<std::pair<double, double>, int>& line_candidates, int numdiffs) {
    const double max_conf = 9;
    double confidence = 0;
    const auto& results = line_candidates;  // countFrequency already applied
    if (!results.empty()) {
        std::map<std::pair<double, double>, int> pruned, pruned_more, vert, horz, vert_pruned, horz_pruned;
        for (const auto& [k, v] : results)
            if (v > 1) pruned[k] = v;
        for (const auto& [k, v] : results)
            if (v > 4) pruned_more[k] = v;
        for (const auto& [k, v] : pruned)
            if (k.second == 0) vert[k] = v;
        for (const auto& [k, v] : pruned)
            if (std::abs(1.57 - k.second) < .005) horz[k] = v;
        for (const auto& [k, v] : vert)
            if (v > 4) vert_pruned[k] = v;
        for (const auto& [k, v] : horz)
            if (v > 4) horz_pruned[k] = v;
        if (!pruned.empty()) confidence += 1;
        if (!pruned_more.empty()) confidence += 2;
        if (vert.size() > 1 && horz.size() > 1) confidence += 2;
        if (vert_pruned.size() > 1 && horz_pruned.size() > 1) confidence += 2;
        if (numdiffs > 2) confidence += 2;
    }
    return confidence / max_conf;
}

}  // namespace testing_support
