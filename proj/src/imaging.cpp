#include "interstitial/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace interstitial::imaging {

namespace {

void require_dims(int width, int height, std::size_t have, std::size_t channels, const char* what) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument(std::string(what) + ": width and height must be >= 1");
    }
    if (have != static_cast<std::size_t>(width) * height * channels) {
        throw std::invalid_argument(std::string(what) + ": pixel buffer size does not match dimensions");
    }
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

std::vector<double> gaussian_weights(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        w[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += w[i + radius];
    }
    for (auto& v : w) v /= sum;
    return w;
}

// Gaussian taps scaled to sum ~256 and rounded; exact integer smoothing.
std::vector<std::int32_t> integer_gaussian(double sigma) {
    const auto w = gaussian_weights(sigma);
    std::vector<std::int32_t> out(w.size());
    std::transform(w.begin(), w.end(), out.begin(),
                   [](double v) { return static_cast<std::int32_t>(std::lround(v * 256.0)); });
    return out;
}

// Smoothed image scaled by (sum of taps)^2. Taps sum to ~256, so every
// intermediate fits in 32 bits.
std::vector<std::int32_t> smooth_scaled(const GrayRaster& img, const std::vector<std::int32_t>& taps) {
    const int w = img.width();
    const int h = img.height();
    const int r = static_cast<int>(taps.size() / 2);
    std::vector<std::int32_t> tmp(static_cast<std::size_t>(w) * h);
    std::vector<std::int32_t> padded(static_cast<std::size_t>(w + 2 * r));
    for (int y = 0; y < h; ++y) {
        for (int i = 0; i < w + 2 * r; ++i) padded[i] = img.at(clamp_index(i - r, w), y);
        std::int32_t* row = &tmp[static_cast<std::size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            std::int32_t acc = 0;
            for (int i = 0; i <= 2 * r; ++i) acc += taps[i] * padded[x + i];
            row[x] = acc;
        }
    }
    std::vector<std::int32_t> out(tmp.size(), 0);
    for (int y = 0; y < h; ++y) {
        std::int32_t* dst = &out[static_cast<std::size_t>(y) * w];
        for (int i = -r; i <= r; ++i) {
            const std::int32_t t = taps[i + r];
            const std::int32_t* src = &tmp[static_cast<std::size_t>(clamp_index(y + i, h)) * w];
            for (int x = 0; x < w; ++x) dst[x] += t * src[x];
        }
    }
    return out;
}

}  // namespace

RgbRaster::RgbRaster(int width, int height)
    : RgbRaster(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * 3)) {}

RgbRaster::RgbRaster(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    require_dims(width, height, pixels_.size(), 3, "RgbRaster");
}

GrayRaster::GrayRaster(int width, int height, std::uint8_t fill)
    : GrayRaster(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

GrayRaster::GrayRaster(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    require_dims(width, height, pixels_.size(), 1, "GrayRaster");
}

EdgeRaster::EdgeRaster(int width, int height)
    : width_(width), height_(height), mask_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0) {
    require_dims(width, height, mask_.size(), 1, "EdgeRaster");
}

std::size_t EdgeRaster::count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

GrayRaster to_grayscale(const RgbRaster& img) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double luma = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
        out[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
    }
    return GrayRaster(img.width(), img.height(), std::move(out));
}

RgbRaster to_rgb(const GrayRaster& img) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height() * 3);
    const auto& px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = px[i];
    }
    return RgbRaster(img.width(), img.height(), std::move(out));
}

GrayRaster gaussian_blur(const GrayRaster& img, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("gaussian_blur: sigma must be > 0");
    }
    const auto k = gaussian_weights(sigma);
    const int r = static_cast<int>(k.size() / 2);
    const int w = img.width();
    const int h = img.height();
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(clamp_index(x + i, w), y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    GrayRaster out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[static_cast<std::size_t>(clamp_index(y + i, h)) * w + x];
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
        }
    }
    return out;
}

EdgeRaster canny_edges(const GrayRaster& img, double low, double high) {
    return canny_edges(img, CannyParams{low, high, 1.4});
}

EdgeRaster canny_edges(const GrayRaster& img, const CannyParams& params) {
    if (params.low < 0.0 || params.low > params.high) {
        throw std::invalid_argument("canny_edges: thresholds must satisfy 0 <= low <= high");
    }
    if (!(params.sigma > 0.0)) {
        throw std::invalid_argument("canny_edges: sigma must be > 0");
    }
    const int w = img.width();
    const int h = img.height();
    const auto taps = integer_gaussian(params.sigma);
    std::int32_t tap_sum = 0;
    for (auto t : taps) tap_sum += t;
    const auto smooth = smooth_scaled(img, taps);
    const double scale = static_cast<double>(tap_sum) * static_cast<double>(tap_sum);

    auto s = [&](int x, int y) {
        return smooth[static_cast<std::size_t>(clamp_index(y, h)) * w + clamp_index(x, w)];
    };

    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::int32_t> gx(n), gy(n);
    std::vector<std::int64_t> mag2(n);
    auto sobel = [&](int x, int y, std::int32_t dx, std::int32_t dy) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        gx[i] = dx;
        gy[i] = dy;
        mag2[i] = static_cast<std::int64_t>(dx) * dx + static_cast<std::int64_t>(dy) * dy;
    };
    for (int y = 0; y < h; ++y) {
        const bool interior_row = y > 0 && y + 1 < h;
        for (int x = 0; x < w; ++x) {
            if (interior_row && x > 0 && x + 1 < w) {
                const std::int32_t* up = &smooth[static_cast<std::size_t>(y - 1) * w + x];
                const std::int32_t* mid = up + w;
                const std::int32_t* down = mid + w;
                sobel(x, y, (up[1] + 2 * mid[1] + down[1]) - (up[-1] + 2 * mid[-1] + down[-1]),
                      (down[-1] + 2 * down[0] + down[1]) - (up[-1] + 2 * up[0] + up[1]));
                continue;
            }
            sobel(x, y,
                  (s(x + 1, y - 1) + 2 * s(x + 1, y) + s(x + 1, y + 1)) - (s(x - 1, y - 1) + 2 * s(x - 1, y) + s(x - 1, y + 1)),
                  (s(x - 1, y + 1) + 2 * s(x, y + 1) + s(x + 1, y + 1)) - (s(x - 1, y - 1) + 2 * s(x, y - 1) + s(x + 1, y - 1)));
        }
    }

    auto m = [&](int x, int y) -> std::int64_t {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return mag2[static_cast<std::size_t>(y) * w + x];
    };

    const double low_sq = (params.low * scale) * (params.low * scale);
    const double high_sq = (params.high * scale) * (params.high * scale);
    constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
    constexpr double kTan67 = 2.4142135623730949;   // tan(67.5 deg)

    // 0 = suppressed / below low, 1 = weak, 2 = strong
    std::vector<std::uint8_t> cls(n, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const std::int64_t mv = mag2[i];
            if (mv == 0 || static_cast<double>(mv) < low_sq) continue;
            const double ax = std::fabs(static_cast<double>(gx[i]));
            const double ay = std::fabs(static_cast<double>(gy[i]));
            std::int64_t before = 0;
            std::int64_t after = 0;
            if (ay <= kTan22 * ax) {
                before = m(x - 1, y);
                after = m(x + 1, y);
            } else if (ay > kTan67 * ax) {
                before = m(x, y - 1);
                after = m(x, y + 1);
            } else if ((gx[i] > 0) == (gy[i] > 0)) {
                before = m(x - 1, y - 1);
                after = m(x + 1, y + 1);
            } else {
                before = m(x + 1, y - 1);
                after = m(x - 1, y + 1);
            }
            // Strict on one side, non-strict on the other: a plateau of two
            // equal maxima keeps exactly one pixel.
            if (mv > before && mv >= after) {
                cls[i] = static_cast<double>(mv) >= high_sq ? 2 : 1;
            }
        }
    }

    EdgeRaster edges(w, h);
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (cls[static_cast<std::size_t>(y) * w + x] != 2 || edges.at(x, y)) continue;
            edges.set(x, y);
            stack.push_back(y * w + x);
            while (!stack.empty()) {
                const int p = stack.back();
                stack.pop_back();
                const int px = p % w;
                const int py = p / w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int qx = px + dx;
                        const int qy = py + dy;
                        if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
                        if (edges.at(qx, qy) || cls[static_cast<std::size_t>(qy) * w + qx] == 0) continue;
                        edges.set(qx, qy);
                        stack.push_back(qy * w + qx);
                    }
                }
            }
        }
    }
    return edges;
}

int theta_bin_count(double theta_res) {
    if (!(theta_res > 0.0)) throw std::invalid_argument("hough: theta_res must be > 0");
    int n = static_cast<int>(std::ceil(std::numbers::pi / theta_res - 1e-9));
    while (n > 1 && (n - 1) * theta_res >= std::numbers::pi) --n;
    return std::max(n, 1);
}

int rho_half_bins(int width, int height, double rho_res) {
    if (!(rho_res > 0.0)) throw std::invalid_argument("hough: rho_res must be > 0");
    return static_cast<int>(std::ceil(std::hypot(width, height) / rho_res));
}

std::vector<PolarLine> hough_lines(const EdgeRaster& edges, const HoughParams& params) {
    if (!(params.rho_res > 0.0)) throw std::invalid_argument("hough_lines: rho_res must be > 0");
    if (!(params.theta_res > 0.0)) throw std::invalid_argument("hough_lines: theta_res must be > 0");
    if (params.votes_threshold < 1) throw std::invalid_argument("hough_lines: votes_threshold must be >= 1");

    const int w = edges.width();
    const int h = edges.height();
    const int n_theta = theta_bin_count(params.theta_res);
    const int half = rho_half_bins(w, h, params.rho_res);
    const int n_rho = 2 * half + 1;
    const double diagonal = std::hypot(w, h);

    std::vector<double> cos_t(n_theta), sin_t(n_theta);
    for (int t = 0; t < n_theta; ++t) {
        cos_t[t] = std::cos(t * params.theta_res);
        sin_t[t] = std::sin(t * params.theta_res);
    }

    std::vector<int> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);
    const bool unit_rho = params.rho_res == 1.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!edges.at(x, y)) continue;
            int* column = acc.data() + half;
            if (unit_rho) {
                for (int t = 0; t < n_theta; ++t, column += n_rho) ++column[std::lround(x * cos_t[t] + y * sin_t[t])];
            } else {
                for (int t = 0; t < n_theta; ++t, column += n_rho) {
                    ++column[std::lround((x * cos_t[t] + y * sin_t[t]) / params.rho_res)];
                }
            }
        }
    }

    std::vector<PolarLine> lines;
    for (int t = 0; t < n_theta; ++t) {
        for (int r = 0; r < n_rho; ++r) {
            const int votes = acc[static_cast<std::size_t>(t) * n_rho + r];
            if (votes < params.votes_threshold) continue;
            const double rho = std::clamp((r - half) * params.rho_res, -diagonal, diagonal);
            lines.push_back({rho, t * params.theta_res, votes});
        }
    }
    std::sort(lines.begin(), lines.end(), [](const PolarLine& a, const PolarLine& b) {
        if (a.votes != b.votes) return a.votes > b.votes;
        if (a.rho != b.rho) return a.rho < b.rho;
        return a.theta < b.theta;
    });
    return lines;
}

}  // namespace interstitial::imaging
