#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

namespace interstitial::imaging {

/// Row-major interleaved 8-bit RGB image.
class RgbRaster {
public:
    RgbRaster() = default;
    RgbRaster(int width, int height);
    RgbRaster(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0; }

    std::uint8_t* at(int x, int y) { return &pixels_[3 * (static_cast<std::size_t>(y) * width_ + x)]; }
    const std::uint8_t* at(int x, int y) const {
        return &pixels_[3 * (static_cast<std::size_t>(y) * width_ + x)];
    }
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = at(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

    friend bool operator==(const RgbRaster&, const RgbRaster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

class GrayRaster {
public:
    GrayRaster() = default;
    GrayRaster(int width, int height, std::uint8_t fill = 0);
    GrayRaster(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

    friend bool operator==(const GrayRaster&, const GrayRaster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

class EdgeRaster {
public:
    EdgeRaster() = default;
    EdgeRaster(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return mask_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool edge = true) {
        mask_[static_cast<std::size_t>(y) * width_ + x] = edge ? 1 : 0;
    }

    std::size_t count() const;

    friend bool operator==(const EdgeRaster&, const EdgeRaster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> mask_;
};

/// A line in Hough normal form: x*cos(theta) + y*sin(theta) = rho.
/// theta = 0 is a vertical line, theta ~ pi/2 a horizontal one.
struct PolarLine {
    double rho = 0.0;
    double theta = 0.0;
    int votes = 0;

    friend bool operator==(const PolarLine&, const PolarLine&) = default;
};

struct CannyParams {
    double low = 50.0;
    double high = 150.0;
    double sigma = 1.4;
};

struct HoughParams {
    double rho_res = 1.0;
    double theta_res = std::numbers::pi / 180.0;
    int votes_threshold = 400;
};

/// BT.601 luma, rounded to nearest.
GrayRaster to_grayscale(const RgbRaster& img);

/// Replicates the gray channel into R, G and B.
RgbRaster to_rgb(const GrayRaster& img);

/// Separable Gaussian with radius ceil(3*sigma) and edge-clamped borders.
/// Throws std::invalid_argument when sigma <= 0.
GrayRaster gaussian_blur(const GrayRaster& img, double sigma);

/// Canny edge detector.
///
/// Smoothing uses an integer-weight Gaussian so the whole pipeline runs in
/// exact integer arithmetic: a global intensity offset leaves every gradient,
/// and therefore every edge decision, unchanged. Gradient magnitude is the L2
/// norm of 3x3 Sobel responses; non-maximum suppression uses four direction
/// sectors; hysteresis grows 8-connected from pixels with magnitude >= high
/// through pixels with magnitude >= low.
EdgeRaster canny_edges(const GrayRaster& img, const CannyParams& params = {});
EdgeRaster canny_edges(const GrayRaster& img, double low, double high);

/// Number of theta bins covering [0, pi) at the given resolution.
int theta_bin_count(double theta_res);

/// Half-width (in bins) of the rho axis for a raster of the given size.
int rho_half_bins(int width, int height, double rho_res);

/// Standard Hough transform. Every edge pixel votes once per theta bin for the
/// rho bin nearest to x*cos(theta) + y*sin(theta). Returns the bin centers
/// with at least votes_threshold votes, ordered by descending votes, then
/// ascending rho, then ascending theta.
std::vector<PolarLine> hough_lines(const EdgeRaster& edges, const HoughParams& params = {});

}  // namespace interstitial::imaging
