#include "interstitial/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "interstitial/rng.hpp"

namespace interstitial::synth {

namespace fs = std::filesystem;
using imaging::RgbRaster;

namespace {

constexpr std::uint8_t kPage = 250;
constexpr int kMargin = 40;
constexpr int kIndentJitter = 60;

struct Rect {
    int x, y, w, h;
    std::uint8_t r, g, b;
};

void fill(RgbRaster& img, int x, int y, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int x0 = std::max(x, 0);
    const int y0 = std::max(y, 0);
    const int x1 = std::min(x + w, img.width());
    const int y1 = std::min(y + h, img.height());
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) img.set(xx, yy, r, g, b);
    }
}

// Text-like bars laid out down the whole page, in page coordinates.
std::vector<Rect> layout_page(int width, int page_height, double density, Rng& rng) {
    std::vector<Rect> bars;
    const int usable = std::max(1, width - 2 * kMargin - kIndentJitter);
    int y = 24;
    while (y < page_height) {
        if (!rng.bernoulli(density)) {
            y += 24;
            continue;
        }
        const int h = static_cast<int>(rng.uniform_int(10, 14));
        const int x = kMargin + static_cast<int>(rng.uniform_int(0, kIndentJitter));
        const int w = std::max(8, static_cast<int>(usable * rng.uniform(0.3, 0.85)));
        const auto shade = static_cast<std::uint8_t>(rng.uniform_int(30, 90));
        bars.push_back({x, y, w, h, shade, shade, static_cast<std::uint8_t>(std::min(255, shade + 20))});
        y += h + static_cast<int>(rng.uniform_int(8, 16));
    }
    return bars;
}

// Panel contents, in box-relative coordinates.
std::vector<Rect> layout_panel(const InterstitialSpec& s, Rng& rng) {
    std::vector<Rect> items;
    const int inset = s.border_px + 16;
    const int inner_w = s.box.w - 2 * inset;
    const int inner_h = s.box.h - 2 * inset;
    if (inner_w < 20 || inner_h < 40) return items;
    items.push_back({inset, inset, inner_w, std::min(28, inner_h / 4), 30, 90, 200});
    int y = inset + std::min(28, inner_h / 4) + 16;
    while (y + 12 < inset + inner_h - 40) {
        const int w = std::max(8, static_cast<int>(inner_w * rng.uniform(0.4, 0.9)));
        items.push_back({inset + 4, y, w, 10, 70, 70, 70});
        y += 22;
    }
    const int bw = std::min(120, inner_w / 2);
    items.push_back({inset + (inner_w - bw) / 2, inset + inner_h - 32, bw, 28, 220, 60, 40});
    return items;
}

std::string random_html(bool interstitial, Rng& rng) {
    std::string html = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Synthetic page</title>\n";
    const auto links = rng.uniform_int(0, 4);
    for (int i = 0; i < links; ++i) html += "<link rel=\"stylesheet\" href=\"/s" + std::to_string(i) + ".css\">\n";
    if (rng.bernoulli(0.5)) html += "<meta name=\"viewport\" content=\"width=device-width\">\n";
    html += "</head>\n<body class=\"page\">\n";
    if (rng.bernoulli(0.7)) html += "<header id=\"top\"><nav class=\"menu\"><ul><li><a href=\"/\">Home</a></li></ul></nav></header>\n";
    const auto paragraphs = rng.uniform_int(3, 20);
    for (int i = 0; i < paragraphs; ++i) {
        html += "<div class=\"post\"><p>text <a href=\"/p" + std::to_string(i) + "\">more</a>";
        if (rng.bernoulli(0.3)) html += "<img src=\"/i" + std::to_string(i) + ".png\" alt=\"\">";
        if (rng.bernoulli(0.4)) html += "<span class=\"tag\">t</span>";
        html += "<br></p></div>\n";
    }
    if (rng.bernoulli(0.5)) html += "<script src=\"/app.js\"></script>\n";
    if (rng.bernoulli(0.3)) html += "<iframe src=\"/ad\" width=\"300\" height=\"250\"></iframe>\n";

    // Modal-ish markup is common, but not exclusive, to pages with interstitials.
    const double modal_p = interstitial ? 0.85 : 0.12;
    if (rng.bernoulli(modal_p)) {
        html += "<div class=\"overlay\" style=\"position:fixed\"><div class=\"modal\" role=\"dialog\" aria-modal=\"true\">";
        if (rng.bernoulli(interstitial ? 0.8 : 0.3)) html += "<button type=\"button\" aria-label=\"Close\">x</button>";
        if (rng.bernoulli(0.5)) html += "<form action=\"/subscribe\"><input type=\"email\" name=\"email\"></form>";
        html += "</div></div>\n";
    }
    if (interstitial && rng.bernoulli(0.4)) html += "<div data-dismiss=\"modal\" tabindex=\"-1\"></div>\n";
    html += "<footer class=\"foot\"><p>footer</p></footer>\n</body>\n</html>\n";
    return html;
}

void check_spec(const SynthSpec& spec) {
    if (spec.viewport_w < 1 || spec.viewport_h < 1) throw std::invalid_argument("synth: viewport must be at least 1x1");
    if (spec.steps < 1) throw std::invalid_argument("synth: steps must be >= 1");
    if (spec.step_px < 0) throw std::invalid_argument("synth: step_px must be >= 0");
    if (!(spec.content_density >= 0.0 && spec.content_density <= 1.0)) {
        throw std::invalid_argument("synth: content_density must be in [0, 1]");
    }
    if (spec.interstitial) {
        const auto& s = *spec.interstitial;
        const auto& b = s.box;
        if (b.w < 1 || b.h < 1 || b.x < 0 || b.y < 0 || b.x + b.w > spec.viewport_w || b.y + b.h > spec.viewport_h) {
            throw std::invalid_argument("synth: interstitial box does not fit within the viewport");
        }
        if (s.border_px < 0 || 2 * s.border_px > std::min(b.w, b.h)) throw std::invalid_argument("synth: bad border_px");
        if (!(s.dim_alpha >= 0.0 && s.dim_alpha <= 1.0)) throw std::invalid_argument("synth: dim_alpha must be in [0, 1]");
    }
}

}  // namespace

corpus::CaptureBundle generate_bundle(const SynthSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);
    const int step = spec.step_px > 0 ? spec.step_px : spec.viewport_h;
    const int page_h = spec.viewport_h + step * (spec.steps - 1);
    const auto bars = layout_page(spec.viewport_w, page_h, spec.content_density, rng);

    std::vector<Rect> panel;
    if (spec.interstitial) panel = layout_panel(*spec.interstitial, rng);

    corpus::CaptureBundle bundle;
    bundle.url = "synth://" + std::to_string(spec.seed);
    bundle.viewport_w = spec.viewport_w;
    bundle.viewport_h = spec.viewport_h;
    bundle.scroll_height = page_h;
    bundle.step_px = step;
    bundle.captured_at = "1970-01-01T00:00:00Z";

    for (int k = 0; k < spec.steps; ++k) {
        RgbRaster frame(spec.viewport_w, spec.viewport_h);
        fill(frame, 0, 0, spec.viewport_w, spec.viewport_h, kPage, kPage, kPage);
        const int top = k * step;
        for (const auto& r : bars) {
            if (r.y + r.h <= top || r.y >= top + spec.viewport_h) continue;
            fill(frame, r.x, r.y - top, r.w, r.h, r.r, r.g, r.b);
        }
        if (spec.interstitial) {
            const auto& s = *spec.interstitial;
            const auto& b = s.box;
            const double keep = 1.0 - s.dim_alpha;
            for (int y = 0; y < spec.viewport_h; ++y) {
                for (int x = 0; x < spec.viewport_w; ++x) {
                    if (x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h) continue;
                    auto* p = frame.at(x, y);
                    for (int c = 0; c < 3; ++c) p[c] = static_cast<std::uint8_t>(std::lround(p[c] * keep));
                }
            }
            fill(frame, b.x, b.y, b.w, b.h, 40, 40, 40);
            fill(frame, b.x + s.border_px, b.y + s.border_px, b.w - 2 * s.border_px, b.h - 2 * s.border_px, 255, 255, 255);
            for (const auto& r : panel) fill(frame, b.x + r.x, b.y + r.y, r.w, r.h, r.r, r.g, r.b);
        }
        bundle.screenshots.push_back(std::move(frame));
    }

    if (spec.with_html) bundle.html_snapshots.push_back(random_html(spec.interstitial.has_value(), rng));
    corpus::GroundTruth truth;
    truth.has_interstitial = spec.interstitial.has_value();
    if (spec.interstitial) truth.box = spec.interstitial->box;
    bundle.truth = truth;
    return bundle;
}

InterstitialSpec random_interstitial(int viewport_w, int viewport_h, std::uint64_t seed) {
    Rng rng(seed);
    auto axis = [&](int extent, int& pos, int& len) {
        const int lo = static_cast<int>(std::ceil(kMinBoxFraction * extent));
        const int hi = std::max(lo, static_cast<int>(0.8 * extent));
        len = static_cast<int>(rng.uniform_int(lo, hi));
        // Cover [extent/4, extent - extent/4) and stay inside [0, extent).
        const int pos_lo = std::max(0, (extent - extent / 4) - len);
        const int pos_hi = std::min(extent / 4, extent - len);
        pos = static_cast<int>(rng.uniform_int(pos_lo, std::max(pos_lo, pos_hi)));
    };
    InterstitialSpec s;
    axis(viewport_w, s.box.x, s.box.w);
    axis(viewport_h, s.box.y, s.box.h);
    s.border_px = 2;
    s.dim_alpha = rng.uniform(0.4, 0.7);
    return s;
}

int scaled_votes_threshold(int viewport_w, int viewport_h) {
    const double shortest_side = std::ceil(kMinBoxFraction * std::min(viewport_w, viewport_h));
    return std::max(1, std::min(400, static_cast<int>(0.6 * shortest_side)));
}

std::vector<corpus::ManifestEntry> generate_corpus(int n, double interstitial_fraction, std::uint64_t seed,
                                                   const fs::path& out, const CorpusOptions& options) {
    if (n < 1) throw std::invalid_argument("generate_corpus: n must be >= 1");
    if (!(interstitial_fraction >= 0.0 && interstitial_fraction <= 1.0)) {
        throw std::invalid_argument("generate_corpus: interstitial_fraction must be in [0, 1]");
    }
    const auto n_yes = static_cast<int>(std::floor(n * interstitial_fraction + 0.5));
    std::vector<char> has_box(static_cast<std::size_t>(n), 0);
    std::fill(has_box.begin(), has_box.begin() + n_yes, 1);
    Rng rng(seed);
    rng.shuffle(has_box);

    fs::create_directories(out);
    std::vector<corpus::ManifestEntry> entries;
    for (int i = 0; i < n; ++i) {
        const auto bundle_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        Rng params(bundle_seed);
        SynthSpec spec;
        spec.viewport_w = options.viewport_w;
        spec.viewport_h = options.viewport_h;
        spec.steps = options.steps;
        spec.seed = bundle_seed;
        spec.content_density = params.uniform(0.5, 1.0);
        if (has_box[static_cast<std::size_t>(i)]) {
            spec.interstitial = random_interstitial(options.viewport_w, options.viewport_h, params.next());
        }
        auto bundle = generate_bundle(spec);
        char name[32];
        std::snprintf(name, sizeof(name), "bundle_%03d", i);
        bundle.url = std::string("synth://") + name;
        corpus::write_bundle(bundle, out / name);

        corpus::ManifestEntry entry;
        entry.bundle_path = name;
        entry.url = bundle.url;
        entry.truth_label = spec.interstitial ? Label::yes : Label::no;
        entries.push_back(std::move(entry));
    }
    corpus::write_manifest(entries, out / "manifest.jsonl");
    return entries;
}

}  // namespace interstitial::synth
