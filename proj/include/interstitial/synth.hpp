#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "interstitial/corpus.hpp"

namespace interstitial::synth {

struct InterstitialSpec {
    corpus::Box box;
    int border_px = 2;
    double dim_alpha = 0.5;
};

struct SynthSpec {
    int viewport_w = 1280;
    int viewport_h = 800;
    int steps = 6;
    /// Scroll distance per step; 0 means one viewport height.
    int step_px = 0;
    std::uint64_t seed = 0;
    std::optional<InterstitialSpec> interstitial;
    double content_density = 0.8;
    bool with_html = true;
};

/// Renders a scroll sequence over a page of text-like bars. An interstitial,
/// when present, dims everything outside its box and draws a bordered panel
/// at the same viewport position in every frame. Deterministic in the spec.
/// Throws std::invalid_argument for an invalid spec.
corpus::CaptureBundle generate_bundle(const SynthSpec& spec);

/// Random interstitial box geometry used by generate_corpus: the box spans
/// 55-80% of each viewport dimension and always covers the central
/// 50% x 50% window.
InterstitialSpec random_interstitial(int viewport_w, int viewport_h, std::uint64_t seed);

constexpr double kMinBoxFraction = 0.55;

/// Hough vote threshold suited to a viewport: min(400, 0.6 x the shortest box
/// side random_interstitial can produce).
int scaled_votes_threshold(int viewport_w, int viewport_h);

struct CorpusOptions {
    int viewport_w = 1280;
    int viewport_h = 800;
    int steps = 6;
};

/// Writes n bundles to out/bundle_NNN plus out/manifest.jsonl (bundle paths
/// relative to out). round(n * fraction) bundles carry an interstitial.
std::vector<corpus::ManifestEntry> generate_corpus(int n, double interstitial_fraction, std::uint64_t seed,
                                                   const std::filesystem::path& out, const CorpusOptions& options = {});

}  // namespace interstitial::synth
