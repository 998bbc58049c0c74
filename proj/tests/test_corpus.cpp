#include <doctest.h>

#include <fstream>

#include "interstitial/corpus.hpp"
#include "interstitial/png_io.hpp"
#include "support.hpp"

using namespace interstitial;
using namespace interstitial::corpus;
namespace fs = std::filesystem;
using testing_support::solid;
using testing_support::TempDir;

namespace {

CaptureBundle small_bundle(int n) {
    CaptureBundle b;
    b.url = "https://example.test/article";
    b.viewport_w = 12;
    b.viewport_h = 8;
    b.scroll_height = 8 * n;
    b.step_px = 8;
    b.captured_at = "2016-03-01T12:00:00Z";
    for (int i = 0; i < n; ++i) b.screenshots.push_back(solid(12, 8, static_cast<std::uint8_t>(20 * i)));
    return b;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("bundle round trip") {
    TempDir tmp("bundle");
    auto b = small_bundle(3);
    b.html_snapshots = {"<html><div class=a>", "<p>", "<span id=x>"};
    b.truth = GroundTruth{true, Box{300, 200, 680, 400}};
    write_bundle(b, tmp.path() / "b");

    CHECK(fs::exists(tmp.path() / "b" / "shots" / "000.png"));
    CHECK(fs::exists(tmp.path() / "b" / "shots" / "002.png"));
    CHECK(fs::exists(tmp.path() / "b" / "html" / "001.html"));

    const auto r = read_bundle(tmp.path() / "b");
    CHECK(r.url == b.url);
    CHECK(r.viewport_w == 12);
    CHECK(r.viewport_h == 8);
    CHECK(r.scroll_height == 24);
    CHECK(r.step_px == 8);
    CHECK(r.captured_at == b.captured_at);
    CHECK(r.screenshots == b.screenshots);
    CHECK(r.html_snapshots == b.html_snapshots);
    REQUIRE(r.truth);
    CHECK(r.truth->box == Box{300, 200, 680, 400});
    CHECK(read_html_snapshots(tmp.path() / "b") == b.html_snapshots);
}

TEST_CASE("bundle without html or truth") {
    TempDir tmp("bare");
    write_bundle(small_bundle(2), tmp.path() / "b");
    const auto r = read_bundle(tmp.path() / "b");
    CHECK(r.html_snapshots.empty());
    CHECK_FALSE(r.truth);
}

TEST_CASE("malformed bundles") {
    TempDir tmp("bad");
    const auto dir = tmp.path() / "b";

    SUBCASE("empty shots directory") {
        write_bundle(small_bundle(1), dir);
        fs::remove(dir / "shots" / "000.png");
        CHECK_THROWS_AS(read_bundle(dir), BundleError);
    }
    SUBCASE("missing meta field") {
        write_bundle(small_bundle(1), dir);
        write_text(dir / "meta.json", R"({"url": "x", "viewport_w": 12})");
        try {
            read_bundle(dir);
            FAIL("expected BundleError");
        } catch (const BundleError& e) {
            CHECK(e.path() == dir / "meta.json");
            CHECK(std::string(e.what()).find("viewport_h") != std::string::npos);
        }
    }
    SUBCASE("corrupt png names the file") {
        write_bundle(small_bundle(3), dir);
        write_text(dir / "shots" / "001.png", "not a png");
        try {
            read_bundle(dir);
            FAIL("expected BundleError");
        } catch (const BundleError& e) {
            CHECK(e.path() == dir / "shots" / "001.png");
        }
    }
    SUBCASE("dimension mismatch") {
        write_bundle(small_bundle(2), dir);
        imaging::write_png(solid(13, 8, 0), dir / "shots" / "001.png");
        CHECK_THROWS_AS(read_bundle(dir), BundleError);
    }
    SUBCASE("gap in shot indices") {
        write_bundle(small_bundle(3), dir);
        fs::remove(dir / "shots" / "001.png");
        CHECK_THROWS_AS(read_bundle(dir), BundleError);
    }
    SUBCASE("steps disagree with shot count") {
        write_bundle(small_bundle(2), dir);
        imaging::write_png(solid(12, 8, 0), dir / "shots" / "002.png");
        CHECK_THROWS_AS(read_bundle(dir), BundleError);
    }
    SUBCASE("missing directory") { CHECK_THROWS_AS(read_bundle(dir), BundleError); }
    SUBCASE("writing an invalid bundle") {
        CHECK_THROWS_AS(write_bundle(CaptureBundle{}, dir), std::invalid_argument);
    }
}

TEST_CASE("dedupe_trailing") {
    const auto a = solid(4, 4, 1), b = solid(4, 4, 2), c = solid(4, 4, 3);
    auto with = [](std::vector<imaging::RgbRaster> shots) {
        CaptureBundle bundle;
        bundle.screenshots = std::move(shots);
        return bundle;
    };
    CHECK(dedupe_trailing(with({a, b, c, c, c})).screenshots == std::vector{a, b, c});
    CHECK(dedupe_trailing(with({a, a, b})).screenshots == std::vector{a, a, b});
    CHECK(dedupe_trailing(with({a, a, a})).screenshots == std::vector{a});
    CHECK(dedupe_trailing(with({a})).screenshots == std::vector{a});

    auto per_step = with({a, b, b});
    per_step.html_snapshots = {"0", "1", "2"};
    const auto once = dedupe_trailing(per_step);
    CHECK(once.html_snapshots == std::vector<std::string>{"0", "1"});
    CHECK(dedupe_trailing(once).screenshots == once.screenshots);

    auto first_only = with({a, b, b});
    first_only.html_snapshots = {"0"};
    CHECK(dedupe_trailing(first_only).html_snapshots == std::vector<std::string>{"0"});
}

TEST_CASE("manifest round trip") {
    TempDir tmp("manifest");
    const auto path = tmp.path() / "manifest.jsonl";
    const std::vector<ManifestEntry> entries = {
        {"bundle_000", "https://a.test", 1.0, Label::yes, Label::yes, std::nullopt},
        {"bundle_001", "https://b.test", 0.5, Label::unlabeled, std::nullopt, std::nullopt},
        {"/abs/bundle", "", std::nullopt, std::nullopt, Label::no, std::nullopt},
        {"broken", "", std::nullopt, std::nullopt, std::nullopt, "bad png"},
    };
    write_manifest(entries, path);
    CHECK(read_manifest(path) == entries);

    CHECK(resolve_bundle_path(entries[0], path) == tmp.path() / "bundle_000");
    CHECK(resolve_bundle_path(entries[2], path) == fs::path("/abs/bundle"));
}

TEST_CASE("manifest parsing errors") {
    TempDir tmp("manifest_err");
    const auto path = tmp.path() / "m.jsonl";

    write_text(path, "");
    CHECK(read_manifest(path).empty());

    write_text(path, "\n{\"bundle_path\": \"a\"}\n\n");
    CHECK(read_manifest(path).size() == 1);

    write_text(path, "{\"bundle_path\": \"a\"}\n{\"bundle_path\": \"b\", \"cv_score\": 0.8, \"cv_label\": \"no\"}\n");
    try {
        read_manifest(path);
        FAIL("expected ManifestError");
    } catch (const ManifestError& e) {
        CHECK(e.line() == 2);
    }

    write_text(path, "{\"url\": \"a\"}\n");
    CHECK_THROWS_AS(read_manifest(path), ManifestError);

    write_text(path, "not json\n");
    CHECK_THROWS_AS(read_manifest(path), ManifestError);

    write_text(path, "{\"bundle_path\": \"a\", \"truth_label\": \"maybe\"}\n");
    CHECK_THROWS_AS(read_manifest(path), ManifestError);

    CHECK_THROWS_AS(read_manifest(tmp.path() / "missing.jsonl"), ManifestError);
}
