#include <doctest.h>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "textgen/pipeline.hpp"

using namespace textgen;
namespace fs = std::filesystem;

namespace {

const std::string kFx = FIXTURE_DIR;

// Writes a config pointing at the bundled fixtures and returns its path.
std::string write_config(const std::string& name, const std::string& extra_json,
                         int n_s = 2, int n_w = 1) {
    fs::path dir = fs::temp_directory_path() / "textgen_test";
    fs::create_directories(dir);
    fs::path p = dir / name;
    std::ofstream out(p);
    out << "{\n"
        << "  \"lexicon\": [\"" << kFx << "/words_1000.txt\"],\n"
        << "  \"fonts_dir\": \"" << kFx << "/fonts\",\n"
        << "  \"default_font\": \"" << kFx << "/fonts/fixture_sans.ttf\",\n"
        << "  \"backgrounds\": {\"simple_dir\": \"" << kFx << "/backgrounds/simple\",\n"
        << "    \"wild_dir\": \"" << kFx << "/backgrounds/wild\",\n"
        << "    \"exclusion_list\": \"" << kFx << "/cocotext_exclude.txt\"},\n"
        << "  \"units\": {\"simple\": " << n_s << ", \"wild\": " << n_w << "},\n"
        << "  \"seed\": 4242,\n"
        << "  \"shard_size\": 100\n"
        << (extra_json.empty() ? "" : ",\n" + extra_json) << "\n}\n";
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("plan_mix reproduces the reference ratio points") {
    CHECK(plan_mix(15, 5, 1).wild_ratio == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(plan_mix(5, 10, 1).wild_ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(plan_mix(10, 5, 1).wild_ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(plan_mix(25, 10, 1).wild_ratio == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
    for (int k = 1; k < 5; ++k) CHECK(plan_mix(k, 0, 10).wild_ratio == 0.0);
    CHECK(plan_mix(20, 0, 1076764).total == 21535280ull);
    CHECK_THROWS_AS(plan_mix(0, 0, 10), Error);
}

TEST_CASE("render_sample: word indexing, kind interleave, determinism") {
    GenConfig cfg = GenConfig::load(write_config("cfg_a.json", "", 1, 1));
    Resources res = prepare_resources(cfg);
    REQUIRE(res.mix.unit_size == 1000);
    REQUIRE(res.mix.total == 2000);

    for (uint64_t i : {0ull, 1ull, 7ull, 999ull, 1000ull, 1999ull}) {
        RenderedSample s = render_sample(res, i);
        CHECK(s.record.label == res.lexicon.words[i % 1000]);
        CHECK((s.record.background == BackgroundKind::Wild) == (i % 2 == 1));
        CHECK_FALSE(s.record.substituted);

        RenderedSample again = render_sample(res, i);
        REQUIRE(s.image.size() == again.image.size());
        CHECK(cv::countNonZero(s.image != again.image) == 0);
    }
    CHECK_THROWS_AS(render_sample(res, 2000), Error);
}

TEST_CASE("step-isolation: ablated pipeline equals typography + compose alone") {
    std::string extra =
        "  \"margins\": {\"min\": 1, \"max\": 1},\n"
        "  \"spacing\": {\"max_gaps\": 0, \"max_spaces_per_gap\": 1},\n"
        "  \"ablation\": {\"no_background_diversity\": true,"
        " \"no_font_diversity\": true, \"no_scene_diversity\": true}";
    GenConfig cfg = GenConfig::load(write_config("cfg_iso.json", extra, 1, 0));
    Resources res = prepare_resources(cfg);
    for (uint64_t i = 0; i < 25; ++i) {
        RenderedSample s = render_sample(res, i);
        // reference: rasterize with the recorded style, paste on white
        RasterResult r = rasterize(s.record.label, s.record.style, res.registry);
        cv::Mat white(r.mask.rows + 2, r.mask.cols + 2, CV_8UC1, cv::Scalar(255));
        cv::Mat expect = compose(r.foreground, r.mask, white, {1, 1, 1, 1});
        REQUIRE(s.image.size() == expect.size());
        CHECK(cv::countNonZero(s.image != expect) == 0);
        CHECK(s.record.style.stroke_width_pt == 0);
        CHECK(s.record.style.intensity_index == 0);
        CHECK(s.record.blur_sigma == 0.0);
        CHECK(s.record.geometry.is_identity());
    }
}

TEST_CASE("no_background_diversity: white background, black full-coverage ink") {
    std::string extra =
        "  \"ablation\": {\"no_background_diversity\": true, \"no_scene_diversity\": true}";
    GenConfig cfg = GenConfig::load(write_config("cfg_white.json", extra, 1, 0));
    Resources res = prepare_resources(cfg);
    for (uint64_t i = 0; i < 50; ++i) {
        RenderedSample s = render_sample(res, i);
        double mn, mx;
        cv::minMaxLoc(s.image, &mn, &mx);
        CHECK(mn == 0.0);    // full-coverage ink is pure black
        CHECK(mx == 255.0);  // background is pure white
        // corners carry margin >= 1, so they are background
        CHECK(s.image.at<uint8_t>(0, 0) == 255);
        CHECK(s.image.at<uint8_t>(s.image.rows - 1, s.image.cols - 1) == 255);
    }
}

TEST_CASE("word_keep_fraction shrinks the effective unit size") {
    std::string extra = "  \"ablation\": {\"word_keep_fraction\": 0.1}";
    GenConfig cfg = GenConfig::load(write_config("cfg_keep.json", extra, 2, 1));
    Resources res = prepare_resources(cfg);
    CHECK(res.mix.unit_size == 100);
    CHECK(res.mix.total == 300);
}

TEST_CASE("no ablation flags leave the effective config unchanged") {
    GenConfig cfg = GenConfig::load(write_config("cfg_plain.json", ""));
    GenConfig eff = apply_ablation(cfg);
    CHECK(eff.style.stroke_max == cfg.style.stroke_max);
    CHECK(eff.geometry.p_identity == cfg.geometry.p_identity);
    CHECK(eff.blur.probability == cfg.blur.probability);
}

TEST_CASE("uncoverable words are substituted in-stream and logged") {
    GenConfig cfg = GenConfig::load(write_config("cfg_sub.json", "", 1, 0));
    Resources res = prepare_resources(cfg);
    // smuggle an uncoverable word in after the coverage filter
    res.lexicon.words[3] = "齉齾";
    RenderedSample s = render_sample(res, 3);
    CHECK(s.record.substituted);
    CHECK(s.record.original_word == "齉齾");
    CHECK(s.record.label != "齉齾");
    CHECK(std::find(res.lexicon.words.begin(), res.lexicon.words.end(),
                    s.record.label) != res.lexicon.words.end());
}

TEST_CASE("generate_dataset: counts, determinism across reruns and workers") {
    fs::path out_base = fs::temp_directory_path() / "textgen_test" / "gen";
    fs::remove_all(out_base);
    std::string extra1 = "  \"output_dir\": \"" + (out_base / "a").string() +
                         "\",\n  \"limit\": 90,\n  \"workers\": 1";
    std::string extra2 = "  \"output_dir\": \"" + (out_base / "b").string() +
                         "\",\n  \"limit\": 90,\n  \"workers\": 3";
    GenConfig cfg1 = GenConfig::load(write_config("cfg_gen1.json", extra1, 2, 1));
    GenConfig cfg2 = GenConfig::load(write_config("cfg_gen2.json", extra2, 2, 1));

    RunReport rep;
    DatasetManifest m1 = generate_dataset(cfg1, &rep);
    DatasetManifest m2 = generate_dataset(cfg2);
    REQUIRE(m1.records.size() == 90);
    REQUIRE(m2.records.size() == 90);
    CHECK(rep.samples == 90);

    CHECK(slurp(out_base / "a" / "manifest.tsv") == slurp(out_base / "b" / "manifest.tsv"));
    CHECK(slurp(out_base / "a" / "meta.jsonl") == slurp(out_base / "b" / "meta.jsonl"));
    for (const auto& r : m1.records)
        CHECK(slurp(out_base / "a" / r.image_path) == slurp(out_base / "b" / r.image_path));

    // per-kind counts follow the interleave rule
    size_t wild = 0;
    for (const auto& r : m2.records)
        if (r.background == BackgroundKind::Wild) ++wild;
    CHECK(wild == 30);  // every third sample with (n_s, n_w) = (2, 1)

    // labels are members of the effective lexicon
    Resources res = prepare_resources(cfg1);
    std::set<std::string> lex(res.lexicon.words.begin(), res.lexicon.words.end());
    for (const auto& r : m1.records) {
        CHECK(lex.count(r.label) == 1);
        CHECK(r.label.find(' ') == std::string::npos);
    }
}

TEST_CASE("a shorter run is a byte-prefix of a longer one") {
    fs::path out_base = fs::temp_directory_path() / "textgen_test" / "prefix";
    fs::remove_all(out_base);
    std::string extra_small = "  \"output_dir\": \"" + (out_base / "small").string() +
                              "\",\n  \"limit\": 40";
    std::string extra_big = "  \"output_dir\": \"" + (out_base / "big").string() +
                            "\",\n  \"limit\": 80";
    DatasetManifest small =
        generate_dataset(GenConfig::load(write_config("cfg_p1.json", extra_small, 2, 1)));
    DatasetManifest big =
        generate_dataset(GenConfig::load(write_config("cfg_p2.json", extra_big, 2, 1)));

    std::string small_tsv = slurp(out_base / "small" / "manifest.tsv");
    std::string big_tsv = slurp(out_base / "big" / "manifest.tsv");
    CHECK(big_tsv.substr(0, small_tsv.size()) == small_tsv);
    for (size_t i = 0; i < small.records.size(); ++i)
        CHECK(slurp(out_base / "small" / small.records[i].image_path) ==
              slurp(out_base / "big" / big.records[i].image_path));
}

TEST_CASE("shard layout matches the documented pattern") {
    CHECK(shard_image_path(0, 100) == "images/shard-00000/00000000.png");
    CHECK(shard_image_path(99, 100) == "images/shard-00000/00000099.png");
    CHECK(shard_image_path(100, 100) == "images/shard-00001/00000100.png");
    CHECK(shard_image_path(1234567, 10000) == "images/shard-00123/01234567.png");
}

TEST_CASE("empty wild pool with wild units requested fails at prepare time") {
    std::string extra =
        "  \"backgrounds\": {\"simple_dir\": \"" + kFx + "/backgrounds/simple\"}";
    // overrides the default backgrounds block (later key wins in our loader)
    fs::path dir = fs::temp_directory_path() / "textgen_test";
    fs::create_directories(dir);
    fs::path p = dir / "cfg_nowild.json";
    std::ofstream out(p);
    out << "{ \"lexicon\": [\"" << kFx << "/words_1000.txt\"],\n"
        << "  \"fonts_dir\": \"" << kFx << "/fonts\",\n"
        << "  \"backgrounds\": {\"simple_dir\": \"" << kFx << "/backgrounds/simple\"},\n"
        << "  \"units\": {\"simple\": 1, \"wild\": 1} }\n";
    out.close();
    GenConfig cfg = GenConfig::load(p.string());
    CHECK_THROWS_AS(prepare_resources(cfg), ResourceError);
}
