#include <doctest.h>

#include <opencv2/core.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "textgen/curation.hpp"
#include "textgen/common.hpp"

using namespace textgen;

namespace {

std::vector<LabeledRecord> make_records(const std::vector<std::string>& labels) {
    std::vector<LabeledRecord> recs;
    for (size_t i = 0; i < labels.size(); ++i)
        recs.push_back({"img/" + std::to_string(i) + ".png", labels[i]});
    return recs;
}

// Independent validity check: every test-label character occurs in train.
void check_coverage(const std::vector<LabeledRecord>& recs, const SplitPlan& plan) {
    std::set<char32_t> train_chars;
    for (size_t i : plan.train)
        for (char32_t cp : utf8::decode(recs[i].label)) train_chars.insert(cp);
    for (size_t i : plan.test)
        for (char32_t cp : utf8::decode(recs[i].label))
            CHECK(train_chars.count(cp) == 1);
    // partition: disjoint and complete
    std::set<size_t> all(plan.train.begin(), plan.train.end());
    for (size_t i : plan.test) CHECK(all.insert(i).second);
    CHECK(all.size() == recs.size());
}

// Greedy set cover over characters: an upper bound on how many records are
// genuinely needed in train to cover every character. If records.size() minus
// that bound is >= the requested test quota, the quota is feasible.
size_t cover_upper_bound(const std::vector<LabeledRecord>& recs) {
    std::set<char32_t> uncovered;
    std::vector<std::set<char32_t>> charsets(recs.size());
    for (size_t i = 0; i < recs.size(); ++i) {
        for (char32_t cp : utf8::decode(recs[i].label)) charsets[i].insert(cp);
        uncovered.insert(charsets[i].begin(), charsets[i].end());
    }
    size_t picks = 0;
    while (!uncovered.empty()) {
        size_t best = 0, best_gain = 0;
        for (size_t i = 0; i < recs.size(); ++i) {
            size_t gain = 0;
            for (char32_t cp : charsets[i]) gain += uncovered.count(cp);
            if (gain > best_gain) best_gain = gain, best = i;
        }
        REQUIRE(best_gain > 0);
        for (char32_t cp : charsets[best]) uncovered.erase(cp);
        ++picks;
    }
    return picks;
}

}  // namespace

TEST_CASE("manifest round trip") {
    auto recs = make_records({"台北", "高雄", "台中"});
    auto path = (std::filesystem::temp_directory_path() / "cur_manifest.tsv").string();
    write_manifest(recs, path);
    auto again = read_manifest(path);
    REQUIRE(again.size() == recs.size());
    for (size_t i = 0; i < recs.size(); ++i) {
        CHECK(again[i].image_path == recs[i].image_path);
        CHECK(again[i].label == recs[i].label);
    }
    CHECK_THROWS_AS(read_manifest("/nonexistent/m.tsv"), ResourceError);
}

TEST_CASE("singleton-character records always land in train") {
    // 雄 appears exactly once; its record must be train-side
    auto recs = make_records({"台北", "台雄", "台北", "北台", "台台", "北北"});
    SplitPlan plan = split_balanced(recs, 0.5);
    check_coverage(recs, plan);
    CHECK(std::find(plan.train.begin(), plan.train.end(), 1u) != plan.train.end());
}

TEST_CASE("split hits the quota when characters are redundant") {
    std::vector<std::string> labels;
    for (int i = 0; i < 100; ++i) labels.push_back(i % 2 ? "台北" : "高雄");
    auto recs = make_records(labels);
    SplitPlan plan = split_balanced(recs, 0.3);
    check_coverage(recs, plan);
    CHECK(plan.test.size() == 30);
    CHECK(plan.train.size() == 70);
}

TEST_CASE("infeasible quota throws and names a blocking character") {
    // every record holds a unique character: nothing can go to test
    auto recs = make_records({"一", "二", "三", "四"});
    try {
        split_balanced(recs, 0.5);
        FAIL("expected Error");
    } catch (const Error& e) {
        std::string msg = e.what();
        bool named = msg.find("一") != std::string::npos ||
                     msg.find("二") != std::string::npos ||
                     msg.find("三") != std::string::npos ||
                     msg.find("四") != std::string::npos;
        CHECK(named);
    }
}

TEST_CASE("random fixtures: coverage holds and quota is met when feasible") {
    Rng rng(2024);
    const std::u32string pool = U"一二三四五六七八九十百千台北高雄中市政府路街";
    for (int trial = 0; trial < 20; ++trial) {
        size_t n = 100 + rng.uniform_index(400);
        std::vector<std::string> labels;
        for (size_t i = 0; i < n; ++i) {
            size_t len = 1 + rng.uniform_index(4);
            std::u32string w;
            for (size_t k = 0; k < len; ++k) w += pool[rng.uniform_index(pool.size())];
            labels.push_back(utf8::encode(std::vector<char32_t>(w.begin(), w.end())));
        }
        auto recs = make_records(labels);
        size_t quota = (size_t)llround(0.2 * n);
        if (recs.size() - cover_upper_bound(recs) < quota) continue;
        SplitPlan plan = split_balanced(recs, 0.2);
        check_coverage(recs, plan);
        CHECK(plan.test.size() == quota);
    }
}

TEST_CASE("split is deterministic") {
    std::vector<std::string> labels;
    Rng rng(5);
    const std::u32string pool = U"台北高雄中市政府路街一二三";
    for (int i = 0; i < 200; ++i) {
        std::u32string w;
        for (size_t k = 0; k < 1 + rng.uniform_index(3); ++k)
            w += pool[rng.uniform_index(pool.size())];
        labels.push_back(utf8::encode(std::vector<char32_t>(w.begin(), w.end())));
    }
    auto recs = make_records(labels);
    SplitPlan a = split_balanced(recs, 0.25);
    SplitPlan b = split_balanced(recs, 0.25);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
}

TEST_CASE("variants_per_record reproduces the counted formula") {
    AugmentCounts c;  // defaults 7, 24, 24, 6
    CHECK(variants_per_record(c) == 1 + (24 + 24 + 6) * 7);
    CHECK(variants_per_record(c) == 379);
    CHECK(379ull * 3251ull == 1232129ull);

    AugmentCounts small{2, 1, 1, 1};
    CHECK(variants_per_record(small) == 1 + 3 * 2);
}

TEST_CASE("plan_augment enumerates every (record, variant) pair exactly once") {
    auto recs = make_records({"台北", "高雄", "台中"});
    AugmentCounts c{2, 1, 2, 1};  // 1 + 4*2 = 9 per record
    auto plan = plan_augment(recs, c, "images");
    REQUIRE(plan.size() == 27);
    std::set<std::pair<size_t, uint64_t>> seen;
    std::set<std::string> paths;
    for (const auto& e : plan) {
        CHECK(seen.insert({e.record_index, e.variant}).second);
        CHECK(paths.insert(e.image_path).second);
        CHECK(e.variant < 9);
        CHECK(e.label == recs[e.record_index].label);
        CHECK(e.image_path.rfind("images/", 0) == 0);
    }
    // counting oracle at the published scale, without rendering
    std::vector<LabeledRecord> big(3251, {"x.png", "台"});
    CHECK(plan_augment(big, AugmentCounts{}, "i").size() == 1232129);
}

TEST_CASE("render_variant: variant 0 is the original; others differ and repeat") {
    cv::Mat img(40, 120, CV_8UC1);
    cv::randu(img, 0, 255);
    AugmentOptions opt;
    opt.seed = 77;

    cv::Mat v0 = render_variant(img, 5, 0, opt);
    CHECK(cv::countNonZero(v0 != img) == 0);

    for (uint64_t v : {1ull, 42ull, 200ull, 378ull}) {
        cv::Mat a = render_variant(img, 5, v, opt);
        cv::Mat b = render_variant(img, 5, v, opt);
        REQUIRE(a.size() == b.size());
        CHECK(cv::countNonZero(a != b) == 0);  // deterministic
        CHECK(a.total() > 0);
        bool differs = a.size() != img.size() || cv::countNonZero(a != img) > 0;
        CHECK(differs);
    }
    // different record index gives a different stream
    cv::Mat other = render_variant(img, 6, 1, opt);
    cv::Mat same = render_variant(img, 5, 1, opt);
    bool differs = other.size() != same.size() || cv::countNonZero(other != same) > 0;
    CHECK(differs);
}

TEST_CASE("variant families behave by kind: distort/stretch/perspective") {
    cv::Mat img(40, 120, CV_8UC1);
    cv::randu(img, 0, 255);
    AugmentOptions opt;
    opt.seed = 9;
    const auto& c = opt.counts;
    uint64_t per_scale = (uint64_t)(c.n_distort + c.n_stretch + c.n_perspective);

    // distortion and perspective preserve the canvas size
    for (uint64_t v : {(uint64_t)1, (uint64_t)c.n_distort,
                       (uint64_t)(c.n_distort + c.n_stretch + 1),
                       per_scale}) {
        cv::Mat out = render_variant(img, 0, v, opt);
        CHECK(out.size() == img.size());
    }

    // stretch changes exactly one axis, within the documented factor range
    std::set<std::pair<int, int>> sizes;
    for (int s = 0; s < c.n_scales; ++s) {
        uint64_t v = 1 + (uint64_t)s * per_scale + c.n_distort;  // first stretch of block s
        cv::Mat out = render_variant(img, 0, v, opt);
        bool horiz = out.rows == img.rows;
        bool vert = out.cols == img.cols;
        CHECK((horiz || vert));
        double lo = 0.75 * opt.scale_min, hi = 1.3 * opt.scale_max;
        double f = horiz ? out.cols / (double)img.cols : out.rows / (double)img.rows;
        CHECK(f >= lo - 0.05);
        CHECK(f <= hi + 0.05);
        sizes.insert({out.cols, out.rows});
    }
    CHECK(sizes.size() >= 5);  // the scale ladder actually spreads the draws
}
