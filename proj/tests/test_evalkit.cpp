#include <doctest.h>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <random>

#include "textgen/evalkit.hpp"

using namespace textgen;

using Pairs = std::vector<std::pair<std::string, std::string>>;

TEST_CASE("preprocess: fixed output geometry and type") {
    cv::Mat color(200, 640, CV_8UC3);
    cv::randu(color, 0, 255);
    cv::Mat out = preprocess(color);
    CHECK(out.rows == 32);
    CHECK(out.cols == 100);
    CHECK(out.type() == CV_8UC1);

    cv::Mat tall(500, 60, CV_8UC1, cv::Scalar(10));
    out = preprocess(tall);  // aspect ratio is deliberately not preserved
    CHECK(out.rows == 32);
    CHECK(out.cols == 100);

    CHECK_THROWS_AS(preprocess(cv::Mat()), Error);
}

TEST_CASE("preprocess: already-conforming input passes through unchanged") {
    cv::Mat ready(32, 100, CV_8UC1);
    cv::randu(ready, 0, 255);
    cv::Mat out = preprocess(ready);
    CHECK(cv::countNonZero(out != ready) == 0);
}

TEST_CASE("preprocess: grayscale conversion matches Rec. 601 luma") {
    cv::Mat bgr(32, 100, CV_8UC3, cv::Scalar(200, 100, 50));  // B, G, R
    cv::Mat out = preprocess(bgr);
    // 0.299*50 + 0.587*100 + 0.114*200 = 96.45
    int v = out.at<uint8_t>(16, 50);
    CHECK(v >= 95);
    CHECK(v <= 98);
}

TEST_CASE("word accuracy: all correct, partial, permutation invariance") {
    Pairs ref = {{"a", "台北"}, {"b", "高雄"}, {"c", "台中"}, {"d", "台南"},
                 {"e", "基隆"}, {"f", "新竹"}, {"g", "嘉義"}, {"h", "花蓮"},
                 {"i", "宜蘭"}, {"j", "屏東"}};
    Pairs perfect = ref;
    EvalResult r = word_accuracy(perfect, ref);
    CHECK(r.accuracy == 1.0);
    CHECK(r.total == 10);
    CHECK(r.matched == 10);
    CHECK(r.mismatched_ids.empty());

    Pairs partial = ref;
    partial[1].second = "高熊";
    partial[4].second = "";
    partial[7].second = "花蓮縣";
    r = word_accuracy(partial, ref);
    CHECK(r.accuracy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.matched == 7);
    REQUIRE(r.mismatched_ids.size() == 3);

    // shuffling either side must not change the result
    std::mt19937 gen(12345);
    for (int trial = 0; trial < 10; ++trial) {
        Pairs p2 = partial, ref2 = ref;
        std::shuffle(p2.begin(), p2.end(), gen);
        std::shuffle(ref2.begin(), ref2.end(), gen);
        EvalResult r2 = word_accuracy(p2, ref2);
        CHECK(r2.accuracy == doctest::Approx(0.7).epsilon(1e-12));
        auto ids = r2.mismatched_ids;
        std::sort(ids.begin(), ids.end());
        auto ids1 = r.mismatched_ids;
        std::sort(ids1.begin(), ids1.end());
        CHECK(ids == ids1);
    }
}

TEST_CASE("word accuracy: exact codepoint match, no normalization") {
    // U+00E9 (precomposed) vs 'e' + U+0301 (combining accent)
    Pairs ref = {{"1", "caf\xC3\xA9"}};
    Pairs pred = {{"1", "cafe\xCC\x81"}};
    EvalResult r = word_accuracy(pred, ref);
    CHECK(r.accuracy == 0.0);

    // full-width vs half-width digits are distinct too
    Pairs ref2 = {{"1", "１２３"}};
    Pairs pred2 = {{"1", "123"}};
    CHECK(word_accuracy(pred2, ref2).accuracy == 0.0);
}

TEST_CASE("word accuracy: id mismatches are errors") {
    Pairs ref = {{"a", "x"}, {"b", "y"}};
    CHECK_THROWS_AS(word_accuracy({{"a", "x"}}, ref), Error);                  // missing id
    CHECK_THROWS_AS(word_accuracy({{"a", "x"}, {"c", "y"}}, ref), Error);      // unknown id
    CHECK_THROWS_AS(word_accuracy({{"a", "x"}, {"a", "x"}}, ref), Error);      // dup pred
    CHECK_THROWS_AS(word_accuracy(ref, {{"a", "x"}, {"a", "y"}}), Error);      // dup ref
    CHECK_THROWS_AS(word_accuracy({}, {}), Error);                             // empty
}
