#include "textgen/curation.hpp"

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

namespace textgen {

std::vector<LabeledRecord> read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot read manifest: " + path);
    std::vector<LabeledRecord> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected image_path<TAB>label");
        out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

void write_manifest(const std::vector<LabeledRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write manifest: " + path);
    for (const auto& r : records) out << r.image_path << '\t' << r.label << '\n';
}

SplitPlan split_balanced(const std::vector<LabeledRecord>& records,
                         double target_test_fraction) {
    if (records.empty()) throw Error("cannot split an empty record set");
    if (!(target_test_fraction > 0.0) || !(target_test_fraction < 1.0))
        throw Error("target_test_fraction must be in (0, 1)");

    const size_t n = records.size();
    std::vector<std::vector<char32_t>> chars(n);
    std::unordered_map<char32_t, int> global;
    for (size_t i = 0; i < n; ++i) {
        auto cps = utf8::decode(records[i].label);
        std::set<char32_t> uniq(cps.begin(), cps.end());
        chars[i].assign(uniq.begin(), uniq.end());
        for (char32_t c : uniq) ++global[c];
    }

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    auto rarity = [&](size_t i) {
        int r = INT32_MAX;
        for (char32_t c : chars[i]) r = std::min(r, global[c]);
        return r;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return rarity(a) < rarity(b); });

    const size_t quota = (size_t)std::llround(target_test_fraction * (double)n);
    SplitPlan plan;
    plan.target_test_fraction = target_test_fraction;
    std::set<char32_t> covered;
    std::set<char32_t> blocking;
    for (size_t i : order) {
        bool all_covered = true;
        for (char32_t c : chars[i])
            if (!covered.count(c)) all_covered = false;
        if (all_covered && plan.test.size() < quota) {
            plan.test.push_back(i);
            for (char32_t c : chars[i]) ++plan.char_counts[c].second;
        } else {
            if (!all_covered && plan.test.size() < quota)
                for (char32_t c : chars[i])
                    if (!covered.count(c)) blocking.insert(c);
            plan.train.push_back(i);
            for (char32_t c : chars[i]) {
                covered.insert(c);
                ++plan.char_counts[c].first;
            }
        }
    }
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.test.begin(), plan.test.end());

    double achieved = (double)plan.test.size() / (double)n;
    if (std::abs(achieved - target_test_fraction) > 0.02 &&
        plan.test.size() < quota) {
        std::string msg = "split quota infeasible: test fraction " +
                          std::to_string(achieved) + " vs target " +
                          std::to_string(target_test_fraction) + "; blocking characters: ";
        size_t shown = 0;
        for (char32_t c : blocking) {
            msg += utf8::encode(c);
            if (++shown >= 20) break;
        }
        throw Error(msg);
    }
    return plan;
}

uint64_t variants_per_record(const AugmentCounts& c) {
    return 1ull + (uint64_t)(c.n_distort + c.n_stretch + c.n_perspective) * (uint64_t)c.n_scales;
}

namespace {

double scale_factor(int scale_idx, const AugmentOptions& opt) {
    int n = opt.counts.n_scales;
    if (n <= 1) return (opt.scale_min + opt.scale_max) / 2.0;
    return opt.scale_min + (opt.scale_max - opt.scale_min) * scale_idx / (n - 1);
}

cv::Mat distort_sin(const cv::Mat& img, double scale, Rng& rng) {
    double amp = rng.uniform_real(1.0, 3.5) * scale;
    double freq = rng.uniform_real(0.8, 2.5);
    double phase = rng.uniform_real(0.0, 2.0 * CV_PI);
    cv::Mat mapx(img.size(), CV_32FC1), mapy(img.size(), CV_32FC1);
    for (int y = 0; y < img.rows; ++y) {
        for (int x = 0; x < img.cols; ++x) {
            mapx.at<float>(y, x) = (float)x;
            mapy.at<float>(y, x) =
                (float)(y - amp * std::sin(2.0 * CV_PI * freq * x / img.cols + phase));
        }
    }
    cv::Mat out;
    cv::remap(img, out, mapx, mapy, cv::INTER_LINEAR, cv::BORDER_REPLICATE);
    return out;
}

cv::Mat stretch_axis(const cv::Mat& img, double scale, Rng& rng) {
    bool horizontal = rng.bernoulli(0.5);
    double f = rng.uniform_real(0.75, 1.3) * scale;
    int w = horizontal ? std::max(4, (int)std::lround(img.cols * f)) : img.cols;
    int h = horizontal ? img.rows : std::max(4, (int)std::lround(img.rows * f));
    cv::Mat out;
    cv::resize(img, out, cv::Size(w, h), 0, 0, cv::INTER_LINEAR);
    return out;
}

cv::Mat perspective_warp(const cv::Mat& img, double scale, Rng& rng) {
    double jx = img.cols * 0.08 * scale, jy = img.rows * 0.12 * scale;
    auto j = [&](double amt) { return rng.uniform_real(-amt, amt); };
    cv::Point2f src[4] = {{0, 0},
                          {(float)img.cols, 0},
                          {(float)img.cols, (float)img.rows},
                          {0, (float)img.rows}};
    cv::Point2f dst[4];
    for (int i = 0; i < 4; ++i)
        dst[i] = {src[i].x + (float)j(jx), src[i].y + (float)j(jy)};
    cv::Mat m = cv::getPerspectiveTransform(src, dst);
    cv::Mat out;
    cv::warpPerspective(img, out, m, img.size(), cv::INTER_LINEAR, cv::BORDER_REPLICATE);
    return out;
}

}  // namespace

cv::Mat render_variant(const cv::Mat& image, size_t record_index, uint64_t variant,
                       const AugmentOptions& opt) {
    if (variant == 0) return image.clone();
    const auto& c = opt.counts;
    uint64_t per_scale = (uint64_t)(c.n_distort + c.n_stretch + c.n_perspective);
    uint64_t v = variant - 1;
    int scale_idx = (int)(v / per_scale);
    int j = (int)(v % per_scale);
    double scale = scale_factor(scale_idx, opt);

    Rng rng(Rng::mix(Rng::mix(opt.seed, record_index), variant));
    if (j < c.n_distort) return distort_sin(image, scale, rng);
    if (j < c.n_distort + c.n_stretch) return stretch_axis(image, scale, rng);
    return perspective_warp(image, scale, rng);
}

std::vector<AugmentedEntry> plan_augment(const std::vector<LabeledRecord>& records,
                                         const AugmentCounts& counts,
                                         const std::string& out_image_dir) {
    if (counts.n_scales < 0 || counts.n_distort < 0 || counts.n_stretch < 0 ||
        counts.n_perspective < 0)
        throw Error("augmentation counts must be non-negative");
    uint64_t per = variants_per_record(counts);
    std::vector<AugmentedEntry> out;
    out.reserve(records.size() * per);
    char buf[64];
    for (size_t i = 0; i < records.size(); ++i) {
        for (uint64_t v = 0; v < per; ++v) {
            std::snprintf(buf, sizeof(buf), "%05zu/%08zu-%04llu.png", i / 16, i,
                          (unsigned long long)v);
            out.push_back({i, v, out_image_dir + "/" + buf, records[i].label});
        }
    }
    return out;
}

}  // namespace textgen
