#include "textgen/scene.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace textgen {

namespace fs = std::filesystem;

const char* to_string(BackgroundKind kind) {
    return kind == BackgroundKind::Simple ? "simple" : "wild";
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    return s;
}

std::vector<std::string> list_images(const std::string& dir) {
    std::vector<std::string> out;
    if (dir.empty()) return out;
    if (!fs::is_directory(dir)) throw ResourceError("background directory not found: " + dir);
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = lower(e.path().extension().string());
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp")
            out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Decoded-image cache; backgrounds are reused across many samples.
const cv::Mat& load_gray_cached(const std::string& path) {
    thread_local std::unordered_map<std::string, cv::Mat> cache;
    auto it = cache.find(path);
    if (it != cache.end()) return it->second;
    if (cache.size() > 256) cache.clear();
    cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
    return cache.emplace(path, std::move(img)).first->second;
}

}  // namespace

BackgroundPool BackgroundPool::build(const std::string& simple_dir,
                                     const std::string& wild_dir,
                                     const std::string& exclusion_list_path) {
    BackgroundPool pool;
    pool.simple = list_images(simple_dir);

    std::unordered_set<std::string> excluded_stems;
    if (!exclusion_list_path.empty()) {
        std::ifstream in(exclusion_list_path);
        if (!in) throw ResourceError("cannot read exclusion list: " + exclusion_list_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) excluded_stems.insert(lower(line));
        }
    }
    for (auto& path : list_images(wild_dir)) {
        std::string stem = lower(fs::path(path).stem().string());
        if (excluded_stems.count(stem)) pool.excluded.push_back(stem);
        else pool.wild.push_back(std::move(path));
    }
    return pool;
}

cv::Mat sample_patch(const BackgroundPool& pool, BackgroundKind kind,
                     int target_w, int target_h, Rng& rng) {
    const auto& list = pool.of(kind);
    if (list.empty())
        throw ResourceError(std::string("no ") + to_string(kind) +
                            " background images available");
    if (target_w <= 0 || target_h <= 0) throw Error("patch target must be positive");

    size_t attempts = std::max<size_t>(list.size(), 4);
    for (size_t a = 0; a < attempts; ++a) {
        const std::string& path = list[rng.uniform_index(list.size())];
        const cv::Mat& img = load_gray_cached(path);
        if (img.empty()) continue;  // corrupt image: retry with another draw

        cv::Mat src = img;
        if (src.cols < target_w || src.rows < target_h) {
            double s = std::max((double)target_w / src.cols, (double)target_h / src.rows);
            cv::Size up((int)std::ceil(src.cols * s), (int)std::ceil(src.rows * s));
            cv::resize(img, src, up, 0, 0, cv::INTER_LINEAR);
        }
        int ox = (int)rng.uniform_int(0, src.cols - target_w);
        int oy = (int)rng.uniform_int(0, src.rows - target_h);
        return src(cv::Rect(ox, oy, target_w, target_h)).clone();
    }
    throw ResourceError(std::string("all ") + to_string(kind) +
                        " background images failed to decode");
}

Margins sample_margins(Rng& rng, int lo, int hi) {
    Margins m;
    m.left = (int)rng.uniform_int(lo, hi);
    m.right = (int)rng.uniform_int(lo, hi);
    m.top = (int)rng.uniform_int(lo, hi);
    m.bottom = (int)rng.uniform_int(lo, hi);
    return m;
}

cv::Mat compose(const cv::Mat& foreground, const cv::Mat& mask,
                const cv::Mat& patch, const Margins& margins) {
    CV_Assert(foreground.size() == mask.size());
    CV_Assert(patch.cols == foreground.cols + margins.left + margins.right);
    CV_Assert(patch.rows == foreground.rows + margins.top + margins.bottom);

    cv::Mat out = patch.clone();
    for (int y = 0; y < foreground.rows; ++y) {
        const uint8_t* f = foreground.ptr<uint8_t>(y);
        const uint8_t* m = mask.ptr<uint8_t>(y);
        uint8_t* o = out.ptr<uint8_t>(y + margins.top) + margins.left;
        for (int x = 0; x < foreground.cols; ++x) {
            int a = m[x];
            o[x] = (uint8_t)((o[x] * (255 - a) + f[x] * a + 127) / 255);
        }
    }
    return out;
}

cv::Mat blur(const cv::Mat& image, double sigma) {
    if (sigma <= 0.0) return image.clone();
    int radius = std::max(1, (int)std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(double)i * i / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    auto reflect = [](int i, int n) {
        // BORDER_REFLECT_101: edge pixel not repeated
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
        return i;
    };

    cv::Mat tmp(image.size(), CV_32FC1);
    for (int y = 0; y < image.rows; ++y) {
        const uint8_t* src = image.ptr<uint8_t>(y);
        float* dst = tmp.ptr<float>(y);
        for (int x = 0; x < image.cols; ++x) {
            double v = 0.0;
            for (int k = -radius; k <= radius; ++k)
                v += kernel[k + radius] * src[reflect(x + k, image.cols)];
            dst[x] = (float)v;
        }
    }
    cv::Mat out(image.size(), CV_8UC1);
    for (int y = 0; y < image.rows; ++y) {
        uint8_t* dst = out.ptr<uint8_t>(y);
        for (int x = 0; x < image.cols; ++x) {
            double v = 0.0;
            for (int k = -radius; k <= radius; ++k)
                v += kernel[k + radius] * tmp.at<float>(reflect(y + k, image.rows), x);
            dst[x] = (uint8_t)std::lround(std::clamp(v, 0.0, 255.0));
        }
    }
    return out;
}

}  // namespace textgen
