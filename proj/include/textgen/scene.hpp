#pragma once

#include <opencv2/core.hpp>

#include <string>
#include <vector>

#include "textgen/common.hpp"
#include "textgen/rng.hpp"

namespace textgen {

enum class BackgroundKind { Simple, Wild };

const char* to_string(BackgroundKind kind);

// Immutable lists of candidate background images. Wild images whose file
// stem appears on the exclusion list are dropped at build time.
struct BackgroundPool {
    std::vector<std::string> simple;
    std::vector<std::string> wild;
    std::vector<std::string> excluded;  // wild stems dropped by the list

    // Either directory may be empty (""); the exclusion list path is
    // optional. Throws ResourceError for unreadable inputs.
    static BackgroundPool build(const std::string& simple_dir,
                                const std::string& wild_dir,
                                const std::string& exclusion_list_path);

    const std::vector<std::string>& of(BackgroundKind kind) const {
        return kind == BackgroundKind::Simple ? simple : wild;
    }
};

// Random grayscale crop of exactly target_w x target_h from a randomly
// chosen image of the given kind. Images smaller than the target are scaled
// up to cover first. Unreadable images are skipped with a retry.
cv::Mat sample_patch(const BackgroundPool& pool, BackgroundKind kind,
                     int target_w, int target_h, Rng& rng);

struct Margins {
    int left = 1, right = 1, top = 1, bottom = 1;
};

// Each side drawn independently from [lo, hi] (paper: 1..4 pt).
Margins sample_margins(Rng& rng, int lo = 1, int hi = 4);

// Alpha-blends the foreground onto the patch at the offset the margins
// imply. The patch must already be foreground-size plus margins.
cv::Mat compose(const cv::Mat& foreground, const cv::Mat& mask,
                const cv::Mat& patch, const Margins& margins);

// Separable Gaussian with reflective (101) borders; sigma <= 0 is identity.
cv::Mat blur(const cv::Mat& image, double sigma);

}  // namespace textgen
