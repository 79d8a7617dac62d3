#pragma once

#include <opencv2/core.hpp>

#include <string>
#include <vector>

#include "textgen/common.hpp"

namespace textgen {

// Grayscale conversion (Rec. 601 luma) and bilinear resize to 32x100,
// aspect ratio deliberately not preserved.
cv::Mat preprocess(const cv::Mat& image);

struct EvalResult {
    double accuracy = 0.0;
    size_t total = 0;
    size_t matched = 0;
    std::vector<std::string> mismatched_ids;
};

// Exact-match word accuracy over (id, string) pairs. Raw codepoint
// equality; no unicode normalization. Throws on duplicate ids or on
// predictions without a reference (and vice versa).
EvalResult word_accuracy(const std::vector<std::pair<std::string, std::string>>& predictions,
                         const std::vector<std::pair<std::string, std::string>>& references);

}  // namespace textgen
