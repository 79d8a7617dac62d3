#pragma once

#include <opencv2/core.hpp>

#include <map>
#include <string>
#include <vector>

#include "textgen/common.hpp"
#include "textgen/rng.hpp"

namespace textgen {

struct LabeledRecord {
    std::string image_path;
    std::string label;
};

// Reads/writes the `image_path<TAB>label` manifest format.
std::vector<LabeledRecord> read_manifest(const std::string& path);
void write_manifest(const std::vector<LabeledRecord>& records, const std::string& path);

struct SplitPlan {
    std::vector<size_t> train;  // record indices
    std::vector<size_t> test;
    std::map<char32_t, std::pair<int, int>> char_counts;  // char -> (train, test)
    double target_test_fraction = 0.0;
};

// Character-balanced split. Hard constraint: every character in a test
// label also occurs in some train label. Records are assigned greedily in
// ascending order of their rarest character's global count (ties by record
// index); a record goes to test only once all its characters are covered in
// train and the test side is under quota. Singleton-character records land
// in train. Throws Error naming the blocking characters when the quota is
// infeasible.
SplitPlan split_balanced(const std::vector<LabeledRecord>& records,
                         double target_test_fraction);

struct AugmentCounts {
    int n_scales = 7;
    int n_distort = 24;
    int n_stretch = 24;
    int n_perspective = 6;
};

struct AugmentOptions {
    AugmentCounts counts;
    double scale_min = 0.8, scale_max = 1.2;
    uint64_t seed = 0;
};

// (1 + (n_distort + n_stretch + n_perspective) * n_scales) per record.
uint64_t variants_per_record(const AugmentCounts& counts);

// Renders augmentation variant `variant` of `image`. Variant 0 is the
// original; others apply one of sinusoidal distortion, axis stretch or
// four-corner perspective at one of n_scales scale factors. Fully
// deterministic in (seed, record_index, variant).
cv::Mat render_variant(const cv::Mat& image, size_t record_index, uint64_t variant,
                       const AugmentOptions& opt);

struct AugmentedEntry {
    size_t record_index;
    uint64_t variant;
    std::string image_path;  // output path
    std::string label;
};

// Expands a manifest into the full deterministic variant list. Does not
// touch pixels; rendering is the caller's loop over render_variant.
std::vector<AugmentedEntry> plan_augment(const std::vector<LabeledRecord>& records,
                                         const AugmentCounts& counts,
                                         const std::string& out_image_dir);

}  // namespace textgen
