#pragma once

#include <string>
#include <vector>

#include "textgen/common.hpp"
#include "textgen/geometry.hpp"
#include "textgen/typography.hpp"

namespace textgen {

struct BlurOptions {
    double sigma_min = 0.0, sigma_max = 1.5;
    double probability = 0.5;
};

struct MarginOptions {
    int min_pt = 1, max_pt = 4;
};

struct AblationFlags {
    bool no_background_diversity = false;
    bool no_font_diversity = false;
    bool no_scene_diversity = false;
    double word_keep_fraction = 1.0;
};

// The full declarative recipe for one generation run. All paths are
// resolved relative to the config file's directory at load time.
struct GenConfig {
    std::vector<std::string> lexicon_paths;
    std::string fonts_dir;
    std::string default_font;  // used when no_font_diversity is set
    std::string simple_dir, wild_dir, exclusion_list;

    int units_simple = 1;  // n_s
    int units_wild = 0;    // n_w
    uint64_t seed = 0;
    std::string output_dir = "out";
    int shard_size = 10000;
    int workers = 0;        // 0 = hardware concurrency
    uint64_t limit = 0;     // 0 = all samples; otherwise a prefix

    StyleRanges style;
    SpacingOptions spacing;
    GeometryRanges geometry;
    BlurOptions blur;
    MarginOptions margins;
    AblationFlags ablation;

    // Throws ConfigError with a diagnostic anchored to the config file.
    static GenConfig load(const std::string& path);
    void validate() const;
};

}  // namespace textgen
