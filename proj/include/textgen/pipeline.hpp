#pragma once

#include <opencv2/core.hpp>

#include <optional>
#include <string>
#include <vector>

#include "textgen/config.hpp"
#include "textgen/geometry.hpp"
#include "textgen/lexicon.hpp"
#include "textgen/scene.hpp"
#include "textgen/typography.hpp"

namespace textgen {

struct MixPlan {
    int n_s = 0, n_w = 0;
    uint64_t unit_size = 0;
    double wild_ratio = 0.0;      // n_w / (n_s + n_w)
    uint64_t total = 0;           // (n_s + n_w) * unit_size
};

MixPlan plan_mix(int n_s, int n_w, uint64_t unit_size);

// Per-sample provenance written to the metadata sidecar.
struct SampleRecord {
    uint64_t index = 0;
    std::string label;            // the sampled word, never contains spaces
    std::string image_path;       // relative to the output dir
    BackgroundKind background = BackgroundKind::Simple;
    TextStyle style;
    GeometryParams geometry;
    Margins margins;
    double blur_sigma = 0.0;      // 0 when blur was not applied
    bool substituted = false;     // word replaced due to missing coverage
    std::string original_word;    // set when substituted
};

struct DatasetManifest {
    MixPlan mix;
    std::vector<SampleRecord> records;
};

// Everything a worker needs, built once and shared immutably.
struct Resources {
    GenConfig config;             // effective config (ablations folded in)
    Lexicon lexicon;              // effective lexicon (subsampled + coverable)
    FontRegistry registry;
    BackgroundPool pool;
    MixPlan mix;
    std::vector<std::string> rejected_words;  // no font covers them
};

// Folds the ablation flags into a plain sub-configuration:
//  - no_background_diversity: white backgrounds, black text
//  - no_font_diversity: single default font, stroke forced to 0
//  - no_scene_diversity: identity geometry, no blur
//  - word_keep_fraction < 1: lexicon subsampled (applied in prepare_resources)
GenConfig apply_ablation(const GenConfig& config);

// Loads lexicon/fonts/backgrounds, applies ablations and the word-coverage
// filter, and computes the mix plan. Throws on unusable resources.
Resources prepare_resources(const GenConfig& config);

struct RenderedSample {
    cv::Mat image;
    SampleRecord record;
};

// Renders sample `index` of the run. Deterministic in (config, index):
// the per-sample RNG stream is a splittable hash of (seed, index), the word
// is lexicon.words[index % unit_size], and the background kind is wild iff
// (index % (n_s + n_w)) >= n_s.
RenderedSample render_sample(const Resources& res, uint64_t index);

struct RunReport {
    uint64_t samples = 0;
    uint64_t substitutions = 0;
    size_t rejected_words = 0;
    size_t skipped_fonts = 0;
    double elapsed_sec = 0.0;
    double images_per_sec = 0.0;
    int workers = 1;
};

// Runs the whole pipeline: renders every sample with the configured worker
// count, writes sharded PNGs, manifest.tsv, meta.jsonl and report.txt under
// config.output_dir.
DatasetManifest generate_dataset(const GenConfig& config, RunReport* report = nullptr);

// Serialization used by generate_dataset; exposed for tests and the CLI.
void write_outputs(const DatasetManifest& manifest, const RunReport& report,
                   const std::string& output_dir);

std::string shard_image_path(uint64_t index, int shard_size);

}  // namespace textgen
