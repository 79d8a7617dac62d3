#include "textgen/pipeline.hpp"

#include <opencv2/imgcodecs.hpp>

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace textgen {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

MixPlan plan_mix(int n_s, int n_w, uint64_t unit_size) {
    if (n_s < 0 || n_w < 0 || n_s + n_w < 1) throw Error("n_s + n_w must be >= 1");
    if (unit_size < 1) throw Error("unit_size must be >= 1");
    MixPlan mix;
    mix.n_s = n_s;
    mix.n_w = n_w;
    mix.unit_size = unit_size;
    mix.wild_ratio = (double)n_w / (double)(n_s + n_w);
    mix.total = (uint64_t)(n_s + n_w) * unit_size;
    return mix;
}

GenConfig apply_ablation(const GenConfig& config) {
    GenConfig eff = config;
    if (eff.ablation.no_font_diversity) {
        eff.style.stroke_min = 0;
        eff.style.stroke_max = 0;
    }
    if (eff.ablation.no_scene_diversity) {
        eff.geometry.p_identity = 1.0;
        eff.blur.probability = 0.0;
    }
    return eff;
}

Resources prepare_resources(const GenConfig& config) {
    Resources res{apply_ablation(config), {}, {}, {}, {}, {}};
    const GenConfig& eff = res.config;

    res.lexicon = load_lexicon(eff.lexicon_paths);
    if (eff.ablation.no_font_diversity) {
        res.registry = FontRegistry::single(eff.default_font);
    } else {
        res.registry = FontRegistry::load(eff.fonts_dir);
    }

    if (eff.ablation.word_keep_fraction < 1.0) {
        Rng rng(Rng::mix(eff.seed, 0x5e1ec7ULL));
        res.lexicon = subsample_words(res.lexicon, eff.ablation.word_keep_fraction, rng);
    }

    // Words no single font can render are rejected up front so the dataset
    // size is fixed before any rendering starts.
    {
        Lexicon kept;
        for (size_t i = 0; i < res.lexicon.words.size(); ++i) {
            auto cps = utf8::decode(res.lexicon.words[i]);
            if (res.registry.covering(cps).empty()) {
                res.rejected_words.push_back(res.lexicon.words[i]);
                continue;
            }
            kept.words.push_back(res.lexicon.words[i]);
            kept.source_tags.push_back(res.lexicon.source_tags[i]);
            kept.charset.insert(cps.begin(), cps.end());
        }
        if (kept.words.empty())
            throw ResourceError("no lexicon word is coverable by the registered fonts");
        res.lexicon = std::move(kept);
    }

    if (!eff.ablation.no_background_diversity) {
        res.pool = BackgroundPool::build(eff.simple_dir, eff.wild_dir, eff.exclusion_list);
        if (eff.units_simple > 0 && res.pool.simple.empty())
            throw ResourceError("simple units requested but the simple pool is empty");
        if (eff.units_wild > 0 && res.pool.wild.empty())
            throw ResourceError("wild units requested but the wild pool is empty "
                                "(after exclusion filtering)");
    }

    res.mix = plan_mix(eff.units_simple, eff.units_wild, res.lexicon.size());
    return res;
}

RenderedSample render_sample(const Resources& res, uint64_t index) {
    const GenConfig& cfg = res.config;
    if (index >= res.mix.total) throw Error("sample index out of range");
    Rng rng = Rng::for_index(cfg.seed, index);

    SampleRecord rec;
    rec.index = index;
    rec.background = ((index % (uint64_t)(res.mix.n_s + res.mix.n_w)) >=
                      (uint64_t)res.mix.n_s)
                         ? BackgroundKind::Wild
                         : BackgroundKind::Simple;
    std::string word = res.lexicon.words[index % res.mix.unit_size];

    // steps 2-5: spacing, font/size, intensity, stroke
    SpacingPlan plan = insert_spacing(word, rng, cfg.spacing);
    TextStyle style;
    for (int attempt = 0;; ++attempt) {
        try {
            style = choose_style(res.registry, word, rng, cfg.style);
            break;
        } catch (const NoCoveringFont&) {
            // resample a coverable word from the same stream
            if (attempt >= 200)
                throw ResourceError("could not find a coverable word after 200 draws");
            if (!rec.substituted) {
                rec.substituted = true;
                rec.original_word = word;
            }
            word = sample_word(res.lexicon, rng);
            plan = insert_spacing(word, rng, cfg.spacing);
        }
    }
    style.spacing_plan = plan;
    if (cfg.ablation.no_background_diversity) style.intensity_index = 0;
    rec.label = word;
    rec.style = style;

    RasterResult raster = rasterize(word, style, res.registry);

    // step 6: skew + distort
    if (!cfg.ablation.no_scene_diversity) {
        rec.geometry = sample_geometry(cfg.geometry, rng);
        apply_geometry(raster.foreground, raster.mask, rec.geometry);
    }

    // steps 7-8: background patch + placement margins
    rec.margins = sample_margins(rng, cfg.margins.min_pt, cfg.margins.max_pt);
    int pw = raster.foreground.cols + rec.margins.left + rec.margins.right;
    int ph = raster.foreground.rows + rec.margins.top + rec.margins.bottom;
    cv::Mat patch;
    if (cfg.ablation.no_background_diversity) {
        patch = cv::Mat(ph, pw, CV_8UC1, cv::Scalar(255));
    } else {
        patch = sample_patch(res.pool, rec.background, pw, ph, rng);
    }
    cv::Mat composed = compose(raster.foreground, raster.mask, patch, rec.margins);

    // step 9: noise
    if (!cfg.ablation.no_scene_diversity && rng.bernoulli(cfg.blur.probability)) {
        rec.blur_sigma = rng.uniform_real(cfg.blur.sigma_min, cfg.blur.sigma_max);
        composed = blur(composed, rec.blur_sigma);
    }

    rec.image_path = shard_image_path(index, cfg.shard_size);
    return {std::move(composed), std::move(rec)};
}

std::string shard_image_path(uint64_t index, int shard_size) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "images/shard-%05llu/%08llu.png",
                  (unsigned long long)(index / (uint64_t)shard_size),
                  (unsigned long long)index);
    return buf;
}

namespace {

ordered_json record_json(const SampleRecord& r) {
    ordered_json j;
    j["index"] = r.index;
    j["label"] = r.label;
    j["image_path"] = r.image_path;
    j["background"] = to_string(r.background);
    j["font_id"] = r.style.font_id;
    j["size_pt"] = r.style.size_pt;
    j["intensity"] = GrayPalette::levels[r.style.intensity_index];
    j["stroke_pt"] = r.style.stroke_width_pt;
    ordered_json gaps = ordered_json::array();
    for (const auto& [pos, n] : r.style.spacing_plan) gaps.push_back({pos, n});
    j["spacing"] = gaps;
    j["skew_deg"] = r.geometry.skew_deg;
    j["v_wave"] = {r.geometry.v_amp_px, r.geometry.v_freq, r.geometry.v_phase};
    j["h_wave"] = {r.geometry.h_amp_px, r.geometry.h_freq, r.geometry.h_phase};
    j["margins"] = {r.margins.left, r.margins.right, r.margins.top, r.margins.bottom};
    j["blur_sigma"] = r.blur_sigma;
    if (r.substituted) j["original_word"] = r.original_word;
    return j;
}

}  // namespace

void write_outputs(const DatasetManifest& manifest, const RunReport& report,
                   const std::string& output_dir) {
    fs::create_directories(output_dir);
    {
        std::ofstream tsv(fs::path(output_dir) / "manifest.tsv", std::ios::binary);
        if (!tsv) throw ResourceError("cannot write manifest.tsv");
        for (const auto& r : manifest.records)
            tsv << r.image_path << '\t' << r.label << '\n';
    }
    {
        std::ofstream meta(fs::path(output_dir) / "meta.jsonl", std::ios::binary);
        for (const auto& r : manifest.records)
            meta << record_json(r).dump() << '\n';
    }
    {
        std::ofstream rep(fs::path(output_dir) / "report.txt");
        char ratio[32];
        std::snprintf(ratio, sizeof(ratio), "%.2f", manifest.mix.wild_ratio * 100.0);
        rep << "mix: (" << manifest.mix.n_s << "," << manifest.mix.n_w << ")"
            << "  unit_size: " << manifest.mix.unit_size
            << "  wild_ratio: " << ratio << "%"
            << "  total: " << manifest.mix.total << '\n';
        rep << "samples_written: " << report.samples << '\n';
        rep << "substitutions: " << report.substitutions << '\n';
        rep << "rejected_words: " << report.rejected_words << '\n';
        rep << "skipped_fonts: " << report.skipped_fonts << '\n';
        rep << "workers: " << report.workers << '\n';
        rep << "elapsed_sec: " << report.elapsed_sec << '\n';
        rep << "images_per_sec: " << report.images_per_sec << '\n';
        rep << "images_per_min: " << report.images_per_sec * 60.0 << '\n';
    }
}

DatasetManifest generate_dataset(const GenConfig& config, RunReport* report_out) {
    auto t0 = std::chrono::steady_clock::now();
    Resources res = prepare_resources(config);
    const GenConfig& cfg = res.config;

    uint64_t total = res.mix.total;
    if (cfg.limit > 0) total = std::min(total, cfg.limit);

    fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir);
    for (uint64_t shard = 0; shard * (uint64_t)cfg.shard_size < total; ++shard) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "shard-%05llu", (unsigned long long)shard);
        fs::create_directories(out_dir / "images" / buf);
    }

    int workers = cfg.workers > 0 ? cfg.workers
                                  : std::max(1u, std::thread::hardware_concurrency());

    DatasetManifest manifest;
    manifest.mix = res.mix;
    manifest.records.resize(total);

    std::atomic<uint64_t> next{0};
    std::atomic<uint64_t> substitutions{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto worker_fn = [&]() {
        constexpr uint64_t kChunk = 32;
        std::vector<uint8_t> png;
        while (true) {
            uint64_t begin = next.fetch_add(kChunk);
            if (begin >= total) return;
            uint64_t end = std::min(begin + kChunk, total);
            for (uint64_t i = begin; i < end; ++i) {
                try {
                    RenderedSample s = render_sample(res, i);
                    png.clear();
                    if (!cv::imencode(".png", s.image, png))
                        throw Error("PNG encoding failed");
                    fs::path dst = out_dir / s.record.image_path;
                    std::ofstream f(dst, std::ios::binary);
                    if (!f) throw ResourceError("cannot write " + dst.string());
                    f.write((const char*)png.data(), (std::streamsize)png.size());
                    if (!f) throw ResourceError("short write: " + dst.string());
                    if (s.record.substituted) substitutions.fetch_add(1);
                    manifest.records[i] = std::move(s.record);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(total);
                    return;
                }
            }
        }
    };

    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker_fn);
    for (auto& t : threads) t.join();
    if (first_error) {
        // Partial shards are not a valid dataset; remove what we wrote.
        std::error_code ec;
        fs::remove_all(out_dir / "images", ec);
        std::rethrow_exception(first_error);
    }

    RunReport report;
    report.samples = total;
    report.substitutions = substitutions.load();
    report.rejected_words = res.rejected_words.size();
    report.skipped_fonts = res.registry.skipped().size();
    report.workers = workers;
    report.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.images_per_sec =
        report.elapsed_sec > 0 ? (double)total / report.elapsed_sec : 0.0;

    write_outputs(manifest, report, cfg.output_dir);
    if (report_out) *report_out = report;
    return manifest;
}

}  // namespace textgen
