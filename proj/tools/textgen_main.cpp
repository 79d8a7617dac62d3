// textgen: deterministic synthetic scene-text dataset engine.
//
// One binary, subcommand style; every subcommand is non-interactive and
// reproducible from its inputs alone.

#include <CLI11.hpp>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "textgen/config.hpp"
#include "textgen/curation.hpp"
#include "textgen/evalkit.hpp"
#include "textgen/lexicon.hpp"
#include "textgen/pipeline.hpp"

namespace fs = std::filesystem;
using namespace textgen;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

std::vector<std::pair<std::string, std::string>> read_id_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot read " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected id<TAB>text");
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

int cmd_generate(const std::string& config_path, int workers_override,
                 uint64_t limit_override, bool dry_run) {
    GenConfig cfg = GenConfig::load(config_path);
    if (workers_override >= 0) cfg.workers = workers_override;
    if (limit_override > 0) cfg.limit = limit_override;

    if (dry_run) {
        Resources res = prepare_resources(cfg);
        uint64_t total = cfg.limit > 0 ? std::min(res.mix.total, cfg.limit) : res.mix.total;
        std::printf("mix: (%d,%d)\n", res.mix.n_s, res.mix.n_w);
        std::printf("unit_size: %llu\n", (unsigned long long)res.mix.unit_size);
        std::printf("wild_ratio: %.2f%%\n", res.mix.wild_ratio * 100.0);
        std::printf("total: %llu\n", (unsigned long long)total);
        std::printf("rejected_words: %zu\n", res.rejected_words.size());
        std::printf("fonts: %zu (skipped %zu)\n", res.registry.fonts().size(),
                    res.registry.skipped().size());
        return 0;
    }
    RunReport report;
    DatasetManifest manifest = generate_dataset(cfg, &report);
    std::printf("wrote %llu samples to %s (%.0f images/min, %d workers)\n",
                (unsigned long long)manifest.records.size(), cfg.output_dir.c_str(),
                report.images_per_sec * 60.0, report.workers);
    return 0;
}

int cmd_preview(const std::string& config_path, int count, const std::string& out_path) {
    if (count <= 0) throw Error("--count must be positive");
    GenConfig cfg = GenConfig::load(config_path);
    Resources res = prepare_resources(cfg);

    std::vector<RenderedSample> samples;
    int max_w = 0, max_h = 0;
    for (int i = 0; i < count; ++i) {
        samples.push_back(render_sample(res, (uint64_t)i % res.mix.total));
        max_w = std::max(max_w, samples.back().image.cols);
        max_h = std::max(max_h, samples.back().image.rows);
    }

    const int caption_h = 20, pad = 4;
    int cols = (int)std::ceil(std::sqrt((double)count));
    int rows = (count + cols - 1) / cols;
    int cell_w = max_w + 2 * pad, cell_h = max_h + caption_h + 2 * pad;
    cv::Mat sheet(rows * cell_h, cols * cell_w, CV_8UC1, cv::Scalar(230));
    for (int i = 0; i < count; ++i) {
        int cx = (i % cols) * cell_w + pad, cy = (i / cols) * cell_h + pad;
        const cv::Mat& img = samples[i].image;
        img.copyTo(sheet(cv::Rect(cx, cy, img.cols, img.rows)));
        // caption: the label rendered small in the sample's own font
        try {
            TextStyle cap;
            cap.font_id = samples[i].record.style.font_id;
            cap.size_pt = 12;
            cap.intensity_index = 0;
            RasterResult r = rasterize(samples[i].record.label, cap, res.registry);
            int w = std::min(r.mask.cols, max_w), h = std::min(r.mask.rows, caption_h - 2);
            cv::Mat roi = sheet(cv::Rect(cx, cy + max_h + 2, w, h));
            cv::Mat m = r.mask(cv::Rect(0, 0, w, h));
            roi.setTo(0, m > 127);
        } catch (const Error&) {
            // caption is best-effort
        }
    }
    if (!cv::imwrite(out_path, sheet))
        throw ResourceError("cannot write contact sheet: " + out_path);
    std::printf("wrote %s (%d samples, %dx%d)\n", out_path.c_str(), count,
                sheet.cols, sheet.rows);
    return 0;
}

int cmd_split(const std::string& manifest_path, double fraction,
              const std::string& out_dir) {
    auto records = read_manifest(manifest_path);
    SplitPlan plan = split_balanced(records, fraction);
    fs::create_directories(out_dir);

    std::vector<LabeledRecord> train, test;
    for (size_t i : plan.train) train.push_back(records[i]);
    for (size_t i : plan.test) test.push_back(records[i]);
    write_manifest(train, (fs::path(out_dir) / "train.tsv").string());
    write_manifest(test, (fs::path(out_dir) / "test.tsv").string());

    std::ofstream rep(fs::path(out_dir) / "balance_report.txt");
    rep << "records: " << records.size() << "\ntrain: " << plan.train.size()
        << "\ntest: " << plan.test.size() << "\ntarget_test_fraction: " << fraction
        << "\nachieved: " << (double)plan.test.size() / records.size() << "\n\n";
    rep << "char\ttrain\ttest\n";
    for (const auto& [c, counts] : plan.char_counts)
        rep << utf8::encode(c) << '\t' << counts.first << '\t' << counts.second << '\n';
    std::printf("train: %zu  test: %zu  (target %.3f, achieved %.3f)\n",
                plan.train.size(), plan.test.size(), fraction,
                (double)plan.test.size() / records.size());
    return 0;
}

int cmd_augment(const std::string& manifest_path, const std::string& out_dir,
                const AugmentCounts& counts, double scale_min, double scale_max,
                uint64_t seed, int workers, bool write_images) {
    auto records = read_manifest(manifest_path);
    if (records.empty()) throw Error("empty input manifest");
    AugmentOptions opt{counts, scale_min, scale_max, seed};

    fs::create_directories(out_dir);
    auto plan = plan_augment(records, counts, "images");
    {
        std::vector<LabeledRecord> out_records;
        out_records.reserve(plan.size());
        for (const auto& e : plan) out_records.push_back({e.image_path, e.label});
        write_manifest(out_records, (fs::path(out_dir) / "manifest.tsv").string());
    }

    if (write_images) {
        fs::path base = fs::absolute(fs::path(manifest_path)).parent_path();
        for (size_t i = 0; i < records.size(); i += 16) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%05zu", i / 16);
            fs::create_directories(fs::path(out_dir) / "images" / buf);
        }
        if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());
        std::atomic<size_t> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker_fn = [&]() {
            cv::Mat src;
            size_t src_idx = SIZE_MAX;
            std::vector<uint8_t> png;
            while (true) {
                size_t begin = next.fetch_add(64);
                if (begin >= plan.size()) return;
                size_t end = std::min(begin + 64, plan.size());
                for (size_t k = begin; k < end; ++k) {
                    try {
                        const auto& e = plan[k];
                        if (e.record_index != src_idx) {
                            fs::path p(records[e.record_index].image_path);
                            if (p.is_relative()) p = base / p;
                            src = cv::imread(p.string(), cv::IMREAD_GRAYSCALE);
                            if (src.empty())
                                throw ResourceError("cannot read " + p.string());
                            src_idx = e.record_index;
                        }
                        cv::Mat img = render_variant(src, e.record_index, e.variant, opt);
                        png.clear();
                        cv::imencode(".png", img, png);
                        std::ofstream f(fs::path(out_dir) / e.image_path, std::ios::binary);
                        if (!f) throw ResourceError("cannot write " + e.image_path);
                        f.write((const char*)png.data(), (std::streamsize)png.size());
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        next.store(plan.size());
                        return;
                    }
                }
            }
        };
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker_fn);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    std::printf("augmented %zu records -> %zu entries%s\n", records.size(), plan.size(),
                write_images ? "" : " (manifest only)");
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& ref_path) {
    EvalResult res = word_accuracy(read_id_tsv(pred_path), read_id_tsv(ref_path));
    std::printf("word_accuracy: %.2f%%  (%zu/%zu)\n", res.accuracy * 100.0,
                res.matched, res.total);
    for (const auto& id : res.mismatched_ids) std::printf("mismatch\t%s\n", id.c_str());
    return 0;
}

int cmd_fonts_list(const std::string& dir) {
    FontRegistry reg = FontRegistry::load(dir);
    for (const auto& f : reg.fonts())
        std::printf("%s\t%s\t%zu\n", f.font_id.c_str(), f.face.family().c_str(),
                    f.face.coverage().size());
    for (const auto& s : reg.skipped())
        std::fprintf(stderr, "skipped: %s\n", s.c_str());
    return 0;
}

int cmd_pool_stats(const std::string& simple_dir, const std::string& wild_dir,
                   const std::string& exclusion) {
    BackgroundPool pool = BackgroundPool::build(simple_dir, wild_dir, exclusion);
    std::printf("simple: %zu\nwild: %zu\nexcluded: %zu\n", pool.simple.size(),
                pool.wild.size(), pool.excluded.size());
    return 0;
}

int cmd_lexicon_dump(const std::vector<std::string>& paths, const std::string& out) {
    Lexicon lex = load_lexicon(paths);
    if (!out.empty()) dump_lexicon(lex, out);
    else
        for (const auto& w : lex.words) std::printf("%s\n", w.c_str());
    std::fprintf(stderr, "words: %zu\ncharacters: %zu\n", lex.words.size(),
                 lex.charset.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic synthetic scene-text dataset engine"};
    app.require_subcommand(1);

    std::string config_path, out_path = "preview.png", manifest_path, out_dir;
    std::string pred_path, ref_path, fonts_dir, simple_dir, wild_dir, exclusion;
    std::vector<std::string> lexicon_paths;
    std::string lexicon_out;
    int workers = -1, count = 12;
    uint64_t limit = 0, seed = 0;
    bool dry_run = false, no_images = false;
    double fraction = 0.5, scale_min = 0.8, scale_max = 1.2;
    AugmentCounts counts;

    auto* gen = app.add_subcommand("generate", "render a full dataset from a config");
    gen->add_option("config", config_path)->required();
    gen->add_option("--workers", workers, "worker threads (0 = auto)");
    gen->add_option("--limit", limit, "render only the first N samples");
    gen->add_flag("--dry-run", dry_run, "print the mix plan without rendering");

    auto* prev = app.add_subcommand("preview", "render a contact sheet of samples");
    prev->add_option("config", config_path)->required();
    prev->add_option("--count", count);
    prev->add_option("--out", out_path);

    auto* spl = app.add_subcommand("split", "character-balanced train/test split");
    spl->add_option("--manifest", manifest_path)->required();
    spl->add_option("--fraction", fraction, "target test fraction");
    spl->add_option("--out-dir", out_dir)->required();

    auto* aug = app.add_subcommand("augment", "counted augmentation of a manifest");
    aug->add_option("--manifest", manifest_path)->required();
    aug->add_option("--out-dir", out_dir)->required();
    aug->add_option("--scales", counts.n_scales);
    aug->add_option("--distort", counts.n_distort);
    aug->add_option("--stretch", counts.n_stretch);
    aug->add_option("--perspective", counts.n_perspective);
    aug->add_option("--scale-min", scale_min);
    aug->add_option("--scale-max", scale_max);
    aug->add_option("--seed", seed);
    aug->add_option("--workers", workers);
    aug->add_flag("--no-images", no_images, "write only the output manifest");

    auto* ev = app.add_subcommand("eval", "exact-match word accuracy of two id TSVs");
    ev->add_option("--pred", pred_path)->required();
    ev->add_option("--ref", ref_path)->required();

    auto* fonts = app.add_subcommand("fonts", "font registry tools");
    auto* fonts_list = fonts->add_subcommand("list", "list id, family, coverage size");
    fonts_list->add_option("dir", fonts_dir)->required();

    auto* pool = app.add_subcommand("pool", "background pool tools");
    auto* pool_stats = pool->add_subcommand("stats", "report pool counts and exclusions");
    pool_stats->add_option("--simple", simple_dir);
    pool_stats->add_option("--wild", wild_dir);
    pool_stats->add_option("--exclusion", exclusion);

    auto* lex = app.add_subcommand("lexicon", "lexicon tools");
    auto* lex_dump = lex->add_subcommand("dump", "canonical deduplicated word list");
    lex_dump->add_option("files", lexicon_paths)->required();
    lex_dump->add_option("--out", lexicon_out);

    auto* val = app.add_subcommand("validate-config", "parse and validate a config");
    val->add_option("config", config_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_generate(config_path, workers, limit, dry_run);
        if (prev->parsed()) return cmd_preview(config_path, count, out_path);
        if (spl->parsed()) return cmd_split(manifest_path, fraction, out_dir);
        if (aug->parsed())
            return cmd_augment(manifest_path, out_dir, counts, scale_min, scale_max,
                               seed, workers, !no_images);
        if (ev->parsed()) return cmd_eval(pred_path, ref_path);
        if (fonts_list->parsed()) return cmd_fonts_list(fonts_dir);
        if (pool_stats->parsed()) return cmd_pool_stats(simple_dir, wild_dir, exclusion);
        if (lex_dump->parsed()) return cmd_lexicon_dump(lexicon_paths, lexicon_out);
        if (val->parsed()) {
            GenConfig::load(config_path);
            std::printf("ok\n");
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ResourceError& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return kExitResource;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
