#include "textgen/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace textgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return path.lexically_normal().string();
    return (base / path).lexically_normal().string();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

GenConfig GenConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    fs::path base = fs::absolute(fs::path(path)).parent_path();

    GenConfig cfg;
    try {
        if (!j.contains("lexicon")) throw ConfigError("missing required field 'lexicon'");
        for (const auto& p : j.at("lexicon"))
            cfg.lexicon_paths.push_back(resolve(base, p.get<std::string>()));
        if (!j.contains("fonts_dir")) throw ConfigError("missing required field 'fonts_dir'");
        cfg.fonts_dir = resolve(base, j.at("fonts_dir").get<std::string>());
        cfg.default_font = resolve(base, get_or<std::string>(j, "default_font", ""));

        if (j.contains("backgrounds")) {
            const auto& b = j.at("backgrounds");
            cfg.simple_dir = resolve(base, get_or<std::string>(b, "simple_dir", ""));
            cfg.wild_dir = resolve(base, get_or<std::string>(b, "wild_dir", ""));
            cfg.exclusion_list = resolve(base, get_or<std::string>(b, "exclusion_list", ""));
        }

        if (j.contains("units")) {
            const auto& u = j.at("units");
            cfg.units_simple = get_or<int>(u, "simple", 1);
            cfg.units_wild = get_or<int>(u, "wild", 0);
        }
        cfg.seed = get_or<uint64_t>(j, "seed", 0);
        cfg.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "out"));
        cfg.shard_size = get_or<int>(j, "shard_size", 10000);
        cfg.workers = get_or<int>(j, "workers", 0);
        cfg.limit = get_or<uint64_t>(j, "limit", 0);

        if (j.contains("style")) {
            const auto& s = j.at("style");
            cfg.style.size_min = get_or<int>(s, "size_min", 20);
            cfg.style.size_max = get_or<int>(s, "size_max", 50);
            cfg.style.stroke_min = get_or<int>(s, "stroke_min", 0);
            cfg.style.stroke_max = get_or<int>(s, "stroke_max", 3);
        }
        if (j.contains("spacing")) {
            const auto& s = j.at("spacing");
            cfg.spacing.max_gaps = get_or<int>(s, "max_gaps", 2);
            cfg.spacing.max_spaces_per_gap = get_or<int>(s, "max_spaces_per_gap", 3);
            cfg.spacing.gap_probability = get_or<double>(s, "gap_probability", 0.25);
        }
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            cfg.geometry.skew_min_deg = get_or<double>(g, "skew_min_deg", -7.0);
            cfg.geometry.skew_max_deg = get_or<double>(g, "skew_max_deg", 7.0);
            cfg.geometry.amp_min_px = get_or<double>(g, "amp_min_px", 0.0);
            cfg.geometry.amp_max_px = get_or<double>(g, "amp_max_px", 3.0);
            cfg.geometry.freq_min = get_or<double>(g, "freq_min", 0.5);
            cfg.geometry.freq_max = get_or<double>(g, "freq_max", 2.0);
            cfg.geometry.p_identity = get_or<double>(g, "p_identity", 0.3);
        }
        if (j.contains("blur")) {
            const auto& b = j.at("blur");
            cfg.blur.sigma_min = get_or<double>(b, "sigma_min", 0.0);
            cfg.blur.sigma_max = get_or<double>(b, "sigma_max", 1.5);
            cfg.blur.probability = get_or<double>(b, "probability", 0.5);
        }
        if (j.contains("margins")) {
            const auto& m = j.at("margins");
            cfg.margins.min_pt = get_or<int>(m, "min", 1);
            cfg.margins.max_pt = get_or<int>(m, "max", 4);
        }
        if (j.contains("ablation")) {
            const auto& a = j.at("ablation");
            cfg.ablation.no_background_diversity =
                get_or<bool>(a, "no_background_diversity", false);
            cfg.ablation.no_font_diversity = get_or<bool>(a, "no_font_diversity", false);
            cfg.ablation.no_scene_diversity = get_or<bool>(a, "no_scene_diversity", false);
            cfg.ablation.word_keep_fraction = get_or<double>(a, "word_keep_fraction", 1.0);
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

void GenConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (lexicon_paths.empty()) fail("at least one lexicon file is required");
    if (units_simple < 0 || units_wild < 0) fail("unit counts must be non-negative");
    if (units_simple + units_wild < 1) fail("n_s + n_w must be at least 1");
    if (shard_size < 1) fail("shard_size must be >= 1");
    if (workers < 0) fail("workers must be >= 0");
    if (style.size_min < 1 || style.size_min > style.size_max)
        fail("style: size range invalid");
    if (style.stroke_min < 0 || style.stroke_min > style.stroke_max)
        fail("style: stroke range invalid");
    if (spacing.max_gaps < 0 || spacing.max_spaces_per_gap < 1)
        fail("spacing: invalid gap settings");
    if (spacing.gap_probability < 0.0 || spacing.gap_probability > 1.0)
        fail("spacing: gap_probability must be in [0,1]");
    if (geometry.skew_min_deg > geometry.skew_max_deg) fail("geometry: skew range invalid");
    if (geometry.amp_min_px > geometry.amp_max_px || geometry.amp_min_px < 0.0)
        fail("geometry: amplitude range invalid");
    if (geometry.freq_min > geometry.freq_max || geometry.freq_min <= 0.0)
        fail("geometry: frequency range invalid");
    if (geometry.p_identity < 0.0 || geometry.p_identity > 1.0)
        fail("geometry: p_identity must be in [0,1]");
    if (blur.sigma_min < 0.0 || blur.sigma_min > blur.sigma_max)
        fail("blur: sigma range invalid");
    if (blur.probability < 0.0 || blur.probability > 1.0)
        fail("blur: probability must be in [0,1]");
    if (margins.min_pt < 0 || margins.min_pt > margins.max_pt)
        fail("margins: range invalid");
    if (!(ablation.word_keep_fraction > 0.0) || ablation.word_keep_fraction > 1.0)
        fail("ablation: word_keep_fraction must be in (0,1]");
    if (ablation.no_font_diversity && default_font.empty())
        fail("ablation: no_font_diversity requires 'default_font'");
}

}  // namespace textgen
