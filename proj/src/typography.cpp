#include "textgen/typography.hpp"

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

namespace textgen {

namespace fs = std::filesystem;

FontRegistry FontRegistry::load(const std::string& dir) {
    FontRegistry reg;
    if (!fs::is_directory(dir)) throw ResourceError("font directory not found: " + dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".ttf" || ext == ".otf" || ext == ".ttc")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
        try {
            reg.fonts_.push_back({p.stem().string(), p.string(), ttf::FontFace::load(p.string())});
        } catch (const Error& e) {
            reg.skipped_.push_back(e.what());
        }
    }
    if (reg.fonts_.empty())
        throw ResourceError("no usable fonts in " + dir);
    return reg;
}

FontRegistry FontRegistry::single(const std::string& font_path) {
    FontRegistry reg;
    fs::path p(font_path);
    reg.fonts_.push_back({p.stem().string(), font_path, ttf::FontFace::load(font_path)});
    return reg;
}

const RegisteredFont& FontRegistry::by_id(const std::string& font_id) const {
    for (const auto& f : fonts_)
        if (f.font_id == font_id) return f;
    throw Error("unknown font id: " + font_id);
}

std::vector<size_t> FontRegistry::covering(const std::vector<char32_t>& word) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < fonts_.size(); ++i) {
        bool ok = true;
        for (char32_t cp : word) {
            if (!fonts_[i].face.covers(cp)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(i);
    }
    return out;
}

NoCoveringFont::NoCoveringFont(const std::string& w, std::vector<char32_t> m)
    : Error("no registered font covers word \"" + w + "\" (missing: " +
            [&m] {
                std::string s;
                for (char32_t cp : m) s += utf8::encode(cp);
                return s;
            }() +
            ")"),
      word(w),
      missing(std::move(m)) {}

SpacingPlan insert_spacing(const std::string& word, Rng& rng, const SpacingOptions& opt) {
    auto cps = utf8::decode(word);
    SpacingPlan plan;
    int interior = (int)cps.size() - 1;
    if (interior < 1 || opt.max_gaps < 1) return plan;

    int n_gaps = 0;
    for (int i = 0; i < opt.max_gaps; ++i)
        if (rng.bernoulli(opt.gap_probability)) ++n_gaps;
    n_gaps = std::min(n_gaps, interior);
    if (n_gaps == 0) return plan;

    // distinct interior positions in 1..interior
    std::vector<int> positions(interior);
    for (int i = 0; i < interior; ++i) positions[i] = i + 1;
    for (int i = 0; i < n_gaps; ++i) {
        int j = i + (int)rng.uniform_index(positions.size() - i);
        std::swap(positions[i], positions[j]);
    }
    positions.resize(n_gaps);
    std::sort(positions.begin(), positions.end());
    for (int pos : positions)
        plan.emplace_back(pos, (int)rng.uniform_int(1, opt.max_spaces_per_gap));
    return plan;
}

std::string spaced_text(const std::string& word, const SpacingPlan& plan) {
    auto cps = utf8::decode(word);
    std::string out;
    size_t pi = 0;
    for (size_t i = 0; i < cps.size(); ++i) {
        if (pi < plan.size() && plan[pi].first == (int)i) {
            out.append(plan[pi].second, ' ');
            ++pi;
        }
        out += utf8::encode(cps[i]);
    }
    return out;
}

TextStyle choose_style(const FontRegistry& registry, const std::string& word,
                       Rng& rng, const StyleRanges& ranges) {
    auto cps = utf8::decode(word);
    auto candidates = registry.covering(cps);
    if (candidates.empty()) {
        std::set<char32_t> missing;
        for (char32_t cp : cps) {
            bool anywhere = false;
            for (const auto& f : registry.fonts())
                if (f.face.covers(cp)) {
                    anywhere = true;
                    break;
                }
            if (!anywhere) missing.insert(cp);
        }
        throw NoCoveringFont(word, {missing.begin(), missing.end()});
    }
    TextStyle style;
    style.font_id = registry.fonts()[candidates[rng.uniform_index(candidates.size())]].font_id;
    style.size_pt = (int)rng.uniform_int(ranges.size_min, ranges.size_max);
    style.intensity_index = (int)rng.uniform_int(0, (int)GrayPalette::levels.size() - 1);
    style.stroke_width_pt = (int)rng.uniform_int(ranges.stroke_min, ranges.stroke_max);
    return style;
}

namespace {

double space_advance(const ttf::FontFace& face, double px) {
    if (face.covers(U'　')) return face.advance_px(U'　', px);
    if (face.covers(U' ')) return face.advance_px(U' ', px);
    return px;
}

}  // namespace

RasterResult rasterize(const std::string& word, const TextStyle& style,
                       const FontRegistry& registry) {
    const ttf::FontFace& face = registry.by_id(style.font_id).face;
    auto cps = utf8::decode(word);
    double px = style.size_pt;

    struct Placed {
        ttf::GlyphBitmap g;
        int x;
    };
    std::vector<Placed> placed;
    double pen = 0.0;
    size_t pi = 0;
    for (size_t i = 0; i < cps.size(); ++i) {
        if (pi < style.spacing_plan.size() && style.spacing_plan[pi].first == (int)i) {
            pen += style.spacing_plan[pi].second * space_advance(face, px);
            ++pi;
        }
        if (!face.covers(cps[i]))
            throw Error("glyph missing at raster time for codepoint " +
                        std::to_string((uint32_t)cps[i]));
        ttf::GlyphBitmap g = face.rasterize_glyph(cps[i], px);
        double adv = g.advance;
        if (!g.coverage.empty()) placed.push_back({std::move(g), (int)std::lround(pen)});
        pen += adv;
    }
    if (placed.empty())
        throw Error("word \"" + word + "\" produced no ink");

    int x0 = INT32_MAX, y0 = INT32_MAX, x1 = INT32_MIN, y1 = INT32_MIN;
    for (const auto& p : placed) {
        x0 = std::min(x0, p.x + p.g.left);
        y0 = std::min(y0, p.g.top);
        x1 = std::max(x1, p.x + p.g.left + p.g.coverage.cols);
        y1 = std::max(y1, p.g.top + p.g.coverage.rows);
    }
    int r = style.stroke_width_pt;  // stroke radius in px
    int w = x1 - x0 + 2 * r, h = y1 - y0 + 2 * r;
    cv::Mat mask = cv::Mat::zeros(h, w, CV_8UC1);
    for (const auto& p : placed) {
        cv::Rect roi(p.x + p.g.left - x0 + r, p.g.top - y0 + r,
                     p.g.coverage.cols, p.g.coverage.rows);
        cv::Mat view = mask(roi);
        cv::max(view, p.g.coverage, view);
    }
    if (r > 0) {
        cv::Mat kernel = cv::getStructuringElement(cv::MORPH_ELLIPSE,
                                                   cv::Size(2 * r + 1, 2 * r + 1));
        cv::dilate(mask, mask, kernel);
    }

    // crop tight to ink
    cv::Rect box = cv::boundingRect(mask);
    if (box.empty()) throw Error("rasterization produced an empty mask");
    RasterResult out;
    out.mask = mask(box).clone();
    out.foreground = cv::Mat(out.mask.size(), CV_8UC1,
                             cv::Scalar(GrayPalette::levels[style.intensity_index]));
    return out;
}

}  // namespace textgen
