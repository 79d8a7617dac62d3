#pragma once

#include <opencv2/core.hpp>

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "textgen/common.hpp"

namespace textgen::ttf {

// One rasterized glyph. `coverage` is 8-bit anti-aliased alpha. The bitmap is
// placed at (pen_x + left, baseline_y + top) in y-down pixel coordinates;
// `top` is negative for ink above the baseline.
struct GlyphBitmap {
    cv::Mat coverage;  // CV_8UC1, tight to the outline
    int left = 0;
    int top = 0;
    double advance = 0.0;  // pen advance in pixels
};

// Parses TrueType-flavoured fonts (glyf outlines, cmap formats 0/4/6/12,
// simple and composite glyphs) and rasterizes glyphs with a scanline
// non-zero-winding fill. CFF-flavoured OpenType and font collections are
// rejected.
class FontFace {
public:
    static FontFace load(const std::string& path);

    const std::string& family() const { return family_; }
    const std::set<char32_t>& coverage() const { return coverage_; }
    bool covers(char32_t cp) const { return coverage_.count(cp) != 0; }

    // 0 means "no glyph for this codepoint".
    uint16_t glyph_index(char32_t cp) const;

    int units_per_em() const { return units_per_em_; }
    double ascent_px(double px_size) const;
    double descent_px(double px_size) const;  // positive value

    double advance_px(char32_t cp, double px_size) const;
    double advance_px_by_gid(uint16_t gid, double px_size) const;

    // Throws Error if the glyph data is corrupt. An empty outline (e.g. the
    // space glyph) yields a 0x0 bitmap with the correct advance.
    GlyphBitmap rasterize_glyph(char32_t cp, double px_size) const;

    struct Impl;

private:
    FontFace() = default;

    std::shared_ptr<const Impl> impl_;
    std::string family_;
    std::set<char32_t> coverage_;
    int units_per_em_ = 0;
};

}  // namespace textgen::ttf
