#pragma once

#include <opencv2/core.hpp>

#include <array>
#include <string>
#include <vector>

#include "textgen/common.hpp"
#include "textgen/rng.hpp"
#include "textgen/truetype.hpp"

namespace textgen {

// The 14 text intensities, darkest to lightest.
struct GrayPalette {
    static constexpr std::array<uint8_t, 14> levels = {
        0x00, 0x14, 0x28, 0x3C, 0x50, 0x64, 0x78, 0x8C,
        0xA0, 0xB4, 0xC8, 0xDC, 0xF0, 0xFF};

    static bool contains(uint8_t v) {
        for (uint8_t l : levels)
            if (l == v) return true;
        return false;
    }
};

struct RegisteredFont {
    std::string font_id;  // file stem, unique within the registry
    std::string path;
    ttf::FontFace face;
};

class FontRegistry {
public:
    // Loads every parseable outline font in `dir` (non-recursive).
    // Unparseable files are skipped and reported via `skipped()`.
    static FontRegistry load(const std::string& dir);

    // Registry with exactly one font file.
    static FontRegistry single(const std::string& font_path);

    const std::vector<RegisteredFont>& fonts() const { return fonts_; }
    const std::vector<std::string>& skipped() const { return skipped_; }
    const RegisteredFont& by_id(const std::string& font_id) const;

    // Indices of fonts covering every codepoint of `word`.
    std::vector<size_t> covering(const std::vector<char32_t>& word) const;

private:
    std::vector<RegisteredFont> fonts_;
    std::vector<std::string> skipped_;
};

// (gap position, space count): `gap position` counts codepoints before the
// gap, so position 3 puts spaces between the 3rd and 4th characters.
using SpacingPlan = std::vector<std::pair<int, int>>;

struct TextStyle {
    std::string font_id;
    int size_pt = 32;          // [20, 50]; 1 pt == 1 px
    int intensity_index = 0;   // [0, 13] into GrayPalette
    int stroke_width_pt = 0;   // [0, 3]
    SpacingPlan spacing_plan;
};

// Raised when no registered font covers every character of a word.
class NoCoveringFont : public Error {
public:
    NoCoveringFont(const std::string& word, std::vector<char32_t> missing);
    const std::string word;
    const std::vector<char32_t> missing;
};

struct SpacingOptions {
    int max_gaps = 2;
    int max_spaces_per_gap = 3;
    double gap_probability = 0.25;
};

// Draws interior gap positions and per-gap space counts. Single-character
// words always get an empty plan.
SpacingPlan insert_spacing(const std::string& word, Rng& rng, const SpacingOptions& opt);

// The visual text with the plan's spaces inserted (labels never include them).
std::string spaced_text(const std::string& word, const SpacingPlan& plan);

struct StyleRanges {
    int size_min = 20, size_max = 50;
    int stroke_min = 0, stroke_max = 3;
};

// Picks a font uniformly among those covering `word`, then size, intensity
// and stroke width from their ranges. Throws NoCoveringFont.
TextStyle choose_style(const FontRegistry& registry, const std::string& word,
                       Rng& rng, const StyleRanges& ranges = {});

struct RasterResult {
    cv::Mat foreground;  // CV_8UC1, constant at the style's intensity
    cv::Mat mask;        // CV_8UC1 coverage, tight to ink + stroke
};

// Lays out the word along the baseline (spacing plan applied), rasterizes
// each glyph, applies the stroke outline as a disc dilation of the coverage
// mask, and crops tight.
RasterResult rasterize(const std::string& word, const TextStyle& style,
                       const FontRegistry& registry);

}  // namespace textgen
