#pragma once

#include <opencv2/core.hpp>

#include "textgen/rng.hpp"

namespace textgen {

// Skew plus sinusoidal warps. Zero everywhere means the identity transform.
struct GeometryParams {
    double skew_deg = 0.0;
    double v_amp_px = 0.0;  // per-column vertical displacement amplitude
    double v_freq = 1.0;    // periods across the image width
    double v_phase = 0.0;
    double h_amp_px = 0.0;  // per-row horizontal displacement amplitude
    double h_freq = 1.0;
    double h_phase = 0.0;

    bool is_identity() const {
        return skew_deg == 0.0 && v_amp_px == 0.0 && h_amp_px == 0.0;
    }
};

struct GeometryRanges {
    double skew_min_deg = -7.0, skew_max_deg = 7.0;
    double amp_min_px = 0.0, amp_max_px = 3.0;
    double freq_min = 0.5, freq_max = 2.0;
    double p_identity = 0.3;
};

GeometryParams sample_geometry(const GeometryRanges& ranges, Rng& rng);

// Rotates about the image center, then displaces columns vertically and rows
// horizontally by sine waves. The canvas grows so no ink is clipped; the
// mask goes through the identical displacement fields. Identity params
// return the inputs untouched.
void apply_geometry(cv::Mat& foreground, cv::Mat& mask, const GeometryParams& params);

}  // namespace textgen
