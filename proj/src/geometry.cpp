#include "textgen/geometry.hpp"

#include <opencv2/imgproc.hpp>

#include <cmath>

namespace textgen {

GeometryParams sample_geometry(const GeometryRanges& r, Rng& rng) {
    GeometryParams p;
    if (rng.bernoulli(r.p_identity)) return p;
    p.skew_deg = rng.uniform_real(r.skew_min_deg, r.skew_max_deg);
    p.v_amp_px = rng.uniform_real(r.amp_min_px, r.amp_max_px);
    p.v_freq = rng.uniform_real(r.freq_min, r.freq_max);
    p.v_phase = rng.uniform_real(0.0, 2.0 * CV_PI);
    p.h_amp_px = rng.uniform_real(r.amp_min_px, r.amp_max_px);
    p.h_freq = rng.uniform_real(r.freq_min, r.freq_max);
    p.h_phase = rng.uniform_real(0.0, 2.0 * CV_PI);
    return p;
}

namespace {

// out(x, y) = in(x, y - dy(x)); pad rows are added symmetrically.
void shift_columns(const cv::Mat& in, cv::Mat& out, int pad,
                   const std::vector<double>& dy) {
    out = cv::Mat::zeros(in.rows + 2 * pad, in.cols, CV_32FC1);
    for (int y = 0; y < out.rows; ++y) {
        float* orow = out.ptr<float>(y);
        for (int x = 0; x < out.cols; ++x) {
            double sy = y - pad - dy[x];
            int y0 = (int)std::floor(sy);
            double fy = sy - y0;
            double v = 0.0;
            if (y0 >= 0 && y0 < in.rows) v += in.at<float>(y0, x) * (1.0 - fy);
            if (y0 + 1 >= 0 && y0 + 1 < in.rows) v += in.at<float>(y0 + 1, x) * fy;
            orow[x] = (float)v;
        }
    }
}

void shift_rows(const cv::Mat& in, cv::Mat& out, int pad,
                const std::vector<double>& dx) {
    out = cv::Mat::zeros(in.rows, in.cols + 2 * pad, CV_32FC1);
    for (int y = 0; y < out.rows; ++y) {
        const float* irow = in.ptr<float>(y);
        float* orow = out.ptr<float>(y);
        for (int x = 0; x < out.cols; ++x) {
            double sx = x - pad - dx[y];
            int x0 = (int)std::floor(sx);
            double fx = sx - x0;
            double v = 0.0;
            if (x0 >= 0 && x0 < in.cols) v += irow[x0] * (1.0 - fx);
            if (x0 + 1 >= 0 && x0 + 1 < in.cols) v += irow[x0 + 1] * fx;
            orow[x] = (float)v;
        }
    }
}

}  // namespace

void apply_geometry(cv::Mat& foreground, cv::Mat& mask, const GeometryParams& p) {
    if (p.is_identity()) return;

    // premultiply so resampling never bleeds undefined foreground values
    cv::Mat fgf, mf;
    foreground.convertTo(fgf, CV_32FC1);
    mask.convertTo(mf, CV_32FC1, 1.0 / 255.0);
    cv::multiply(fgf, mf, fgf);

    if (p.skew_deg != 0.0) {
        double rad = p.skew_deg * CV_PI / 180.0;
        double c = std::abs(std::cos(rad)), s = std::abs(std::sin(rad));
        int w = fgf.cols, h = fgf.rows;
        int nw = (int)std::ceil(w * c + h * s) + 2;
        int nh = (int)std::ceil(w * s + h * c) + 2;
        cv::Mat rot = cv::getRotationMatrix2D(cv::Point2f(w / 2.0f, h / 2.0f),
                                              p.skew_deg, 1.0);
        rot.at<double>(0, 2) += (nw - w) / 2.0;
        rot.at<double>(1, 2) += (nh - h) / 2.0;
        cv::warpAffine(fgf, fgf, rot, cv::Size(nw, nh), cv::INTER_LINEAR,
                       cv::BORDER_CONSTANT, cv::Scalar(0));
        cv::warpAffine(mf, mf, rot, cv::Size(nw, nh), cv::INTER_LINEAR,
                       cv::BORDER_CONSTANT, cv::Scalar(0));
    }

    if (p.v_amp_px > 0.0) {
        int pad = (int)std::ceil(p.v_amp_px) + 1;
        std::vector<double> dy(fgf.cols);
        for (int x = 0; x < fgf.cols; ++x)
            dy[x] = p.v_amp_px *
                    std::sin(2.0 * CV_PI * p.v_freq * x / fgf.cols + p.v_phase);
        cv::Mat a, b;
        shift_columns(fgf, a, pad, dy);
        shift_columns(mf, b, pad, dy);
        fgf = a;
        mf = b;
    }

    if (p.h_amp_px > 0.0) {
        int pad = (int)std::ceil(p.h_amp_px) + 1;
        std::vector<double> dx(fgf.rows);
        for (int y = 0; y < fgf.rows; ++y)
            dx[y] = p.h_amp_px *
                    std::sin(2.0 * CV_PI * p.h_freq * y / fgf.rows + p.h_phase);
        cv::Mat a, b;
        shift_rows(fgf, a, pad, dx);
        shift_rows(mf, b, pad, dx);
        fgf = a;
        mf = b;
    }

    // unpremultiply, quantize
    cv::Mat out_fg(fgf.size(), CV_8UC1, cv::Scalar(0));
    cv::Mat out_mask(fgf.size(), CV_8UC1, cv::Scalar(0));
    for (int y = 0; y < fgf.rows; ++y) {
        const float* fr = fgf.ptr<float>(y);
        const float* mr = mf.ptr<float>(y);
        uint8_t* fo = out_fg.ptr<uint8_t>(y);
        uint8_t* mo = out_mask.ptr<uint8_t>(y);
        for (int x = 0; x < fgf.cols; ++x) {
            double m = std::clamp((double)mr[x], 0.0, 1.0);
            mo[x] = (uint8_t)std::lround(m * 255.0);
            if (mo[x] > 0)
                fo[x] = (uint8_t)std::lround(std::clamp((double)fr[x] / m, 0.0, 255.0));
        }
    }

    // tighten to ink, keeping a guaranteed-empty 1 px border
    cv::Rect box = cv::boundingRect(out_mask);
    if (box.empty()) box = cv::Rect(0, 0, out_mask.cols, out_mask.rows);
    int x0 = std::max(box.x - 1, 0), y0 = std::max(box.y - 1, 0);
    int x1 = std::min(box.x + box.width + 1, out_mask.cols);
    int y1 = std::min(box.y + box.height + 1, out_mask.rows);
    cv::Rect padded(x0, y0, x1 - x0, y1 - y0);
    foreground = out_fg(padded).clone();
    mask = out_mask(padded).clone();
}

}  // namespace textgen
