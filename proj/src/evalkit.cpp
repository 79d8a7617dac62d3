#include "textgen/evalkit.hpp"

#include <opencv2/imgproc.hpp>

#include <map>

namespace textgen {

cv::Mat preprocess(const cv::Mat& image) {
    if (image.empty()) throw Error("cannot preprocess an empty image");
    cv::Mat gray;
    if (image.channels() == 3) cv::cvtColor(image, gray, cv::COLOR_BGR2GRAY);
    else if (image.channels() == 4) cv::cvtColor(image, gray, cv::COLOR_BGRA2GRAY);
    else gray = image;
    if (gray.rows == 32 && gray.cols == 100) return gray.clone();
    cv::Mat out;
    cv::resize(gray, out, cv::Size(100, 32), 0, 0, cv::INTER_LINEAR);
    return out;
}

EvalResult word_accuracy(const std::vector<std::pair<std::string, std::string>>& predictions,
                         const std::vector<std::pair<std::string, std::string>>& references) {
    if (references.empty()) throw Error("no reference entries");
    std::map<std::string, std::string> refs;
    for (const auto& [id, text] : references) {
        if (!refs.emplace(id, text).second) throw Error("duplicate reference id: " + id);
    }
    if (predictions.size() != references.size())
        throw Error("prediction/reference counts differ");
    EvalResult res;
    res.total = references.size();
    std::map<std::string, bool> seen;
    for (const auto& [id, text] : predictions) {
        auto it = refs.find(id);
        if (it == refs.end()) throw Error("prediction id has no reference: " + id);
        if (!seen.emplace(id, true).second) throw Error("duplicate prediction id: " + id);
        if (text == it->second) ++res.matched;
        else res.mismatched_ids.push_back(id);
    }
    res.accuracy = res.total ? (double)res.matched / res.total : 0.0;
    return res;
}

}  // namespace textgen
