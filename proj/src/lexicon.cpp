#include "textgen/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_set>

namespace textgen {

namespace {

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

}  // namespace

Lexicon load_lexicon(const std::vector<std::string>& paths) {
    Lexicon lex;
    std::unordered_set<std::string> seen;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ResourceError("cannot read word file: " + path);
        std::string tag = std::filesystem::path(path).stem().string();
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::vector<char32_t> cps;
            try {
                cps = utf8::decode(line);
            } catch (const Error& e) {
                throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
            // Words must carry no whitespace; strip surrounding space and
            // drop lines that are blank or have interior spaces.
            while (!cps.empty() && is_unicode_space(cps.front())) cps.erase(cps.begin());
            while (!cps.empty() && is_unicode_space(cps.back())) cps.pop_back();
            if (cps.empty()) continue;
            if (std::any_of(cps.begin(), cps.end(), is_unicode_space)) continue;
            std::string word = utf8::encode(cps);
            if (!seen.insert(word).second) continue;
            lex.words.push_back(std::move(word));
            lex.source_tags.push_back(tag);
            lex.charset.insert(cps.begin(), cps.end());
        }
    }
    if (lex.words.empty())
        throw Error("empty lexicon: no usable words in the given files");
    return lex;
}

const std::string& sample_word(const Lexicon& lexicon, Rng& rng) {
    return lexicon.words[rng.uniform_index(lexicon.words.size())];
}

Lexicon subsample_words(const Lexicon& lexicon, double keep_fraction, Rng& rng) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw Error("keep_fraction must be in (0, 1]");
    size_t n = lexicon.words.size();
    size_t keep = static_cast<size_t>(std::llround(keep_fraction * static_cast<double>(n)));
    if (keep == 0) throw Error("subsample would produce an empty lexicon");
    if (keep >= n) return lexicon;

    // Partial Fisher-Yates over indices, then restore original order.
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    for (size_t i = 0; i < keep; ++i) {
        size_t j = i + rng.uniform_index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());

    Lexicon out;
    out.words.reserve(keep);
    out.source_tags.reserve(keep);
    for (size_t i : idx) {
        out.words.push_back(lexicon.words[i]);
        out.source_tags.push_back(lexicon.source_tags[i]);
        auto cps = utf8::decode(lexicon.words[i]);
        out.charset.insert(cps.begin(), cps.end());
    }
    return out;
}

void dump_lexicon(const Lexicon& lexicon, const std::string& out_path) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ResourceError("cannot write: " + out_path);
    for (const auto& w : lexicon.words) out << w << '\n';
}

}  // namespace textgen
