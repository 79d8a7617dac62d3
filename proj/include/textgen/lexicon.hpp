#pragma once

#include <set>
#include <string>
#include <vector>

#include "textgen/common.hpp"
#include "textgen/rng.hpp"

namespace textgen {

// The word list the engine samples from, plus its derived character set.
// Immutable after construction; safe to share across workers.
struct Lexicon {
    std::vector<std::string> words;       // deduplicated, first-seen order
    std::set<char32_t> charset;           // exact union of characters in words
    std::vector<std::string> source_tags; // per-word origin (source file stem)

    size_t size() const { return words.size(); }
};

// Loads words from newline-delimited UTF-8 files, one word per line.
// Duplicates across files are merged keeping the first occurrence. Empty and
// whitespace-only lines are dropped. Throws ResourceError for unreadable
// files, Error with file+line for invalid UTF-8, and Error if nothing
// survives.
Lexicon load_lexicon(const std::vector<std::string>& paths);

// Uniform draw from the word list.
const std::string& sample_word(const Lexicon& lexicon, Rng& rng);

// Keeps round(keep_fraction * |words|) words, sampled without replacement,
// preserving original order among survivors. keep_fraction in (0,1].
Lexicon subsample_words(const Lexicon& lexicon, double keep_fraction, Rng& rng);

// Writes the canonical word list to `out`, one word per line.
void dump_lexicon(const Lexicon& lexicon, const std::string& out_path);

}  // namespace textgen
