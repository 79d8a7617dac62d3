#include "textgen/common.hpp"

namespace textgen::utf8 {

namespace {

// Returns the decoded codepoint and advances i, or throws.
char32_t decode_one(const std::string& s, size_t& i) {
    const auto* b = reinterpret_cast<const unsigned char*>(s.data());
    unsigned char c = b[i];
    auto bad = [&]() -> char32_t {
        throw Error("invalid UTF-8 byte sequence at offset " + std::to_string(i));
    };
    if (c < 0x80) {
        i += 1;
        return c;
    }
    int len;
    char32_t cp;
    if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
    } else {
        return bad();
    }
    if (i + len > s.size()) return bad();
    for (int k = 1; k < len; ++k) {
        unsigned char cc = b[i + k];
        if ((cc & 0xC0) != 0x80) return bad();
        cp = (cp << 6) | (cc & 0x3F);
    }
    // Reject overlong forms and surrogates.
    static const char32_t min_for_len[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return bad();
    i += len;
    return cp;
}

}  // namespace

std::vector<char32_t> decode(const std::string& s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) out.push_back(decode_one(s, i));
    return out;
}

bool valid(const std::string& s) {
    try {
        size_t i = 0;
        while (i < s.size()) decode_one(s, i);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::string encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    for (char32_t cp : cps) out += encode(cp);
    return out;
}

}  // namespace textgen::utf8
