#include "textgen/truetype.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

namespace textgen::ttf {

namespace {

struct Reader {
    const std::vector<uint8_t>& data;
    size_t pos = 0;

    explicit Reader(const std::vector<uint8_t>& d, size_t p = 0) : data(d), pos(p) {}

    void require(size_t n) const {
        if (pos + n > data.size()) throw Error("truncated font table");
    }
    uint8_t u8() {
        require(1);
        return data[pos++];
    }
    uint16_t u16() {
        require(2);
        uint16_t v = (uint16_t)((data[pos] << 8) | data[pos + 1]);
        pos += 2;
        return v;
    }
    int16_t s16() { return (int16_t)u16(); }
    uint32_t u32() {
        require(4);
        uint32_t v = ((uint32_t)data[pos] << 24) | ((uint32_t)data[pos + 1] << 16) |
                     ((uint32_t)data[pos + 2] << 8) | data[pos + 3];
        pos += 4;
        return v;
    }
    void skip(size_t n) {
        require(n);
        pos += n;
    }
};

struct Point {
    double x, y;
};

// One closed contour, quadratics already flattened to line segments.
using Contour = std::vector<Point>;

struct RawPoint {
    double x, y;
    bool on_curve;
};

constexpr int kMaxCompositeDepth = 6;

}  // namespace

struct FontFace::Impl {
    std::vector<uint8_t> bytes;
    std::map<uint32_t, std::pair<uint32_t, uint32_t>> tables;  // tag -> (off, len)
    int units_per_em = 1000;
    int16_t ascender = 0, descender = 0;
    bool long_loca = false;
    uint16_t num_glyphs = 0;
    uint16_t num_hmetrics = 0;
    uint32_t loca_off = 0, glyf_off = 0, glyf_len = 0, hmtx_off = 0;
    uint32_t cmap_sub_off = 0;  // offset of the chosen cmap subtable
    uint16_t cmap_format = 0;

    std::pair<uint32_t, uint32_t> table(uint32_t tag) const {
        auto it = tables.find(tag);
        if (it == tables.end()) throw Error("font missing required table");
        return it->second;
    }
    bool has_table(uint32_t tag) const { return tables.count(tag) != 0; }

    uint16_t glyph_index(char32_t cp) const;
    uint16_t hmtx_advance(uint16_t gid) const;
    // Appends this glyph's contours (font units, y-up) into out.
    void load_outline(uint16_t gid, std::vector<std::vector<RawPoint>>& out,
                      double a, double b, double c, double d, double e, double f,
                      int depth) const;
};

namespace {

constexpr uint32_t tag4(const char t[5]) {
    return ((uint32_t)(uint8_t)t[0] << 24) | ((uint32_t)(uint8_t)t[1] << 16) |
           ((uint32_t)(uint8_t)t[2] << 8) | (uint8_t)t[3];
}

std::string decode_utf16be(const uint8_t* p, size_t len) {
    std::string out;
    for (size_t i = 0; i + 1 < len; i += 2) {
        char32_t cp = (char32_t)((p[i] << 8) | p[i + 1]);
        if (cp >= 0xD800 && cp <= 0xDBFF && i + 3 < len) {
            char32_t lo = (char32_t)((p[i + 2] << 8) | p[i + 3]);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                i += 2;
            }
        }
        out += utf8::encode(cp);
    }
    return out;
}

std::string read_family_name(const FontFace::Impl& f) {
    if (!f.has_table(tag4("name"))) return {};
    auto [off, len] = f.table(tag4("name"));
    Reader r(f.bytes, off);
    r.u16();  // format
    uint16_t count = r.u16();
    uint16_t string_off = r.u16();
    std::string best;
    int best_score = -1;
    for (uint16_t i = 0; i < count; ++i) {
        uint16_t plat = r.u16(), enc = r.u16();
        r.u16();  // language
        uint16_t name_id = r.u16();
        uint16_t slen = r.u16(), soff = r.u16();
        if (name_id != 1 && name_id != 16) continue;
        size_t abs = (size_t)off + string_off + soff;
        if (abs + slen > f.bytes.size()) continue;
        int score = 0;
        if (plat == 3 && (enc == 1 || enc == 10)) score = 2;
        else if (plat == 0) score = 2;
        else if (plat == 1 && enc == 0) score = 1;
        else continue;
        if (name_id == 1) score += 4;
        if (score <= best_score) continue;
        const uint8_t* p = f.bytes.data() + abs;
        if (plat == 1) best = std::string((const char*)p, slen);
        else best = decode_utf16be(p, slen);
        best_score = score;
    }
    return best;
}

void enumerate_coverage(const FontFace::Impl& f, std::set<char32_t>& out) {
    Reader r(f.bytes, f.cmap_sub_off);
    if (f.cmap_format == 4) {
        r.skip(6);
        uint16_t segx2 = r.u16();
        r.skip(6);
        size_t end_off = r.pos;
        size_t start_off = end_off + segx2 + 2;
        for (uint16_t s = 0; s + 2 <= segx2; s += 2) {
            Reader re(f.bytes, end_off + s);
            Reader rs(f.bytes, start_off + s);
            uint16_t endc = re.u16(), startc = rs.u16();
            if (startc == 0xFFFF) continue;
            for (uint32_t c = startc; c <= endc && c < 0xFFFF; ++c) {
                if (f.glyph_index((char32_t)c) != 0) out.insert((char32_t)c);
            }
        }
    } else if (f.cmap_format == 12) {
        r.skip(12);
        uint32_t ngroups = r.u32();
        for (uint32_t g = 0; g < ngroups; ++g) {
            uint32_t startc = r.u32(), endc = r.u32();
            r.u32();  // startGlyphID
            if (endc - startc > 0x20000) throw Error("implausible cmap group");
            for (uint32_t c = startc; c <= endc; ++c) {
                if (f.glyph_index((char32_t)c) != 0) out.insert((char32_t)c);
            }
        }
    } else if (f.cmap_format == 6) {
        r.skip(6);
        uint16_t first = r.u16(), cnt = r.u16();
        for (uint16_t i = 0; i < cnt; ++i) {
            if (r.u16() != 0) out.insert((char32_t)(first + i));
        }
    } else if (f.cmap_format == 0) {
        r.skip(6);
        for (int c = 0; c < 256; ++c) {
            if (r.u8() != 0) out.insert((char32_t)c);
        }
    }
}

// ---- outline -> coverage bitmap ---------------------------------------

struct Edge {
    double x0, y0, x1, y1;  // y0 < y1 after normalization
    int dir;                // +1 if original segment goes downward in y
};

void add_edge(std::vector<Edge>& edges, Point a, Point b) {
    if (a.y == b.y) return;
    if (a.y < b.y) edges.push_back({a.x, a.y, b.x, b.y, +1});
    else edges.push_back({b.x, b.y, a.x, a.y, -1});
}

void flatten_quad(Contour& out, Point p0, Point pc, Point p1) {
    double d = std::abs(pc.x - (p0.x + p1.x) * 0.5) + std::abs(pc.y - (p0.y + p1.y) * 0.5);
    int n = std::clamp((int)std::ceil(std::sqrt(d * 2.0)), 2, 24);
    for (int i = 1; i <= n; ++i) {
        double t = (double)i / n;
        double mt = 1.0 - t;
        out.push_back({mt * mt * p0.x + 2 * mt * t * pc.x + t * t * p1.x,
                       mt * mt * p0.y + 2 * mt * t * pc.y + t * t * p1.y});
    }
}

// Flattens one raw TrueType contour (on/off flags) into a polyline contour.
Contour flatten_contour(const std::vector<RawPoint>& pts) {
    Contour out;
    if (pts.empty()) return out;
    size_t n = pts.size();

    // Find a starting on-curve point; synthesize one from midpoints if all
    // points are off-curve.
    size_t start = n;
    for (size_t i = 0; i < n; ++i) {
        if (pts[i].on_curve) {
            start = i;
            break;
        }
    }
    Point cur;
    if (start == n) {
        cur = {(pts[0].x + pts[n - 1].x) * 0.5, (pts[0].y + pts[n - 1].y) * 0.5};
        start = 0;
    } else {
        cur = {pts[start].x, pts[start].y};
        start = (start + 1) % n;
    }
    out.push_back(cur);

    Point pending{};  // last off-curve control, when have_ctrl
    bool have_ctrl = false;
    for (size_t k = 0; k <= n; ++k) {
        const RawPoint& rp = pts[(start + k) % n];
        Point p{rp.x, rp.y};
        if (k == n) {
            // close back to the first emitted point
            if (have_ctrl) flatten_quad(out, cur, pending, out.front());
            else out.push_back(out.front());
            break;
        }
        if (rp.on_curve) {
            if (have_ctrl) {
                flatten_quad(out, cur, pending, p);
                have_ctrl = false;
            } else {
                out.push_back(p);
            }
            cur = out.back();
        } else {
            if (have_ctrl) {
                Point mid{(pending.x + p.x) * 0.5, (pending.y + p.y) * 0.5};
                flatten_quad(out, cur, pending, mid);
                cur = mid;
            }
            pending = p;
            have_ctrl = true;
        }
    }
    return out;
}

// Non-zero winding scanline fill with 4x vertical supersampling and exact
// horizontal span coverage.
cv::Mat fill_coverage(const std::vector<Edge>& edges, int w, int h,
                      double ox, double oy) {
    cv::Mat acc = cv::Mat::zeros(h, w, CV_32FC1);
    constexpr int kSub = 4;
    const double weight = 1.0 / kSub;
    std::vector<std::pair<double, int>> xs;
    for (int row = 0; row < h; ++row) {
        float* arow = acc.ptr<float>(row);
        for (int s = 0; s < kSub; ++s) {
            double y = oy + row + (s + 0.5) / kSub;
            xs.clear();
            for (const Edge& e : edges) {
                if (y < e.y0 || y >= e.y1) continue;
                double t = (y - e.y0) / (e.y1 - e.y0);
                xs.emplace_back(e.x0 + t * (e.x1 - e.x0), e.dir);
            }
            if (xs.empty()) continue;
            std::sort(xs.begin(), xs.end());
            int winding = 0;
            double span_start = 0;
            for (const auto& [x, dir] : xs) {
                if (winding == 0 && dir != 0) span_start = x;
                int prev = winding;
                winding += dir;
                if (prev != 0 && winding == 0) {
                    // emit span [span_start, x)
                    double a = span_start - ox, b = x - ox;
                    a = std::max(a, 0.0);
                    b = std::min(b, (double)w);
                    if (b <= a) continue;
                    int ia = (int)std::floor(a), ib = (int)std::ceil(b);
                    for (int px = ia; px < ib; ++px) {
                        double lo = std::max(a, (double)px);
                        double hi = std::min(b, (double)px + 1);
                        if (hi > lo) arow[px] += (float)((hi - lo) * weight);
                    }
                }
            }
        }
    }
    cv::Mat out(h, w, CV_8UC1);
    for (int row = 0; row < h; ++row) {
        const float* a = acc.ptr<float>(row);
        uint8_t* o = out.ptr<uint8_t>(row);
        for (int col = 0; col < w; ++col) {
            double v = std::clamp((double)a[col], 0.0, 1.0);
            o[col] = (uint8_t)std::lround(v * 255.0);
        }
    }
    return out;
}

}  // namespace

uint16_t FontFace::Impl::glyph_index(char32_t cp) const {
    Reader r(bytes, cmap_sub_off);
    if (cmap_format == 4) {
        if (cp > 0xFFFF) return 0;
        r.skip(6);
        uint16_t segx2 = r.u16();
        r.skip(6);
        size_t end_off = r.pos;
        size_t start_off = end_off + segx2 + 2;
        size_t delta_off = start_off + segx2;
        size_t range_off = delta_off + segx2;
        for (uint16_t s = 0; s + 2 <= segx2; s += 2) {
            uint16_t endc = Reader(bytes, end_off + s).u16();
            if (cp > endc) continue;
            uint16_t startc = Reader(bytes, start_off + s).u16();
            if (cp < startc) return 0;
            int16_t delta = Reader(bytes, delta_off + s).s16();
            uint16_t range = Reader(bytes, range_off + s).u16();
            if (range == 0) return (uint16_t)((cp + delta) & 0xFFFF);
            size_t gi_off = range_off + s + range + 2 * (cp - startc);
            uint16_t gid = Reader(bytes, gi_off).u16();
            if (gid == 0) return 0;
            return (uint16_t)((gid + delta) & 0xFFFF);
        }
        return 0;
    }
    if (cmap_format == 12) {
        r.skip(12);
        uint32_t ngroups = r.u32();
        size_t base = r.pos;
        // binary search over groups
        uint32_t lo = 0, hi = ngroups;
        while (lo < hi) {
            uint32_t mid = (lo + hi) / 2;
            Reader g(bytes, base + 12ull * mid);
            uint32_t startc = g.u32(), endc = g.u32(), startg = g.u32();
            if (cp < startc) hi = mid;
            else if (cp > endc) lo = mid + 1;
            else return (uint16_t)(startg + (cp - startc));
        }
        return 0;
    }
    if (cmap_format == 6) {
        r.skip(6);
        uint16_t first = r.u16(), cnt = r.u16();
        if (cp < first || cp >= (char32_t)(first + cnt)) return 0;
        r.skip(2 * (cp - first));
        return r.u16();
    }
    if (cmap_format == 0) {
        if (cp > 255) return 0;
        r.skip(6 + cp);
        return r.u8();
    }
    return 0;
}

uint16_t FontFace::Impl::hmtx_advance(uint16_t gid) const {
    uint16_t idx = std::min<uint16_t>(gid, (uint16_t)(num_hmetrics - 1));
    Reader r(bytes, hmtx_off + 4ull * idx);
    return r.u16();
}

void FontFace::Impl::load_outline(uint16_t gid, std::vector<std::vector<RawPoint>>& out,
                                  double a, double b, double c, double d,
                                  double e, double f, int depth) const {
    if (depth > kMaxCompositeDepth) throw Error("composite glyph nesting too deep");
    if (gid >= num_glyphs) throw Error("glyph id out of range");
    uint32_t g0, g1;
    {
        Reader r(bytes, loca_off + (long_loca ? 4ull * gid : 2ull * gid));
        if (long_loca) {
            g0 = r.u32();
            g1 = r.u32();
        } else {
            g0 = 2u * r.u16();
            g1 = 2u * r.u16();
        }
    }
    if (g1 <= g0) return;  // empty glyph (e.g. space)
    if (g1 > glyf_len) throw Error("glyf entry out of bounds");

    Reader r(bytes, glyf_off + g0);
    int16_t ncont = r.s16();
    r.skip(8);  // bbox
    auto xform = [&](double x, double y) -> Point {
        return {a * x + c * y + e, b * x + d * y + f};
    };

    if (ncont >= 0) {
        std::vector<uint16_t> ends(ncont);
        for (int i = 0; i < ncont; ++i) ends[i] = r.u16();
        uint16_t npts = ncont ? (uint16_t)(ends.back() + 1) : 0;
        uint16_t ilen = r.u16();
        r.skip(ilen);
        std::vector<uint8_t> flags;
        flags.reserve(npts);
        while (flags.size() < npts) {
            uint8_t fl = r.u8();
            flags.push_back(fl);
            if (fl & 8) {
                uint8_t rep = r.u8();
                for (int k = 0; k < rep && flags.size() < npts; ++k) flags.push_back(fl);
            }
        }
        std::vector<double> px(npts), py(npts);
        int32_t v = 0;
        for (uint16_t i = 0; i < npts; ++i) {
            uint8_t fl = flags[i];
            if (fl & 2) {
                uint8_t dx = r.u8();
                v += (fl & 16) ? dx : -dx;
            } else if (!(fl & 16)) {
                v += r.s16();
            }
            px[i] = v;
        }
        v = 0;
        for (uint16_t i = 0; i < npts; ++i) {
            uint8_t fl = flags[i];
            if (fl & 4) {
                uint8_t dy = r.u8();
                v += (fl & 32) ? dy : -dy;
            } else if (!(fl & 32)) {
                v += r.s16();
            }
            py[i] = v;
        }
        uint16_t start = 0;
        for (int ci = 0; ci < ncont; ++ci) {
            std::vector<RawPoint> contour;
            for (uint16_t i = start; i <= ends[ci]; ++i) {
                Point p = xform(px[i], py[i]);
                contour.push_back({p.x, p.y, (flags[i] & 1) != 0});
            }
            start = (uint16_t)(ends[ci] + 1);
            if (contour.size() >= 2) out.push_back(std::move(contour));
        }
    } else {
        // composite
        while (true) {
            uint16_t flags16 = r.u16();
            uint16_t comp_gid = r.u16();
            double dx, dy;
            if (flags16 & 1) {  // ARG_1_AND_2_ARE_WORDS
                dx = r.s16();
                dy = r.s16();
            } else {
                dx = (int8_t)r.u8();
                dy = (int8_t)r.u8();
            }
            if (!(flags16 & 2))  // !ARGS_ARE_XY_VALUES: point matching unsupported
                throw Error("composite glyph uses point matching");
            double ca = 1, cb = 0, cc = 0, cd = 1;
            if (flags16 & 8) {  // WE_HAVE_A_SCALE
                ca = cd = r.s16() / 16384.0;
            } else if (flags16 & 0x40) {  // X_AND_Y_SCALE
                ca = r.s16() / 16384.0;
                cd = r.s16() / 16384.0;
            } else if (flags16 & 0x80) {  // 2x2
                ca = r.s16() / 16384.0;
                cb = r.s16() / 16384.0;
                cc = r.s16() / 16384.0;
                cd = r.s16() / 16384.0;
            }
            // compose child transform with the parent's
            double na = a * ca + c * cb;
            double nb = b * ca + d * cb;
            double nc = a * cc + c * cd;
            double nd = b * cc + d * cd;
            double ne = a * dx + c * dy + e;
            double nf = b * dx + d * dy + f;
            load_outline(comp_gid, out, na, nb, nc, nd, ne, nf, depth + 1);
            if (!(flags16 & 0x20)) break;  // MORE_COMPONENTS
        }
    }
}

FontFace FontFace::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot open font: " + path);
    auto impl = std::make_shared<Impl>();
    impl->bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    try {
        Reader r(impl->bytes);
        uint32_t sfnt = r.u32();
        if (sfnt == tag4("ttcf")) throw Error("font collections are not supported");
        if (sfnt == tag4("OTTO")) throw Error("CFF-flavoured OpenType is not supported");
        if (sfnt != 0x00010000 && sfnt != tag4("true"))
            throw Error("not a TrueType font");
        uint16_t ntab = r.u16();
        r.skip(6);
        for (uint16_t i = 0; i < ntab; ++i) {
            uint32_t tag = r.u32();
            r.u32();  // checksum
            uint32_t off = r.u32(), len = r.u32();
            if ((uint64_t)off + len > impl->bytes.size())
                throw Error("table extends past end of file");
            impl->tables[tag] = {off, len};
        }
        {
            auto [off, len] = impl->table(tag4("head"));
            Reader h(impl->bytes, off);
            h.skip(18);
            impl->units_per_em = h.u16();
            if (impl->units_per_em == 0) throw Error("units_per_em is zero");
            h.skip(30);
            impl->long_loca = h.s16() != 0;
        }
        {
            auto [off, len] = impl->table(tag4("maxp"));
            Reader m(impl->bytes, off);
            m.skip(4);
            impl->num_glyphs = m.u16();
        }
        {
            auto [off, len] = impl->table(tag4("hhea"));
            Reader h(impl->bytes, off);
            h.skip(4);
            impl->ascender = h.s16();
            impl->descender = h.s16();
            Reader h2(impl->bytes, off + 34);
            impl->num_hmetrics = h2.u16();
            if (impl->num_hmetrics == 0) throw Error("hhea has no metrics");
        }
        impl->hmtx_off = impl->table(tag4("hmtx")).first;
        impl->loca_off = impl->table(tag4("loca")).first;
        auto [goff, glen] = impl->table(tag4("glyf"));
        impl->glyf_off = goff;
        impl->glyf_len = glen;
        {
            auto [off, len] = impl->table(tag4("cmap"));
            Reader c(impl->bytes, off);
            c.u16();
            uint16_t n = c.u16();
            int best = -1;
            for (uint16_t i = 0; i < n; ++i) {
                uint16_t plat = c.u16(), enc = c.u16();
                uint32_t soff = c.u32();
                Reader s(impl->bytes, off + soff);
                uint16_t fmt = s.u16();
                int score;
                if (plat == 3 && enc == 10 && fmt == 12) score = 5;
                else if (plat == 0 && fmt == 12) score = 5;
                else if (plat == 3 && enc == 1 && fmt == 4) score = 4;
                else if (plat == 0 && fmt == 4) score = 3;
                else if (fmt == 4 || fmt == 12) score = 2;
                else if (fmt == 6 || fmt == 0) score = 1;
                else continue;
                if (score > best) {
                    best = score;
                    impl->cmap_sub_off = off + soff;
                    impl->cmap_format = fmt;
                }
            }
            if (best < 0) throw Error("no usable cmap subtable");
        }
    } catch (const Error& e) {
        throw ResourceError(path + ": " + e.what());
    }

    FontFace face;
    face.impl_ = impl;
    face.units_per_em_ = impl->units_per_em;
    face.family_ = read_family_name(*impl);
    if (face.family_.empty()) {
        auto slash = path.find_last_of('/');
        face.family_ = path.substr(slash == std::string::npos ? 0 : slash + 1);
    }
    try {
        enumerate_coverage(*impl, face.coverage_);
    } catch (const Error& e) {
        throw ResourceError(path + ": " + e.what());
    }
    if (face.coverage_.empty()) throw ResourceError(path + ": font maps no characters");
    return face;
}

uint16_t FontFace::glyph_index(char32_t cp) const { return impl_->glyph_index(cp); }

double FontFace::ascent_px(double px_size) const {
    return impl_->ascender * px_size / units_per_em_;
}

double FontFace::descent_px(double px_size) const {
    return -impl_->descender * px_size / units_per_em_;
}

double FontFace::advance_px_by_gid(uint16_t gid, double px_size) const {
    return impl_->hmtx_advance(gid) * px_size / units_per_em_;
}

double FontFace::advance_px(char32_t cp, double px_size) const {
    return advance_px_by_gid(impl_->glyph_index(cp), px_size);
}

GlyphBitmap FontFace::rasterize_glyph(char32_t cp, double px_size) const {
    uint16_t gid = impl_->glyph_index(cp);
    GlyphBitmap out;
    out.advance = advance_px_by_gid(gid, px_size);

    std::vector<std::vector<RawPoint>> raw;
    impl_->load_outline(gid, raw, 1, 0, 0, 1, 0, 0, 0);
    if (raw.empty()) return out;  // blank glyph

    double scale = px_size / units_per_em_;
    std::vector<Edge> edges;
    double xmin = 1e30, xmax = -1e30, ymin = 1e30, ymax = -1e30;
    for (const auto& rc : raw) {
        // to pixel space, y-down
        std::vector<RawPoint> pc;
        pc.reserve(rc.size());
        for (const auto& p : rc) {
            pc.push_back({p.x * scale, -p.y * scale, p.on_curve});
        }
        Contour flat = flatten_contour(pc);
        for (size_t i = 0; i + 1 < flat.size(); ++i) {
            add_edge(edges, flat[i], flat[i + 1]);
            xmin = std::min({xmin, flat[i].x, flat[i + 1].x});
            xmax = std::max({xmax, flat[i].x, flat[i + 1].x});
            ymin = std::min({ymin, flat[i].y, flat[i + 1].y});
            ymax = std::max({ymax, flat[i].y, flat[i + 1].y});
        }
    }
    if (edges.empty()) return out;

    int left = (int)std::floor(xmin);
    int top = (int)std::floor(ymin);
    int w = (int)std::ceil(xmax) - left;
    int h = (int)std::ceil(ymax) - top;
    if (w <= 0 || h <= 0) return out;
    if (w > 4096 || h > 4096) throw Error("glyph bitmap implausibly large");

    out.coverage = fill_coverage(edges, w, h, left, top);
    out.left = left;
    out.top = top;
    return out;
}

}  // namespace textgen::ttf
