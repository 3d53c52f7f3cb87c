#include "deepads/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "deepads/errors.hpp"
#include "deepads/io.hpp"
#include "deepads/rng.hpp"

namespace deepads {

namespace {

double orient(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// segments cross at a point interior to both
bool proper_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    return o1 * o2 < 0.0 && o3 * o4 < 0.0;
}

void require_mask_binary(const Tensor& mask, const char* what) {
    for (double v : mask.values()) {
        if (v != 0.0 && v != 1.0) {
            throw DomainError(std::string(what) + ": mask values must be 0 or 1");
        }
    }
}

std::uint8_t quantize(double v) {
    const double scaled = std::clamp(v, 0.0, 1.0) * 255.0;
    return static_cast<std::uint8_t>(std::lround(scaled));
}

}  // namespace

void validate_quad(const QuadAnnotation& q) {
    const auto& c = q.corners;
    // a quad self-intersects iff one pair of opposite edges properly crosses
    if (proper_cross(c[0], c[1], c[2], c[3]) || proper_cross(c[1], c[2], c[3], c[0])) {
        throw AnnotationError("quad annotation: polygon is self-intersecting");
    }
}

double quad_area(const QuadAnnotation& q) {
    const auto& c = q.corners;
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Point& a = c[static_cast<std::size_t>(k)];
        const Point& b = c[static_cast<std::size_t>((k + 1) % 4)];
        s += a.x * b.y - b.x * a.y;
    }
    return std::abs(s) / 2.0;
}

double quad_perimeter(const QuadAnnotation& q) {
    const auto& c = q.corners;
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Point& a = c[static_cast<std::size_t>(k)];
        const Point& b = c[static_cast<std::size_t>((k + 1) % 4)];
        s += std::hypot(b.x - a.x, b.y - a.y);
    }
    return s;
}

Tensor rasterize_quad(const QuadAnnotation& q, int height, int width) {
    if (height < 1 || width < 1) throw ShapeError("rasterize_quad: dims must be >= 1");
    validate_quad(q);

    Tensor mask({height, width});
    const auto& c = q.corners;
    for (int y = 0; y < height; ++y) {
        const double py = y + 0.5;
        // x positions where edges cross the scanline through the pixel centers
        double xs[4];
        int n = 0;
        for (int k = 0; k < 4; ++k) {
            const Point& a = c[static_cast<std::size_t>(k)];
            const Point& b = c[static_cast<std::size_t>((k + 1) % 4)];
            if ((a.y > py) != (b.y > py)) {
                xs[n++] = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            }
        }
        std::sort(xs, xs + n);
        // even-odd: interior spans are [xs[0],xs[1]), [xs[2],xs[3])
        for (int k = 0; k + 1 < n; k += 2) {
            // pixel centers x+0.5 in [xs[k], xs[k+1])
            int x0 = static_cast<int>(std::ceil(xs[k] - 0.5));
            int x1 = static_cast<int>(std::ceil(xs[k + 1] - 0.5));
            x0 = std::max(x0, 0);
            x1 = std::min(x1, width);
            for (int x = x0; x < x1; ++x) mask(y, x) = 1.0;
        }
    }
    return mask;
}

Tensor resize_image(const Tensor& img, int out_h, int out_w) {
    if (img.rank() != 3) throw ShapeError("resize_image: expected [H,W,C]");
    if (out_h < 1 || out_w < 1) throw ShapeError("resize_image: target dims must be >= 1");
    const int in_h = img.dim(0), in_w = img.dim(1), ch = img.dim(2);
    Tensor out({out_h, out_w, ch});
    const double sy = static_cast<double>(in_h) / out_h;
    const double sx = static_cast<double>(in_w) / out_w;

    for (int oy = 0; oy < out_h; ++oy) {
        const double fy = (oy + 0.5) * sy - 0.5;
        const int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        const int y0c = std::clamp(y0, 0, in_h - 1);
        const int y1c = std::clamp(y0 + 1, 0, in_h - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            const double fx = (ox + 0.5) * sx - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            const int x0c = std::clamp(x0, 0, in_w - 1);
            const int x1c = std::clamp(x0 + 1, 0, in_w - 1);
            for (int c = 0; c < ch; ++c) {
                const double top = img(y0c, x0c, c) * (1.0 - wx) + img(y0c, x1c, c) * wx;
                const double bot = img(y1c, x0c, c) * (1.0 - wx) + img(y1c, x1c, c) * wx;
                out(oy, ox, c) = top * (1.0 - wy) + bot * wy;
            }
        }
    }
    return out;
}

Tensor resize_mask(const Tensor& mask, int out_h, int out_w) {
    if (mask.rank() != 2) throw ShapeError("resize_mask: expected [H,W]");
    if (out_h < 1 || out_w < 1) throw ShapeError("resize_mask: target dims must be >= 1");
    require_mask_binary(mask, "resize_mask");
    const int in_h = mask.dim(0), in_w = mask.dim(1);
    Tensor out({out_h, out_w});
    const double sy = static_cast<double>(in_h) / out_h;
    const double sx = static_cast<double>(in_w) / out_w;
    for (int oy = 0; oy < out_h; ++oy) {
        const int y = std::clamp(static_cast<int>((oy + 0.5) * sy), 0, in_h - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            const int x = std::clamp(static_cast<int>((ox + 0.5) * sx), 0, in_w - 1);
            out(oy, ox) = mask(y, x);
        }
    }
    return out;
}

Tensor to_image_tensor(const ImageU8& img) {
    if (img.channels != 3) throw FormatError("to_image_tensor: expected a 3-channel image");
    Tensor t({img.height, img.width, 3});
    double* td = t.data();
    for (std::size_t i = 0; i < img.pixels.size(); ++i) td[i] = img.pixels[i] / 255.0;
    return t;
}

Tensor to_mask_tensor(const ImageU8& img) {
    if (img.channels != 1) throw FormatError("to_mask_tensor: expected a 1-channel image");
    Tensor t({img.height, img.width});
    double* td = t.data();
    for (std::size_t i = 0; i < img.pixels.size(); ++i) td[i] = img.pixels[i] >= 128 ? 1.0 : 0.0;
    return t;
}

Tensor to_heatmap_tensor(const ImageU8& img) {
    if (img.channels != 1) throw FormatError("to_heatmap_tensor: expected a 1-channel image");
    Tensor t({img.height, img.width});
    double* td = t.data();
    for (std::size_t i = 0; i < img.pixels.size(); ++i) td[i] = img.pixels[i] / 255.0;
    return t;
}

ImageU8 from_image_tensor(const Tensor& t) {
    if (t.rank() != 3 || t.dim(2) != 3) throw ShapeError("from_image_tensor: expected [H,W,3]");
    ImageU8 img{t.dim(1), t.dim(0), 3, {}};
    img.pixels.resize(static_cast<std::size_t>(t.size()));
    const double* td = t.data();
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = quantize(td[i]);
    return img;
}

ImageU8 from_mask_tensor(const Tensor& t) {
    if (t.rank() != 2) throw ShapeError("from_mask_tensor: expected [H,W]");
    require_mask_binary(t, "from_mask_tensor");
    ImageU8 img{t.dim(1), t.dim(0), 1, {}};
    img.pixels.resize(static_cast<std::size_t>(t.size()));
    const double* td = t.data();
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = td[i] == 1.0 ? 255 : 0;
    }
    return img;
}

ImageU8 from_heatmap_tensor(const Tensor& t) {
    if (t.rank() != 2) throw ShapeError("from_heatmap_tensor: expected [H,W]");
    ImageU8 img{t.dim(1), t.dim(0), 1, {}};
    img.pixels.resize(static_cast<std::size_t>(t.size()));
    const double* td = t.data();
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = quantize(td[i]);
    return img;
}

namespace {

std::map<std::string, std::filesystem::path> stems_with_extension(
    const std::filesystem::path& dir, const std::string& ext) {
    std::map<std::string, std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) {
            out.emplace(entry.path().stem().string(), entry.path());
        }
    }
    return out;
}

std::map<std::string, QuadAnnotation> load_quads_csv(const std::filesystem::path& path) {
    const std::string text = read_file_bytes(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty quads file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "stem,x0,y0,x1,y1,x2,y2,x3,y3") {
        throw FormatError(path.string() + ": bad header, expected stem,x0,y0,...,x3,y3");
    }
    std::map<std::string, QuadAnnotation> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 9) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 9 comma-separated fields");
        }
        QuadAnnotation q;
        for (int k = 0; k < 4; ++k) {
            try {
                q.corners[static_cast<std::size_t>(k)].x = std::stod(fields[1 + 2 * k]);
                q.corners[static_cast<std::size_t>(k)].y = std::stod(fields[2 + 2 * k]);
            } catch (const std::exception&) {
                throw FormatError(path.string() + ":" + std::to_string(lineno) +
                                  ": bad coordinate value");
            }
        }
        validate_quad(q);
        out.emplace(fields[0], q);
    }
    return out;
}

}  // namespace

DatasetLoad load_dataset(const std::filesystem::path& root, int h, int w) {
    const auto images_dir = root / "images";
    const auto masks_dir = root / "masks";
    const auto quads_path = root / "quads.csv";
    if (!std::filesystem::is_directory(images_dir)) {
        throw IoError("missing images directory: " + images_dir.string());
    }
    const bool have_masks = std::filesystem::is_directory(masks_dir);
    if (!have_masks && !std::filesystem::is_regular_file(quads_path)) {
        throw IoError("missing masks directory (or quads.csv): " + masks_dir.string());
    }

    const auto images = stems_with_extension(images_dir, ".ppm");
    DatasetLoad out;

    if (have_masks) {
        const auto masks = stems_with_extension(masks_dir, ".pgm");
        for (const auto& [stem, img_path] : images) {
            auto it = masks.find(stem);
            if (it == masks.end()) {
                out.unmatched_stems.push_back(stem);
                continue;
            }
            Sample s;
            s.id = stem;
            s.image = resize_image(to_image_tensor(read_pnm(img_path)), h, w);
            s.mask = resize_mask(to_mask_tensor(read_pnm(it->second)), h, w);
            out.samples.push_back(std::move(s));
        }
        for (const auto& [stem, mask_path] : masks) {
            if (!images.count(stem)) out.unmatched_stems.push_back(stem);
        }
    } else {
        const auto quads = load_quads_csv(quads_path);
        for (const auto& [stem, img_path] : images) {
            auto it = quads.find(stem);
            if (it == quads.end()) {
                out.unmatched_stems.push_back(stem);
                continue;
            }
            Sample s;
            s.id = stem;
            const Tensor full = to_image_tensor(read_pnm(img_path));
            s.mask = resize_mask(rasterize_quad(it->second, full.dim(0), full.dim(1)), h, w);
            s.image = resize_image(full, h, w);
            out.samples.push_back(std::move(s));
        }
        for (const auto& [stem, quad] : quads) {
            if (!images.count(stem)) out.unmatched_stems.push_back(stem);
        }
    }

    std::sort(out.unmatched_stems.begin(), out.unmatched_stems.end());
    if (out.samples.empty()) {
        throw EmptyInputError("no matched image/mask pairs under " + root.string());
    }
    return out;  // samples already stem-ordered via the sorted map
}

namespace {

bool is_convex(const QuadAnnotation& q) {
    const auto& c = q.corners;
    double sign = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double o = orient(c[static_cast<std::size_t>(k)],
                                c[static_cast<std::size_t>((k + 1) % 4)],
                                c[static_cast<std::size_t>((k + 2) % 4)]);
        if (o == 0.0) return false;
        if (sign == 0.0) {
            sign = o;
        } else if (sign * o < 0.0) {
            return false;
        }
    }
    return true;
}

struct Rgb {
    double r = 0, g = 0, b = 0;
    double channel(int c) const { return c == 0 ? r : (c == 1 ? g : b); }
    void set(int c, double v) { (c == 0 ? r : (c == 1 ? g : b)) = v; }
};

Rgb random_color(Rng& rng) {
    return {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
}

QuadAnnotation jittered_rect_quad(Rng& rng, int h, int w) {
    const double margin = std::max(1.0, 0.02 * std::min(h, w));
    const double frac = rng.uniform(0.10, 0.28);
    const double aspect = rng.uniform(0.6, 1.6);
    double rw = std::sqrt(frac * w * h * aspect);
    double rh = std::sqrt(frac * w * h / aspect);
    rw = std::min(rw, w - 2.0 * margin - 1.0);
    rh = std::min(rh, h - 2.0 * margin - 1.0);
    const double x0 = rng.uniform(margin, w - margin - rw);
    const double y0 = rng.uniform(margin, h - margin - rh);

    QuadAnnotation q;
    q.corners = {Point{x0, y0}, Point{x0 + rw, y0}, Point{x0 + rw, y0 + rh}, Point{x0, y0 + rh}};
    const double jx = 0.12 * rw;
    const double jy = 0.12 * rh;
    for (auto& p : q.corners) {
        p.x = std::clamp(p.x + rng.uniform(-jx, jx), 0.5, w - 0.5);
        p.y = std::clamp(p.y + rng.uniform(-jy, jy), 0.5, h - 0.5);
    }
    return q;
}

QuadAnnotation centered_rect_quad(int h, int w) {
    // exact fallback rectangle covering ~18% of the frame
    const double rw = std::sqrt(0.18 * w * h);
    const double rh = rw;
    const double x0 = (w - rw) / 2.0;
    const double y0 = (h - rh) / 2.0;
    QuadAnnotation q;
    q.corners = {Point{x0, y0}, Point{x0 + rw, y0}, Point{x0 + rw, y0 + rh}, Point{x0, y0 + rh}};
    return q;
}

}  // namespace

std::vector<SyntheticSample> gen_synthetic(int count, int h, int w, std::uint64_t seed) {
    if (count < 1) throw DomainError("gen_synthetic: count must be >= 1");
    if (h < 4 || w < 4) throw ShapeError("gen_synthetic: frame must be at least 4x4");

    std::vector<SyntheticSample> out;
    out.reserve(static_cast<std::size_t>(count));
    const double total = static_cast<double>(h) * w;

    for (int index = 0; index < count; ++index) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(index)));

        // background tones are confined to one side of the contrast channel
        // so the quad color is separated from every background pixel there
        const int contrast_channel = static_cast<int>(rng.uniform_int(0, 2));
        const bool bright_quad = rng.coin();
        Rgb top = random_color(rng);
        Rgb bottom = random_color(rng);
        Rgb fill = random_color(rng);
        if (bright_quad) {
            top.set(contrast_channel, rng.uniform(0.05, 0.40));
            bottom.set(contrast_channel, rng.uniform(0.05, 0.40));
            fill.set(contrast_channel, rng.uniform(0.80, 0.95));
        } else {
            top.set(contrast_channel, rng.uniform(0.60, 0.95));
            bottom.set(contrast_channel, rng.uniform(0.60, 0.95));
            fill.set(contrast_channel, rng.uniform(0.05, 0.20));
        }

        QuadAnnotation quad;
        Tensor mask;
        bool ok = false;
        for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            quad = jittered_rect_quad(rng, h, w);
            if (!is_convex(quad)) continue;
            const double area = quad_area(quad);
            if (area < 0.08 * total || area > 0.30 * total) continue;
            mask = rasterize_quad(quad, h, w);
            double set = 0.0;
            for (double v : mask.values()) set += v;
            const double frac = set / total;
            if (frac < 0.06 || frac > 0.33) continue;
            ok = true;
        }
        if (!ok) {
            quad = centered_rect_quad(h, w);
            mask = rasterize_quad(quad, h, w);
        }

        Tensor image({h, w, 3});
        const double denom = h > 1 ? static_cast<double>(h - 1) : 1.0;
        for (int y = 0; y < h; ++y) {
            const double t = y / denom;
            const Rgb row{top.r + (bottom.r - top.r) * t, top.g + (bottom.g - top.g) * t,
                          top.b + (bottom.b - top.b) * t};
            for (int x = 0; x < w; ++x) {
                const bool inside = mask(y, x) == 1.0;
                for (int c = 0; c < 3; ++c) {
                    const double base = inside ? fill.channel(c) : row.channel(c);
                    image(y, x, c) = std::clamp(base + rng.uniform(-0.05, 0.05), 0.0, 1.0);
                }
            }
        }

        char stem[32];
        std::snprintf(stem, sizeof(stem), "sample_%04d", index);
        out.push_back(SyntheticSample{Sample{std::move(image), std::move(mask), stem}, quad});
    }
    return out;
}

std::vector<Sample> to_samples(const std::vector<SyntheticSample>& items) {
    std::vector<Sample> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.sample);
    return out;
}

void save_dataset(const std::filesystem::path& root, const std::vector<SyntheticSample>& items) {
    std::filesystem::create_directories(root / "images");
    std::filesystem::create_directories(root / "masks");

    std::string csv = "stem,x0,y0,x1,y1,x2,y2,x3,y3\n";
    for (const auto& item : items) {
        const auto& s = item.sample;
        write_pnm(root / "images" / (s.id + ".ppm"), from_image_tensor(s.image));
        write_pnm(root / "masks" / (s.id + ".pgm"), from_mask_tensor(s.mask));
        char row[256];
        const auto& c = item.quad.corners;
        std::snprintf(row, sizeof(row), "%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                      s.id.c_str(), c[0].x, c[0].y, c[1].x, c[1].y, c[2].x, c[2].y, c[3].x,
                      c[3].y);
        csv += row;
    }
    write_file_atomic(root / "quads.csv", csv);
}

}  // namespace deepads
