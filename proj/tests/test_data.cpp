#include <cmath>
#include <set>

#include "doctest.h"

#include "deepads/data.hpp"
#include "deepads/io.hpp"
#include "deepads/rng.hpp"
#include "support/test_util.hpp"

using namespace deepads;
using testutil::random_tensor;

namespace {

QuadAnnotation quad(double x0, double y0, double x1, double y1, double x2, double y2, double x3,
                    double y3) {
    return QuadAnnotation{{Point{x0, y0}, Point{x1, y1}, Point{x2, y2}, Point{x3, y3}}};
}

// brute-force oracle: even-odd crossing count per pixel center
bool center_inside(const QuadAnnotation& q, int x, int y) {
    const double px = x + 0.5, py = y + 0.5;
    bool inside = false;
    for (int k = 0; k < 4; ++k) {
        const Point& a = q.corners[static_cast<std::size_t>(k)];
        const Point& b = q.corners[static_cast<std::size_t>((k + 1) % 4)];
        if ((a.y > py) != (b.y > py)) {
            const double xint = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
            if (px < xint) inside = !inside;
        }
    }
    return inside;
}

double mask_sum(const Tensor& mask) {
    double s = 0.0;
    for (double v : mask.values()) s += v;
    return s;
}

QuadAnnotation random_convex_quad(Rng& rng, int h, int w) {
    while (true) {
        const double cx = rng.uniform(0.25 * w, 0.75 * w);
        const double cy = rng.uniform(0.25 * h, 0.75 * h);
        const double rx = rng.uniform(0.08 * w, 0.22 * w);
        const double ry = rng.uniform(0.08 * h, 0.22 * h);
        // four angles in increasing order around the center give a convex quad
        double ang[4];
        for (int k = 0; k < 4; ++k) {
            ang[k] = (k + rng.uniform(0.15, 0.85)) * 3.14159265358979 / 2.0;
        }
        QuadAnnotation q;
        for (int k = 0; k < 4; ++k) {
            q.corners[static_cast<std::size_t>(k)] =
                Point{cx + rx * std::cos(ang[k]), cy + ry * std::sin(ang[k])};
        }
        if (quad_area(q) > 4.0) return q;
    }
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("full-frame quad covers every pixel") {
    const int h = 7, w = 5;
    const Tensor mask = rasterize_quad(quad(0, 0, w, 0, w, h, 0, h), h, w);
    for (double v : mask.values()) CHECK(v == 1.0);
}

TEST_CASE("degenerate quad covers nothing") {
    const Tensor mask = rasterize_quad(quad(3, 3, 3, 3, 3, 3, 3, 3), 6, 6);
    for (double v : mask.values()) CHECK(v == 0.0);
}

TEST_CASE("the 6x6 rectangle case sets exactly six pixels") {
    const Tensor mask = rasterize_quad(quad(1, 1, 4, 1, 4, 3, 1, 3), 6, 6);
    int set = 0;
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 6; ++x) {
            const bool expect = (x >= 1 && x <= 3 && y >= 1 && y <= 2);
            CHECK(mask(y, x) == (expect ? 1.0 : 0.0));
            if (mask(y, x) == 1.0) ++set;
        }
    }
    CHECK(set == 6);
}

TEST_CASE("rasterization agrees with the per-center point-in-polygon oracle") {
    Rng rng(51);
    for (int trial = 0; trial < 25; ++trial) {
        const QuadAnnotation q = random_convex_quad(rng, 12, 12);
        const Tensor mask = rasterize_quad(q, 12, 12);
        for (int y = 0; y < 12; ++y) {
            for (int x = 0; x < 12; ++x) {
                CHECK(mask(y, x) == (center_inside(q, x, y) ? 1.0 : 0.0));
            }
        }
    }
}

TEST_CASE("self-intersecting quads are rejected") {
    // bowtie: edges 0-1 and 2-3 cross
    CHECK_THROWS_AS(rasterize_quad(quad(0, 0, 4, 4, 4, 0, 0, 4), 8, 8), AnnotationError);
    CHECK_NOTHROW(rasterize_quad(quad(0, 0, 4, 0, 4, 4, 0, 4), 8, 8));
}

TEST_CASE("pixel count stays within the perimeter bound of the shoelace area") {
    Rng rng(52);
    for (int trial = 0; trial < 100; ++trial) {
        const QuadAnnotation q = random_convex_quad(rng, 64, 64);
        const Tensor mask = rasterize_quad(q, 64, 64);
        const double count = mask_sum(mask);
        CHECK(std::abs(count - quad_area(q)) <= quad_perimeter(q));
    }
}

TEST_CASE("integer translation shifts the set pixels identically") {
    Rng rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const QuadAnnotation q = random_convex_quad(rng, 20, 20);
        const int dx = static_cast<int>(rng.uniform_int(1, 6));
        const int dy = static_cast<int>(rng.uniform_int(1, 6));
        QuadAnnotation moved = q;
        for (auto& p : moved.corners) {
            p.x += dx;
            p.y += dy;
        }
        const Tensor a = rasterize_quad(q, 20, 20);
        const Tensor b = rasterize_quad(moved, 32, 32);
        for (int y = 0; y < 20; ++y) {
            for (int x = 0; x < 20; ++x) {
                CHECK(a(y, x) == b(y + dy, x + dx));
            }
        }
    }
}

TEST_CASE("same-size image resize is exact") {
    Rng rng(54);
    const Tensor img = random_tensor({5, 7, 3}, rng, 0.0, 1.0);
    const Tensor out = resize_image(img, 5, 7);
    for (std::int64_t i = 0; i < img.size(); ++i) CHECK(std::abs(out[i] - img[i]) < 1e-12);
}

TEST_CASE("constant image stays constant under resize") {
    const Tensor img({4, 4, 3}, 0.375);
    for (double v : resize_image(img, 9, 3).values()) CHECK(v == doctest::Approx(0.375));
}

TEST_CASE("2x2 to 4x4 matches a scalar bilinear oracle") {
    Tensor img({2, 2, 1});
    img(0, 0, 0) = 0.0;
    img(0, 1, 0) = 1.0;
    img(1, 0, 0) = 0.5;
    img(1, 1, 0) = 0.25;
    const Tensor out = resize_image(img, 4, 4);

    for (int oy = 0; oy < 4; ++oy) {
        for (int ox = 0; ox < 4; ++ox) {
            // independent scalar computation with half-pixel centers
            const double fy = (oy + 0.5) * 0.5 - 0.5;
            const double fx = (ox + 0.5) * 0.5 - 0.5;
            const int y0 = static_cast<int>(std::floor(fy));
            const int x0 = static_cast<int>(std::floor(fx));
            const double wy = fy - y0;
            const double wx = fx - x0;
            auto at = [&](int y, int x) {
                return img(std::clamp(y, 0, 1), std::clamp(x, 0, 1), 0);
            };
            const double want = at(y0, x0) * (1 - wx) * (1 - wy) + at(y0, x0 + 1) * wx * (1 - wy) +
                                at(y0 + 1, x0) * (1 - wx) * wy + at(y0 + 1, x0 + 1) * wx * wy;
            CHECK(out(oy, ox, 0) == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("mask resize stays binary and picks nearest sources") {
    Tensor checker({4, 4});
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) checker(y, x) = (x + y) % 2 == 0 ? 1.0 : 0.0;
    }
    const Tensor same = resize_mask(checker, 4, 4);
    for (std::int64_t i = 0; i < checker.size(); ++i) CHECK(same[i] == checker[i]);

    const Tensor down = resize_mask(checker, 2, 2);
    for (int oy = 0; oy < 2; ++oy) {
        for (int ox = 0; ox < 2; ++ox) {
            const int sy = static_cast<int>((oy + 0.5) * 2.0);
            const int sx = static_cast<int>((ox + 0.5) * 2.0);
            CHECK(down(oy, ox) == checker(sy, sx));
        }
    }

    const Tensor ones({3, 3}, 1.0);
    for (double v : resize_mask(ones, 7, 5).values()) CHECK(v == 1.0);

    CHECK_THROWS_AS(resize_mask(Tensor({2, 2}, 0.5), 2, 2), DomainError);
}

TEST_CASE("resized loads keep masks binary") {
    Rng rng(55);
    const auto items = gen_synthetic(3, 20, 20, 12);
    for (const auto& item : items) {
        const Tensor resized = resize_mask(item.sample.mask, 16, 16);
        for (double v : resized.values()) CHECK((v == 0.0 || v == 1.0));
    }
}

TEST_CASE("synthetic samples honor their construction bounds") {
    const auto items = gen_synthetic(20, 64, 64, 3);
    REQUIRE(items.size() == 20);
    for (const auto& item : items) {
        const double frac = mask_sum(item.sample.mask) / (64.0 * 64.0);
        CHECK(frac >= 0.05);
        CHECK(frac <= 0.35);
        for (double v : item.sample.image.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        // mask must equal the rasterization of the stored quad
        const Tensor again = rasterize_quad(item.quad, 64, 64);
        CHECK(again.values() == item.sample.mask.values());
    }
}

TEST_CASE("synthetic generation is deterministic per seed") {
    const auto a = gen_synthetic(4, 32, 32, 77);
    const auto b = gen_synthetic(4, 32, 32, 77);
    const auto c = gen_synthetic(4, 32, 32, 78);
    REQUIRE(a.size() == b.size());
    bool all_equal = true;
    bool any_diff_c = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].sample.image.values() != b[k].sample.image.values()) all_equal = false;
        if (a[k].sample.image.values() != c[k].sample.image.values()) any_diff_c = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("synthetic quads contrast with their background") {
    // measured over 100 samples: mean value inside vs outside the mask must
    // differ by at least 0.2 in some channel
    const auto items = gen_synthetic(100, 32, 32, 99);
    for (const auto& item : items) {
        double best = 0.0;
        for (int c = 0; c < 3; ++c) {
            double in_sum = 0.0, out_sum = 0.0, in_n = 0.0, out_n = 0.0;
            const auto& img = item.sample.image;
            const auto& mask = item.sample.mask;
            for (int y = 0; y < 32; ++y) {
                for (int x = 0; x < 32; ++x) {
                    if (mask(y, x) == 1.0) {
                        in_sum += img(y, x, c);
                        in_n += 1.0;
                    } else {
                        out_sum += img(y, x, c);
                        out_n += 1.0;
                    }
                }
            }
            best = std::max(best, std::abs(in_sum / in_n - out_sum / out_n));
        }
        CHECK(best >= 0.2);
    }
}

TEST_CASE("dataset save/load round trip") {
    testutil::TempDir dir("dataset");
    const auto items = gen_synthetic(3, 24, 24, 5);
    save_dataset(dir.path(), items);

    CHECK(std::filesystem::exists(dir.path() / "images" / "sample_0000.ppm"));
    CHECK(std::filesystem::exists(dir.path() / "masks" / "sample_0002.pgm"));
    CHECK(std::filesystem::exists(dir.path() / "quads.csv"));

    const DatasetLoad loaded = load_dataset(dir.path(), 24, 24);
    REQUIRE(loaded.samples.size() == 3);
    CHECK(loaded.unmatched_stems.empty());
    CHECK(loaded.samples[0].id == "sample_0000");
    CHECK(loaded.samples[2].id == "sample_0002");
    // masks survive the 8-bit round trip exactly
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(loaded.samples[k].mask.values() == items[k].sample.mask.values());
    }
}

TEST_CASE("mask binarization threshold sits at 128 of 255") {
    testutil::TempDir dir("threshold");
    std::filesystem::create_directories(dir.path() / "images");
    std::filesystem::create_directories(dir.path() / "masks");

    const Tensor img({2, 2, 3}, 0.5);
    write_pnm(dir.path() / "images" / "a.ppm", from_image_tensor(img));
    ImageU8 gray{2, 2, 1, {200, 100, 128, 127}};
    write_pnm(dir.path() / "masks" / "a.pgm", gray);

    const DatasetLoad loaded = load_dataset(dir.path(), 2, 2);
    const Tensor& mask = loaded.samples[0].mask;
    CHECK(mask(0, 0) == 1.0);  // 200
    CHECK(mask(0, 1) == 0.0);  // 100
    CHECK(mask(1, 0) == 1.0);  // 128
    CHECK(mask(1, 1) == 0.0);  // 127
}

TEST_CASE("unmatched stems are reported and skipped") {
    testutil::TempDir dir("unmatched");
    const auto items = gen_synthetic(2, 16, 16, 6);
    save_dataset(dir.path(), items);
    // orphan mask without an image
    write_pnm(dir.path() / "masks" / "orphan.pgm", ImageU8{2, 2, 1, {0, 0, 0, 255}});

    const DatasetLoad loaded = load_dataset(dir.path(), 16, 16);
    CHECK(loaded.samples.size() == 2);
    REQUIRE(loaded.unmatched_stems.size() == 1);
    CHECK(loaded.unmatched_stems[0] == "orphan");
}

TEST_CASE("dataset loading errors") {
    testutil::TempDir dir("missing");
    CHECK_THROWS_AS(load_dataset(dir.path(), 8, 8), IoError);

    std::filesystem::create_directories(dir.path() / "images");
    std::filesystem::create_directories(dir.path() / "masks");
    CHECK_THROWS_AS(load_dataset(dir.path(), 8, 8), EmptyInputError);

    write_file_atomic(dir.path() / "images" / "bad.ppm", "P6\n2 2\n255\nxx");
    write_pnm(dir.path() / "masks" / "bad.pgm", ImageU8{2, 2, 1, {0, 0, 0, 0}});
    CHECK_THROWS_AS(load_dataset(dir.path(), 8, 8), FormatError);
}

TEST_CASE("masks can come from quads.csv when masks/ is absent") {
    testutil::TempDir dir("quadcsv");
    std::filesystem::create_directories(dir.path() / "images");
    const Tensor img({6, 6, 3}, 0.25);
    write_pnm(dir.path() / "images" / "q.ppm", from_image_tensor(img));
    write_file_atomic(dir.path() / "quads.csv",
                      "stem,x0,y0,x1,y1,x2,y2,x3,y3\nq,1,1,4,1,4,3,1,3\n");

    const DatasetLoad loaded = load_dataset(dir.path(), 6, 6);
    REQUIRE(loaded.samples.size() == 1);
    CHECK(mask_sum(loaded.samples[0].mask) == 6.0);
}

}  // TEST_SUITE
