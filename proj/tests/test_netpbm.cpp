#include <string>

#include "doctest.h"

#include "deepads/errors.hpp"
#include "deepads/io.hpp"
#include "deepads/netpbm.hpp"
#include "deepads/rng.hpp"
#include "support/test_util.hpp"

using namespace deepads;

TEST_SUITE("netpbm") {

TEST_CASE("encode then decode returns the original image") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        ImageU8 img;
        img.width = static_cast<int>(rng.uniform_int(1, 9));
        img.height = static_cast<int>(rng.uniform_int(1, 9));
        img.channels = rng.coin() ? 1 : 3;
        img.pixels.resize(static_cast<std::size_t>(img.width * img.height * img.channels));
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));

        const ImageU8 back = decode_pnm(encode_pnm(img), "roundtrip");
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        CHECK(back.channels == img.channels);
        CHECK(back.pixels == img.pixels);
    }
}

TEST_CASE("decoder accepts header comments") {
    const std::string bytes = "P5\n# a comment\n2 1\n# another\n255\n\x01\x02";
    const ImageU8 img = decode_pnm(bytes, "commented");
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.pixels == std::vector<std::uint8_t>{1, 2});
}

TEST_CASE("decoder rejects malformed files") {
    CHECK_THROWS_AS(decode_pnm("P4\n1 1\n255\nx", "bad"), FormatError);   // wrong magic
    CHECK_THROWS_AS(decode_pnm("P5\n2 2\n255\nab", "bad"), FormatError);  // truncated raster
    CHECK_THROWS_AS(decode_pnm("P5\n1 1\n255\nab", "bad"), FormatError);  // trailing data
    CHECK_THROWS_AS(decode_pnm("P5\n1 1\n999\na", "bad"), FormatError);   // bad maxval
    CHECK_THROWS_AS(decode_pnm("P5\n0 1\n255\n", "bad"), FormatError);    // zero dim
    CHECK_THROWS_AS(decode_pnm("", "bad"), FormatError);
}

TEST_CASE("decode errors name the offending file") {
    try {
        decode_pnm("P5\n2 2\n255\nab", "images/broken.pgm");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("images/broken.pgm") != std::string::npos);
    }
}

TEST_CASE("file round-trip through read_pnm/write_pnm") {
    testutil::TempDir dir("netpbm");
    ImageU8 img;
    img.width = 3;
    img.height = 2;
    img.channels = 3;
    img.pixels = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17};

    const auto path = dir.path() / "img.ppm";
    write_pnm(path, img);
    const ImageU8 back = read_pnm(path);
    CHECK(back.pixels == img.pixels);
    CHECK(read_file_bytes(path).substr(0, 2) == "P6");
}

}  // TEST_SUITE
