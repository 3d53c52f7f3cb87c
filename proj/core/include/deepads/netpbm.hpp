#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace deepads {

// 8-bit netpbm raster, row-major, channel innermost. channels is 1 (PGM,
// magic P5) or 3 (PPM, magic P6). Only maxval 255 is supported.
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
};

// name appears in error messages only
ImageU8 decode_pnm(const std::string& bytes, const std::string& name);
std::string encode_pnm(const ImageU8& img);

ImageU8 read_pnm(const std::filesystem::path& path);
void write_pnm(const std::filesystem::path& path, const ImageU8& img);

}  // namespace deepads
