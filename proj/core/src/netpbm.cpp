#include "deepads/netpbm.hpp"

#include <cstring>

#include "deepads/errors.hpp"
#include "deepads/io.hpp"

namespace deepads {

namespace {

// header tokenizer: whitespace separates tokens, '#' comments run to end of line
struct HeaderScanner {
    const std::string& bytes;
    const std::string& name;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            const char c = bytes[pos];
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    }

    int next_int(const char* what) {
        skip_space_and_comments();
        if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9') {
            throw FormatError(name + ": expected " + std::string(what) + " in netpbm header");
        }
        long v = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1000000000L) throw FormatError(name + ": absurd " + std::string(what));
            ++pos;
        }
        return static_cast<int>(v);
    }
};

}  // namespace

ImageU8 decode_pnm(const std::string& bytes, const std::string& name) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        throw FormatError(name + ": not a binary PGM (P5) or PPM (P6) file");
    }
    ImageU8 img;
    img.channels = bytes[1] == '5' ? 1 : 3;

    HeaderScanner scan{bytes, name, 2};
    img.width = scan.next_int("width");
    img.height = scan.next_int("height");
    const int maxval = scan.next_int("maxval");
    if (img.width < 1 || img.height < 1) {
        throw FormatError(name + ": invalid image dimensions");
    }
    if (maxval != 255) {
        throw FormatError(name + ": unsupported maxval " + std::to_string(maxval) +
                          " (only 255 is supported)");
    }
    // exactly one whitespace byte separates the header from the raster
    if (scan.pos >= bytes.size() || !(bytes[scan.pos] == ' ' || bytes[scan.pos] == '\t' ||
                                      bytes[scan.pos] == '\r' || bytes[scan.pos] == '\n')) {
        throw FormatError(name + ": missing whitespace before raster data");
    }
    ++scan.pos;

    const std::size_t expected = static_cast<std::size_t>(img.width) *
                                 static_cast<std::size_t>(img.height) *
                                 static_cast<std::size_t>(img.channels);
    const std::size_t got = bytes.size() - scan.pos;
    if (got < expected) {
        throw FormatError(name + ": truncated raster (expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(got) + ")");
    }
    if (got > expected) {
        throw FormatError(name + ": trailing data after raster");
    }
    img.pixels.resize(expected);
    std::memcpy(img.pixels.data(), bytes.data() + scan.pos, expected);
    return img;
}

std::string encode_pnm(const ImageU8& img) {
    if (img.channels != 1 && img.channels != 3) {
        throw FormatError("encode_pnm: channels must be 1 or 3");
    }
    if (img.width < 1 || img.height < 1) {
        throw FormatError("encode_pnm: invalid image dimensions");
    }
    const std::size_t expected = static_cast<std::size_t>(img.width) *
                                 static_cast<std::size_t>(img.height) *
                                 static_cast<std::size_t>(img.channels);
    if (img.pixels.size() != expected) {
        throw FormatError("encode_pnm: pixel buffer size does not match dimensions");
    }
    std::string out;
    out.reserve(expected + 32);
    out += img.channels == 1 ? "P5\n" : "P6\n";
    out += std::to_string(img.width);
    out += ' ';
    out += std::to_string(img.height);
    out += "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), expected);
    return out;
}

ImageU8 read_pnm(const std::filesystem::path& path) {
    return decode_pnm(read_file_bytes(path), path.string());
}

void write_pnm(const std::filesystem::path& path, const ImageU8& img) {
    write_file_atomic(path, encode_pnm(img));
}

}  // namespace deepads
