#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "deepads/netpbm.hpp"
#include "deepads/tensor.hpp"

namespace deepads {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// One training/evaluation pair: RGB image in [0,1] and a binary mask where
// 1 marks the candidate space and 0 the background.
struct Sample {
    Tensor image;  // [H, W, 3]
    Tensor mask;   // [H, W], values in {0, 1}
    std::string id;
};

// Four corners of an annotated candidate space, in polygon order, pixel
// coordinates of the source image.
struct QuadAnnotation {
    std::array<Point, 4> corners;
};

// throws AnnotationError when opposite edges properly cross (bowtie)
void validate_quad(const QuadAnnotation& q);

// Scanline fill: pixel (x, y) is set iff its center (x+0.5, y+0.5) lies
// inside the polygon under the even-odd rule with half-open edges.
Tensor rasterize_quad(const QuadAnnotation& q, int height, int width);

double quad_area(const QuadAnnotation& q);       // shoelace, absolute value
double quad_perimeter(const QuadAnnotation& q);

// bilinear with half-pixel-center alignment; same-size resize is exact
Tensor resize_image(const Tensor& img, int out_h, int out_w);

// nearest-neighbor; binary masks stay binary
Tensor resize_mask(const Tensor& mask, int out_h, int out_w);

// tensor <-> 8-bit image conversions
Tensor to_image_tensor(const ImageU8& img);            // [H,W,3], /255
Tensor to_mask_tensor(const ImageU8& img);             // [H,W], >=128 -> 1
Tensor to_heatmap_tensor(const ImageU8& img);          // [H,W], /255
ImageU8 from_image_tensor(const Tensor& t);            // round(255*v), clamped
ImageU8 from_mask_tensor(const Tensor& t);             // {0,1} -> {0,255}
ImageU8 from_heatmap_tensor(const Tensor& t);          // round(255*p), clamped

struct DatasetLoad {
    std::vector<Sample> samples;                // ordered by stem
    std::vector<std::string> unmatched_stems;   // present on one side only
};

// Loads root/images/<stem>.ppm paired by stem with root/masks/<stem>.pgm
// (mask values binarized at >= 128 of 255). When masks/ is absent, masks
// are rasterized from root/quads.csv instead. Everything is resized to
// (h, w): images bilinearly, masks by nearest neighbor.
DatasetLoad load_dataset(const std::filesystem::path& root, int h, int w);

struct SyntheticSample {
    Sample sample;
    QuadAnnotation quad;
};

// Synthetic scenes: a two-tone vertical gradient background with uniform
// noise (amplitude 0.05) and one convex quadrilateral covering 8-30% of the
// frame, filled with a strongly contrasting flat color. Deterministic per
// (seed, index).
std::vector<SyntheticSample> gen_synthetic(int count, int h, int w, std::uint64_t seed);

std::vector<Sample> to_samples(const std::vector<SyntheticSample>& items);

// writes root/images/*.ppm, root/masks/*.pgm and root/quads.csv
void save_dataset(const std::filesystem::path& root, const std::vector<SyntheticSample>& items);

}  // namespace deepads
