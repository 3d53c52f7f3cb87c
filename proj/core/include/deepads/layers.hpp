#pragma once

#include <cstdint>
#include <vector>

#include "deepads/tensor.hpp"

namespace deepads {

// Parameters of one 3x3 convolution. Weights are stored [3, 3, c_in, c_out]
// so the hot accumulation over output channels touches contiguous memory.
struct ConvParams {
    Tensor weights;  // [3, 3, c_in, c_out]
    Tensor bias;     // [c_out]

    ConvParams() = default;
    ConvParams(int c_in, int c_out);

    int in_channels() const { return weights.dim(2); }
    int out_channels() const { return weights.dim(3); }
};

// Per-layer forward caches consumed by the matching backward pass.
struct ConvCache {
    Tensor input;
};

struct PoolCache {
    std::vector<std::int32_t> argmax;  // flat input offset per output element
    int in_h = 0, in_w = 0, channels = 0;
};

struct UpsampleCache {
    int in_h = 0, in_w = 0, channels = 0;
};

struct ReluCache {
    Tensor input;
};

struct SigmoidCache {
    Tensor output;  // backward uses y * (1 - y)
};

// 3x3 convolution with "same" zero padding: output spatial dims equal the
// input's. Pass a cache to enable a later backward call; leave it null for
// inference.
Tensor conv2d_forward(const Tensor& x, const ConvParams& p, ConvCache* cache = nullptr);

struct ConvBackward {
    Tensor grad_x;
    Tensor grad_w;
    Tensor grad_b;
};
ConvBackward conv2d_backward(const Tensor& grad_y, const ConvCache& cache, const ConvParams& p);

// 2x2 max pooling over disjoint blocks; spatial dims must be even. Ties go
// to the first maximum in row-major scan order.
Tensor maxpool2_forward(const Tensor& x, PoolCache* cache = nullptr);
Tensor maxpool2_backward(const Tensor& grad_y, const PoolCache& cache);

// 2x nearest-neighbor upsampling: y[i,j,c] = x[i/2, j/2, c]
Tensor upsample2_forward(const Tensor& x, UpsampleCache* cache = nullptr);
Tensor upsample2_backward(const Tensor& grad_y, const UpsampleCache& cache);

// max(x, 0); the gradient at exactly 0 is defined as 0
Tensor relu_forward(const Tensor& x, ReluCache* cache = nullptr);
Tensor relu_backward(const Tensor& grad_y, const ReluCache& cache);

// numerically stable logistic; outputs stay strictly inside (0, 1) for any
// input magnitude the network produces
Tensor sigmoid_forward(const Tensor& x, SigmoidCache* cache = nullptr);
Tensor sigmoid_backward(const Tensor& grad_y, const SigmoidCache& cache);

// Mean binary cross-entropy with an optional positive-class weight.
// Predictions are clamped to [1e-7, 1 - 1e-7] before the logs and the
// gradient is the exact derivative at the clamped values.
struct BceResult {
    double loss = 0.0;
    Tensor grad_pred;
};
BceResult bce_loss(const Tensor& pred, const Tensor& truth, double pos_weight = 1.0);

}  // namespace deepads
