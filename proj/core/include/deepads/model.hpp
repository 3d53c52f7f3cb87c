#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "deepads/layers.hpp"

namespace deepads {

enum class LayerKind { Conv, Relu, MaxPool, Upsample, Sigmoid };

struct LayerEntry {
    LayerKind kind;
    int conv = -1;  // index into the conv parameter array when kind == Conv
};

using LayerCache = std::variant<ConvCache, PoolCache, UpsampleCache, ReluCache, SigmoidCache>;

// Caches from one forward pass, valid for exactly one backward pass on the
// same model while its parameters are untouched.
struct ModelCaches {
    std::vector<LayerCache> layers;
    std::uint64_t model_id = 0;
    std::uint64_t params_version = 0;
};

// Encoder-decoder segmentation net. Encoder: conv(3->16)+relu, pool,
// conv(16->8)+relu, pool, conv(8->8)+relu, pool, conv(8->8)+relu.
// Decoder: up, conv(8->8)+relu, up, conv(8->16)+relu, up, conv(16->1),
// sigmoid. All kernels 3x3 with same padding; 4673 trainable parameters.
//
// Checkpoint format (all integers little-endian):
//   bytes 0..3   magic "DADS"
//   u32          format version, currently 1
//   u32, u32     input height, input width
//   7 x          u32 c_in, u32 c_out,
//                9*c_in*c_out f64 weights (row-major [3,3,c_in,c_out]),
//                c_out f64 biases
class DeepAdsModel {
public:
    static constexpr int kConvLayers = 7;

    // Xavier-uniform weights (bound sqrt(6 / (9 * c_in))), zero biases,
    // fully determined by seed. Input dims must be multiples of 8, >= 8.
    explicit DeepAdsModel(std::uint64_t seed, int input_h = 200, int input_w = 200);

    int input_height() const { return input_h_; }
    int input_width() const { return input_w_; }
    const std::vector<LayerEntry>& layers() const { return layers_; }
    const ConvParams& conv(int idx) const { return convs_[static_cast<std::size_t>(idx)]; }

    // Heat-map [H, W, 1] with values strictly in (0, 1). Touches no hidden
    // state, so concurrent forwards on a shared const model are safe.
    Tensor forward(const Tensor& x, ModelCaches* caches = nullptr) const;

    // gradients in parameters() order: weights then bias per conv layer
    std::vector<Tensor> backward(const ModelCaches& caches, const Tensor& grad_heatmap) const;

    // Mutable access invalidates caches from earlier forwards; const access
    // does not.
    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;
    std::int64_t parameter_count() const;

    void save(const std::filesystem::path& path) const;
    static DeepAdsModel load(const std::filesystem::path& path);

private:
    struct Uninitialized {};
    DeepAdsModel(Uninitialized, int input_h, int input_w);

    int input_h_ = 0;
    int input_w_ = 0;
    std::vector<LayerEntry> layers_;
    std::array<ConvParams, kConvLayers> convs_;
    std::uint64_t id_ = 0;
    std::uint64_t params_version_ = 0;
};

}  // namespace deepads
