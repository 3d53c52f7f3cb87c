#include "deepads/model.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <utility>

#include "deepads/io.hpp"
#include "deepads/rng.hpp"

static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

namespace deepads {

namespace {

constexpr std::array<std::pair<int, int>, DeepAdsModel::kConvLayers> kTopology = {{
    {3, 16}, {16, 8}, {8, 8}, {8, 8}, {8, 8}, {8, 16}, {16, 1},
}};

constexpr char kMagic[4] = {'D', 'A', 'D', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t next_model_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

void check_input_hw(int h, int w) {
    if (h < 8 || w < 8 || h % 8 != 0 || w % 8 != 0) {
        throw ShapeError("model: input dims must be multiples of 8 and >= 8, got " +
                         std::to_string(h) + "x" + std::to_string(w));
    }
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct ByteReader {
    const std::string& bytes;
    const std::string& name;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw CheckpointError("corrupt checkpoint " + name + ": " + why + " at byte offset " +
                              std::to_string(pos));
    }

    void need(std::size_t n, const char* what) const {
        if (pos + n > bytes.size()) {
            fail(std::string("unexpected end of file while reading ") + what);
        }
    }

    std::uint32_t read_u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        }
        pos += 4;
        return v;
    }

    double read_f64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        }
        pos += 8;
        return std::bit_cast<double>(v);
    }
};

}  // namespace

DeepAdsModel::DeepAdsModel(Uninitialized, int input_h, int input_w)
    : input_h_(input_h), input_w_(input_w), id_(next_model_id()) {
    check_input_hw(input_h, input_w);
    for (std::size_t k = 0; k < kTopology.size(); ++k) {
        convs_[k] = ConvParams(kTopology[k].first, kTopology[k].second);
    }
    // encoder
    layers_ = {
        {LayerKind::Conv, 0}, {LayerKind::Relu}, {LayerKind::MaxPool},
        {LayerKind::Conv, 1}, {LayerKind::Relu}, {LayerKind::MaxPool},
        {LayerKind::Conv, 2}, {LayerKind::Relu}, {LayerKind::MaxPool},
        {LayerKind::Conv, 3}, {LayerKind::Relu},
        // decoder
        {LayerKind::Upsample}, {LayerKind::Conv, 4}, {LayerKind::Relu},
        {LayerKind::Upsample}, {LayerKind::Conv, 5}, {LayerKind::Relu},
        {LayerKind::Upsample}, {LayerKind::Conv, 6}, {LayerKind::Sigmoid},
    };
}

DeepAdsModel::DeepAdsModel(std::uint64_t seed, int input_h, int input_w)
    : DeepAdsModel(Uninitialized{}, input_h, input_w) {
    Rng rng(seed);
    for (auto& conv : convs_) {
        const double bound = std::sqrt(6.0 / (9.0 * conv.in_channels()));
        for (auto& v : conv.weights.values()) v = rng.uniform(-bound, bound);
    }
}

Tensor DeepAdsModel::forward(const Tensor& x, ModelCaches* caches) const {
    if (x.rank() != 3 || x.dim(0) != input_h_ || x.dim(1) != input_w_ || x.dim(2) != 3) {
        throw ShapeError("model forward: expected input [" + std::to_string(input_h_) + "," +
                         std::to_string(input_w_) + ",3]");
    }
    if (caches) {
        caches->layers.clear();
        caches->layers.reserve(layers_.size());
        caches->model_id = id_;
        caches->params_version = params_version_;
    }

    Tensor cur = x;
    for (const LayerEntry& entry : layers_) {
        switch (entry.kind) {
            case LayerKind::Conv: {
                ConvCache c;
                cur = conv2d_forward(cur, convs_[static_cast<std::size_t>(entry.conv)],
                                     caches ? &c : nullptr);
                if (caches) caches->layers.emplace_back(std::move(c));
                break;
            }
            case LayerKind::Relu: {
                ReluCache c;
                cur = relu_forward(cur, caches ? &c : nullptr);
                if (caches) caches->layers.emplace_back(std::move(c));
                break;
            }
            case LayerKind::MaxPool: {
                PoolCache c;
                cur = maxpool2_forward(cur, caches ? &c : nullptr);
                if (caches) caches->layers.emplace_back(std::move(c));
                break;
            }
            case LayerKind::Upsample: {
                UpsampleCache c;
                cur = upsample2_forward(cur, caches ? &c : nullptr);
                if (caches) caches->layers.emplace_back(std::move(c));
                break;
            }
            case LayerKind::Sigmoid: {
                SigmoidCache c;
                cur = sigmoid_forward(cur, caches ? &c : nullptr);
                if (caches) caches->layers.emplace_back(std::move(c));
                break;
            }
        }
    }
    return cur;
}

std::vector<Tensor> DeepAdsModel::backward(const ModelCaches& caches,
                                           const Tensor& grad_heatmap) const {
    if (caches.model_id != id_ || caches.params_version != params_version_) {
        throw StateError("model backward: caches are stale or from another model");
    }
    if (caches.layers.size() != layers_.size()) {
        throw StateError("model backward: cache list does not match the layer stack");
    }
    if (grad_heatmap.rank() != 3 || grad_heatmap.dim(0) != input_h_ ||
        grad_heatmap.dim(1) != input_w_ || grad_heatmap.dim(2) != 1) {
        throw ShapeError("model backward: upstream gradient must be [" +
                         std::to_string(input_h_) + "," + std::to_string(input_w_) + ",1]");
    }

    std::array<Tensor, kConvLayers> grad_w;
    std::array<Tensor, kConvLayers> grad_b;
    Tensor g = grad_heatmap;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const LayerEntry& entry = layers_[li];
        const LayerCache& cache = caches.layers[li];
        switch (entry.kind) {
            case LayerKind::Conv: {
                const auto* c = std::get_if<ConvCache>(&cache);
                if (!c) throw StateError("model backward: cache kind mismatch (conv)");
                auto r = conv2d_backward(g, *c, convs_[static_cast<std::size_t>(entry.conv)]);
                grad_w[static_cast<std::size_t>(entry.conv)] = std::move(r.grad_w);
                grad_b[static_cast<std::size_t>(entry.conv)] = std::move(r.grad_b);
                g = std::move(r.grad_x);
                break;
            }
            case LayerKind::Relu: {
                const auto* c = std::get_if<ReluCache>(&cache);
                if (!c) throw StateError("model backward: cache kind mismatch (relu)");
                g = relu_backward(g, *c);
                break;
            }
            case LayerKind::MaxPool: {
                const auto* c = std::get_if<PoolCache>(&cache);
                if (!c) throw StateError("model backward: cache kind mismatch (maxpool)");
                g = maxpool2_backward(g, *c);
                break;
            }
            case LayerKind::Upsample: {
                const auto* c = std::get_if<UpsampleCache>(&cache);
                if (!c) throw StateError("model backward: cache kind mismatch (upsample)");
                g = upsample2_backward(g, *c);
                break;
            }
            case LayerKind::Sigmoid: {
                const auto* c = std::get_if<SigmoidCache>(&cache);
                if (!c) throw StateError("model backward: cache kind mismatch (sigmoid)");
                g = sigmoid_backward(g, *c);
                break;
            }
        }
    }

    std::vector<Tensor> grads;
    grads.reserve(2 * kConvLayers);
    for (int k = 0; k < kConvLayers; ++k) {
        grads.push_back(std::move(grad_w[static_cast<std::size_t>(k)]));
        grads.push_back(std::move(grad_b[static_cast<std::size_t>(k)]));
    }
    return grads;
}

std::vector<Tensor*> DeepAdsModel::parameters() {
    ++params_version_;  // earlier caches may no longer describe these values
    std::vector<Tensor*> out;
    out.reserve(2 * kConvLayers);
    for (auto& conv : convs_) {
        out.push_back(&conv.weights);
        out.push_back(&conv.bias);
    }
    return out;
}

std::vector<const Tensor*> DeepAdsModel::parameters() const {
    std::vector<const Tensor*> out;
    out.reserve(2 * kConvLayers);
    for (const auto& conv : convs_) {
        out.push_back(&conv.weights);
        out.push_back(&conv.bias);
    }
    return out;
}

std::int64_t DeepAdsModel::parameter_count() const {
    std::int64_t n = 0;
    for (const auto* t : parameters()) n += t->size();
    return n;
}

void DeepAdsModel::save(const std::filesystem::path& path) const {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(input_h_));
    put_u32(out, static_cast<std::uint32_t>(input_w_));
    for (const auto& conv : convs_) {
        put_u32(out, static_cast<std::uint32_t>(conv.in_channels()));
        put_u32(out, static_cast<std::uint32_t>(conv.out_channels()));
        for (double v : conv.weights.values()) put_f64(out, v);
        for (double v : conv.bias.values()) put_f64(out, v);
    }
    write_file_atomic(path, out);
}

DeepAdsModel DeepAdsModel::load(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    const std::string name = path.string();
    ByteReader r{bytes, name};

    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        r.fail("bad magic, expected \"DADS\"");
    }
    r.pos = 4;
    const std::uint32_t version = r.read_u32("format version");
    if (version != kFormatVersion) {
        r.pos -= 4;
        r.fail("unsupported format version " + std::to_string(version));
    }
    const std::uint32_t h = r.read_u32("input height");
    const std::uint32_t w = r.read_u32("input width");
    if (h < 8 || w < 8 || h % 8 != 0 || w % 8 != 0 || h > 65536 || w > 65536) {
        r.pos -= 8;
        r.fail("invalid input dims " + std::to_string(h) + "x" + std::to_string(w));
    }

    DeepAdsModel model(Uninitialized{}, static_cast<int>(h), static_cast<int>(w));
    for (std::size_t k = 0; k < kTopology.size(); ++k) {
        const std::uint32_t cin = r.read_u32("conv in_channels");
        const std::uint32_t cout = r.read_u32("conv out_channels");
        if (cin != static_cast<std::uint32_t>(kTopology[k].first) ||
            cout != static_cast<std::uint32_t>(kTopology[k].second)) {
            r.pos -= 8;
            r.fail("conv layer " + std::to_string(k) + " has channels " + std::to_string(cin) +
                   "->" + std::to_string(cout) + ", expected " +
                   std::to_string(kTopology[k].first) + "->" +
                   std::to_string(kTopology[k].second));
        }
        auto& conv = model.convs_[k];
        for (auto& v : conv.weights.values()) {
            v = r.read_f64("conv weights");
            if (!std::isfinite(v)) { r.pos -= 8; r.fail("non-finite weight"); }
        }
        for (auto& v : conv.bias.values()) {
            v = r.read_f64("conv bias");
            if (!std::isfinite(v)) { r.pos -= 8; r.fail("non-finite bias"); }
        }
    }
    if (r.pos != bytes.size()) {
        r.fail("trailing data after last layer");
    }
    return model;
}

}  // namespace deepads
