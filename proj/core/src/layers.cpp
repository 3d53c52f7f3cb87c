#include "deepads/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace deepads {

namespace {

void require_hwc(const Tensor& t, const char* what) {
    if (t.rank() != 3) {
        throw ShapeError(std::string(what) + ": expected a rank-3 [H,W,C] tensor, got rank " +
                         std::to_string(t.rank()));
    }
}

}  // namespace

ConvParams::ConvParams(int c_in, int c_out) {
    if (c_in < 1 || c_out < 1) throw ShapeError("conv params: channel counts must be >= 1");
    weights = Tensor({3, 3, c_in, c_out});
    bias = Tensor({c_out});
}

Tensor conv2d_forward(const Tensor& x, const ConvParams& p, ConvCache* cache) {
    require_hwc(x, "conv2d_forward");
    const int h = x.dim(0), w = x.dim(1), cin = x.dim(2);
    if (cin != p.in_channels()) {
        throw ShapeError("conv2d_forward: input has " + std::to_string(cin) +
                         " channels, params expect " + std::to_string(p.in_channels()));
    }
    const int cout = p.out_channels();
    Tensor y({h, w, cout});
    const double* xd = x.data();
    const double* wd = p.weights.data();
    const double* bd = p.bias.data();
    double* yd = y.data();

    for (int i = 0; i < h; ++i) {
        const int di0 = i > 0 ? 0 : 1;
        const int di1 = i < h - 1 ? 3 : 2;
        for (int j = 0; j < w; ++j) {
            double* yrow = yd + (static_cast<std::int64_t>(i) * w + j) * cout;
            for (int o = 0; o < cout; ++o) yrow[o] = bd[o];
            const int dj0 = j > 0 ? 0 : 1;
            const int dj1 = j < w - 1 ? 3 : 2;
            for (int di = di0; di < di1; ++di) {
                const int si = i + di - 1;
                for (int dj = dj0; dj < dj1; ++dj) {
                    const int sj = j + dj - 1;
                    const double* xrow = xd + (static_cast<std::int64_t>(si) * w + sj) * cin;
                    const double* wtap = wd + (static_cast<std::int64_t>(di) * 3 + dj) * cin * cout;
                    for (int c = 0; c < cin; ++c) {
                        const double xv = xrow[c];
                        const double* wo = wtap + static_cast<std::int64_t>(c) * cout;
                        for (int o = 0; o < cout; ++o) yrow[o] += xv * wo[o];
                    }
                }
            }
        }
    }
    if (cache) cache->input = x;
    return y;
}

ConvBackward conv2d_backward(const Tensor& grad_y, const ConvCache& cache, const ConvParams& p) {
    if (cache.input.rank() != 3) throw StateError("conv2d_backward: missing or invalid cache");
    const int h = cache.input.dim(0), w = cache.input.dim(1), cin = cache.input.dim(2);
    const int cout = p.out_channels();
    if (cin != p.in_channels()) throw StateError("conv2d_backward: cache/params channel mismatch");
    if (grad_y.rank() != 3 || grad_y.dim(0) != h || grad_y.dim(1) != w || grad_y.dim(2) != cout) {
        throw ShapeError("conv2d_backward: upstream gradient shape does not match forward output");
    }

    ConvBackward out;
    out.grad_x = Tensor({h, w, cin});
    out.grad_w = Tensor({3, 3, cin, cout});
    out.grad_b = Tensor({cout});
    const double* xd = cache.input.data();
    const double* wd = p.weights.data();
    const double* gyd = grad_y.data();
    double* gxd = out.grad_x.data();
    double* gwd = out.grad_w.data();
    double* gbd = out.grad_b.data();

    for (int i = 0; i < h; ++i) {
        const int di0 = i > 0 ? 0 : 1;
        const int di1 = i < h - 1 ? 3 : 2;
        for (int j = 0; j < w; ++j) {
            const double* gyrow = gyd + (static_cast<std::int64_t>(i) * w + j) * cout;
            for (int o = 0; o < cout; ++o) gbd[o] += gyrow[o];
            const int dj0 = j > 0 ? 0 : 1;
            const int dj1 = j < w - 1 ? 3 : 2;
            for (int di = di0; di < di1; ++di) {
                const int si = i + di - 1;
                for (int dj = dj0; dj < dj1; ++dj) {
                    const int sj = j + dj - 1;
                    const std::int64_t xoff = (static_cast<std::int64_t>(si) * w + sj) * cin;
                    const double* xrow = xd + xoff;
                    double* gxrow = gxd + xoff;
                    const std::int64_t woff = (static_cast<std::int64_t>(di) * 3 + dj) * cin * cout;
                    const double* wtap = wd + woff;
                    double* gwtap = gwd + woff;
                    for (int c = 0; c < cin; ++c) {
                        const double xv = xrow[c];
                        const double* wo = wtap + static_cast<std::int64_t>(c) * cout;
                        double* gwo = gwtap + static_cast<std::int64_t>(c) * cout;
                        double acc = 0.0;
                        for (int o = 0; o < cout; ++o) {
                            gwo[o] += xv * gyrow[o];
                            acc += wo[o] * gyrow[o];
                        }
                        gxrow[c] += acc;
                    }
                }
            }
        }
    }
    return out;
}

Tensor maxpool2_forward(const Tensor& x, PoolCache* cache) {
    require_hwc(x, "maxpool2_forward");
    const int h = x.dim(0), w = x.dim(1), ch = x.dim(2);
    if (h % 2 != 0 || w % 2 != 0) {
        throw ShapeError("maxpool2_forward: spatial dims must be even, got " + std::to_string(h) +
                         "x" + std::to_string(w));
    }
    if (x.size() > std::numeric_limits<std::int32_t>::max()) {
        throw ShapeError("maxpool2_forward: tensor exceeds the 32-bit argmax cache range");
    }
    const int oh = h / 2, ow = w / 2;
    Tensor y({oh, ow, ch});
    const double* xd = x.data();
    double* yd = y.data();
    if (cache) {
        cache->argmax.assign(static_cast<std::size_t>(y.size()), 0);
        cache->in_h = h;
        cache->in_w = w;
        cache->channels = ch;
    }
    std::int32_t* am = cache ? cache->argmax.data() : nullptr;

    for (int oi = 0; oi < oh; ++oi) {
        for (int oj = 0; oj < ow; ++oj) {
            // the four candidates in row-major scan order; strict > keeps the first
            const std::int64_t o00 = (static_cast<std::int64_t>(2 * oi) * w + 2 * oj) * ch;
            const std::int64_t o01 = o00 + ch;
            const std::int64_t o10 = o00 + static_cast<std::int64_t>(w) * ch;
            const std::int64_t o11 = o10 + ch;
            double* yrow = yd + (static_cast<std::int64_t>(oi) * ow + oj) * ch;
            for (int c = 0; c < ch; ++c) {
                double best = xd[o00 + c];
                std::int64_t besti = o00 + c;
                if (xd[o01 + c] > best) { best = xd[o01 + c]; besti = o01 + c; }
                if (xd[o10 + c] > best) { best = xd[o10 + c]; besti = o10 + c; }
                if (xd[o11 + c] > best) { best = xd[o11 + c]; besti = o11 + c; }
                yrow[c] = best;
                if (am) am[(static_cast<std::int64_t>(oi) * ow + oj) * ch + c] =
                        static_cast<std::int32_t>(besti);
            }
        }
    }
    return y;
}

Tensor maxpool2_backward(const Tensor& grad_y, const PoolCache& cache) {
    if (cache.argmax.empty() || cache.in_h == 0) {
        throw StateError("maxpool2_backward: missing cache");
    }
    if (grad_y.rank() != 3 || grad_y.dim(0) != cache.in_h / 2 || grad_y.dim(1) != cache.in_w / 2 ||
        grad_y.dim(2) != cache.channels) {
        throw ShapeError("maxpool2_backward: upstream gradient shape does not match pooled shape");
    }
    Tensor gx({cache.in_h, cache.in_w, cache.channels});
    double* gxd = gx.data();
    const double* gyd = grad_y.data();
    const std::int64_t n = grad_y.size();
    for (std::int64_t k = 0; k < n; ++k) gxd[cache.argmax[static_cast<std::size_t>(k)]] += gyd[k];
    return gx;
}

Tensor upsample2_forward(const Tensor& x, UpsampleCache* cache) {
    require_hwc(x, "upsample2_forward");
    const int h = x.dim(0), w = x.dim(1), ch = x.dim(2);
    Tensor y({2 * h, 2 * w, ch});
    const double* xd = x.data();
    double* yd = y.data();
    for (int i = 0; i < 2 * h; ++i) {
        const double* xrow = xd + static_cast<std::int64_t>(i / 2) * w * ch;
        double* yrow = yd + static_cast<std::int64_t>(i) * (2 * w) * ch;
        for (int j = 0; j < 2 * w; ++j) {
            const double* src = xrow + static_cast<std::int64_t>(j / 2) * ch;
            double* dst = yrow + static_cast<std::int64_t>(j) * ch;
            for (int c = 0; c < ch; ++c) dst[c] = src[c];
        }
    }
    if (cache) {
        cache->in_h = h;
        cache->in_w = w;
        cache->channels = ch;
    }
    return y;
}

Tensor upsample2_backward(const Tensor& grad_y, const UpsampleCache& cache) {
    if (cache.in_h == 0) throw StateError("upsample2_backward: missing cache");
    if (grad_y.rank() != 3 || grad_y.dim(0) != 2 * cache.in_h || grad_y.dim(1) != 2 * cache.in_w ||
        grad_y.dim(2) != cache.channels) {
        throw ShapeError("upsample2_backward: upstream gradient shape does not match 2x output");
    }
    const int h = cache.in_h, w = cache.in_w, ch = cache.channels;
    Tensor gx({h, w, ch});
    const double* gyd = grad_y.data();
    double* gxd = gx.data();
    for (int i = 0; i < 2 * h; ++i) {
        double* gxrow = gxd + static_cast<std::int64_t>(i / 2) * w * ch;
        const double* gyrow = gyd + static_cast<std::int64_t>(i) * (2 * w) * ch;
        for (int j = 0; j < 2 * w; ++j) {
            double* dst = gxrow + static_cast<std::int64_t>(j / 2) * ch;
            const double* src = gyrow + static_cast<std::int64_t>(j) * ch;
            for (int c = 0; c < ch; ++c) dst[c] += src[c];
        }
    }
    return gx;
}

Tensor relu_forward(const Tensor& x, ReluCache* cache) {
    Tensor y = x;
    for (auto& v : y.values()) v = v > 0.0 ? v : 0.0;
    if (cache) cache->input = x;
    return y;
}

Tensor relu_backward(const Tensor& grad_y, const ReluCache& cache) {
    if (cache.input.rank() == 0) throw StateError("relu_backward: missing cache");
    if (!grad_y.same_shape(cache.input)) {
        throw ShapeError("relu_backward: upstream gradient shape mismatch");
    }
    Tensor gx = grad_y;
    const double* xd = cache.input.data();
    double* gd = gx.data();
    const std::int64_t n = gx.size();
    for (std::int64_t i = 0; i < n; ++i) {
        if (xd[i] <= 0.0) gd[i] = 0.0;
    }
    return gx;
}

Tensor sigmoid_forward(const Tensor& x, SigmoidCache* cache) {
    Tensor y = x;
    for (auto& v : y.values()) {
        if (v >= 0.0) {
            v = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            v = e / (1.0 + e);
        }
    }
    if (cache) cache->output = y;
    return y;
}

Tensor sigmoid_backward(const Tensor& grad_y, const SigmoidCache& cache) {
    if (cache.output.rank() == 0) throw StateError("sigmoid_backward: missing cache");
    if (!grad_y.same_shape(cache.output)) {
        throw ShapeError("sigmoid_backward: upstream gradient shape mismatch");
    }
    Tensor gx = grad_y;
    const double* yd = cache.output.data();
    double* gd = gx.data();
    const std::int64_t n = gx.size();
    for (std::int64_t i = 0; i < n; ++i) gd[i] *= yd[i] * (1.0 - yd[i]);
    return gx;
}

BceResult bce_loss(const Tensor& pred, const Tensor& truth, double pos_weight) {
    if (!pred.same_shape(truth)) throw ShapeError("bce_loss: pred/truth shape mismatch");
    if (pos_weight < 1.0) throw DomainError("bce_loss: pos_weight must be >= 1");
    constexpr double kEps = 1e-7;

    BceResult r;
    r.grad_pred = Tensor(pred.shape());
    const double* pd = pred.data();
    const double* td = truth.data();
    double* gd = r.grad_pred.data();
    const std::int64_t n = pred.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    double loss = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double y = td[i];
        if (y != 0.0 && y != 1.0) throw DomainError("bce_loss: truth values must be 0 or 1");
        const double p = std::clamp(pd[i], kEps, 1.0 - kEps);
        if (y == 1.0) {
            loss += pos_weight * std::log(p);
            gd[i] = -pos_weight / p * inv_n;
        } else {
            loss += std::log(1.0 - p);
            gd[i] = 1.0 / (1.0 - p) * inv_n;
        }
    }
    r.loss = -loss * inv_n;
    return r;
}

}  // namespace deepads
