#include "deepads/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "deepads/rng.hpp"

namespace deepads {

AdamState adam_init(const std::vector<const Tensor*>& params, double lr, double beta1,
                    double beta2, double eps) {
    AdamState s;
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const Tensor* p : params) {
        s.m.emplace_back(p->shape());
        s.v.emplace_back(p->shape());
    }
    return s;
}

void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: parameter/gradient/state list sizes disagree");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& p = *params[k];
        const Tensor& g = grads[k];
        Tensor& m = state.m[k];
        Tensor& v = state.v[k];
        if (!p.same_shape(g) || !p.same_shape(m)) {
            throw ShapeError("adam_step: shape mismatch at parameter " + std::to_string(k));
        }
        double* pd = p.data();
        const double* gd = g.data();
        double* md = m.data();
        double* vd = v.data();
        const std::int64_t n = p.size();
        for (std::int64_t i = 0; i < n; ++i) {
            md[i] = state.beta1 * md[i] + (1.0 - state.beta1) * gd[i];
            vd[i] = state.beta2 * vd[i] + (1.0 - state.beta2) * gd[i] * gd[i];
            const double m_hat = md[i] / bc1;
            const double v_hat = vd[i] / bc2;
            pd[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
        }
    }
}

double train_epoch(DeepAdsModel& model, const std::vector<Sample>& data, const TrainConfig& cfg,
                   AdamState& state, int epoch_index) {
    if (data.empty()) throw EmptyInputError("train_epoch: empty dataset");
    if (cfg.batch_size < 1) throw DomainError("train_epoch: batch_size must be >= 1");
    for (const Sample& s : data) {
        if (s.image.rank() != 3 || s.image.dim(0) != model.input_height() ||
            s.image.dim(1) != model.input_width() || s.image.dim(2) != 3) {
            throw ShapeError("train_epoch: sample '" + s.id + "' does not match model input " +
                             std::to_string(model.input_height()) + "x" +
                             std::to_string(model.input_width()));
        }
    }

    const int n = static_cast<int>(data.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle) {
        Rng rng(Rng::mix(cfg.seed, static_cast<std::uint64_t>(epoch_index)));
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, i));
            std::swap(order[static_cast<std::size_t>(i)], order[j]);
        }
    }

    const int h = model.input_height();
    const int w = model.input_width();
    double loss_sum = 0.0;

    for (int start = 0; start < n; start += cfg.batch_size) {
        const int end = std::min(start + cfg.batch_size, n);
        const double inv_batch = 1.0 / static_cast<double>(end - start);

        std::vector<Tensor> grad_acc;
        for (const Tensor* p : std::as_const(model).parameters()) grad_acc.emplace_back(p->shape());

        for (int k = start; k < end; ++k) {
            const Sample& s = data[order[static_cast<std::size_t>(k)]];
            ModelCaches caches;
            const Tensor heatmap = model.forward(s.image, &caches);
            const BceResult bce = bce_loss(heatmap.reshaped({h, w}), s.mask, cfg.pos_weight);
            loss_sum += bce.loss;
            const std::vector<Tensor> grads =
                model.backward(caches, bce.grad_pred.reshaped({h, w, 1}));
            for (std::size_t gi = 0; gi < grads.size(); ++gi) {
                double* acc = grad_acc[gi].data();
                const double* g = grads[gi].data();
                const std::int64_t sz = grads[gi].size();
                for (std::int64_t i = 0; i < sz; ++i) acc[i] += g[i] * inv_batch;
            }
        }
        adam_step(model.parameters(), grad_acc, state);
    }
    return loss_sum / static_cast<double>(n);
}

std::vector<double> train(DeepAdsModel& model, const std::vector<Sample>& data,
                          const TrainConfig& cfg, AdamState& state,
                          const std::function<void(int, double)>& on_epoch) {
    if (cfg.epochs < 1) throw DomainError("train: epochs must be >= 1");
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int e = 0; e < cfg.epochs; ++e) {
        const double loss = train_epoch(model, data, cfg, state, e);
        losses.push_back(loss);
        if (on_epoch) on_epoch(e, loss);
    }
    return losses;
}

}  // namespace deepads
