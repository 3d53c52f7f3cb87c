#include "deepads/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace deepads {

ConfusionCounts confusion(const Tensor& pred_mask, const Tensor& truth_mask) {
    if (!pred_mask.same_shape(truth_mask)) throw ShapeError("confusion: shape mismatch");
    ConfusionCounts c;
    const double* pd = pred_mask.data();
    const double* td = truth_mask.data();
    const std::int64_t n = pred_mask.size();
    for (std::int64_t i = 0; i < n; ++i) {
        if ((pd[i] != 0.0 && pd[i] != 1.0) || (td[i] != 0.0 && td[i] != 1.0)) {
            throw DomainError("confusion: inputs must be strictly binary");
        }
        ++c.n[td[i] == 1.0 ? 1 : 0][pd[i] == 1.0 ? 1 : 0];
    }
    return c;
}

MetricReport compute_metrics(const ConfusionCounts& c) {
    const std::int64_t total = c.total();
    if (total <= 0) throw DomainError("compute_metrics: zero total pixel count");

    double acc[2];
    double iou[2];
    double t[2];
    for (int i = 0; i < 2; ++i) {
        t[i] = static_cast<double>(c.n[i][0] + c.n[i][1]);          // truth pixels of class i
        const double pred_i = static_cast<double>(c.n[0][i] + c.n[1][i]);
        const double hit = static_cast<double>(c.n[i][i]);
        acc[i] = t[i] > 0.0 ? hit / t[i] : (pred_i == 0.0 ? 1.0 : 0.0);
        const double uni = t[i] + pred_i - hit;
        iou[i] = uni > 0.0 ? hit / uni : 1.0;
    }

    MetricReport r;
    r.pixel_accuracy = static_cast<double>(c.n[0][0] + c.n[1][1]) / static_cast<double>(total);
    r.mean_accuracy = (acc[0] + acc[1]) / 2.0;
    r.mean_iou = (iou[0] + iou[1]) / 2.0;
    r.fw_iou = (t[0] * iou[0] + t[1] * iou[1]) / static_cast<double>(total);
    return r;
}

std::vector<double> default_thresholds() {
    std::vector<double> out(101);
    for (int k = 0; k <= 100; ++k) out[static_cast<std::size_t>(k)] = k / 100.0;
    return out;
}

Tensor threshold_mask(const Tensor& heatmap, double threshold) {
    Tensor out = heatmap;
    for (auto& v : out.values()) v = v >= threshold ? 1.0 : 0.0;
    return out;
}

std::vector<RocPoint> roc_sweep(const std::vector<Tensor>& heatmaps,
                                const std::vector<Tensor>& truths,
                                const std::vector<double>& thresholds) {
    if (heatmaps.empty()) throw EmptyInputError("roc_sweep: no images");
    if (thresholds.empty()) throw EmptyInputError("roc_sweep: no thresholds");
    if (heatmaps.size() != truths.size()) {
        throw ShapeError("roc_sweep: heat-map and truth list lengths differ");
    }

    std::vector<double> asc = thresholds;
    std::sort(asc.begin(), asc.end());
    const std::size_t m = asc.size();

    std::vector<double> fpr_sum(m, 0.0);
    std::vector<double> tpr_sum(m, 0.0);

    for (std::size_t img = 0; img < heatmaps.size(); ++img) {
        const Tensor& hm = heatmaps[img];
        const Tensor& truth = truths[img];
        if (!hm.same_shape(truth)) {
            throw ShapeError("roc_sweep: heat-map/truth shape mismatch at image " +
                             std::to_string(img));
        }

        // hist[c] = pixels whose value passes exactly the c lowest thresholds
        std::vector<std::int64_t> hist1(m + 1, 0);
        std::vector<std::int64_t> hist0(m + 1, 0);
        const double* pd = hm.data();
        const double* td = truth.data();
        const std::int64_t n = hm.size();
        std::int64_t total1 = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            const double y = td[i];
            if (y != 0.0 && y != 1.0) {
                throw DomainError("roc_sweep: truth masks must be strictly binary");
            }
            const auto passes = static_cast<std::size_t>(
                std::upper_bound(asc.begin(), asc.end(), pd[i]) - asc.begin());
            if (y == 1.0) {
                ++hist1[passes];
                ++total1;
            } else {
                ++hist0[passes];
            }
        }
        const std::int64_t total0 = n - total1;

        // positives at ascending threshold j = pixels passing more than j thresholds
        std::int64_t tp = 0;
        std::int64_t fp = 0;
        for (std::size_t j = m; j-- > 0;) {
            tp += hist1[j + 1];
            fp += hist0[j + 1];
            tpr_sum[j] += total1 > 0 ? static_cast<double>(tp) / static_cast<double>(total1) : 0.0;
            fpr_sum[j] += total0 > 0 ? static_cast<double>(fp) / static_cast<double>(total0) : 0.0;
        }
    }

    const double inv_images = 1.0 / static_cast<double>(heatmaps.size());
    std::vector<RocPoint> points;
    points.reserve(m);
    for (std::size_t j = m; j-- > 0;) {
        points.push_back(RocPoint{asc[j], fpr_sum[j] * inv_images, tpr_sum[j] * inv_images});
    }
    return points;
}

double auc(const std::vector<RocPoint>& points) {
    if (points.size() < 2) throw DomainError("auc: need at least 2 points");
    std::vector<std::pair<double, double>> xy;
    xy.reserve(points.size() + 2);
    for (const RocPoint& p : points) {
        if (p.fpr < 0.0 || p.fpr > 1.0 || p.tpr < 0.0 || p.tpr > 1.0) {
            throw DomainError("auc: rates must lie in [0, 1]");
        }
        xy.emplace_back(p.fpr, p.tpr);
    }
    std::sort(xy.begin(), xy.end());
    if (xy.front() != std::make_pair(0.0, 0.0)) xy.insert(xy.begin(), {0.0, 0.0});
    if (xy.back() != std::make_pair(1.0, 1.0)) xy.emplace_back(1.0, 1.0);

    double area = 0.0;
    for (std::size_t k = 0; k + 1 < xy.size(); ++k) {
        area += (xy[k + 1].first - xy[k].first) * (xy[k].second + xy[k + 1].second) / 2.0;
    }
    return area;
}

void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& points) {
    os << "threshold,fpr,tpr\n";
    char row[96];
    for (const RocPoint& p : points) {
        std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f\n", p.threshold, p.fpr, p.tpr);
        os << row;
    }
}

void write_metrics_csv(std::ostream& os, const MetricReport& r) {
    os << "pixel_accuracy,mean_accuracy,mean_iou,fw_iou\n";
    char row[128];
    std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f,%.6f\n", r.pixel_accuracy, r.mean_accuracy,
                  r.mean_iou, r.fw_iou);
    os << row;
}

}  // namespace deepads
