#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "deepads/tensor.hpp"

namespace deepads {

// Two-class pixel confusion counts: n[i][j] = pixels of true class i
// predicted as class j, with class 1 the candidate space.
struct ConfusionCounts {
    std::array<std::array<std::int64_t, 2>, 2> n{{{0, 0}, {0, 0}}};

    std::int64_t tn() const { return n[0][0]; }
    std::int64_t fp() const { return n[0][1]; }
    std::int64_t fn() const { return n[1][0]; }
    std::int64_t tp() const { return n[1][1]; }
    std::int64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }

    ConfusionCounts& operator+=(const ConfusionCounts& other) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) n[i][j] += other.n[i][j];
        return *this;
    }
};

// exact pixel counts; both tensors must be equally shaped and strictly binary
ConfusionCounts confusion(const Tensor& pred_mask, const Tensor& truth_mask);

struct MetricReport {
    double pixel_accuracy = 0.0;
    double mean_accuracy = 0.0;
    double mean_iou = 0.0;
    double fw_iou = 0.0;
};

// Standard two-class segmentation metrics over t_i = row sums. A class
// absent from both truth and prediction scores 1 (vacuous); absent from
// truth but predicted scores 0.
MetricReport compute_metrics(const ConfusionCounts& c);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

// {0.00, 0.01, ..., 1.00}
std::vector<double> default_thresholds();

// heat-map binarized at p >= threshold
Tensor threshold_mask(const Tensor& heatmap, double threshold);

// Per threshold: binarize every heat-map at p >= threshold, compute each
// image's FPR and TPR (an empty denominator contributes rate 0, and the
// image still counts), then average over images. Points come back ordered
// by descending threshold.
std::vector<RocPoint> roc_sweep(const std::vector<Tensor>& heatmaps,
                                const std::vector<Tensor>& truths,
                                const std::vector<double>& thresholds = default_thresholds());

// trapezoidal area over points sorted by (fpr, tpr), with (0,0) and (1,1)
// appended when absent
double auc(const std::vector<RocPoint>& points);

// CSV emission: 6 decimal digits, header rows as documented in the README
void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& points);
void write_metrics_csv(std::ostream& os, const MetricReport& report);

}  // namespace deepads
