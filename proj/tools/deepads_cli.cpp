// Command-line front end: synth / train / infer / eval / roc.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deepads/data.hpp"
#include "deepads/errors.hpp"
#include "deepads/io.hpp"
#include "deepads/metrics.hpp"
#include "deepads/model.hpp"
#include "deepads/netpbm.hpp"
#include "deepads/optim.hpp"

namespace fs = std::filesystem;
using namespace deepads;

namespace {

struct SizeArg {
    int h = 200;
    int w = 200;
};

SizeArg parse_size(const std::string& text) {
    SizeArg s;
    char sep = 0;
    std::istringstream in(text);
    if (!(in >> s.h >> sep >> s.w) || sep != 'x' || !in.eof() || s.h < 1 || s.w < 1) {
        throw CLI::ValidationError("--size", "expected HxW, e.g. 200x200");
    }
    return s;
}

void warn_unmatched(const std::vector<std::string>& stems) {
    for (const auto& stem : stems) {
        std::cerr << "warning: unmatched stem: " << stem << "\n";
    }
}

// stem -> path for every file in dir with the given extension
std::map<std::string, fs::path> scan_dir(const fs::path& dir, const std::string& ext) {
    if (!fs::is_directory(dir)) throw IoError("missing directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) {
            out.emplace(entry.path().stem().string(), entry.path());
        }
    }
    return out;
}

// matched (heat-map, truth) tensor pairs from two directories of PGMs
struct EvalPairs {
    std::vector<Tensor> heatmaps;
    std::vector<Tensor> truths;
    std::vector<std::string> stems;
};

EvalPairs load_eval_pairs(const fs::path& pred_dir, const fs::path& truth_dir) {
    const auto preds = scan_dir(pred_dir, ".pgm");
    const auto truths = scan_dir(truth_dir, ".pgm");
    EvalPairs out;
    for (const auto& [stem, pred_path] : preds) {
        auto it = truths.find(stem);
        if (it == truths.end()) {
            std::cerr << "warning: unmatched stem: " << stem << "\n";
            continue;
        }
        const Tensor heatmap = to_heatmap_tensor(read_pnm(pred_path));
        const Tensor truth = to_mask_tensor(read_pnm(it->second));
        if (!heatmap.same_shape(truth)) {
            throw ShapeError("dimension mismatch for stem '" + stem + "': prediction is " +
                             std::to_string(heatmap.dim(0)) + "x" + std::to_string(heatmap.dim(1)) +
                             ", truth is " + std::to_string(truth.dim(0)) + "x" +
                             std::to_string(truth.dim(1)));
        }
        out.heatmaps.push_back(heatmap);
        out.truths.push_back(truth);
        out.stems.push_back(stem);
    }
    for (const auto& [stem, path] : truths) {
        if (!preds.count(stem)) std::cerr << "warning: unmatched stem: " << stem << "\n";
    }
    if (out.heatmaps.empty()) {
        throw EmptyInputError("no matched prediction/truth stems between " + pred_dir.string() +
                              " and " + truth_dir.string());
    }
    return out;
}

void write_roc_svg(const fs::path& path, const std::vector<RocPoint>& points) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" "
           "viewBox=\"0 0 1 1\">\n"
        << "  <line x1=\"0\" y1=\"1\" x2=\"1\" y2=\"1\" stroke=\"black\" stroke-width=\"0.004\"/>\n"
        << "  <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"1\" stroke=\"black\" stroke-width=\"0.004\"/>\n"
        << "  <polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"0.006\" points=\"";
    char buf[64];
    for (const RocPoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f ", p.fpr, 1.0 - p.tpr);
        svg << buf;
    }
    svg << "\"/>\n</svg>\n";
    write_file_atomic(path, svg.str());
}

int cmd_synth(const fs::path& out_dir, int count, const SizeArg& size, std::uint64_t seed) {
    const auto items = gen_synthetic(count, size.h, size.w, seed);
    save_dataset(out_dir, items);
    std::cout << "wrote " << items.size() << " samples to " << out_dir.string() << "\n";
    return 0;
}

int cmd_train(const fs::path& data_dir, int epochs, int batch, double lr, std::uint64_t seed,
              double pos_weight, const SizeArg& size, const fs::path& out_ckpt) {
    const DatasetLoad loaded = load_dataset(data_dir, size.h, size.w);
    warn_unmatched(loaded.unmatched_stems);

    DeepAdsModel model(seed, size.h, size.w);
    AdamState state = adam_init(std::as_const(model).parameters(), lr);
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch;
    cfg.seed = seed;
    cfg.pos_weight = pos_weight;

    train(model, loaded.samples, cfg, state, [](int epoch, double loss) {
        char line[64];
        std::snprintf(line, sizeof(line), "epoch,%d,loss,%.12f\n", epoch + 1, loss);
        std::cout << line << std::flush;
    });
    model.save(out_ckpt);
    return 0;
}

int cmd_infer(const fs::path& ckpt, const fs::path& input, const fs::path& heatmap_out,
              const fs::path& mask_out, double threshold) {
    const DeepAdsModel model = DeepAdsModel::load(ckpt);
    const Tensor image = to_image_tensor(read_pnm(input));
    const Tensor sized = resize_image(image, model.input_height(), model.input_width());
    const Tensor heatmap =
        model.forward(sized).reshaped({model.input_height(), model.input_width()});

    write_pnm(heatmap_out, from_heatmap_tensor(heatmap));
    if (!mask_out.empty()) {
        write_pnm(mask_out, from_mask_tensor(threshold_mask(heatmap, threshold)));
    }
    return 0;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& truth_dir, double threshold) {
    const EvalPairs pairs = load_eval_pairs(pred_dir, truth_dir);
    ConfusionCounts total;
    for (std::size_t i = 0; i < pairs.heatmaps.size(); ++i) {
        total += confusion(threshold_mask(pairs.heatmaps[i], threshold), pairs.truths[i]);
    }
    write_metrics_csv(std::cout, compute_metrics(total));
    return 0;
}

int cmd_roc(const fs::path& pred_dir, const fs::path& truth_dir, const fs::path& out_csv,
            const fs::path& out_svg) {
    const EvalPairs pairs = load_eval_pairs(pred_dir, truth_dir);
    const std::vector<RocPoint> points = roc_sweep(pairs.heatmaps, pairs.truths);

    std::ostringstream csv;
    write_roc_csv(csv, points);
    write_file_atomic(out_csv, csv.str());
    if (!out_svg.empty()) write_roc_svg(out_svg, points);

    char line[48];
    std::snprintf(line, sizeof(line), "auc,%.6f\n", auc(points));
    std::cout << line;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DeepAds: advert-candidate space segmentation"};
    app.require_subcommand(1);

    std::string size_str = "200x200";
    std::string data_dir, out_path, ckpt_path, input_path, heatmap_path, mask_path;
    std::string pred_dir, truth_dir, csv_path, svg_path;
    int epochs = 1, batch = 4, count = 8;
    double lr = 1e-3, pos_weight = 1.0, threshold = 0.5;
    std::uint64_t seed = 1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--out", out_path, "output dataset directory")->required();
    synth->add_option("--count", count, "number of samples")->required();
    synth->add_option("--size", size_str, "frame size HxW (default 200x200)");
    synth->add_option("--seed", seed, "random seed (default 1)");

    auto* tr = app.add_subcommand("train", "train a model on a dataset directory");
    tr->add_option("--data", data_dir, "dataset root with images/ and masks/")->required();
    tr->add_option("--epochs", epochs, "number of epochs")->required();
    tr->add_option("--batch", batch, "mini-batch size (default 4)");
    tr->add_option("--lr", lr, "Adam learning rate (default 1e-3)");
    tr->add_option("--seed", seed, "init/shuffle seed (default 1)");
    tr->add_option("--pos-weight", pos_weight, "positive-class loss weight (default 1.0)");
    tr->add_option("--size", size_str, "network input size HxW (default 200x200)");
    tr->add_option("--out", out_path, "checkpoint output path")->required();

    auto* inf = app.add_subcommand("infer", "run a checkpoint on one image");
    inf->add_option("--ckpt", ckpt_path, "model checkpoint")->required();
    inf->add_option("--input", input_path, "input PPM image")->required();
    inf->add_option("--heatmap", heatmap_path, "output heat-map PGM")->required();
    inf->add_option("--mask", mask_path, "optional output binary-mask PGM");
    inf->add_option("--threshold", threshold, "mask binarization threshold (default 0.5)");

    auto* ev = app.add_subcommand("eval", "score heat-maps against truth masks");
    ev->add_option("--pred", pred_dir, "directory of heat-map PGMs")->required();
    ev->add_option("--truth", truth_dir, "directory of truth-mask PGMs")->required();
    ev->add_option("--threshold", threshold, "binarization threshold (default 0.5)");

    auto* roc = app.add_subcommand("roc", "threshold sweep, ROC CSV and AUC");
    roc->add_option("--pred", pred_dir, "directory of heat-map PGMs")->required();
    roc->add_option("--truth", truth_dir, "directory of truth-mask PGMs")->required();
    roc->add_option("--out", csv_path, "ROC CSV output path")->required();
    roc->add_option("--svg", svg_path, "optional SVG plot output path");

    CLI11_PARSE(app, argc, argv);

    try {
        const SizeArg size = parse_size(size_str);
        if (synth->parsed()) return cmd_synth(out_path, count, size, seed);
        if (tr->parsed()) {
            return cmd_train(data_dir, epochs, batch, lr, seed, pos_weight, size, out_path);
        }
        if (inf->parsed()) {
            return cmd_infer(ckpt_path, input_path, heatmap_path, mask_path, threshold);
        }
        if (ev->parsed()) return cmd_eval(pred_dir, truth_dir, threshold);
        if (roc->parsed()) return cmd_roc(pred_dir, truth_dir, csv_path, svg_path);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
