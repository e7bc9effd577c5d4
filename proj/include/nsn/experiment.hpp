#pragma once

// Experiment drivers shared by the command-line tool and the acceptance
// suite: data resolution, seeded multi-run training, ablation tables,
// gradient-check sweeps and learning-curve export.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsn/config.hpp"
#include "nsn/data.hpp"
#include "nsn/io.hpp"
#include "nsn/model.hpp"
#include "nsn/train.hpp"

namespace nsn {

using Reporter = std::function<void(const std::string&)>;

struct DataBundle {
    Dataset train;
    Dataset test;
};

namespace detail {

inline std::filesystem::path find_single(const std::filesystem::path& dir, const std::string& suffix) {
    std::vector<std::filesystem::path> hits;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            hits.push_back(entry.path());
    }
    if (hits.size() != 1)
        throw DataError(dir.string() + ": expected exactly one *" + suffix + " file, found " + std::to_string(hits.size()));
    return hits.front();
}

} // namespace detail

/// Resolves a UCR location: a directory holding one *_TRAIN.tsv and one
/// *_TEST.tsv, or a path prefix such that prefix_TRAIN.tsv exists.
inline std::pair<std::filesystem::path, std::filesystem::path> resolve_ucr_paths(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path))
        return {detail::find_single(path, "_TRAIN.tsv"), detail::find_single(path, "_TEST.tsv")};
    return {path.string() + "_TRAIN.tsv", path.string() + "_TEST.tsv"};
}

inline DataBundle load_data(const DatasetSpec& spec) {
    const std::string& kind = spec.kind;
    DataBundle out;
    if (kind == "ucr" || kind == "ford" || kind == "starlight") {
        if (spec.path.empty()) throw ConfigError("config key 'dataset.path' is required for kind '" + kind + "'");
        const auto [train_path, test_path] = resolve_ucr_paths(spec.path);
        auto [train, test] = load_ucr_pair(train_path, test_path);
        out = {std::move(train), std::move(test)};
    } else {
        Dataset all;
        if (kind == "wav" || kind == "spoken-digits") {
            if (spec.path.empty()) throw ConfigError("config key 'dataset.path' is required for kind '" + kind + "'");
            all = load_wav_dir(spec.path, spec.target_length);
        } else if (kind == "sine-chirp" || kind == "three-tone") {
            all = make_synthetic(kind, spec.n, spec.length, spec.seed);
        } else {
            throw ConfigError("config key 'dataset.kind' has unknown value '" + kind + "'");
        }
        auto [train, test] = stratified_split(all, 1.0 - spec.test_fraction, spec.split_seed);
        train.provenance += " [train split " + std::to_string(1.0 - spec.test_fraction) + ", seed " +
                            std::to_string(spec.split_seed) + "]";
        test.provenance += " [test split]";
        out = {std::move(train), std::move(test)};
    }
    if (spec.train_subsample > 0) out.train = subsample(out.train, spec.train_subsample, spec.split_seed);
    return out;
}

inline ModelConfig make_model_config(const ModelSpec& spec, AblationMode mode, std::size_t length,
                                     std::size_t classes) {
    ModelConfig cfg;
    cfg.series_length = length;
    cfg.num_classes = classes;
    cfg.num_layers = spec.num_layers;
    cfg.delta_z = spec.delta_z;
    cfg.pulse = spec.pulse;
    cfg.mode = mode;
    cfg.normalization = spec.normalization;
    cfg.bias = spec.bias;
    cfg.init_scale = spec.init_scale;
    return cfg;
}

struct SeedResult {
    std::uint64_t seed;
    Network net;
    TrainHistory history;
    Evaluation test;
};

/// One training run: the seed drives the validation split, shuffling and any
/// random classifier initialization.
inline SeedResult run_seed(const RunConfig& cfg, AblationMode mode, const DataBundle& data, std::uint64_t seed,
                           const Reporter& report = {}) {
    auto [train_part, val_part] = stratified_split(data.train, 1.0 - cfg.train.val_fraction, seed);
    Network net(make_model_config(cfg.model, mode, data.train.length, data.train.num_classes), seed);
    TrainSchedule schedule{cfg.train.epochs, cfg.train.batch, cfg.train.adam, seed};
    std::function<void(const EpochRecord&)> on_epoch;
    if (report) {
        on_epoch = [&](const EpochRecord& r) {
            char line[160];
            std::snprintf(line, sizeof line, "[%s seed %llu] epoch %zu  loss %.4f  acc %.3f  val_loss %.4f  val_acc %.3f",
                          std::string(to_string(mode)).c_str(), static_cast<unsigned long long>(seed), r.epoch,
                          r.train_loss, r.train_acc, r.val_loss, r.val_acc);
            report(line);
        };
    }
    auto result = train(std::move(net), train_part, val_part, schedule, on_epoch);
    const auto test = evaluate(result.net, data.test);
    return {seed, std::move(result.net), std::move(result.history), test};
}

/// Runs every seed, in parallel when hardware allows. Results keep seed order.
inline std::vector<SeedResult> run_seeds(const RunConfig& cfg, AblationMode mode, const DataBundle& data,
                                         const Reporter& report = {}) {
    const std::size_t n = cfg.seeds.size();
    std::vector<std::optional<SeedResult>> slots(n);
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i] = run_seed(cfg, mode, data, cfg.seeds[i], report);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < n; i = next++)
                        slots[i] = run_seed(cfg, mode, data, cfg.seeds[i], Reporter{});
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    std::vector<SeedResult> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; ///< population standard deviation
};

inline MeanStd mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

/// Accuracy fraction pair rendered in percent as "mean (std)", e.g. "86.2 (3.3)".
inline std::string format_mean_std(const MeanStd& m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f (%.1f)", 100.0 * m.mean, 100.0 * m.std);
    return buf;
}

struct ModeSummary {
    AblationMode mode = AblationMode::Full;
    ParamCount params;
    std::vector<std::uint64_t> seeds;
    std::vector<double> accuracies;
    MeanStd accuracy;
};

inline ModeSummary summarize(AblationMode mode, const std::vector<SeedResult>& runs) {
    ModeSummary s;
    s.mode = mode;
    if (!runs.empty()) s.params = param_count(runs.front().net);
    for (const auto& r : runs) {
        s.seeds.push_back(r.seed);
        s.accuracies.push_back(r.test.accuracy);
    }
    s.accuracy = mean_std(s.accuracies);
    return s;
}

inline nlohmann::json summary_to_json(const ModeSummary& s, const std::string& config_hash,
                                      const std::string& provenance) {
    return {{"mode", std::string(to_string(s.mode))},
            {"config_hash", config_hash},
            {"dataset", provenance},
            {"seeds", s.seeds},
            {"accuracies", s.accuracies},
            {"accuracy_mean", s.accuracy.mean},
            {"accuracy_std", s.accuracy.std},
            {"accuracy_formatted", format_mean_std(s.accuracy)},
            {"param_counts", {{"embedding", s.params.embedding}, {"classifier", s.params.classifier}}}};
}

inline std::filesystem::path seed_file(const std::filesystem::path& dir, const std::string& stem, std::uint64_t seed,
                                       const std::string& ext) {
    return dir / (stem + "_seed" + std::to_string(seed) + ext);
}

inline void write_seed_outputs(const std::filesystem::path& dir, const std::vector<SeedResult>& runs,
                               const std::string& config_hash) {
    for (const auto& r : runs) {
        save_checkpoint(r.net, seed_file(dir, "checkpoint", r.seed, ".json"), config_hash);
        save_history(r.history, seed_file(dir, "history", r.seed, ".jsonl"), config_hash);
    }
}

/// Trains every seed of the configured mode; writes checkpoint_seed<N>.json,
/// history_seed<N>.jsonl and summary.json under out_dir.
inline ModeSummary run_training(const RunConfig& cfg, const Reporter& report = {}) {
    const DataBundle data = load_data(cfg.dataset);
    const auto runs = run_seeds(cfg, cfg.model.mode, data, report);
    const auto summary = summarize(cfg.model.mode, runs);
    const std::filesystem::path dir = cfg.out_dir;
    write_seed_outputs(dir, runs, cfg.hash);
    write_text(dir / "summary.json", summary_to_json(summary, cfg.hash, data.train.provenance).dump(2) + "\n");
    return summary;
}

inline constexpr AblationMode kAblationOrder[] = {AblationMode::Baseline, AblationMode::NOnly, AblationMode::DOnly,
                                                  AblationMode::Full};

inline std::string ablation_label(AblationMode mode) {
    switch (mode) {
    case AblationMode::Baseline: return "Baseline";
    case AblationMode::NOnly: return "N Only";
    case AblationMode::DOnly: return "D Only";
    case AblationMode::Full: return "Full";
    }
    return "?";
}

inline std::string ablation_table_text(const std::vector<ModeSummary>& rows) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-14s %s\n", "Model", "Param #", "Acc (%)");
    out += line;
    for (const auto& r : rows) {
        const std::string params = std::to_string(r.params.embedding) + "+" + std::to_string(r.params.classifier);
        std::snprintf(line, sizeof line, "%-10s %-14s %s\n", ablation_label(r.mode).c_str(), params.c_str(),
                      format_mean_std(r.accuracy).c_str());
        out += line;
    }
    return out;
}

/// BASELINE, N_ONLY, D_ONLY, FULL over the shared seed list. Writes
/// ablation.json, ablation.txt and per-mode checkpoints/histories.
inline std::vector<ModeSummary> run_ablation(const RunConfig& cfg, const Reporter& report = {}) {
    const DataBundle data = load_data(cfg.dataset);
    std::vector<ModeSummary> rows;
    nlohmann::json doc = {{"config_hash", cfg.hash}, {"dataset", data.train.provenance}, {"rows", nlohmann::json::array()}};
    const std::filesystem::path dir = cfg.out_dir;
    for (const auto mode : kAblationOrder) {
        const auto runs = run_seeds(cfg, mode, data, report);
        write_seed_outputs(dir / std::string(to_string(mode)), runs, cfg.hash);
        rows.push_back(summarize(mode, runs));
        auto row = summary_to_json(rows.back(), cfg.hash, data.train.provenance);
        row["label"] = ablation_label(mode);
        doc["rows"].push_back(row);
    }
    write_text(dir / "ablation.json", doc.dump(2) + "\n");
    write_text(dir / "ablation.txt", ablation_table_text(rows));
    return rows;
}

struct GradcheckCase {
    AblationMode mode = AblationMode::Full;
    std::size_t length = 0;
    std::size_t layers = 0;
    std::size_t classes = 0;
    GradCheckReport report;
};

struct GradcheckSweep {
    std::vector<GradcheckCase> cases;
    double threshold = 0.0;

    const GradcheckCase* worst() const {
        const GradcheckCase* w = nullptr;
        for (const auto& c : cases)
            if (!w || c.report.max_rel_error > w->report.max_rel_error) w = &c;
        return w;
    }
    bool passed() const {
        return std::all_of(cases.begin(), cases.end(),
                           [&](const GradcheckCase& c) { return c.report.max_rel_error < threshold; });
    }
};

/// A network with random layer coefficients and classifier weights, for
/// gradient checks away from the (degenerate) zero initialization.
inline Network random_network(const ModelConfig& cfg, std::mt19937_64& rng) {
    Network net(cfg);
    std::uniform_real_distribution<double> alpha(-0.2, 0.2), coef(-1.5, 1.5), w(-1.0, 1.0);
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const double a = alpha(rng), b = coef(rng), g = coef(rng);
        net.set_layer(i, {a, b, g});
    }
    std::vector<double> weights(net.weights().size());
    for (auto& x : weights) x = w(rng);
    net.set_weights(weights);
    std::vector<double> bias(net.bias().size());
    for (auto& x : bias) x = w(rng);
    net.set_bias(bias);
    return net;
}

inline GradcheckSweep run_gradcheck(const GradcheckSpec& spec, bool flip_beta2_sign = false) {
    GradcheckSweep sweep;
    sweep.threshold = spec.threshold;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    GradCheckOptions opts;
    opts.epsilon = spec.epsilon;
    opts.flip_beta2_sign = flip_beta2_sign;
    for (const auto mode : spec.modes) {
        for (const auto length : spec.lengths) {
            for (const auto layers : spec.layers) {
                for (const auto classes : spec.classes) {
                    ModelConfig cfg;
                    cfg.series_length = length;
                    cfg.num_classes = classes;
                    cfg.num_layers = layers;
                    cfg.mode = mode;
                    const Network net = random_network(cfg, rng);
                    LabeledSeries sample;
                    sample.values.resize(length);
                    for (auto& v : sample.values) v = value(rng);
                    sample.label = static_cast<std::size_t>(rng() % classes);
                    sweep.cases.push_back({mode, length, layers, classes, grad_check(net, sample, opts)});
                }
            }
        }
    }
    return sweep;
}

inline std::string gradcheck_report_text(const GradcheckSweep& sweep) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-9s %5s %3s %3s %6s %12s  %s\n", "mode", "L", "M", "C", "coords", "max_rel_err",
                  "worst coordinate");
    out += line;
    for (const auto& c : sweep.cases) {
        std::snprintf(line, sizeof line, "%-9s %5zu %3zu %3zu %6zu %12.3e  %s (analytic %.9g, numeric %.9g)\n",
                      std::string(to_string(c.mode)).c_str(), c.length, c.layers, c.classes, c.report.coordinates,
                      c.report.max_rel_error, c.report.worst_name.c_str(), c.report.worst_analytic,
                      c.report.worst_numeric);
        out += line;
    }
    if (const auto* w = sweep.worst()) {
        std::snprintf(line, sizeof line, "worst: %.3e at %s [%s L=%zu M=%zu C=%zu], threshold %.1e -> %s\n",
                      w->report.max_rel_error, w->report.worst_name.c_str(), std::string(to_string(w->mode)).c_str(),
                      w->length, w->layers, w->classes, sweep.threshold, sweep.passed() ? "PASS" : "FAIL");
        out += line;
    }
    return out;
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Converts a JSONL history into loss.csv, accuracy.csv and one
/// layer_<i>.csv (1-based) per layer. Returns the number of layer files.
inline std::size_t export_curves(const std::filesystem::path& history_path, const std::filesystem::path& out_dir) {
    const auto records = load_history(history_path);
    const std::size_t num_layers = records.empty() ? 0 : records.front().layers.size();
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].layers.size() != num_layers)
            throw DataError(history_path.string() + ": line " + std::to_string(i + 1) + " has " +
                            std::to_string(records[i].layers.size()) + " layers, expected " + std::to_string(num_layers));

    std::string loss = "epoch,train_loss,val_loss\n";
    std::string acc = "epoch,train_acc,val_acc\n";
    std::vector<std::string> layers(num_layers, "epoch,alpha,beta2,gamma\n");
    for (const auto& r : records) {
        const std::string e = std::to_string(r.epoch);
        loss += e + "," + format_g17(r.train_loss) + "," + format_g17(r.val_loss) + "\n";
        acc += e + "," + format_g17(r.train_acc) + "," + format_g17(r.val_acc) + "\n";
        for (std::size_t i = 0; i < num_layers; ++i)
            layers[i] += e + "," + format_g17(r.layers[i].alpha) + "," + format_g17(r.layers[i].beta2) + "," +
                         format_g17(r.layers[i].gamma) + "\n";
    }
    write_text(out_dir / "loss.csv", loss);
    write_text(out_dir / "accuracy.csv", acc);
    for (std::size_t i = 0; i < num_layers; ++i)
        write_text(out_dir / ("layer_" + std::to_string(i + 1) + ".csv"), layers[i]);
    return num_layers;
}

} // namespace nsn
