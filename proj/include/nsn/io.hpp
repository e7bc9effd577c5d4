#pragma once

// JSON checkpoint and JSONL history formats.
//
// Checkpoint (format_version 1):
//   { "format_version": 1, "config_hash": "...",
//     "model": { "series_length", "num_classes", "num_layers", "delta_z", "mode",
//                "normalization", "bias", "init_scale",
//                "pulse": { "pad_factor", "m", "T0" } },
//     "layers": [ { "alpha", "beta2", "gamma" }, ... ],          // layer order
//     "classifier": { "rows", "cols", "weights": [...], "bias": [...] } }  // row-major
//
// History: one JSON object per line and epoch:
//   { "epoch", "train_loss", "train_acc", "val_loss", "val_acc",
//     "layers": [ { "alpha", "beta2", "gamma" }, ... ], "config_hash" }
//
// nlohmann/json prints doubles in shortest round-trip form, so values
// survive a save/load cycle bit-for-bit.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsn/error.hpp"
#include "nsn/model.hpp"
#include "nsn/train.hpp"

namespace nsn {

inline constexpr int kCheckpointFormatVersion = 1;

inline std::string_view to_string(Normalization n) { return n == Normalization::MinMax ? "minmax" : "zscore"; }

inline Normalization parse_normalization(std::string_view name) {
    if (name == "minmax") return Normalization::MinMax;
    if (name == "zscore") return Normalization::ZScore;
    throw std::invalid_argument("unknown normalization '" + std::string(name) + "'");
}

inline nlohmann::json layer_to_json(const LayerParams& p) {
    return {{"alpha", p.alpha}, {"beta2", p.beta2}, {"gamma", p.gamma}};
}

inline LayerParams layer_from_json(const nlohmann::json& j) {
    return {j.at("alpha").get<double>(), j.at("beta2").get<double>(), j.at("gamma").get<double>()};
}

inline nlohmann::json model_config_to_json(const ModelConfig& cfg) {
    return {{"series_length", cfg.series_length},
            {"num_classes", cfg.num_classes},
            {"num_layers", cfg.num_layers},
            {"delta_z", cfg.delta_z},
            {"mode", std::string(to_string(cfg.mode))},
            {"normalization", std::string(to_string(cfg.normalization))},
            {"bias", cfg.bias},
            {"init_scale", cfg.init_scale},
            {"pulse", {{"pad_factor", cfg.pulse.pad_factor}, {"m", cfg.pulse.order}, {"T0", cfg.pulse.width}}}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    cfg.series_length = j.at("series_length").get<std::size_t>();
    cfg.num_classes = j.at("num_classes").get<std::size_t>();
    cfg.num_layers = j.at("num_layers").get<std::size_t>();
    cfg.delta_z = j.at("delta_z").get<double>();
    cfg.mode = parse_mode(j.at("mode").get<std::string>());
    cfg.normalization = parse_normalization(j.at("normalization").get<std::string>());
    cfg.bias = j.at("bias").get<bool>();
    cfg.init_scale = j.at("init_scale").get<double>();
    const auto& pulse = j.at("pulse");
    cfg.pulse.pad_factor = pulse.at("pad_factor").get<std::size_t>();
    cfg.pulse.order = pulse.at("m").get<unsigned>();
    cfg.pulse.width = pulse.at("T0").get<double>();
    return cfg;
}

inline nlohmann::json checkpoint_to_json(const Network& net, const std::string& config_hash = {}) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& p : net.layers()) layers.push_back(layer_to_json(p));
    return {{"format_version", kCheckpointFormatVersion},
            {"config_hash", config_hash},
            {"model", model_config_to_json(net.config())},
            {"layers", layers},
            {"classifier",
             {{"rows", net.num_logits()},
              {"cols", net.feature_length()},
              {"weights", std::vector<double>(net.weights().begin(), net.weights().end())},
              {"bias", std::vector<double>(net.bias().begin(), net.bias().end())}}}};
}

inline Network checkpoint_from_json(const nlohmann::json& j) {
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kCheckpointFormatVersion)
            throw DataError("unsupported checkpoint format_version " + std::to_string(version));
        Network net(model_config_from_json(j.at("model")));
        const auto& layers = j.at("layers");
        if (layers.size() != net.layers().size())
            throw DataError("checkpoint has " + std::to_string(layers.size()) + " layers, model expects " +
                            std::to_string(net.layers().size()));
        for (std::size_t i = 0; i < layers.size(); ++i) net.set_layer(i, layer_from_json(layers[i]));
        const auto& cls = j.at("classifier");
        if (cls.at("rows").get<std::size_t>() != net.num_logits() ||
            cls.at("cols").get<std::size_t>() != net.feature_length())
            throw DataError("checkpoint classifier shape does not match its model config");
        net.set_weights(cls.at("weights").get<std::vector<double>>());
        net.set_bias(cls.at("bias").get<std::vector<double>>());
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid checkpoint: ") + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void save_checkpoint(const Network& net, const std::filesystem::path& path, const std::string& config_hash = {}) {
    write_text(path, checkpoint_to_json(net, config_hash).dump(2) + "\n");
}

inline Network load_checkpoint(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return checkpoint_from_json(j);
}

inline nlohmann::json epoch_to_json(const EpochRecord& rec, const std::string& config_hash = {}) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& p : rec.layers) layers.push_back(layer_to_json(p));
    nlohmann::json j = {{"epoch", rec.epoch},       {"train_loss", rec.train_loss}, {"train_acc", rec.train_acc},
                        {"val_loss", rec.val_loss}, {"val_acc", rec.val_acc},       {"layers", layers}};
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    return j;
}

inline EpochRecord epoch_from_json(const nlohmann::json& j) {
    EpochRecord rec;
    rec.epoch = j.at("epoch").get<std::size_t>();
    rec.train_loss = j.at("train_loss").get<double>();
    rec.train_acc = j.at("train_acc").get<double>();
    rec.val_loss = j.at("val_loss").get<double>();
    rec.val_acc = j.at("val_acc").get<double>();
    for (const auto& l : j.at("layers")) rec.layers.push_back(layer_from_json(l));
    return rec;
}

inline std::string history_to_jsonl(const TrainHistory& history, const std::string& config_hash = {}) {
    std::string out;
    for (const auto& rec : history.epochs) out += epoch_to_json(rec, config_hash).dump() + "\n";
    return out;
}

/// Parses JSONL history text; errors name the 1-based line.
inline std::vector<EpochRecord> history_from_jsonl(const std::string& text, const std::string& source = "history") {
    std::vector<EpochRecord> records;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            records.push_back(epoch_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(source + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

inline void save_history(const TrainHistory& history, const std::filesystem::path& path,
                         const std::string& config_hash = {}) {
    write_text(path, history_to_jsonl(history, config_hash));
}

inline std::vector<EpochRecord> load_history(const std::filesystem::path& path) {
    return history_from_jsonl(read_text(path), path.string());
}

} // namespace nsn
