#pragma once

// Run configuration: one JSON document per experiment. Unknown keys are
// rejected so typos in sweep files fail loudly.
//
// {
//   "dataset":  { "kind": "ucr" | "ford" | "starlight" | "wav" | "spoken-digits"
//                         | "sine-chirp" | "three-tone",
//                 "path": "...", "train_subsample": 0, "test_fraction": 0.2,
//                 "split_seed": 0, "target_length": 5120,
//                 "n": 256, "length": 64, "seed": 0 },
//   "model":    { "M": 6, "delta_z": 1.0, "mode": "FULL",
//                 "pulse": { "pad_factor": 2, "m": 3, "T0": 0.5 },
//                 "bias": false, "normalization": "minmax", "init_scale": 0.0 },
//   "train":    { "epochs": 200, "batch": 32, "lr": 1e-3, "b1": 0.9, "b2": 0.999,
//                 "eps": 1e-8, "val_fraction": 0.2 },
//   "seeds":    [0, 1, ...],
//   "out_dir":  "runs/example",
//   "gradcheck": { "modes": [...], "lengths": [16, 64], "layers": [1, 2, 6],
//                  "classes": [2, 3], "epsilon": 1e-6, "threshold": 1e-6, "seed": 0 }
// }

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsn/error.hpp"
#include "nsn/io.hpp"
#include "nsn/model.hpp"
#include "nsn/train.hpp"

namespace nsn {

struct DatasetSpec {
    std::string kind;
    std::string path;
    std::size_t train_subsample = 0; ///< 0 keeps every training series
    double test_fraction = 0.2;      ///< for sources without a fixed test file
    std::uint64_t split_seed = 0;
    std::size_t target_length = 5120; ///< audio clip length
    std::size_t n = 256;              ///< synthetic sample count
    std::size_t length = 64;          ///< synthetic series length
    std::uint64_t seed = 0;           ///< synthetic generator seed
};

struct ModelSpec {
    std::size_t num_layers = 6;
    double delta_z = 1.0;
    AblationMode mode = AblationMode::Full;
    PulseConfig pulse;
    bool bias = false;
    Normalization normalization = Normalization::MinMax;
    double init_scale = 0.0;
};

struct TrainSpec {
    std::size_t epochs = 200;
    std::size_t batch = 32;
    AdamHyper adam;
    double val_fraction = 0.2;
};

struct GradcheckSpec {
    std::vector<AblationMode> modes{AblationMode::Full, AblationMode::DOnly, AblationMode::NOnly,
                                    AblationMode::Baseline};
    std::vector<std::size_t> lengths{16, 64};
    std::vector<std::size_t> layers{1, 2, 6};
    std::vector<std::size_t> classes{2, 3};
    double epsilon = 1e-6;
    double threshold = 1e-6;
    std::uint64_t seed = 0;
};

struct RunConfig {
    DatasetSpec dataset;
    ModelSpec model;
    TrainSpec train;
    std::vector<std::uint64_t> seeds{0};
    std::string out_dir = "runs";
    GradcheckSpec gradcheck;
    std::string hash; ///< FNV-1a of the canonical config document
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return out;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be a JSON object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.contains(key)) throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
}

template <typename T>
void read_key(const nlohmann::json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
    }
}

inline AblationMode read_mode(const nlohmann::json& value, const std::string& where) {
    try {
        return parse_mode(value.get<std::string>());
    } catch (const std::exception&) {
        throw ConfigError("config key '" + where + "' must be one of FULL, D_ONLY, N_ONLY, BASELINE");
    }
}

} // namespace detail

inline const std::set<std::string>& dataset_kinds() {
    static const std::set<std::string> kinds{"ucr", "ford", "starlight", "wav", "spoken-digits", "sine-chirp",
                                             "three-tone"};
    return kinds;
}

inline RunConfig parse_config(const nlohmann::json& doc) {
    using detail::read_key;
    detail::reject_unknown_keys(doc, {"dataset", "model", "train", "seeds", "out_dir", "gradcheck"}, "");
    RunConfig cfg;

    if (doc.contains("dataset")) {
        const auto& d = doc.at("dataset");
        detail::reject_unknown_keys(d, {"kind", "path", "train_subsample", "test_fraction", "split_seed",
                                        "target_length", "n", "length", "seed"},
                                    "dataset");
        auto& ds = cfg.dataset;
        read_key(d, "kind", "dataset", ds.kind);
        read_key(d, "path", "dataset", ds.path);
        read_key(d, "train_subsample", "dataset", ds.train_subsample);
        read_key(d, "test_fraction", "dataset", ds.test_fraction);
        read_key(d, "split_seed", "dataset", ds.split_seed);
        read_key(d, "target_length", "dataset", ds.target_length);
        read_key(d, "n", "dataset", ds.n);
        read_key(d, "length", "dataset", ds.length);
        read_key(d, "seed", "dataset", ds.seed);
        if (!dataset_kinds().contains(ds.kind)) throw ConfigError("config key 'dataset.kind' has unknown value '" + ds.kind + "'");
        if (!(ds.test_fraction > 0.0 && ds.test_fraction < 1.0))
            throw ConfigError("config key 'dataset.test_fraction' must lie in (0, 1)");
    }

    if (doc.contains("model")) {
        const auto& m = doc.at("model");
        detail::reject_unknown_keys(m, {"M", "delta_z", "mode", "pulse", "bias", "normalization", "init_scale"}, "model");
        auto& ms = cfg.model;
        read_key(m, "M", "model", ms.num_layers);
        read_key(m, "delta_z", "model", ms.delta_z);
        if (m.contains("mode")) ms.mode = detail::read_mode(m.at("mode"), "model.mode");
        read_key(m, "bias", "model", ms.bias);
        read_key(m, "init_scale", "model", ms.init_scale);
        if (m.contains("normalization")) {
            std::string name;
            read_key(m, "normalization", "model", name);
            try {
                ms.normalization = parse_normalization(name);
            } catch (const std::invalid_argument&) {
                throw ConfigError("config key 'model.normalization' must be 'minmax' or 'zscore'");
            }
        }
        if (m.contains("pulse")) {
            const auto& p = m.at("pulse");
            detail::reject_unknown_keys(p, {"pad_factor", "m", "T0"}, "model.pulse");
            read_key(p, "pad_factor", "model.pulse", ms.pulse.pad_factor);
            read_key(p, "m", "model.pulse", ms.pulse.order);
            read_key(p, "T0", "model.pulse", ms.pulse.width);
        }
        if (ms.num_layers == 0 && ms.mode != AblationMode::Baseline)
            throw ConfigError("config key 'model.M' must be >= 1 unless mode is BASELINE");
        if (!(ms.delta_z > 0.0)) throw ConfigError("config key 'model.delta_z' must be positive");
        try {
            ms.pulse.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config section 'model.pulse': ") + e.what());
        }
    }

    if (doc.contains("train")) {
        const auto& t = doc.at("train");
        detail::reject_unknown_keys(t, {"epochs", "batch", "lr", "b1", "b2", "eps", "val_fraction"}, "train");
        auto& ts = cfg.train;
        read_key(t, "epochs", "train", ts.epochs);
        read_key(t, "batch", "train", ts.batch);
        read_key(t, "lr", "train", ts.adam.lr);
        read_key(t, "b1", "train", ts.adam.b1);
        read_key(t, "b2", "train", ts.adam.b2);
        read_key(t, "eps", "train", ts.adam.eps);
        read_key(t, "val_fraction", "train", ts.val_fraction);
        if (ts.batch == 0) throw ConfigError("config key 'train.batch' must be positive");
        if (!(ts.adam.lr > 0.0)) throw ConfigError("config key 'train.lr' must be positive");
        if (!(ts.val_fraction > 0.0 && ts.val_fraction < 1.0))
            throw ConfigError("config key 'train.val_fraction' must lie in (0, 1)");
    }

    read_key(doc, "seeds", "seeds", cfg.seeds);
    read_key(doc, "out_dir", "out_dir", cfg.out_dir);
    if (cfg.seeds.empty()) throw ConfigError("config key 'seeds' must list at least one seed");

    if (doc.contains("gradcheck")) {
        const auto& g = doc.at("gradcheck");
        detail::reject_unknown_keys(g, {"modes", "lengths", "layers", "classes", "epsilon", "threshold", "seed"},
                                    "gradcheck");
        auto& gs = cfg.gradcheck;
        if (g.contains("modes")) {
            if (!g.at("modes").is_array()) throw ConfigError("config key 'gradcheck.modes' must be an array");
            gs.modes.clear();
            for (const auto& v : g.at("modes")) gs.modes.push_back(detail::read_mode(v, "gradcheck.modes"));
        }
        read_key(g, "lengths", "gradcheck", gs.lengths);
        read_key(g, "layers", "gradcheck", gs.layers);
        read_key(g, "classes", "gradcheck", gs.classes);
        read_key(g, "epsilon", "gradcheck", gs.epsilon);
        read_key(g, "threshold", "gradcheck", gs.threshold);
        read_key(g, "seed", "gradcheck", gs.seed);
        if (!(gs.epsilon > 0.0)) throw ConfigError("config key 'gradcheck.epsilon' must be positive");
    }

    cfg.hash = fnv1a_hex(doc.dump());
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

} // namespace nsn
