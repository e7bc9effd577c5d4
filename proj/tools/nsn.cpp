// nsn: train, evaluate, ablate and verify Nonlinear Schrodinger networks.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 data error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nsn/config.hpp"
#include "nsn/error.hpp"
#include "nsn/experiment.hpp"
#include "nsn/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_dir;
    bool quiet = false;
};

nsn::RunConfig load_run_config(const CommonOptions& opts, bool require_dataset) {
    nsn::RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = nsn::load_config(opts.config_path);
    } else if (require_dataset) {
        throw nsn::ConfigError("--config is required");
    } else {
        cfg = nsn::parse_config(nlohmann::json::object());
    }
    if (require_dataset && cfg.dataset.kind.empty()) throw nsn::ConfigError("config key 'dataset' is required");
    if (opts.seed_override) cfg.seeds = {*opts.seed_override};
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    return cfg;
}

nsn::Reporter reporter(const CommonOptions& opts) {
    if (opts.quiet) return {};
    return [](const std::string& line) { std::cerr << line << '\n'; };
}

void print_summary(const nsn::ModeSummary& s) {
    std::printf("mode %s  params %zu+%zu  accuracy %s over %zu seed(s)\n", std::string(nsn::to_string(s.mode)).c_str(),
                s.params.embedding, s.params.classifier, nsn::format_mean_std(s.accuracy).c_str(), s.seeds.size());
}

int cmd_train(const CommonOptions& opts) {
    const auto cfg = load_run_config(opts, true);
    const auto summary = nsn::run_training(cfg, reporter(opts));
    print_summary(summary);
    if (!opts.quiet) std::printf("results written to %s\n", cfg.out_dir.c_str());
    return kExitOk;
}

int cmd_eval(const CommonOptions& opts, const std::string& checkpoint_path) {
    const auto cfg = load_run_config(opts, true);
    const std::filesystem::path ckpt =
        checkpoint_path.empty() ? nsn::seed_file(cfg.out_dir, "checkpoint", cfg.seeds.front(), ".json")
                                : std::filesystem::path(checkpoint_path);
    const auto net = nsn::load_checkpoint(ckpt);
    const auto data = nsn::load_data(cfg.dataset);
    const auto eval = nsn::evaluate(net, data.test);
    const nlohmann::json out = {{"checkpoint", ckpt.string()},
                                {"dataset", data.test.provenance},
                                {"accuracy", eval.accuracy},
                                {"mean_loss", eval.mean_loss},
                                {"config_hash", cfg.hash}};
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_ablate(const CommonOptions& opts) {
    const auto cfg = load_run_config(opts, true);
    const auto rows = nsn::run_ablation(cfg, reporter(opts));
    std::cout << nsn::ablation_table_text(rows);
    return kExitOk;
}

int cmd_gradcheck(const CommonOptions& opts, bool inject_fault) {
    const auto cfg = load_run_config(opts, false);
    const auto sweep = nsn::run_gradcheck(cfg.gradcheck, inject_fault);
    const std::string text = nsn::gradcheck_report_text(sweep);
    if (opts.quiet) {
        const auto pos = text.rfind("worst:");
        std::cout << (pos == std::string::npos ? text : text.substr(pos));
    } else {
        std::cout << text;
    }
    return sweep.passed() ? kExitOk : kExitVerification;
}

int cmd_export(const std::string& history, const std::string& out_dir, bool quiet) {
    if (out_dir.empty()) throw nsn::ConfigError("--out is required for export-curves");
    const auto layers = nsn::export_curves(history, out_dir);
    if (!quiet) std::printf("wrote loss.csv, accuracy.csv and %zu layer trajectory file(s) to %s\n", layers, out_dir.c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear Schrodinger network experiments"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string checkpoint_path;
    std::string history_path;
    bool inject_fault = false;
    std::uint64_t seed_override = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opts.config_path, "run configuration (JSON)");
        if (config_required) c->required();
        sub->add_option("--seed-override", seed_override, "run only this seed");
        sub->add_option("--out", opts.out_dir, "output directory (overrides out_dir)");
        sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    };

    auto* train = app.add_subcommand("train", "train every configured seed and write checkpoints, histories, summary");
    add_common(train, true);
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the configured test set");
    add_common(eval, true);
    eval->add_option("--checkpoint", checkpoint_path, "checkpoint file (default: out_dir/checkpoint_seed<first>.json)");
    auto* ablate = app.add_subcommand("ablate", "BASELINE / N_ONLY / D_ONLY / FULL comparison table");
    add_common(ablate, true);
    auto* gradcheck = app.add_subcommand("gradcheck", "compare analytic gradients with central finite differences");
    add_common(gradcheck, false);
    gradcheck->add_flag("--inject-beta2-sign-flip", inject_fault, "test hook: corrupt d_beta2 before comparing");
    auto* exportc = app.add_subcommand("export-curves", "convert a history JSONL file into CSV curves");
    exportc->add_option("history", history_path, "history JSONL file")->required();
    exportc->add_option("--out", opts.out_dir, "output directory")->required();
    exportc->add_flag("--quiet", opts.quiet, "suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (auto* sub : {train, eval, ablate, gradcheck})
        if (sub->parsed() && sub->count("--seed-override") > 0) opts.seed_override = seed_override;

    try {
        if (train->parsed()) return cmd_train(opts);
        if (eval->parsed()) return cmd_eval(opts, checkpoint_path);
        if (ablate->parsed()) return cmd_ablate(opts);
        if (gradcheck->parsed()) return cmd_gradcheck(opts, inject_fault);
        if (exportc->parsed()) return cmd_export(history_path, opts.out_dir, opts.quiet);
    } catch (const nsn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nsn::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
