#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nsn/config.hpp"
#include "nsn/experiment.hpp"
#include "nsn/io.hpp"

namespace nsn {
namespace {

namespace fs = std::filesystem;

std::string config_error(const std::string& text) {
    try {
        parse_config(nlohmann::json::parse(text));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

TEST(Config, DefaultsAndOverrides) {
    const auto cfg = parse_config(nlohmann::json::parse(R"({
        "dataset": {"kind": "ford", "path": "x"},
        "model": {"M": 4, "delta_z": 0.5, "mode": "D_ONLY", "pulse": {"pad_factor": 3, "m": 2, "T0": 0.8}},
        "train": {"epochs": 7, "batch": 16, "lr": 0.01},
        "seeds": [3, 4], "out_dir": "o"})"));
    EXPECT_EQ(cfg.model.num_layers, 4u);
    EXPECT_EQ(cfg.model.mode, AblationMode::DOnly);
    EXPECT_EQ(cfg.model.pulse.pad_factor, 3u);
    EXPECT_EQ(cfg.model.pulse.order, 2u);
    EXPECT_EQ(cfg.model.pulse.width, 0.8);
    EXPECT_FALSE(cfg.model.bias);
    EXPECT_EQ(cfg.train.epochs, 7u);
    EXPECT_EQ(cfg.train.adam.lr, 0.01);
    EXPECT_EQ(cfg.train.adam.b2, 0.999);
    EXPECT_EQ(cfg.train.val_fraction, 0.2);
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4}));
    EXPECT_EQ(cfg.hash.size(), 16u);

    const auto defaults = parse_config(nlohmann::json::object());
    EXPECT_EQ(defaults.model.num_layers, 6u);
    EXPECT_EQ(defaults.train.epochs, 200u);
    EXPECT_EQ(defaults.train.batch, 32u);
    EXPECT_EQ(defaults.train.adam.lr, 1e-3);
}

TEST(Config, UnknownKeysAreRejectedByName) {
    EXPECT_NE(config_error(R"({"modle": {}})").find("'modle'"), std::string::npos);
    EXPECT_NE(config_error(R"({"model": {"MM": 6}})").find("'model.MM'"), std::string::npos);
    EXPECT_NE(config_error(R"({"model": {"pulse": {"T1": 1}}})").find("'model.pulse.T1'"), std::string::npos);
    EXPECT_NE(config_error(R"({"train": {"learning_rate": 1}})").find("'train.learning_rate'"), std::string::npos);
}

TEST(Config, InvalidValuesNameTheKey) {
    EXPECT_NE(config_error(R"({"model": {"mode": "HALF"}})").find("model.mode"), std::string::npos);
    EXPECT_NE(config_error(R"({"model": {"M": "six"}})").find("model.M"), std::string::npos);
    EXPECT_NE(config_error(R"({"dataset": {"kind": "mnist"}})").find("dataset.kind"), std::string::npos);
    EXPECT_NE(config_error(R"({"train": {"batch": 0}})").find("train.batch"), std::string::npos);
    EXPECT_NE(config_error(R"({"seeds": []})").find("seeds"), std::string::npos);
    EXPECT_NE(config_error(R"({"model": {"M": 0}})").find("model.M"), std::string::npos);
}

TEST(Config, HashTracksContent) {
    const auto a = parse_config(nlohmann::json::parse(R"({"seeds": [1]})"));
    const auto b = parse_config(nlohmann::json::parse(R"({"seeds": [2]})"));
    EXPECT_NE(a.hash, b.hash);
    EXPECT_EQ(a.hash, parse_config(nlohmann::json::parse(R"({"seeds": [1]})")).hash);
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Summary, MeanStdFormatting) {
    const auto m = mean_std({0.85, 0.87, 0.89, 0.83});
    EXPECT_NEAR(m.mean, 0.86, 1e-15);
    EXPECT_NEAR(m.std, std::sqrt(0.0005), 1e-15);
    EXPECT_EQ(format_mean_std(m), "86.0 (2.2)");
    EXPECT_EQ(format_mean_std(mean_std({0.5})), "50.0 (0.0)");
}

TEST(Summary, AblationTableOrderAndLabels) {
    std::vector<ModeSummary> rows;
    for (auto mode : kAblationOrder) rows.push_back({mode, {}, {0}, {0.5}, {0.5, 0.0}});
    const auto text = ablation_table_text(rows);
    const auto b = text.find("Baseline"), n = text.find("N Only"), d = text.find("D Only"), f = text.find("Full");
    ASSERT_NE(b, std::string::npos);
    EXPECT_LT(b, n);
    EXPECT_LT(n, d);
    EXPECT_LT(d, f);
}

class ExportCurves : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("nsn_export_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    static std::vector<std::string> lines(const fs::path& p) {
        std::ifstream in(p);
        std::vector<std::string> out;
        for (std::string l; std::getline(in, l);) out.push_back(l);
        return out;
    }

    fs::path dir_;
};

TEST_F(ExportCurves, ShapeAndExactRoundTrip) {
    TrainHistory h;
    for (std::size_t e = 1; e <= 3; ++e) {
        EpochRecord r{e, 0.1 / 3.0 * static_cast<double>(e), 2.0 / 3.0, std::acos(-1.0) / e, 1e-300, {}};
        for (std::size_t i = 0; i < 6; ++i) r.layers.push_back({1.0 / (7.0 + i + e), -0.1 * e, 1e-17 * i});
        h.epochs.push_back(r);
    }
    save_history(h, dir_ / "h.jsonl", "abcd");
    EXPECT_EQ(export_curves(dir_ / "h.jsonl", dir_ / "out"), 6u);
    for (std::size_t i = 1; i <= 6; ++i) {
        const auto rows = lines(dir_ / "out" / ("layer_" + std::to_string(i) + ".csv"));
        ASSERT_EQ(rows.size(), 4u) << i;
        EXPECT_EQ(rows[0], "epoch,alpha,beta2,gamma");
        for (std::size_t e = 1; e <= 3; ++e) {
            std::stringstream ss(rows[e]);
            std::string cell;
            std::vector<double> v;
            while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
            const auto& p = h.epochs[e - 1].layers[i - 1];
            EXPECT_EQ(v, (std::vector<double>{static_cast<double>(e), p.alpha, p.beta2, p.gamma}));
        }
    }
    const auto loss = lines(dir_ / "out" / "loss.csv");
    ASSERT_EQ(loss.size(), 4u);
    EXPECT_EQ(std::stod(loss[2].substr(loss[2].find(',') + 1)), h.epochs[1].train_loss);
    EXPECT_EQ(lines(dir_ / "out" / "accuracy.csv").size(), 4u);
}

TEST_F(ExportCurves, EmptyHistoryGivesEmptyCurves) {
    std::ofstream(dir_ / "empty.jsonl").close();
    EXPECT_EQ(export_curves(dir_ / "empty.jsonl", dir_ / "out"), 0u);
    EXPECT_EQ(lines(dir_ / "out" / "loss.csv").size(), 1u);
    EXPECT_EQ(lines(dir_ / "out" / "accuracy.csv").size(), 1u);
}

TEST_F(ExportCurves, MalformedLineIsReportedByNumber) {
    TrainHistory h;
    h.epochs.push_back({1, 0.5, 0.5, 0.5, 0.5, {{0, 0, 0}}});
    std::ofstream(dir_ / "bad.jsonl") << history_to_jsonl(h) << "{\"epoch\": 2,\n";
    try {
        export_curves(dir_ / "bad.jsonl", dir_ / "out");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(History, JsonlRoundTripIsExact) {
    TrainHistory h;
    h.epochs.push_back({1, 0.1 + 0.2, 1.0 / 3.0, 2.0 / 7.0, 0.25, {{1e-310, -3.3, 0.1}}});
    h.epochs.push_back({2, 1e300, 0.0, 0.5, 1.0, {{0.0, 2.0 / 3.0, -0.0}}});
    const auto back = history_from_jsonl(history_to_jsonl(h, "xyz"));
    EXPECT_EQ(back, h.epochs);
}

TEST(Gradcheck, DefaultSweepPassesAndFaultIsCaught) {
    const GradcheckSpec spec;
    const auto sweep = run_gradcheck(spec);
    EXPECT_EQ(sweep.cases.size(), 4u * 2u * 3u * 2u);
    EXPECT_TRUE(sweep.passed()) << gradcheck_report_text(sweep);
    EXPECT_FALSE(run_gradcheck(spec, true).passed());
}

} // namespace
} // namespace nsn
