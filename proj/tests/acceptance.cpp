// Acceptance suite: one PASS / FAIL / SKIP line per criterion. Exits nonzero
// if any criterion fails. Criteria 5 and 6 need UCR data:
//   NSN_FORDA_PATH      directory or prefix of FordA_TRAIN.tsv / FordA_TEST.tsv
//   NSN_FORDA_SUBSAMPLE optional training subsample (FULL threshold then 0.75)
//   NSN_STARLIGHT_PATH  directory or prefix of StarLightCurves_{TRAIN,TEST}.tsv
//   NSN_SLOW=1          required in addition for criterion 6

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nsn/config.hpp"
#include "nsn/experiment.hpp"
#include "nsn/io.hpp"
#include "nsn/layer.hpp"
#include "nsn/oracle.hpp"

namespace {

using namespace nsn;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

ComplexField random_field(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    ComplexField f(n);
    for (auto& z : f) z = Complex(d(rng), d(rng));
    return f;
}

ComplexField gaussian(std::size_t n, double sigma) {
    ComplexField f(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = (static_cast<double>(t) - 0.5 * static_cast<double>(n)) / sigma;
        f[t] = Complex(std::exp(-0.5 * u * u), 0.0);
    }
    return f;
}

double relative_l2(const ComplexField& a, const ComplexField& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - ref[i]);
        den += std::norm(ref[i]);
    }
    return std::sqrt(num / den);
}

Outcome gradient_fidelity() {
    const auto start = std::chrono::steady_clock::now();
    GradcheckSpec spec;
    spec.threshold = 1e-6;
    const auto sweep = run_gradcheck(spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto* w = sweep.worst();
    return pass_if(sweep.passed() && secs < 60.0,
                   fmt("%zu cases, worst %.3e at %s [%s L=%zu M=%zu C=%zu] (< 1e-6), %.2f s (< 60 s)",
                       sweep.cases.size(), w->report.max_rel_error, w->report.worst_name.c_str(),
                       std::string(to_string(w->mode)).c_str(), w->length, w->layers, w->classes, secs));
}

Outcome physics_invariants() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    double worst_energy = 0.0;
    double worst_amp = 0.0;
    for (std::size_t n : {16u, 128u, 1000u, 1024u}) {
        const auto grid = angular_frequencies(n);
        const PropagationConfig cfg{1.0, 6};
        const auto input = random_field(n, rng);

        ComplexField e = input;
        for (int i = 0; i < 6; ++i) e = layer_forward(e, {0.0, coef(rng), coef(rng)}, cfg, grid).first;
        worst_energy = std::max(worst_energy, std::abs(l2_norm_sq(e) - l2_norm_sq(input)) / l2_norm_sq(input));

        ComplexField p = input;
        for (int i = 0; i < 6; ++i) p = layer_forward(p, {0.0, 0.0, coef(rng)}, cfg, grid).first;
        for (std::size_t t = 0; t < n; ++t) worst_amp = std::max(worst_amp, std::abs(std::abs(p[t]) - std::abs(input[t])));
    }
    return pass_if(worst_energy < 1e-10 && worst_amp < 1e-12,
                   fmt("alpha=0 M=6 energy drift %.2e (< 1e-10); phase-only |E| change %.2e (< 1e-12)", worst_energy,
                       worst_amp));
}

Outcome discretization() {
    const auto input = gaussian(1024, 20.0);
    const std::vector<LayerParams> layer{{0.0, 0.5, 0.5}};
    const double one_vs_fine =
        relative_l2(fine_step_propagate(input, layer, 1.0, 1), fine_step_propagate(input, layer, 1.0, 1000));
    const auto ref = fine_step_propagate(input, layer, 1.0, 4096);
    double lo = 1e300, hi = 0.0;
    for (std::size_t k : {1u, 2u, 4u, 8u, 16u}) {
        const double r = relative_l2(fine_step_propagate(input, layer, 1.0, k), ref) /
                         relative_l2(fine_step_propagate(input, layer, 1.0, 2 * k), ref);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return pass_if(one_vs_fine < 1e-3 && lo >= 1.5 && hi <= 2.5,
                   fmt("K=1 vs K=1000 rel L2 %.3e (< 1e-3); error ratio K/2K over K=1..16 in [%.3f, %.3f] (within [1.5, 2.5])",
                       one_vs_fine, lo, hi));
}

Outcome parameter_accounting() {
    auto count = [](AblationMode mode, std::size_t len, std::size_t classes) {
        ModelConfig cfg;
        cfg.series_length = len;
        cfg.num_classes = classes;
        cfg.num_layers = 6;
        cfg.mode = mode;
        return param_count(Network(cfg));
    };
    const auto star = count(AblationMode::Full, 1024, 3);
    const auto ford = count(AblationMode::Full, 500, 2);
    const auto digits = count(AblationMode::Baseline, 5120, 10);
    const auto digits_full = count(AblationMode::Full, 5120, 10);
    const bool ok = star == ParamCount{18, 3072} && ford == ParamCount{18, 500} && digits == ParamCount{0, 51200} &&
                    digits_full == ParamCount{18, 51200};
    return pass_if(ok, fmt("Starlight %zu+%zu, Ford %zu+%zu, Digits baseline %zu+%zu, Digits full %zu+%zu",
                           star.embedding, star.classifier, ford.embedding, ford.classifier, digits.embedding,
                           digits.classifier, digits_full.embedding, digits_full.classifier));
}

std::vector<ModeSummary> ablate_ucr(const std::string& kind, const std::string& path, std::size_t subsample,
                                    std::vector<std::uint64_t> seeds) {
    RunConfig cfg;
    cfg.dataset.kind = kind;
    cfg.dataset.path = path;
    cfg.dataset.train_subsample = subsample;
    cfg.model.num_layers = 6;
    cfg.seeds = std::move(seeds);
    const auto data = load_data(cfg.dataset);
    std::vector<ModeSummary> rows;
    for (const auto mode : kAblationOrder) rows.push_back(summarize(mode, run_seeds(cfg, mode, data)));
    return rows;
}

Outcome ford_reproduction() {
    const char* path = env("NSN_FORDA_PATH");
    if (!path) return {Verdict::Skip, "FordA data not available (set NSN_FORDA_PATH)"};
    const char* sub = env("NSN_FORDA_SUBSAMPLE");
    const std::size_t subsample = sub ? std::stoul(sub) : 0;
    const double full_min = subsample > 0 ? 0.75 : 0.80;
    const auto rows = ablate_ucr("ford", path, subsample, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const double base = rows[0].accuracy.mean, n_only = rows[1].accuracy.mean, d_only = rows[2].accuracy.mean,
                 full = rows[3].accuracy.mean;
    const bool ok = full >= full_min && base >= 0.45 && base <= 0.60 && d_only >= std::min(base, full) &&
                    d_only <= std::max(base, full) && std::abs(n_only - base) <= 0.06;
    return pass_if(ok, fmt("Full %s (>= %.2f), Baseline %s (in [45, 60]), D Only %s (between), N Only %s (within 6 of "
                           "Baseline)%s",
                           format_mean_std(rows[3].accuracy).c_str(), full_min, format_mean_std(rows[0].accuracy).c_str(),
                           format_mean_std(rows[2].accuracy).c_str(), format_mean_std(rows[1].accuracy).c_str(),
                           subsample > 0 ? fmt(", train subsampled to %zu", subsample).c_str() : ""));
}

Outcome starlight_reproduction() {
    const char* path = env("NSN_STARLIGHT_PATH");
    if (!path) return {Verdict::Skip, "StarLightCurves data not available (set NSN_STARLIGHT_PATH and NSN_SLOW=1)"};
    if (!env("NSN_SLOW")) return {Verdict::Skip, "slow criterion (set NSN_SLOW=1)"};
    RunConfig cfg;
    cfg.dataset.kind = "starlight";
    cfg.dataset.path = path;
    cfg.model.num_layers = 6;
    cfg.seeds = {0, 1, 2};
    const auto data = load_data(cfg.dataset);
    const auto full = summarize(AblationMode::Full, run_seeds(cfg, AblationMode::Full, data));
    const auto base = summarize(AblationMode::Baseline, run_seeds(cfg, AblationMode::Baseline, data));
    return pass_if(full.accuracy.mean >= 0.88 && base.accuracy.mean >= 0.80,
                   fmt("Full %s (>= 88), Baseline %s (>= 80)", format_mean_std(full.accuracy).c_str(),
                       format_mean_std(base.accuracy).c_str()));
}

/// The documented synthetic fixture (configs/synthetic.json), one seed.
RunConfig synthetic_config() {
    return parse_config(nlohmann::json::parse(R"({
        "dataset": {"kind": "sine-chirp", "n": 512, "length": 64, "seed": 0},
        "model": {"M": 2, "mode": "FULL"},
        "train": {"epochs": 50, "batch": 8, "lr": 0.01},
        "seeds": [0]})"));
}

Outcome learning_dynamics() {
    const auto cfg = synthetic_config();
    const auto data = load_data(cfg.dataset);
    const auto run = run_seed(cfg, AblationMode::Full, data, 0);
    const auto& h = run.history;
    bool start_zero = !h.initial_layers.empty();
    for (const auto& p : h.initial_layers) start_zero = start_zero && p == LayerParams{};
    double moved = 0.0;
    for (const auto& p : h.epochs.back().layers) moved = std::max({moved, std::abs(p.beta2), std::abs(p.gamma)});
    const double ratio = h.epochs.back().train_loss / h.epochs.front().train_loss;
    return pass_if(start_zero && ratio < 0.5 && moved > 1e-3,
                   fmt("final/first train loss %.3e (< 0.5); max |beta2|,|gamma| %.3f (> 1e-3); start at 0: %s",
                       ratio, moved, start_zero ? "yes" : "no"));
}

Outcome determinism() {
    auto cfg = synthetic_config();
    cfg.train.epochs = 5;
    const auto data = load_data(cfg.dataset);
    const auto a = run_seed(cfg, AblationMode::Full, data, 3);
    const auto b = run_seed(cfg, AblationMode::Full, data, 3);
    const bool ckpt = checkpoint_to_json(a.net, cfg.hash).dump() == checkpoint_to_json(b.net, cfg.hash).dump();
    const bool hist = history_to_jsonl(a.history, cfg.hash) == history_to_jsonl(b.history, cfg.hash);
    return pass_if(ckpt && hist && a.net == b.net && a.history == b.history,
                   fmt("checkpoint identical: %s; history identical: %s", ckpt ? "yes" : "no", hist ? "yes" : "no"));
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 gradient fidelity", gradient_fidelity},
        {"2 physics invariants", physics_invariants},
        {"3 discretization sanity", discretization},
        {"4 parameter accounting", parameter_accounting},
        {"5 Ford Engine reproduction", ford_reproduction},
        {"6 Starlight reproduction", starlight_reproduction},
        {"7 learning dynamics", learning_dynamics},
        {"8 determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        if (o.verdict == Verdict::Fail) ++failures;
        std::printf("%s  criterion %s: %s\n", tag, name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
