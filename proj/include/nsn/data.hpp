#pragma once

// Labeled series collections: UCR TSV and WAV-directory loaders, seeded
// stratified splits, and synthetic fixtures for desk-scale runs.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nsn/error.hpp"

namespace nsn {

struct LabeledSeries {
    std::vector<double> values;
    std::size_t label = 0;

    friend bool operator==(const LabeledSeries&, const LabeledSeries&) = default;
};

struct Dataset {
    std::vector<LabeledSeries> samples;
    std::size_t length = 0;
    std::size_t num_classes = 0;
    std::string provenance;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    /// Throws DataError unless every sample has the declared length, finite
    /// values, and a label below num_classes.
    void validate() const {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (s.values.size() != length)
                throw DataError(provenance + ": sample " + std::to_string(i) + " has length " +
                                std::to_string(s.values.size()) + ", expected " + std::to_string(length));
            if (s.label >= num_classes)
                throw DataError(provenance + ": sample " + std::to_string(i) + " label out of range");
            for (double v : s.values)
                if (!std::isfinite(v)) throw DataError(provenance + ": sample " + std::to_string(i) + " is not finite");
        }
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(num_classes, 0);
        for (const auto& s : samples) ++counts[s.label];
        return counts;
    }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        const std::size_t tab = line.find('\t', pos);
        const std::size_t end = tab == std::string_view::npos ? line.size() : tab;
        out.push_back(line.substr(pos, end - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return out;
}

inline bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '+')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return false;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

struct UcrRows {
    std::vector<long long> labels;
    std::vector<std::vector<double>> rows;
    std::size_t length = 0;
};

inline UcrRows read_ucr_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    UcrRows out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto fields = split_fields(line);
        if (fields.size() < 2)
            throw DataError(path.string() + ": row " + std::to_string(line_no) + " has no values");
        double label_value = 0.0;
        if (!parse_double(fields[0], label_value) || label_value != std::floor(label_value))
            throw DataError(path.string() + ": row " + std::to_string(line_no) + ", column 1: invalid label '" +
                            std::string(fields[0]) + "'");
        std::vector<double> values(fields.size() - 1);
        for (std::size_t c = 1; c < fields.size(); ++c)
            if (!parse_double(fields[c], values[c - 1]))
                throw DataError(path.string() + ": row " + std::to_string(line_no) + ", column " +
                                std::to_string(c + 1) + ": non-numeric value '" + std::string(fields[c]) + "'");
        if (out.rows.empty()) {
            out.length = values.size();
        } else if (values.size() != out.length) {
            throw DataError(path.string() + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(values.size()) + " values, expected " + std::to_string(out.length));
        }
        out.labels.push_back(static_cast<long long>(label_value));
        out.rows.push_back(std::move(values));
    }
    if (out.rows.empty()) throw DataError(path.string() + ": no samples");
    return out;
}

/// Ascending original label -> 0..C-1.
inline std::map<long long, std::size_t> label_remap(std::initializer_list<const UcrRows*> parts) {
    std::map<long long, std::size_t> remap;
    for (const auto* part : parts)
        for (auto l : part->labels) remap.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [orig, idx] : remap) idx = next++;
    return remap;
}

inline Dataset to_dataset(UcrRows&& raw, const std::map<long long, std::size_t>& remap, std::string provenance) {
    Dataset ds;
    ds.length = raw.length;
    ds.num_classes = remap.size();
    ds.provenance = std::move(provenance);
    ds.samples.reserve(raw.rows.size());
    for (std::size_t i = 0; i < raw.rows.size(); ++i)
        ds.samples.push_back({std::move(raw.rows[i]), remap.at(raw.labels[i])});
    ds.validate();
    return ds;
}

} // namespace detail

/// Reads a UCR archive TSV file: one series per line, label first, tab
/// separated. Original labels are remapped to 0..C-1 in ascending order.
/// Labels such as "1.0" are accepted if they are integral.
inline Dataset load_ucr_tsv(const std::filesystem::path& path) {
    auto raw = detail::read_ucr_rows(path);
    const auto remap = detail::label_remap({&raw});
    return detail::to_dataset(std::move(raw), remap, "ucr:" + path.string());
}

/// Loads a TRAIN/TEST pair with one label remap shared by both files.
inline std::pair<Dataset, Dataset> load_ucr_pair(const std::filesystem::path& train_path,
                                                 const std::filesystem::path& test_path) {
    auto train_raw = detail::read_ucr_rows(train_path);
    auto test_raw = detail::read_ucr_rows(test_path);
    if (train_raw.length != test_raw.length)
        throw DataError(test_path.string() + ": series length " + std::to_string(test_raw.length) +
                        " differs from training length " + std::to_string(train_raw.length));
    const auto remap = detail::label_remap({&train_raw, &test_raw});
    return {detail::to_dataset(std::move(train_raw), remap, "ucr:" + train_path.string()),
            detail::to_dataset(std::move(test_raw), remap, "ucr:" + test_path.string())};
}

/// Decoded mono PCM16 audio.
struct WavData {
    std::uint32_t sample_rate = 0;
    std::uint16_t channels = 0;
    std::uint16_t bits_per_sample = 0;
    std::vector<std::int16_t> samples;
};

/// Minimal RIFF/WAVE reader for uncompressed 16-bit PCM.
inline WavData read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto fail = [&](const std::string& why) { return DataError(path.string() + ": " + why); };
    const auto u16 = [&](std::size_t at) {
        return static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8));
    };
    const auto u32 = [&](std::size_t at) {
        return static_cast<std::uint32_t>(bytes[at]) | (static_cast<std::uint32_t>(bytes[at + 1]) << 8) |
               (static_cast<std::uint32_t>(bytes[at + 2]) << 16) | (static_cast<std::uint32_t>(bytes[at + 3]) << 24);
    };
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw fail("not a RIFF/WAVE file");

    WavData wav;
    bool have_fmt = false;
    bool have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::string_view id(reinterpret_cast<const char*>(bytes.data() + pos), 4);
        const std::uint32_t size = u32(pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) throw fail("truncated chunk '" + std::string(id) + "'");
        if (id == "fmt ") {
            if (size < 16) throw fail("fmt chunk too short");
            const std::uint16_t format = u16(body);
            wav.channels = u16(body + 2);
            wav.sample_rate = u32(body + 4);
            wav.bits_per_sample = u16(body + 14);
            if (format != 1) throw fail("unsupported WAV encoding (format tag " + std::to_string(format) + ")");
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw fail("data chunk before fmt chunk");
            if (wav.bits_per_sample != 16) throw fail("expected 16-bit PCM");
            wav.samples.resize(size / 2);
            for (std::size_t i = 0; i < wav.samples.size(); ++i)
                wav.samples[i] = static_cast<std::int16_t>(u16(body + 2 * i));
            have_data = true;
        }
        pos = body + size + (size & 1u);
    }
    if (!have_fmt || !have_data) throw fail("missing fmt or data chunk");
    return wav;
}

/// Center-truncates or symmetrically zero-pads to target_len. With odd slack
/// the extra sample goes to the end.
inline std::vector<double> fit_length(std::span<const double> x, std::size_t target_len) {
    std::vector<double> out(target_len, 0.0);
    if (x.size() >= target_len) {
        const std::size_t start = (x.size() - target_len) / 2;
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), target_len, out.begin());
    } else {
        const std::size_t start = (target_len - x.size()) / 2;
        std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
    }
    return out;
}

inline std::size_t digit_label_from_filename(const std::filesystem::path& file) {
    const std::string stem = file.stem().string();
    const std::size_t us = stem.find('_');
    const std::string head = stem.substr(0, us);
    if (us == std::string::npos || head.size() != 1 || head[0] < '0' || head[0] > '9')
        throw DataError(file.string() + ": cannot parse digit label from filename");
    return static_cast<std::size_t>(head[0] - '0');
}

/// Loads a directory of "digit_speaker_index.wav" recordings (8 kHz mono
/// PCM16), scales to [-1, 1) and fixes every clip to target_len samples.
inline Dataset load_wav_dir(const std::filesystem::path& dir, std::size_t target_len = 5120) {
    if (!std::filesystem::is_directory(dir)) throw DataError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError(dir.string() + ": no samples");

    Dataset ds;
    ds.length = target_len;
    ds.num_classes = 10;
    ds.provenance = "wav:" + dir.string();
    for (const auto& file : files) {
        const std::size_t label = digit_label_from_filename(file);
        const WavData wav = read_wav(file);
        if (wav.channels != 1) throw DataError(file.string() + ": expected mono audio");
        if (wav.sample_rate != 8000)
            throw DataError(file.string() + ": expected 8000 Hz, found " + std::to_string(wav.sample_rate));
        std::vector<double> x(wav.samples.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = wav.samples[i] / 32768.0;
        ds.samples.push_back({fit_length(x, target_len), label});
    }
    ds.validate();
    return ds;
}

/// Per-class proportional split: round(fraction * n_c) samples of each class
/// land in the first part. Seeded shuffle within each class.
inline std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
    std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
    for (std::size_t i = 0; i < ds.samples.size(); ++i) by_class[ds.samples[i].label].push_back(i);

    std::mt19937_64 rng(seed);
    Dataset a{{}, ds.length, ds.num_classes, ds.provenance};
    Dataset b{{}, ds.length, ds.num_classes, ds.provenance};
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        if (idx.empty()) continue;
        if (idx.size() < 2)
            throw DataError(ds.provenance + ": class " + std::to_string(c) + " has fewer than 2 samples");
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_a = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
        n_a = std::clamp<std::size_t>(n_a, 1, idx.size() - 1);
        for (std::size_t k = 0; k < idx.size(); ++k) (k < n_a ? a : b).samples.push_back(ds.samples[idx[k]]);
    }
    return {std::move(a), std::move(b)};
}

/// Keeps a seeded, class-stratified subset of at most max_samples series.
inline Dataset subsample(const Dataset& ds, std::size_t max_samples, std::uint64_t seed) {
    if (max_samples == 0 || max_samples >= ds.size()) return ds;
    auto parts = stratified_split(ds, static_cast<double>(max_samples) / static_cast<double>(ds.size()), seed);
    parts.first.provenance += " (subsampled to " + std::to_string(parts.first.size()) + ")";
    return std::move(parts.first);
}

/// Synthetic fixtures:
///  - "sine-chirp": binary, constant-frequency tones vs linear chirps with
///    random phase; balanced.
///  - "three-tone": three classes of tones in disjoint frequency bands.
inline Dataset make_synthetic(std::string_view kind, std::size_t n, std::size_t length, std::uint64_t seed) {
    if (kind != "sine-chirp" && kind != "three-tone")
        throw std::invalid_argument("unknown synthetic dataset kind '" + std::string(kind) + "'");
    if (length < 4) throw std::invalid_argument("synthetic series need length >= 4");
    const std::size_t classes = kind == "sine-chirp" ? 2 : 3;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    const double len = static_cast<double>(length);

    Dataset ds;
    ds.length = length;
    ds.num_classes = classes;
    ds.provenance = "synthetic:" + std::string(kind) + ":n=" + std::to_string(n) + ":L=" + std::to_string(length) +
                    ":seed=" + std::to_string(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t label = i % classes;
        const double phase = two_pi * unit(rng);
        std::vector<double> x(length);
        if (kind == "sine-chirp") {
            // Cycles per window: tones sit in [3, 6]; chirps sweep from [0, 1] to
            // [9, 10] through the same band.
            const double cycles = 3.0 + 3.0 * unit(rng);
            const double start = unit(rng);
            const double stop = 9.0 + unit(rng);
            for (std::size_t t = 0; t < length; ++t) {
                const double u = static_cast<double>(t) / len;
                const double arg = label == 0 ? cycles * u : start * u + 0.5 * (stop - start) * u * u;
                x[t] = std::sin(two_pi * arg + phase);
            }
        } else {
            const double cycles = 2.0 + 3.0 * static_cast<double>(label) + unit(rng);
            for (std::size_t t = 0; t < length; ++t)
                x[t] = std::sin(two_pi * cycles * static_cast<double>(t) / len + phase);
        }
        ds.samples.push_back({std::move(x), label});
    }
    ds.validate();
    return ds;
}

} // namespace nsn
