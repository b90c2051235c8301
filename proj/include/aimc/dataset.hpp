#pragma once

// Corpus layout, manifests, builds, integrity checks and train/test splits.
//
//   <root>/manifest.json
//   <root>/snr_<level>/<class_id>.aimcspec

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aimc/config.hpp"
#include "aimc/container.hpp"
#include "aimc/errors.hpp"
#include "aimc/hash.hpp"
#include "aimc/noise.hpp"
#include "aimc/oracle.hpp"
#include "aimc/parallel.hpp"
#include "aimc/rng.hpp"
#include "aimc/synth.hpp"
#include "aimc/taxonomy.hpp"

namespace aimc::dataset {

inline constexpr int manifest_format_version = 1;
inline constexpr const char* manifest_name = "manifest.json";

/// Folder name for an SNR level: snr_10, snr_-2, snr_2.5.
inline std::string snr_dir_name(double snr_db) {
    if (std::nearbyint(snr_db) == snr_db) return "snr_" + std::to_string(static_cast<long long>(snr_db));
    std::ostringstream os;
    os << "snr_" << snr_db;
    return os.str();
}

struct ManifestEntry {
    double snr_db = 0;
    std::string class_id;
    std::string path;  // relative to the corpus root
    std::uint32_t pulse_count = 0;
    std::string sha256;
    std::uint64_t byte_len = 0;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
    int format_version = manifest_format_version;
    std::uint64_t master_seed = 0;
    GenerationConfig config;
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(double snr_db, std::string_view class_id) const noexcept {
        for (const auto& e : entries)
            if (e.snr_db == snr_db && e.class_id == class_id) return &e;
        return nullptr;
    }

    /// SNR levels present, in ladder order.
    std::vector<double> snr_levels() const {
        std::vector<double> out;
        for (double s : config.snr_levels_db)
            if (std::any_of(entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.snr_db == s; }))
                out.push_back(s);
        return out;
    }

    /// Class ids present, in registry order.
    std::vector<std::string> class_ids(const Registry& registry = default_registry()) const {
        std::vector<std::string> out;
        for (const auto& cls : registry)
            if (std::any_of(entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.class_id == cls.id; }))
                out.push_back(cls.id);
        return out;
    }

    Json to_json() const {
        Json j;
        j["format_version"] = format_version;
        j["master_seed"] = master_seed;
        j["config"] = aimc::to_json(config);
        j["entries"] = Json::array();
        for (const auto& e : entries)
            j["entries"].push_back({{"snr_db", e.snr_db},
                                    {"class_id", e.class_id},
                                    {"path", e.path},
                                    {"pulse_count", e.pulse_count},
                                    {"sha256", e.sha256},
                                    {"byte_len", e.byte_len}});
        return j;
    }

    static DatasetManifest from_json(const Json& j) {
        DatasetManifest m;
        try {
            m.format_version = j.at("format_version").get<int>();
            if (m.format_version > manifest_format_version)
                throw ContainerError(ContainerError::Kind::version,
                                     "manifest format version " + std::to_string(m.format_version) + " is not supported");
            m.master_seed = j.at("master_seed").get<std::uint64_t>();
            m.config = config_from_json(j.at("config"));
            for (const auto& ej : j.at("entries")) {
                ManifestEntry e;
                e.snr_db = ej.at("snr_db").get<double>();
                e.class_id = ej.at("class_id").get<std::string>();
                e.path = ej.at("path").get<std::string>();
                e.pulse_count = ej.at("pulse_count").get<std::uint32_t>();
                e.sha256 = ej.at("sha256").get<std::string>();
                e.byte_len = ej.at("byte_len").get<std::uint64_t>();
                m.entries.push_back(std::move(e));
            }
        } catch (const Json::exception& ex) {
            throw ContainerError(ContainerError::Kind::format, std::string("malformed manifest: ") + ex.what());
        }
        return m;
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path);
        out << to_json().dump(2) << '\n';
        if (!out) throw ContainerError(ContainerError::Kind::io, "cannot write " + path.string());
    }

    static DatasetManifest load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ContainerError(ContainerError::Kind::io, "cannot open manifest " + path.string());
        Json j;
        try {
            j = Json::parse(in);
        } catch (const Json::exception& ex) {
            throw ContainerError(ContainerError::Kind::format, std::string("manifest is not valid JSON: ") + ex.what());
        }
        return from_json(j);
    }
};

/// Accepts a corpus directory or a manifest path; returns the manifest path.
inline std::filesystem::path manifest_path(const std::filesystem::path& p) {
    return std::filesystem::is_directory(p) ? p / manifest_name : p;
}

// ---------------------------------------------------------------------------
// Generation

/// Noisy capture for grid cell (snr_index, class) and pulse index.
struct GeneratedPulse {
    PulseParams params;
    NoisyCapture capture;
};

inline GeneratedPulse generate_cell_pulse(const GenerationConfig& config, std::size_t snr_index,
                                          std::size_t class_index, std::uint32_t pulse_index,
                                          const Registry& registry = default_registry()) {
    const auto& cls = registry[class_index];
    const auto seed = derive_pulse_seed(config.master_seed, snr_index, class_index, pulse_index);
    GeneratedPulse out;
    out.params = sample_pulse_params(cls, config, seed);
    const auto clean = synth::generate_pulse(out.params, config, registry);
    out.capture = noise::add_awgn(clean, config.snr_levels_db[snr_index], substream_seed(seed, Stream::noise),
                                  config.sample_rate);
    return out;
}

/// Upper bound on corpus bytes for the class subset.
inline std::uint64_t estimate_corpus_bytes(const GenerationConfig& config, const std::vector<std::size_t>& classes,
                                           const Registry& registry = default_registry()) {
    std::uint64_t total = 0;
    for (auto ci : classes) {
        const auto extra = registry[ci].param_schema.size();
        total += container::header_size + static_cast<std::uint64_t>(config.pulses_per_class) *
                                              container::record_size(extra, static_cast<std::size_t>(config.capture_len));
    }
    return total * config.snr_levels_db.size();
}

struct BuildOptions {
    int jobs = 0;
    bool check_disk_space = true;
    std::function<void(const ManifestEntry&)> on_file;  // called as each file completes (any thread, serialized)
};

/// Generates the full (snr, class) grid under `root` and writes the manifest.
inline DatasetManifest build_corpus(const GenerationConfig& config, const std::filesystem::path& root,
                                    const BuildOptions& options = {}, const Registry& registry = default_registry()) {
    namespace fs = std::filesystem;
    config.validate();
    const auto classes = registry.select(config.classes);
    fs::create_directories(root);
    if (options.check_disk_space) {
        const auto need = estimate_corpus_bytes(config, classes, registry);
        const auto have = fs::space(root).available;
        if (need > have)
            throw Error("insufficient disk space under " + root.string() + ": need " + std::to_string(need) +
                        " bytes, " + std::to_string(have) + " available");
    }
    for (double snr : config.snr_levels_db) fs::create_directories(root / snr_dir_name(snr));

    DatasetManifest manifest;
    manifest.master_seed = config.master_seed;
    manifest.config = config;
    const std::size_t n_classes = classes.size();
    manifest.entries.resize(config.snr_levels_db.size() * n_classes);
    std::mutex callback_mutex;

    parallel_for(manifest.entries.size(), resolve_jobs(options.jobs), [&](std::size_t task) {
        const std::size_t si = task / n_classes;
        const std::size_t ci = classes[task % n_classes];
        const auto& cls = registry[ci];
        const double snr = config.snr_levels_db[si];
        ManifestEntry entry;
        entry.snr_db = snr;
        entry.class_id = cls.id;
        entry.path = (fs::path(snr_dir_name(snr)) / (cls.id + ".aimcspec")).generic_string();
        entry.pulse_count = static_cast<std::uint32_t>(config.pulses_per_class);

        container::ClassFileHeader header;
        header.pulse_count = entry.pulse_count;
        header.capture_len = static_cast<std::uint32_t>(config.capture_len);
        header.sample_rate_hz = config.sample_rate;
        header.snr_db = static_cast<float>(snr);
        header.class_id = cls.id;
        container::ClassFileWriter writer(root / entry.path, header);
        for (std::uint32_t i = 0; i < entry.pulse_count; ++i) {
            try {
                auto pulse = generate_cell_pulse(config, si, ci, i, registry);
                writer.append({std::move(pulse.params), static_cast<float>(pulse.capture.measured_snr_db),
                               std::move(pulse.capture.iq)});
            } catch (const ContainerError&) {
                throw;
            } catch (const Error& e) {
                throw SynthesisError(cls.id + " at " + snr_dir_name(snr) + ", pulse " + std::to_string(i) + ": " +
                                     e.what());
            }
        }
        entry.byte_len = writer.bytes_written();
        entry.sha256 = writer.finish();
        manifest.entries[task] = entry;
        if (options.on_file) {
            std::lock_guard lock(callback_mutex);
            options.on_file(entry);
        }
    });
    manifest.save(root / manifest_name);
    return manifest;
}

// ---------------------------------------------------------------------------
// Verification

struct FileCheck {
    std::string path;
    bool ok = false;
    std::string problem;  // empty when ok
    std::optional<std::uint32_t> pulse_index;
    std::uint32_t pulses_checked = 0;
    std::uint32_t oracle_failures = 0;
};

struct VerifyReport {
    std::vector<FileCheck> files;
    std::vector<oracle::ValidationReport> failed_pulses;
    std::uint64_t pulses_checked = 0;
    std::uint64_t oracle_failures = 0;

    bool ok() const noexcept {
        return oracle_failures == 0 && std::all_of(files.begin(), files.end(), [](const FileCheck& f) { return f.ok; });
    }

    Json to_json() const {
        Json j;
        j["ok"] = ok();
        j["pulses_checked"] = pulses_checked;
        j["oracle_failures"] = oracle_failures;
        j["files"] = Json::array();
        for (const auto& f : files) {
            Json fj{{"path", f.path}, {"ok", f.ok}, {"pulses_checked", f.pulses_checked},
                    {"oracle_failures", f.oracle_failures}};
            if (!f.problem.empty()) fj["problem"] = f.problem;
            if (f.pulse_index) fj["pulse_index"] = *f.pulse_index;
            j["files"].push_back(std::move(fj));
        }
        j["failed_pulses"] = Json::array();
        for (const auto& r : failed_pulses) j["failed_pulses"].push_back(r.to_json());
        return j;
    }
};

/// Indices spot-checked for a sampling percentage: evenly spaced, always
/// including pulse 0 when the percentage is positive.
inline std::vector<std::uint32_t> spot_check_indices(std::uint32_t count, double percent) {
    std::vector<std::uint32_t> out;
    if (percent <= 0 || count == 0) return out;
    const auto k = std::min<std::uint32_t>(count, static_cast<std::uint32_t>(std::ceil(count * std::min(percent, 100.0) / 100.0)));
    for (std::uint32_t i = 0; i < k; ++i) out.push_back(static_cast<std::uint32_t>(std::uint64_t(i) * count / k));
    return out;
}

/// Hash-checks every file, then re-reads it, validating record CRCs and
/// running the oracle on `sample_percent` of the pulses.
inline VerifyReport verify_corpus(const DatasetManifest& manifest, const std::filesystem::path& root,
                                  double sample_percent = 5.0, int jobs = 0) {
    namespace fs = std::filesystem;
    VerifyReport report;
    report.files.resize(manifest.entries.size());
    std::vector<std::vector<oracle::ValidationReport>> failures(manifest.entries.size());

    parallel_for(manifest.entries.size(), resolve_jobs(jobs), [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        FileCheck& fc = report.files[i];
        fc.path = e.path;
        const fs::path file = root / e.path;
        if (!fs::exists(file)) {
            fc.problem = "missing file";
            return;
        }
        const bool size_ok = fs::file_size(file) == e.byte_len;
        const bool hash_ok = size_ok && sha256_file(file) == e.sha256;
        const auto sample = spot_check_indices(e.pulse_count, sample_percent);
        try {
            container::ClassFileReader reader(file);
            const auto& h = reader.header();
            if (h.class_id != e.class_id || h.pulse_count != e.pulse_count || h.snr_db != static_cast<float>(e.snr_db)) {
                fc.problem = "header disagrees with the manifest";
                return;
            }
            std::size_t next_sample = 0;
            while (!reader.done()) {
                const auto idx = reader.next_index();
                auto rec = reader.next();
                if (next_sample < sample.size() && sample[next_sample] == idx) {
                    ++next_sample;
                    ++fc.pulses_checked;
                    NoisyCapture cap;
                    cap.iq = std::move(rec.iq);
                    cap.target_snr_db = e.snr_db;
                    cap.measured_snr_db = rec.measured_snr_db;
                    auto vr = oracle::validate_pulse(cap, rec.params, manifest.config);
                    if (!vr.pass()) {
                        ++fc.oracle_failures;
                        vr.label += " pulse " + std::to_string(idx) + " in " + e.path;
                        failures[i].push_back(std::move(vr));
                    }
                }
            }
        } catch (const ContainerError& ex) {
            fc.problem = std::string(to_string(ex.kind())) + ": " + ex.what();
            fc.pulse_index = ex.pulse_index();
            return;
        }
        if (!hash_ok) {
            fc.problem = size_ok ? "sha256 mismatch" : "size differs from the manifest";
            return;
        }
        if (fc.oracle_failures) {
            fc.problem = std::to_string(fc.oracle_failures) + " pulse(s) failed oracle checks";
            return;
        }
        fc.ok = true;
    });
    for (std::size_t i = 0; i < report.files.size(); ++i) {
        report.pulses_checked += report.files[i].pulses_checked;
        report.oracle_failures += report.files[i].oracle_failures;
        for (auto& f : failures[i]) report.failed_pulses.push_back(std::move(f));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Splits

struct Stratum {
    double snr_db = 0;
    std::string class_id;
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> test;
};

/// Per-(snr, class) stratified split. Each stratum is shuffled with its own
/// stream derived from (split_seed, snr index, class index); the first
/// round(ratio * n) shuffled indices, clamped to [1, n-1], form the training set.
inline std::vector<Stratum> split_train_test(const DatasetManifest& manifest, double ratio, std::uint64_t split_seed,
                                             const Registry& registry = default_registry()) {
    if (!(ratio > 0 && ratio < 1)) throw ConfigError("ratio", "must lie strictly between 0 and 1");
    std::vector<Stratum> out;
    const auto& ladder = manifest.config.snr_levels_db;
    for (const auto& e : manifest.entries) {
        if (e.pulse_count < 2)
            throw Error("stratum " + e.path + " has fewer than 2 pulses and cannot be split");
        const auto snr_index = static_cast<std::uint64_t>(std::find(ladder.begin(), ladder.end(), e.snr_db) - ladder.begin());
        const auto class_index = registry.index_of(e.class_id);
        Xoshiro256 rng(substream_seed(derive_pulse_seed(split_seed, snr_index, class_index, 0), Stream::split));
        std::vector<std::uint32_t> idx(e.pulse_count);
        std::iota(idx.begin(), idx.end(), 0u);
        for (std::size_t i = idx.size() - 1; i > 0; --i)
            std::swap(idx[i], idx[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
        const auto n = static_cast<std::int64_t>(e.pulse_count);
        const auto n_train = std::clamp<std::int64_t>(std::llround(ratio * static_cast<double>(n)), 1, n - 1);
        Stratum s{e.snr_db, e.class_id, {idx.begin(), idx.begin() + n_train}, {idx.begin() + n_train, idx.end()}};
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.test.begin(), s.test.end());
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace aimc::dataset
