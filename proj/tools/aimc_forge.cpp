// aimc-forge: generate, verify, render, pack and benchmark radar intrapulse corpora.
//
// Exit codes: 0 success, 1 data or validation failure, 2 usage or config error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aimc/aimc.hpp"
#include "aimc/hdf5_interop.hpp"

namespace fs = std::filesystem;
using namespace aimc;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_data = 1;
constexpr int exit_usage = 2;

/// Thrown for data/validation failures that should exit with 1.
struct DataFailure : Error {
    using Error::Error;
};

void log(const std::string& msg) { std::cerr << "[aimc-forge] " << msg << '\n'; }

void log_config(const GenerationConfig& c) {
    log("master_seed " + std::to_string(c.master_seed));
    log("resolved config " + to_json(c).dump());
}

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<double> snr;
    std::vector<std::string> classes;
    std::optional<std::int64_t> pulses;
    std::optional<std::int64_t> capture_len;
};

GenerationConfig resolve_config(const Overrides& o) {
    GenerationConfig c;
    if (!o.config_path.empty()) {
        if (!fs::exists(o.config_path)) throw ConfigError("config", "file not found: " + o.config_path);
        c = load_config(o.config_path);
    }
    if (o.seed) c.master_seed = *o.seed;
    if (!o.snr.empty()) c.snr_levels_db = o.snr;
    if (!o.classes.empty()) c.classes = o.classes;
    if (o.pulses) c.pulses_per_class = *o.pulses;
    if (o.capture_len) c.capture_len = *o.capture_len;
    c.validate();
    default_registry().select(c.classes);
    return c;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "TOML or JSON generation config");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--snr", o.snr, "comma-separated SNR ladder in dB, high to low (use --snr=-2,-4 for a leading minus)")
        ->delimiter(',');
    cmd->add_option("--classes", o.classes, "comma-separated class ids")->delimiter(',');
    cmd->add_option("--pulses", o.pulses, "pulses per class and SNR");
    cmd->add_option("--capture-len", o.capture_len, "samples per capture");
}

dataset::DatasetManifest open_manifest(const std::string& where, fs::path& root) {
    const fs::path path = dataset::manifest_path(where);
    if (!fs::exists(path)) throw DataFailure("manifest not found: " + path.string());
    root = path.parent_path();
    if (root.empty()) root = ".";
    return dataset::DatasetManifest::load(path);
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << text;
    if (!out) throw DataFailure("cannot write " + path.string());
}

// ---------------------------------------------------------------------------

int cmd_gen(const Overrides& o, const std::string& out, int jobs) {
    const auto config = resolve_config(o);
    log_config(config);
    const int workers = resolve_jobs(jobs);
    log("writing corpus to " + out + " with " + std::to_string(workers) + " worker(s)");
    const auto t0 = std::chrono::steady_clock::now();
    dataset::BuildOptions opt;
    opt.jobs = workers;
    std::size_t done = 0;
    const std::size_t total = config.snr_levels_db.size() * default_registry().select(config.classes).size();
    opt.on_file = [&](const dataset::ManifestEntry& e) {
        ++done;
        log(std::to_string(done) + "/" + std::to_string(total) + " " + e.path + " " + e.sha256.substr(0, 16));
    };
    const auto manifest = dataset::build_corpus(config, out, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "generated " << manifest.entries.size() << " class files in " << std::fixed << std::setprecision(1)
              << secs << " s; manifest " << (fs::path(out) / dataset::manifest_name).string() << '\n';
    return exit_ok;
}

int cmd_verify(const std::string& where, double sample_pct, int jobs, const std::string& report_path) {
    fs::path root;
    const auto manifest = open_manifest(where, root);
    log_config(manifest.config);
    const auto report = dataset::verify_corpus(manifest, root, sample_pct, jobs);
    const fs::path json_path = report_path.empty() ? root / "verify_report.json" : fs::path(report_path);
    write_text(json_path, report.to_json().dump(2) + "\n");

    std::cout << std::left << std::setw(40) << "file" << std::setw(8) << "status" << std::setw(10) << "oracle"
              << "detail\n";
    for (const auto& f : report.files) {
        std::string detail = f.problem;
        if (f.pulse_index) detail += " (pulse " + std::to_string(*f.pulse_index) + ")";
        std::cout << std::left << std::setw(40) << f.path << std::setw(8) << (f.ok ? "ok" : "FAIL") << std::setw(10)
                  << (std::to_string(f.pulses_checked - f.oracle_failures) + "/" + std::to_string(f.pulses_checked))
                  << detail << '\n';
    }
    for (const auto& r : report.failed_pulses) {
        std::cout << "  oracle failure: " << r.label << ":";
        for (const auto& name : r.failures()) std::cout << ' ' << name;
        std::cout << '\n';
    }
    const auto bad = std::count_if(report.files.begin(), report.files.end(), [](const auto& f) { return !f.ok; });
    std::cout << (report.ok() ? "OK" : "FAILED") << ": " << report.files.size() - static_cast<std::size_t>(bad) << "/"
              << report.files.size() << " files verified, " << report.pulses_checked << " pulses oracle-checked, "
              << report.oracle_failures << " failed; report " << json_path.string() << '\n';
    return report.ok() ? exit_ok : exit_data;
}

int cmd_spectrify(const std::string& where, const std::string& preset_name, const std::string& out,
                  const std::string& format, int limit, int jobs) {
    tfr::Preset preset;
    try {
        preset = tfr::parse_preset(preset_name);
    } catch (const Error& e) {
        throw CLI::ValidationError("--preset", e.what());
    }
    if (format != "png" && format != "raw" && format != "both")
        throw CLI::ValidationError("--format", "expected png, raw or both");
    fs::path root;
    const auto manifest = open_manifest(where, root);
    log_config(manifest.config);
    log("rendering preset " + preset_name + " into " + out);
    const fs::path base = fs::path(out) / preset_name;
    std::atomic<std::size_t> images{0};
    parallel_for(manifest.entries.size(), resolve_jobs(jobs), [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        const fs::path dir = base / dataset::snr_dir_name(e.snr_db) / e.class_id;
        fs::create_directories(dir);
        container::ClassFileReader reader(root / e.path);
        while (!reader.done() && (limit <= 0 || reader.next_index() < static_cast<std::uint32_t>(limit))) {
            const auto idx = reader.next_index();
            const auto rec = reader.next();
            tfr::PresetOptions opt;
            opt.sample_rate = manifest.config.sample_rate;
            opt.carrier_hz = rec.params.carrier_hz;
            const Image img = tfr::apply_preset(rec.iq, preset, opt);
            char name[32];
            std::snprintf(name, sizeof name, "%05u", idx);
            if (format != "raw") image_io::write_png(dir / (std::string(name) + ".png"), img, preset == tfr::Preset::vit_phase);
            if (format != "png") image_io::write_raw(dir / (std::string(name) + ".f32"), img);
            ++images;
        }
    });
    std::cout << "wrote " << images.load() << " images under " << base.string() << '\n';
    return exit_ok;
}

hdf5::DatasetNames load_names(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw ConfigError("names", "cannot open " + path);
    try {
        return hdf5::DatasetNames::from_json(Json::parse(in));
    } catch (const Json::exception& e) {
        throw ConfigError("names", e.what());
    }
}

int cmd_pack(const std::string& mode, const std::string& input, const std::string& out, const std::string& names_path) {
    const auto names = load_names(names_path);
    if (mode == "export") {
        fs::path root;
        const auto manifest = open_manifest(input, root);
        log_config(manifest.config);
        hdf5::export_corpus(manifest, root, out, names);
        std::cout << "exported " << manifest.entries.size() << " class files to " << out << '\n';
        return exit_ok;
    }
    if (!fs::exists(input)) throw DataFailure("HDF5 file not found: " + input);
    const auto manifest = hdf5::import_corpus(input, out, names);
    log_config(manifest.config);
    std::cout << "imported " << manifest.entries.size() << " class files into " << out << '\n';
    return exit_ok;
}

int cmd_eval(const std::string& where, const std::vector<std::string>& kinds, const std::vector<std::string>& subsets,
             const std::vector<std::uint64_t>& seeds, const std::string& out, int jobs) {
    std::vector<eval::Regime> regimes;
    std::vector<eval::Subset> subs;
    try {
        for (const auto& k : kinds) regimes.push_back(eval::parse_regime(k));
        for (const auto& s : subsets) subs.push_back(eval::parse_subset(s));
    } catch (const Error& e) {
        throw CLI::ValidationError("--kind/--subset", e.what());
    }
    fs::path root;
    const auto manifest = open_manifest(where, root);
    log_config(manifest.config);
    log("extracting features");
    const auto store = eval::extract_features(manifest, root, jobs);
    const fs::path dir(out);
    fs::create_directories(dir);
    Json all = Json::array();
    for (auto seed : seeds) {
        std::vector<eval::EvalReport> reports;
        for (auto r : regimes)
            for (auto s : subs) reports.push_back(eval::run_experiment(store, manifest, r, s, seed));
        std::vector<std::pair<std::string, const eval::EvalReport*>> series;
        for (const auto& rep : reports) {
            const std::string tag = std::string(to_string(rep.regime)) + "_" + to_string(rep.subset);
            const std::string stem = tag + "_seed" + std::to_string(seed);
            write_text(dir / ("accuracy_" + stem + ".csv"), eval::accuracy_csv({{rep.classifier, &rep}}));
            for (std::size_t i = 0; i < rep.results.size(); ++i)
                write_text(dir / "confusion" / (stem + "_" + dataset::snr_dir_name(rep.results[i].snr_db) + ".csv"),
                           eval::confusion_csv(rep, i));
            series.emplace_back(tag, &rep);
            all.push_back(rep.to_json());
            std::cout << tag << " (split seed " << seed << "):";
            for (const auto& r : rep.results)
                std::cout << ' ' << dataset::snr_dir_name(r.snr_db).substr(4) << "dB=" << std::fixed
                          << std::setprecision(1) << r.accuracy_pct << '%';
            std::cout << '\n';
        }
        write_text(dir / ("accuracy_seed" + std::to_string(seed) + ".csv"), eval::accuracy_csv(series));
        write_text(dir / ("accuracy_seed" + std::to_string(seed) + ".svg"), eval::accuracy_svg(series));
    }
    write_text(dir / "report.json", all.dump(2) + "\n");
    std::cout << "reports written to " << dir.string() << '\n';
    return exit_ok;
}

int cmd_info(const Overrides& o, const std::string& manifest_arg) {
    if (!manifest_arg.empty()) {
        fs::path root;
        const auto m = open_manifest(manifest_arg, root);
        log_config(m.config);
        std::uint64_t bytes = 0, pulses = 0;
        for (const auto& e : m.entries) {
            bytes += e.byte_len;
            pulses += e.pulse_count;
        }
        std::cout << "corpus " << root.string() << ": " << m.snr_levels().size() << " SNR levels x "
                  << m.class_ids().size() << " classes, " << m.entries.size() << " files, " << pulses << " pulses, "
                  << bytes << " bytes, master seed " << m.master_seed << '\n';
        return exit_ok;
    }
    const auto config = resolve_config(o);
    log_config(config);
    const auto& reg = default_registry();
    std::cout << "registry: " << reg.size() << " classes (FM " << reg.count(Family::FM) << ", PM "
              << reg.count(Family::PM) << ", HM " << reg.count(Family::HM) << ")\n";
    for (const auto& cls : reg) {
        std::cout << "  " << std::left << std::setw(14) << cls.id << std::setw(4) << to_string(cls.family);
        for (const auto& p : cls.param_schema) std::cout << ' ' << p.name;
        std::cout << '\n';
    }
    const auto classes = reg.select(config.classes);
    std::cout << "grid: " << config.snr_levels_db.size() << " SNR levels x " << classes.size() << " classes x "
              << config.pulses_per_class << " pulses, about " << dataset::estimate_corpus_bytes(config, classes)
              << " bytes\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aimc-forge: radar intrapulse modulation corpus toolkit"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker threads (default $AIMC_FORGE_JOBS, else all cores)");

    Overrides gen_o;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a corpus and its manifest");
    add_overrides(gen, gen_o);
    gen->add_option("--out", gen_out, "output corpus directory")->required();
    gen->add_option("--jobs", jobs, "worker threads");

    std::string ver_in, ver_report;
    double ver_pct = 5.0;
    auto* ver = app.add_subcommand("verify", "check hashes, record CRCs and oracle spot checks");
    ver->add_option("manifest", ver_in, "manifest.json or corpus directory")->required();
    ver->add_option("--sample", ver_pct, "percentage of pulses to run through the oracle")->check(CLI::Range(0.0, 100.0));
    ver->add_option("--report", ver_report, "JSON report path (default <corpus>/verify_report.json)");
    ver->add_option("--jobs", jobs, "worker threads");

    std::string sp_in, sp_preset, sp_out, sp_format = "png";
    int sp_limit = 0;
    auto* sp = app.add_subcommand("spectrify", "render spectrogram images for a preset");
    sp->add_option("manifest", sp_in, "manifest.json or corpus directory")->required();
    sp->add_option("--preset", sp_preset, "ldc_unet, lpi_net, cdae_dcnn, stft_cnn or vit_phase")->required();
    sp->add_option("--out", sp_out, "output image directory")->required();
    sp->add_option("--format", sp_format, "png, raw or both");
    sp->add_option("--limit", sp_limit, "render at most this many pulses per class file");
    sp->add_option("--jobs", jobs, "worker threads");

    std::string pk_mode, pk_in, pk_out, pk_names;
    auto* pk = app.add_subcommand("pack", "HDF5 export/import");
    pk->add_option("mode", pk_mode, "export or import")->required()->check(CLI::IsMember({"export", "import"}));
    pk->add_option("input", pk_in, "corpus (export) or HDF5 file (import)")->required();
    pk->add_option("--out", pk_out, "HDF5 file (export) or corpus directory (import)")->required();
    pk->add_option("--names", pk_names, "JSON map of dataset roles to HDF5 dataset names");

    std::string ev_in, ev_out = "eval_out";
    std::vector<std::string> ev_kinds{"same_snr", "all_to_x"}, ev_subsets{"all", "fm_only"};
    std::vector<std::uint64_t> ev_seeds{1};
    auto* ev = app.add_subcommand("eval", "run the nearest-centroid benchmark");
    ev->add_option("manifest", ev_in, "manifest.json or corpus directory")->required();
    ev->add_option("--kind", ev_kinds, "same_snr and/or all_to_x")->delimiter(',');
    ev->add_option("--subset", ev_subsets, "all and/or fm_only")->delimiter(',');
    ev->add_option("--split-seed", ev_seeds, "one or more split seeds")->delimiter(',');
    ev->add_option("--out", ev_out, "report directory");
    ev->add_option("--jobs", jobs, "worker threads");

    Overrides info_o;
    std::string info_manifest;
    auto* info = app.add_subcommand("info", "show the registry and resolved config, or summarize a corpus");
    add_overrides(info, info_o);
    info->add_option("--manifest", info_manifest, "summarize this corpus instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*gen) return cmd_gen(gen_o, gen_out, jobs);
        if (*ver) return cmd_verify(ver_in, ver_pct, jobs, ver_report);
        if (*sp) return cmd_spectrify(sp_in, sp_preset, sp_out, sp_format, sp_limit, jobs);
        if (*pk) return cmd_pack(pk_mode, pk_in, pk_out, pk_names);
        if (*ev) return cmd_eval(ev_in, ev_kinds, ev_subsets, ev_seeds, ev_out, jobs);
        if (*info) return cmd_info(info_o, info_manifest);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
