#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "aimc/errors.hpp"

namespace aimc {

using Json = nlohmann::ordered_json;

template <typename T>
struct Range {
    T lo{};
    T hi{};

    bool contains(T v) const noexcept { return v >= lo && v <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

/// Shape constants of the synthesis laws. The defaults define the designed
/// waveforms; the oracle evaluates against these values, so a synthesizer run
/// with perturbed constants must be flagged by validation.
struct LawConstants {
    double lfm_sweep = 1.0;            // fraction of B swept by LFM_up/LFM_down
    double nlfm_gamma = 1.2;           // tangent taper of the NLFM sweep
    double mlfm_ripple = 0.05;         // sinusoidal perturbation depth, fraction of B
    double mlfm_cycles = 2.0;          // perturbation cycles per pulse
    double eqfm_curvature = 4.0;       // f(t) = c * B/T^2 * (t - T/2)^2
    double exp_alpha = 3.0;            // growth rate of the exponential sweep
    double dlfm_turn = 0.5;            // turning point of DLFM, fraction of T
    double sfm_span = 1.0;             // staircase span, fraction of B
    double fsk_span = 1.0;             // tone alphabet span, fraction of B
    double costas_span = 1.0;          // hop grid span, fraction of B
    double lfm_sfm_split = 0.5;        // share of B given to the LFM part of LFM_SFM
    double bpsk_phase = std::numbers::pi;
    double qpsk_step = std::numbers::pi / 2;
    double psk8_step = std::numbers::pi / 4;
    double barker_phase = std::numbers::pi;
    double frank_scale = 2 * std::numbers::pi;
    double p1_scale = std::numbers::pi;
    double p2_scale = std::numbers::pi;
    double p3_scale = std::numbers::pi;
    double p4_scale = std::numbers::pi;

    friend bool operator==(const LawConstants&, const LawConstants&) = default;

    /// Named access, used by config I/O and the mutation harness.
    template <typename F>
    void for_each(F&& f) {
        f("lfm_sweep", lfm_sweep);
        f("nlfm_gamma", nlfm_gamma);
        f("mlfm_ripple", mlfm_ripple);
        f("mlfm_cycles", mlfm_cycles);
        f("eqfm_curvature", eqfm_curvature);
        f("exp_alpha", exp_alpha);
        f("dlfm_turn", dlfm_turn);
        f("sfm_span", sfm_span);
        f("fsk_span", fsk_span);
        f("costas_span", costas_span);
        f("lfm_sfm_split", lfm_sfm_split);
        f("bpsk_phase", bpsk_phase);
        f("qpsk_step", qpsk_step);
        f("psk8_step", psk8_step);
        f("barker_phase", barker_phase);
        f("frank_scale", frank_scale);
        f("p1_scale", p1_scale);
        f("p2_scale", p2_scale);
        f("p3_scale", p3_scale);
        f("p4_scale", p4_scale);
    }
    template <typename F>
    void for_each(F&& f) const {
        const_cast<LawConstants*>(this)->for_each(
            [&](const char* name, double& v) { f(name, static_cast<const double&>(v)); });
    }
};

struct GenerationConfig {
    double sample_rate = 1.0e8;
    std::int64_t capture_len = 100000;
    std::int64_t pulses_per_class = 1000;
    std::vector<double> snr_levels_db{10, 5, 0, -2, -4, -6, -8, -10, -12, -14, -16, -18, -20};
    std::uint64_t master_seed = 0x41494D43ULL;
    Range<double> carrier_range_hz{5.0e6, 45.0e6};
    Range<double> pulse_width_range_s{50e-6, 500e-6};
    Range<std::int64_t> chip_count_range{16, 64};
    Range<std::int64_t> step_count_range{4, 8};
    Range<double> bandwidth_range_hz{2.0e6, 4.5e6};
    std::vector<std::int64_t> costas_orders{7, 10};
    /// Minimum chip/symbol width in samples; caps chip counts for short pulses.
    std::int64_t min_chip_samples = 100;
    /// Optional class subset (ids); empty means the whole registry.
    std::vector<std::string> classes;
    LawConstants laws;

    double capture_duration_s() const noexcept { return static_cast<double>(capture_len) / sample_rate; }

    /// Largest positive frequency excursion any shipped law reaches, as a multiple of B.
    double max_excursion_factor() const noexcept {
        return std::max({1.0 + laws.mlfm_ripple, laws.lfm_sweep, laws.fsk_span, laws.costas_span, laws.sfm_span,
                         laws.eqfm_curvature / 4.0});
    }

    /// Throws ConfigError naming the first invalid field.
    void validate() const {
        if (!(sample_rate > 0)) throw ConfigError("sample_rate", "must be positive");
        if (capture_len < 2) throw ConfigError("capture_len", "must be at least 2 samples");
        if (pulses_per_class < 1) throw ConfigError("pulses_per_class", "must be at least 1");
        if (snr_levels_db.empty()) throw ConfigError("snr_levels_db", "must not be empty");
        for (std::size_t i = 1; i < snr_levels_db.size(); ++i)
            if (!(snr_levels_db[i] < snr_levels_db[i - 1]))
                throw ConfigError("snr_levels_db", "must be strictly decreasing");
        if (carrier_range_hz.lo > carrier_range_hz.hi) throw ConfigError("carrier_range_hz", "empty range");
        if (bandwidth_range_hz.lo > bandwidth_range_hz.hi || !(bandwidth_range_hz.lo > 0))
            throw ConfigError("bandwidth_range_hz", "must be a nonempty positive range");
        if (pulse_width_range_s.lo > pulse_width_range_s.hi || !(pulse_width_range_s.lo > 0))
            throw ConfigError("pulse_width_range_s", "must be a nonempty positive range");
        if (pulse_width_range_s.hi * sample_rate > static_cast<double>(capture_len) + 1e-9)
            throw ConfigError("pulse_width_range_s", "pulse wider than the capture window");
        if (chip_count_range.lo < 2 || chip_count_range.lo > chip_count_range.hi)
            throw ConfigError("chip_count_range", "must be a nonempty range with lo >= 2");
        if (step_count_range.lo < 2 || step_count_range.lo > step_count_range.hi)
            throw ConfigError("step_count_range", "must be a nonempty range with lo >= 2");
        if (min_chip_samples < 1) throw ConfigError("min_chip_samples", "must be at least 1");
        if (static_cast<double>(min_chip_samples) * static_cast<double>(chip_count_range.lo) >
            pulse_width_range_s.lo * sample_rate)
            throw ConfigError("chip_count_range", "shortest pulse cannot hold the minimum chip count");
        if (costas_orders.empty()) throw ConfigError("costas_orders", "must not be empty");
        for (auto order : costas_orders)
            if (order < 2 || order > 64) throw ConfigError("costas_orders", "orders must lie in [2, 64]");
        const double nyquist = sample_rate / 2;
        if (!(carrier_range_hz.hi + max_excursion_factor() * bandwidth_range_hz.hi < nyquist))
            throw ConfigError("carrier_range_hz", "carrier plus sweep bandwidth exceeds +Nyquist");
        if (!(carrier_range_hz.lo - std::max(1.0, laws.lfm_sweep) * bandwidth_range_hz.hi > -nyquist))
            throw ConfigError("carrier_range_hz", "carrier minus sweep bandwidth exceeds -Nyquist");
        laws.for_each([](const char* name, const double& v) {
            if (!(v > 0)) throw ConfigError(std::string("laws.") + name, "must be positive");
        });
        if (laws.dlfm_turn >= 1.0) throw ConfigError("laws.dlfm_turn", "must lie in (0, 1)");
        if (laws.lfm_sfm_split >= 1.0) throw ConfigError("laws.lfm_sfm_split", "must lie in (0, 1)");
    }
};

namespace detail {

template <typename T>
T json_get(const Json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(field, std::string("wrong type: ") + e.what());
    }
}

template <typename T>
Range<T> json_range(const Json& j, const std::string& field) {
    auto v = json_get<std::vector<T>>(j, field);
    if (v.size() != 2) throw ConfigError(field, "expected a [low, high] pair");
    return {v[0], v[1]};
}

}  // namespace detail

inline Json to_json(const LawConstants& laws) {
    Json j = Json::object();
    laws.for_each([&](const char* name, const double& v) { j[name] = v; });
    return j;
}

inline Json to_json(const GenerationConfig& c) {
    Json j;
    j["sample_rate"] = c.sample_rate;
    j["capture_len"] = c.capture_len;
    j["pulses_per_class"] = c.pulses_per_class;
    j["snr_levels_db"] = c.snr_levels_db;
    j["master_seed"] = c.master_seed;
    j["carrier_range_hz"] = {c.carrier_range_hz.lo, c.carrier_range_hz.hi};
    j["pulse_width_range_s"] = {c.pulse_width_range_s.lo, c.pulse_width_range_s.hi};
    j["chip_count_range"] = {c.chip_count_range.lo, c.chip_count_range.hi};
    j["step_count_range"] = {c.step_count_range.lo, c.step_count_range.hi};
    j["bandwidth_range_hz"] = {c.bandwidth_range_hz.lo, c.bandwidth_range_hz.hi};
    j["costas_orders"] = c.costas_orders;
    j["min_chip_samples"] = c.min_chip_samples;
    j["classes"] = c.classes;
    j["laws"] = to_json(c.laws);
    return j;
}

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
inline GenerationConfig config_from_json(const Json& j, GenerationConfig base = {}) {
    using detail::json_get;
    using detail::json_range;
    if (!j.is_object()) throw ConfigError("<root>", "config must be an object/table");
    GenerationConfig c = std::move(base);
    for (const auto& [key, value] : j.items()) {
        if (key == "sample_rate") c.sample_rate = json_get<double>(value, key);
        else if (key == "capture_len") c.capture_len = json_get<std::int64_t>(value, key);
        else if (key == "pulses_per_class") c.pulses_per_class = json_get<std::int64_t>(value, key);
        else if (key == "snr_levels_db") c.snr_levels_db = json_get<std::vector<double>>(value, key);
        else if (key == "master_seed") {
            // TOML integers are signed 64-bit; accept the two's-complement view.
            if (value.is_number_integer() && !value.is_number_unsigned())
                c.master_seed = static_cast<std::uint64_t>(value.get<std::int64_t>());
            else
                c.master_seed = json_get<std::uint64_t>(value, key);
        } else if (key == "carrier_range_hz") c.carrier_range_hz = json_range<double>(value, key);
        else if (key == "pulse_width_range_s") c.pulse_width_range_s = json_range<double>(value, key);
        else if (key == "chip_count_range") c.chip_count_range = json_range<std::int64_t>(value, key);
        else if (key == "step_count_range") c.step_count_range = json_range<std::int64_t>(value, key);
        else if (key == "bandwidth_range_hz") c.bandwidth_range_hz = json_range<double>(value, key);
        else if (key == "costas_orders") c.costas_orders = json_get<std::vector<std::int64_t>>(value, key);
        else if (key == "min_chip_samples") c.min_chip_samples = json_get<std::int64_t>(value, key);
        else if (key == "classes") c.classes = json_get<std::vector<std::string>>(value, key);
        else if (key == "laws") {
            if (!value.is_object()) throw ConfigError("laws", "must be an object/table");
            for (const auto& [law_key, law_value] : value.items()) {
                bool found = false;
                c.laws.for_each([&](const char* name, double& v) {
                    if (law_key == name) {
                        v = json_get<double>(law_value, "laws." + law_key);
                        found = true;
                    }
                });
                if (!found) throw ConfigError("laws." + law_key, "unknown law constant");
            }
        } else {
            throw ConfigError(key, "unknown field");
        }
    }
    return c;
}

/// Parses TOML text into the same JSON tree the JSON loader consumes.
inline Json toml_to_json(std::string_view text, const std::string& source = "<toml>") {
    toml::table table;
    try {
        table = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError("<toml>", std::string(e.description()));
    }
    std::ostringstream os;
    os << toml::json_formatter{table};
    return Json::parse(os.str());
}

/// Loads a TOML (.toml) or JSON (any other extension) config file.
inline GenerationConfig load_config(const std::filesystem::path& path, GenerationConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    Json j;
    if (path.extension() == ".toml") {
        j = toml_to_json(text, path.string());
    } else {
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("<json>", e.what());
        }
    }
    return config_from_json(j, std::move(base));
}

}  // namespace aimc
