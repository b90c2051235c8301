#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aimc/config.hpp"
#include "aimc/errors.hpp"
#include "aimc/rng.hpp"

namespace aimc {

enum class Family { FM, PM, HM };

inline const char* to_string(Family f) noexcept {
    switch (f) {
        case Family::FM: return "FM";
        case Family::PM: return "PM";
        case Family::HM: return "HM";
    }
    return "?";
}

/// Synthesis law identifiers. `custom` marks user-registered classes that
/// have no shipped law; synthesizing them is an error.
enum class LawKind {
    unmod, lfm_up, lfm_down, nlfm, sfm, eqfm, dlfm_up_down, dlfm_down_up, mlfm, fsk2, fsk4, exp, costas,
    bpsk, qpsk, psk8, frank, p1, p2, p3, p4, barker,
    lfm_bpsk, fsk2_bpsk, lfm_sfm,
    custom,
};

/// Where a class parameter's range comes from.
enum class ParamSource {
    bandwidth,          // config.bandwidth_range_hz
    chips,              // config.chip_count_range, capped by pulse width
    steps,              // config.step_count_range, capped by pulse width
    square_order,       // M with M*M chips inside the chip range
    even_square_order,  // as square_order, M even (P2)
    costas_order,       // one of config.costas_orders
    fixed,              // constant (e.g. Barker length)
};

struct ParamSpec {
    std::string name;
    ParamSource source = ParamSource::fixed;
    double fixed_value = 0;
};

struct ModulationClass {
    std::string id;
    Family family = Family::FM;
    std::vector<ParamSpec> param_schema;
    LawKind law = LawKind::custom;
};

/// Ordered set of modulation classes. Index order is part of the seed
/// derivation, so it is stable.
class Registry {
public:
    void add(ModulationClass cls) {
        if (cls.id.empty()) throw Error("modulation class id must not be empty");
        if (cls.id.size() > 32) throw Error("modulation class id longer than 32 bytes: " + cls.id);
        if (contains(cls.id)) throw Error("duplicate modulation class id: " + cls.id);
        classes_.push_back(std::move(cls));
    }

    bool contains(std::string_view id) const noexcept { return index_of_opt(id).has_value(); }

    std::optional<std::size_t> index_of_opt(std::string_view id) const noexcept {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (classes_[i].id == id) return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view id) const {
        if (auto i = index_of_opt(id)) return *i;
        throw Error("unknown modulation class: " + std::string(id));
    }

    const ModulationClass& at(std::string_view id) const { return classes_[index_of(id)]; }
    const ModulationClass& operator[](std::size_t i) const { return classes_.at(i); }
    std::size_t size() const noexcept { return classes_.size(); }
    auto begin() const noexcept { return classes_.begin(); }
    auto end() const noexcept { return classes_.end(); }

    std::size_t count(Family f) const noexcept {
        return static_cast<std::size_t>(
            std::count_if(classes_.begin(), classes_.end(), [f](const auto& c) { return c.family == f; }));
    }

    /// Resolves `config.classes` (empty = all) into registry indices.
    std::vector<std::size_t> select(const std::vector<std::string>& ids) const {
        std::vector<std::size_t> out;
        if (ids.empty()) {
            for (std::size_t i = 0; i < classes_.size(); ++i) out.push_back(i);
            return out;
        }
        for (const auto& id : ids) {
            auto i = index_of_opt(id);
            if (!i) throw ConfigError("classes", "unknown class id '" + id + "'");
            if (std::find(out.begin(), out.end(), *i) != out.end())
                throw ConfigError("classes", "duplicate class id '" + id + "'");
            out.push_back(*i);
        }
        return out;
    }

private:
    std::vector<ModulationClass> classes_;
};

/// The 33-class registry: 13 FM, 17 PM, 3 hybrid.
inline Registry register_default_classes() {
    using PS = ParamSource;
    const ParamSpec bw{"bandwidth_hz", PS::bandwidth};
    const ParamSpec chips{"chip_count", PS::chips};
    const ParamSpec steps{"step_count", PS::steps};
    const ParamSpec symbols{"symbol_count", PS::chips};
    const ParamSpec hybrid_symbols{"symbol_count", PS::steps};

    Registry r;
    auto fm = [&](std::string id, LawKind law, std::vector<ParamSpec> schema) {
        r.add({std::move(id), Family::FM, std::move(schema), law});
    };
    fm("UNMOD", LawKind::unmod, {});
    fm("LFM_up", LawKind::lfm_up, {bw});
    fm("LFM_down", LawKind::lfm_down, {bw});
    fm("NLFM", LawKind::nlfm, {bw});
    fm("SFM", LawKind::sfm, {bw, steps});
    fm("EQFM", LawKind::eqfm, {bw});
    fm("DLFM_up_down", LawKind::dlfm_up_down, {bw});
    fm("DLFM_down_up", LawKind::dlfm_down_up, {bw});
    fm("MLFM", LawKind::mlfm, {bw});
    fm("FSK2", LawKind::fsk2, {bw, symbols});
    fm("FSK4", LawKind::fsk4, {bw, symbols});
    fm("EXP", LawKind::exp, {bw});
    fm("COSTAS", LawKind::costas, {bw, {"costas_order", PS::costas_order}});

    auto pm = [&](std::string id, LawKind law, std::vector<ParamSpec> schema) {
        r.add({std::move(id), Family::PM, std::move(schema), law});
    };
    pm("BPSK", LawKind::bpsk, {chips});
    pm("QPSK", LawKind::qpsk, {chips});
    pm("8PSK", LawKind::psk8, {chips});
    pm("FRANK", LawKind::frank, {{"code_order", PS::square_order}});
    pm("P1", LawKind::p1, {{"code_order", PS::square_order}});
    pm("P2", LawKind::p2, {{"code_order", PS::even_square_order}});
    pm("P3", LawKind::p3, {{"code_length", PS::chips}});
    pm("P4", LawKind::p4, {{"code_length", PS::chips}});
    const std::pair<const char*, int> barkers[] = {{"BARKER_2_1", 2}, {"BARKER_2_2", 2}, {"BARKER_3", 3},
                                                   {"BARKER_4_1", 4}, {"BARKER_4_2", 4}, {"BARKER_5", 5},
                                                   {"BARKER_7", 7},   {"BARKER_11", 11}, {"BARKER_13", 13}};
    for (const auto& [id, len] : barkers) pm(id, LawKind::barker, {{"code_length", PS::fixed, double(len)}});

    auto hm = [&](std::string id, LawKind law, std::vector<ParamSpec> schema) {
        r.add({std::move(id), Family::HM, std::move(schema), law});
    };
    hm("LFM_BPSK", LawKind::lfm_bpsk, {bw, chips});
    hm("FSK2_BPSK", LawKind::fsk2_bpsk, {bw, hybrid_symbols, chips});
    hm("LFM_SFM", LawKind::lfm_sfm, {bw, steps});
    return r;
}

/// Registry built once and shared; immutable after construction.
inline const Registry& default_registry() {
    static const Registry registry = register_default_classes();
    return registry;
}

struct PulseParams {
    std::string class_id;
    double carrier_hz = 0;
    double pulse_width_s = 0;
    double toa_s = 0;
    std::map<std::string, double> class_params;
    std::uint64_t seed = 0;

    std::int64_t pulse_samples(double sample_rate) const noexcept {
        return std::llround(pulse_width_s * sample_rate);
    }
    std::int64_t toa_samples(double sample_rate) const noexcept { return std::llround(toa_s * sample_rate); }

    double param(const std::string& key) const {
        auto it = class_params.find(key);
        if (it == class_params.end()) throw SynthesisError("pulse of class " + class_id + " lacks parameter " + key);
        return it->second;
    }
    std::int64_t int_param(const std::string& key) const { return std::llround(param(key)); }
    bool has(const std::string& key) const { return class_params.contains(key); }

    friend bool operator==(const PulseParams&, const PulseParams&) = default;
};

/// Cap on chips/steps so each stays at least `min_chip_samples` wide.
inline std::int64_t chip_cap(std::int64_t pulse_samples, const GenerationConfig& config) {
    return pulse_samples / config.min_chip_samples;
}

/// Integer range a parameter is drawn from for a pulse of the given length.
inline Range<std::int64_t> integer_param_range(const ParamSpec& spec, std::int64_t pulse_samples,
                                               const GenerationConfig& config) {
    const std::int64_t cap = chip_cap(pulse_samples, config);
    auto capped = [&](Range<std::int64_t> r) {
        r.hi = std::min(r.hi, cap);
        return r;
    };
    switch (spec.source) {
        case ParamSource::chips: return capped(config.chip_count_range);
        case ParamSource::steps: return capped(config.step_count_range);
        case ParamSource::square_order:
        case ParamSource::even_square_order: {
            const auto chips = capped(config.chip_count_range);
            auto lo = static_cast<std::int64_t>(std::ceil(std::sqrt(double(chips.lo)) - 1e-9));
            auto hi = static_cast<std::int64_t>(std::floor(std::sqrt(double(chips.hi)) + 1e-9));
            lo = std::max<std::int64_t>(lo, 2);
            if (spec.source == ParamSource::even_square_order) {
                if (lo % 2) ++lo;
                if (hi % 2) --hi;
            }
            return {lo, hi};
        }
        default: return {0, -1};
    }
}

/// Draws a pulse descriptor. Pure function of (class, config, seed).
///
/// Draw order: carrier, pulse width (whole samples), TOA (whole samples,
/// uniform over the residual window), then class parameters in schema order.
inline PulseParams sample_pulse_params(const ModulationClass& cls, const GenerationConfig& config,
                                       std::uint64_t seed) {
    config.validate();
    Xoshiro256 rng(substream_seed(seed, Stream::params));
    PulseParams p;
    p.class_id = cls.id;
    p.seed = seed;
    const double fs = config.sample_rate;

    p.carrier_hz = config.carrier_range_hz.lo == config.carrier_range_hz.hi
                       ? config.carrier_range_hz.lo
                       : rng.uniform(config.carrier_range_hz.lo, config.carrier_range_hz.hi);

    const auto pw_lo = static_cast<std::int64_t>(std::ceil(config.pulse_width_range_s.lo * fs - 1e-6));
    const auto pw_hi = std::min<std::int64_t>(
        static_cast<std::int64_t>(std::floor(config.pulse_width_range_s.hi * fs + 1e-6)), config.capture_len);
    if (pw_lo < 2 || pw_lo > pw_hi) throw ConfigError("pulse_width_range_s", "no whole-sample width in range");
    const std::int64_t pw = rng.uniform_int(pw_lo, pw_hi);
    const std::int64_t toa = rng.uniform_int(0, config.capture_len - pw);
    p.pulse_width_s = static_cast<double>(pw) / fs;
    p.toa_s = static_cast<double>(toa) / fs;

    for (const auto& spec : cls.param_schema) {
        double value = 0;
        switch (spec.source) {
            case ParamSource::fixed: value = spec.fixed_value; break;
            case ParamSource::bandwidth:
                value = config.bandwidth_range_hz.lo == config.bandwidth_range_hz.hi
                            ? config.bandwidth_range_hz.lo
                            : rng.uniform(config.bandwidth_range_hz.lo, config.bandwidth_range_hz.hi);
                break;
            case ParamSource::costas_order: {
                const auto k = rng.uniform_int(0, static_cast<std::int64_t>(config.costas_orders.size()) - 1);
                value = static_cast<double>(config.costas_orders[static_cast<std::size_t>(k)]);
                break;
            }
            default: {
                const auto r = integer_param_range(spec, pw, config);
                if (r.lo > r.hi)
                    throw ConfigError("chip_count_range",
                                      "no admissible " + spec.name + " for class " + cls.id + " at this pulse width");
                const std::int64_t v = spec.source == ParamSource::even_square_order
                                           ? r.lo + 2 * rng.uniform_int(0, (r.hi - r.lo) / 2)
                                           : rng.uniform_int(r.lo, r.hi);
                value = static_cast<double>(v);
            }
        }
        p.class_params[spec.name] = value;
    }
    return p;
}

}  // namespace aimc
