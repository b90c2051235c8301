#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "aimc/codes.hpp"
#include "aimc/config.hpp"
#include "aimc/errors.hpp"
#include "aimc/rng.hpp"
#include "aimc/taxonomy.hpp"

namespace aimc {

using cfloat = std::complex<float>;
using IqBuffer = std::vector<cfloat>;

/// One capture: unit-amplitude pulse inside [toa, toa + pw), zeros elsewhere.
struct PulseRecord {
    IqBuffer iq;
    PulseParams params;
    std::string label;
};

namespace synth {

inline constexpr double two_pi = 2 * std::numbers::pi;

/// Random and structured codes a pulse carries, derived from its seed.
struct PulseCode {
    std::vector<double> chip_phases;  // per-chip phase (PM part), empty if none
    std::vector<int> hops;            // per-symbol tone index (FSK/Costas), empty if none
    int tone_count = 0;               // size of the tone alphabet for `hops`
};

inline PulseCode make_code(LawKind law, const PulseParams& p, const LawConstants& k) {
    PulseCode code;
    Xoshiro256 rng(substream_seed(p.seed, Stream::code));
    auto draw_symbols = [&](std::int64_t count, int alphabet) {
        code.tone_count = alphabet;
        for (std::int64_t i = 0; i < count; ++i)
            code.hops.push_back(static_cast<int>(rng.uniform_int(0, alphabet - 1)));
    };
    auto draw_chips = [&](std::int64_t count, int alphabet, double step) {
        for (std::int64_t i = 0; i < count; ++i)
            code.chip_phases.push_back(static_cast<double>(rng.uniform_int(0, alphabet - 1)) * step);
    };
    switch (law) {
        case LawKind::fsk2: draw_symbols(p.int_param("symbol_count"), 2); break;
        case LawKind::fsk4: draw_symbols(p.int_param("symbol_count"), 4); break;
        case LawKind::costas: {
            const auto order = static_cast<int>(p.int_param("costas_order"));
            code.hops = costas(order, rng()).hop_indices;
            code.tone_count = order;
            break;
        }
        case LawKind::bpsk: draw_chips(p.int_param("chip_count"), 2, k.bpsk_phase); break;
        case LawKind::qpsk: draw_chips(p.int_param("chip_count"), 4, k.qpsk_step); break;
        case LawKind::psk8: draw_chips(p.int_param("chip_count"), 8, k.psk8_step); break;
        case LawKind::frank: code.chip_phases = frank(static_cast<int>(p.int_param("code_order")), k.frank_scale).phases_rad; break;
        case LawKind::p1: code.chip_phases = p1(static_cast<int>(p.int_param("code_order")), k.p1_scale).phases_rad; break;
        case LawKind::p2: code.chip_phases = p2(static_cast<int>(p.int_param("code_order")), k.p2_scale).phases_rad; break;
        case LawKind::p3: code.chip_phases = p3(static_cast<int>(p.int_param("code_length")), k.p3_scale).phases_rad; break;
        case LawKind::p4: code.chip_phases = p4(static_cast<int>(p.int_param("code_length")), k.p4_scale).phases_rad; break;
        case LawKind::barker: code.chip_phases = barker(p.class_id, k.barker_phase).phases_rad; break;
        case LawKind::lfm_bpsk: draw_chips(p.int_param("chip_count"), 2, k.bpsk_phase); break;
        case LawKind::fsk2_bpsk:
            draw_symbols(p.int_param("symbol_count"), 2);
            draw_chips(p.int_param("chip_count"), 2, k.bpsk_phase);
            break;
        default: break;
    }
    return code;
}

/// Synthesis law for one pulse: designed frequency offset and total phase
/// as functions of time since pulse start.
class PulseLaw {
public:
    PulseLaw(LawKind kind, const PulseParams& params, const GenerationConfig& config)
        : kind_(kind),
          k_(config.laws),
          fc_(params.carrier_hz),
          duration_(params.pulse_width_s),
          bw_(swept(kind) ? params.param("bandwidth_hz") : 0.0) {
        if (kind == LawKind::custom) throw SynthesisError("class " + params.class_id + " has no synthesis law");
        if (!(duration_ > 0)) throw SynthesisError("pulse width must be positive");
        code_ = make_code(kind, params, k_);
        build_steps(params);
    }

    LawKind kind() const noexcept { return kind_; }
    double pulse_width() const noexcept { return duration_; }
    const PulseCode& code() const noexcept { return code_; }

    /// Designed frequency offset from the carrier (Hz) at time t in the pulse.
    double mod_frequency(double t) const {
        check(t);
        const double x = t / duration_;
        switch (kind_) {
            case LawKind::lfm_up:
            case LawKind::lfm_bpsk: return k_.lfm_sweep * bw_ * x;
            case LawKind::lfm_down: return -k_.lfm_sweep * bw_ * x;
            case LawKind::nlfm: return bw_ / 2 * std::tan(k_.nlfm_gamma * (2 * x - 1)) / std::tan(k_.nlfm_gamma);
            case LawKind::eqfm: return k_.eqfm_curvature * bw_ * (x - 0.5) * (x - 0.5);
            case LawKind::dlfm_up_down: return dlfm_up_down_freq(x);
            case LawKind::dlfm_down_up: return bw_ - dlfm_up_down_freq(x);
            case LawKind::mlfm: return bw_ * x + k_.mlfm_ripple * bw_ * std::sin(two_pi * k_.mlfm_cycles * x);
            case LawKind::exp: return bw_ * std::expm1(k_.exp_alpha * x) / std::expm1(k_.exp_alpha);
            case LawKind::lfm_sfm: return k_.lfm_sfm_split * bw_ * x + step_freq_[piece(t)];
            case LawKind::sfm:
            case LawKind::fsk2:
            case LawKind::fsk4:
            case LawKind::costas:
            case LawKind::fsk2_bpsk: return step_freq_[piece(t)];
            default: return 0.0;
        }
    }

    /// Modulation phase: integral of 2*pi*mod_frequency plus the chip phase.
    double mod_phase(double t) const {
        check(t);
        const double T = duration_;
        const double x = t / T;
        double phase = 0;
        switch (kind_) {
            case LawKind::lfm_up:
            case LawKind::lfm_bpsk: phase = std::numbers::pi * k_.lfm_sweep * bw_ * T * x * x; break;
            case LawKind::lfm_down: phase = -std::numbers::pi * k_.lfm_sweep * bw_ * T * x * x; break;
            case LawKind::nlfm: {
                const double g = k_.nlfm_gamma;
                phase = -std::numbers::pi * bw_ * T / (2 * g * std::tan(g)) *
                        std::log(std::cos(g * (2 * x - 1)) / std::cos(g));
                break;
            }
            case LawKind::eqfm:
                phase = two_pi * k_.eqfm_curvature * bw_ * T * (std::pow(x - 0.5, 3) + 0.125) / 3;
                break;
            case LawKind::dlfm_up_down: phase = dlfm_up_down_phase(x); break;
            case LawKind::dlfm_down_up: phase = two_pi * bw_ * t - dlfm_up_down_phase(x); break;
            case LawKind::mlfm: {
                const double c = k_.mlfm_cycles;
                phase = two_pi * bw_ * T *
                        (x * x / 2 + k_.mlfm_ripple / (two_pi * c) * (1 - std::cos(two_pi * c * x)));
                break;
            }
            case LawKind::exp: {
                const double a = k_.exp_alpha;
                phase = two_pi * bw_ * T / std::expm1(a) * (std::expm1(a * x) / a - x);
                break;
            }
            case LawKind::lfm_sfm:
                phase = std::numbers::pi * k_.lfm_sfm_split * bw_ * T * x * x + step_phase(t);
                break;
            case LawKind::sfm:
            case LawKind::fsk2:
            case LawKind::fsk4:
            case LawKind::costas:
            case LawKind::fsk2_bpsk: phase = step_phase(t); break;
            default: break;
        }
        if (!code_.chip_phases.empty()) phase += code_.chip_phases[chip(t)];
        return phase;
    }

    /// Total phase including the carrier, reduced mod 2*pi.
    double phase(double t) const {
        const double cycles = fc_ * t;
        return two_pi * (cycles - std::floor(cycles)) + mod_phase(t);
    }

    /// Chip index of time t; chips split the pulse into equal slots.
    std::size_t chip(double t) const { return slot(t, code_.chip_phases.size()); }
    std::size_t piece(double t) const { return slot(t, step_freq_.size()); }

private:
    static bool swept(LawKind kind) noexcept {
        switch (kind) {
            case LawKind::unmod:
            case LawKind::bpsk:
            case LawKind::qpsk:
            case LawKind::psk8:
            case LawKind::frank:
            case LawKind::p1:
            case LawKind::p2:
            case LawKind::p3:
            case LawKind::p4:
            case LawKind::barker:
            case LawKind::custom: return false;
            default: return true;
        }
    }

    void check(double t) const {
        if (!(t >= 0 && t < duration_)) throw DomainError("time outside the pulse");
    }

    std::size_t slot(double t, std::size_t count) const {
        if (count == 0) return 0;
        // The 1e-9 nudge keeps exact slot boundaries (m*K/N integral) on the later slot.
        const auto k = static_cast<std::int64_t>(std::floor(t / duration_ * static_cast<double>(count) + 1e-9));
        return static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(count) - 1));
    }

    double dlfm_up_down_freq(double x) const {
        const double turn = k_.dlfm_turn;
        return x < turn ? bw_ * x / turn : bw_ * (1 - x) / (1 - turn);
    }

    double dlfm_up_down_phase(double x) const {
        const double turn = k_.dlfm_turn;
        const double T = duration_;
        if (x < turn) return std::numbers::pi * bw_ * T * x * x / turn;
        const double rise = std::numbers::pi * bw_ * T * turn;
        return rise + two_pi * bw_ * T / (1 - turn) * ((x - turn) - (x * x - turn * turn) / 2);
    }

    void build_steps(const PulseParams& p) {
        auto tones = [&](double span) {
            for (int h : code_.hops)
                step_freq_.push_back(span * bw_ * h / std::max(1, code_.tone_count - 1));
        };
        switch (kind_) {
            case LawKind::sfm: {
                const auto steps = p.int_param("step_count");
                for (std::int64_t i = 0; i < steps; ++i)
                    step_freq_.push_back(k_.sfm_span * bw_ * static_cast<double>(i) / static_cast<double>(steps - 1));
                break;
            }
            case LawKind::lfm_sfm: {
                const auto steps = p.int_param("step_count");
                for (std::int64_t i = 0; i < steps; ++i)
                    step_freq_.push_back((1 - k_.lfm_sfm_split) * bw_ * static_cast<double>(i) /
                                         static_cast<double>(steps - 1));
                break;
            }
            case LawKind::fsk2:
            case LawKind::fsk4:
            case LawKind::fsk2_bpsk: tones(k_.fsk_span); break;
            case LawKind::costas: tones(k_.costas_span); break;
            default: return;
        }
        const double dwell = duration_ / static_cast<double>(step_freq_.size());
        step_phase0_.resize(step_freq_.size());
        double acc = 0;
        for (std::size_t i = 0; i < step_freq_.size(); ++i) {
            step_phase0_[i] = acc;
            acc += two_pi * step_freq_[i] * dwell;
        }
    }

    double step_phase(double t) const {
        const std::size_t k = piece(t);
        const double start = duration_ * static_cast<double>(k) / static_cast<double>(step_freq_.size());
        return step_phase0_[k] + two_pi * step_freq_[k] * (t - start);
    }

    LawKind kind_;
    LawConstants k_;
    double fc_;
    double duration_;
    double bw_;
    PulseCode code_;
    std::vector<double> step_freq_;
    std::vector<double> step_phase0_;
};

inline PulseLaw make_law(const PulseParams& params, const GenerationConfig& config,
                         const Registry& registry = default_registry()) {
    return PulseLaw(registry.at(params.class_id).law, params, config);
}

/// Total phase of the pulse at time t (seconds since pulse start).
inline double phase_law(const PulseParams& params, double t, const GenerationConfig& config,
                        const Registry& registry = default_registry()) {
    return make_law(params, config, registry).phase(t);
}

/// Full capture for one pulse descriptor.
inline PulseRecord generate_pulse(const PulseParams& params, const GenerationConfig& config,
                                  const Registry& registry = default_registry()) {
    const double fs = config.sample_rate;
    const std::int64_t n_pw = params.pulse_samples(fs);
    const std::int64_t n0 = params.toa_samples(fs);
    if (n0 < 0 || n_pw < 1 || n0 + n_pw > config.capture_len)
        throw SynthesisError("pulse of class " + params.class_id + " does not fit inside the capture");
    const PulseLaw law = make_law(params, config, registry);

    PulseRecord record;
    record.params = params;
    record.label = params.class_id;
    record.iq.assign(static_cast<std::size_t>(config.capture_len), cfloat{0.0f, 0.0f});
    for (std::int64_t m = 0; m < n_pw; ++m) {
        const double phi = law.phase(static_cast<double>(m) / fs);
        record.iq[static_cast<std::size_t>(n0 + m)] = cfloat(static_cast<float>(std::cos(phi)),
                                                             static_cast<float>(std::sin(phi)));
    }
    return record;
}

}  // namespace synth
}  // namespace aimc
