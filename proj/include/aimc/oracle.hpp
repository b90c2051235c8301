#pragma once

// Independent verification of generated pulses.
//
// Everything here works from raw samples, the class label and the pulse
// descriptor. Designed laws and code tables are restated locally rather than
// taken from the synthesizer, so a synthesizer bug cannot hide behind a shared
// helper. Chip and segment timing comes from the descriptor.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aimc/config.hpp"
#include "aimc/errors.hpp"
#include "aimc/fft.hpp"
#include "aimc/noise.hpp"
#include "aimc/synth.hpp"
#include "aimc/taxonomy.hpp"

namespace aimc::oracle {

using cdouble = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2 * std::numbers::pi;

inline double wrap(double a) { return std::remainder(a, two_pi); }

// ---------------------------------------------------------------------------
// Estimators

/// Phase-difference instantaneous frequency over `window` (Hz), one value per
/// adjacent sample pair. Optional running median of odd length `median_len`.
inline std::vector<double> estimate_if(std::span<const cfloat> iq, SampleWindow window, double sample_rate,
                                       int median_len = 0) {
    if (window.size() < 2 || window.end > iq.size()) throw DomainError("IF window needs at least 2 samples");
    std::vector<double> f(window.size() - 1);
    bool any = false;
    for (std::size_t n = window.begin; n + 1 < window.end; ++n) {
        const cdouble prod = cdouble(iq[n + 1]) * std::conj(cdouble(iq[n]));
        if (prod == cdouble{}) {
            f[n - window.begin] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        any = true;
        f[n - window.begin] = std::arg(prod) * sample_rate / two_pi;
    }
    if (!any) throw DomainError("instantaneous frequency undefined for a zero signal");
    if (median_len > 1) {
        const int half = median_len / 2;
        std::vector<double> out(f.size());
        std::vector<double> buf;
        for (std::size_t i = 0; i < f.size(); ++i) {
            buf.clear();
            for (int k = -half; k <= half; ++k) {
                const auto j = static_cast<std::ptrdiff_t>(i) + k;
                if (j >= 0 && j < static_cast<std::ptrdiff_t>(f.size()) && !std::isnan(f[static_cast<std::size_t>(j)]))
                    buf.push_back(f[static_cast<std::size_t>(j)]);
            }
            if (buf.empty()) {
                out[i] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            std::nth_element(buf.begin(), buf.begin() + buf.size() / 2, buf.end());
            out[i] = buf[buf.size() / 2];
        }
        f = std::move(out);
    }
    return f;
}

/// Aperiodic autocorrelation magnitudes |r(k)|, k = 0..N-1.
inline std::vector<double> autocorrelation(std::span<const cdouble> x) {
    const std::size_t n = x.size();
    std::vector<double> r(n);
    if (n <= 4096) {
        for (std::size_t k = 0; k < n; ++k) {
            cdouble acc{};
            for (std::size_t i = 0; i + k < n; ++i) acc += x[i + k] * std::conj(x[i]);
            r[k] = std::abs(acc);
        }
        return r;
    }
    std::size_t size = 1;
    while (size < 2 * n) size <<= 1;
    std::vector<cdouble> buf(size), spec(size);
    std::copy(x.begin(), x.end(), buf.begin());
    fft::forward(buf, spec);
    for (auto& v : spec) v = std::norm(v);
    fft::inverse(spec, buf);
    for (std::size_t k = 0; k < n; ++k) r[k] = std::abs(buf[k]) / static_cast<double>(size);
    return r;
}

/// Peak-to-max-sidelobe amplitude ratio of the aperiodic autocorrelation.
/// Sequences without sidelobes (length < 2, or all sidelobes zero) give +inf.
inline double psl(std::span<const cdouble> x) {
    if (x.size() < 2) return std::numeric_limits<double>::infinity();
    const auto r = autocorrelation(x);
    const double side = *std::max_element(r.begin() + 1, r.end());
    if (side <= 0) return std::numeric_limits<double>::infinity();
    return r[0] / side;
}

inline double psl(std::span<const cfloat> x) {
    std::vector<cdouble> d(x.begin(), x.end());
    return psl(std::span<const cdouble>(d));
}

/// PSL of a phase code (unit-modulus chips).
inline double psl_of_phases(std::span<const double> phases) {
    std::vector<cdouble> x;
    for (double p : phases) x.push_back(std::polar(1.0, p));
    return psl(std::span<const cdouble>(x));
}

// ---------------------------------------------------------------------------
// Reference laws

namespace reference {

inline std::vector<double> barker_chips(std::string_view label, double flip_phase) {
    // Sign patterns, +1 -> 0 rad, -1 -> flip_phase.
    struct Entry { std::string_view label; std::vector<int> signs; };
    static const Entry table[] = {
        {"BARKER_2_1", {1, -1}},
        {"BARKER_2_2", {1, 1}},
        {"BARKER_3", {1, 1, -1}},
        {"BARKER_4_1", {1, 1, -1, 1}},
        {"BARKER_4_2", {1, 1, 1, -1}},
        {"BARKER_5", {1, 1, 1, -1, 1}},
        {"BARKER_7", {1, 1, 1, -1, -1, 1, -1}},
        {"BARKER_11", {1, 1, 1, -1, -1, -1, 1, -1, -1, 1, -1}},
        {"BARKER_13", {1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1}},
    };
    for (const auto& e : table)
        if (e.label == label) {
            std::vector<double> out;
            for (int s : e.signs) out.push_back(s > 0 ? 0.0 : flip_phase);
            return out;
        }
    throw Error("oracle has no Barker table for " + std::string(label));
}

inline std::vector<double> frank_chips(int m, double scale) {
    std::vector<double> out;
    for (int row = 0; row < m; ++row)
        for (int col = 0; col < m; ++col) out.push_back(scale * double((row * col) % m) / m);
    return out;
}

inline std::vector<double> p1_chips(int m, double scale) {
    std::vector<double> out;
    for (int group = 0; group < m; ++group)
        for (int k = 0; k < m; ++k)
            out.push_back(-scale / m * double(m - 2 * group - 1) * double(group * m + k));
    return out;
}

inline std::vector<double> p2_chips(int m, double scale) {
    std::vector<double> out;
    for (int group = 0; group < m; ++group)
        for (int k = 0; k < m; ++k)
            out.push_back((scale * (m - 1) / (2.0 * m) - scale * k / m) * double(m - 1 - 2 * group));
    return out;
}

inline std::vector<double> p3_chips(int n, double scale) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(scale * double(k) * k / n);
    return out;
}

inline std::vector<double> p4_chips(int n, double scale) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(scale * double(k) * (k - n) / n);
    return out;
}

}  // namespace reference

/// Designed law of a pulse as the oracle understands it.
struct ClassReference {
    bool frequency_law = false;             // true for FM and hybrid classes
    double bandwidth = 0;                   // B of the pulse, or the reference bandwidth
    std::function<double(double)> sweep;    // smooth frequency offset (Hz) of x = t/T
    int segments = 0;                       // equal-duration tone segments
    std::vector<double> fixed_tones;        // per-segment tone (staircases)
    std::vector<double> tone_alphabet;      // candidate tones (FSK, Costas)
    bool costas = false;
    int chips = 0;                          // equal-duration chips
    std::vector<double> chip_reference;     // known code, empty when random
    double random_chip_step = 0;            // alphabet spacing of random codes
    bool barker = false;
};

inline ClassReference make_reference(std::string_view label, const PulseParams& p, const GenerationConfig& config) {
    const LawConstants& k = config.laws;
    ClassReference ref;
    const double B = p.has("bandwidth_hz") ? p.param("bandwidth_hz") : 0.0;
    ref.bandwidth = B > 0 ? B : config.bandwidth_range_hz.lo;
    ref.sweep = [](double) { return 0.0; };
    auto staircase = [&](int steps, double span) {
        ref.segments = steps;
        for (int i = 0; i < steps; ++i) ref.fixed_tones.push_back(span * B * i / (steps - 1));
    };
    auto alphabet = [&](int tones, double span) {
        for (int i = 0; i < tones; ++i) ref.tone_alphabet.push_back(span * B * i / (tones - 1));
    };
    auto random_chips = [&](double step) {
        ref.chips = static_cast<int>(p.int_param("chip_count"));
        ref.random_chip_step = step;
    };
    auto known_chips = [&](std::vector<double> chips) {
        ref.chips = static_cast<int>(chips.size());
        ref.chip_reference = std::move(chips);
    };

    if (label == "UNMOD") {
        ref.frequency_law = true;
    } else if (label == "LFM_up" || label == "LFM_down") {
        ref.frequency_law = true;
        const double sign = label == "LFM_up" ? 1.0 : -1.0;
        ref.sweep = [=](double x) { return sign * k.lfm_sweep * B * x; };
    } else if (label == "NLFM") {
        ref.frequency_law = true;
        ref.sweep = [=](double x) { return 0.5 * B * std::tan(k.nlfm_gamma * (2 * x - 1)) / std::tan(k.nlfm_gamma); };
    } else if (label == "SFM") {
        ref.frequency_law = true;
        staircase(static_cast<int>(p.int_param("step_count")), k.sfm_span);
    } else if (label == "EQFM") {
        ref.frequency_law = true;
        ref.sweep = [=](double x) { return k.eqfm_curvature * B * (x - 0.5) * (x - 0.5); };
    } else if (label == "DLFM_up_down" || label == "DLFM_down_up") {
        ref.frequency_law = true;
        const bool up_first = label == "DLFM_up_down";
        ref.sweep = [=](double x) {
            const double tri = x < k.dlfm_turn ? x / k.dlfm_turn : (1 - x) / (1 - k.dlfm_turn);
            return up_first ? B * tri : B * (1 - tri);
        };
    } else if (label == "MLFM") {
        ref.frequency_law = true;
        ref.sweep = [=](double x) { return B * (x + k.mlfm_ripple * std::sin(two_pi * k.mlfm_cycles * x)); };
    } else if (label == "EXP") {
        ref.frequency_law = true;
        ref.sweep = [=](double x) { return B * (std::exp(k.exp_alpha * x) - 1) / (std::exp(k.exp_alpha) - 1); };
    } else if (label == "FSK2" || label == "FSK4") {
        ref.frequency_law = true;
        ref.segments = static_cast<int>(p.int_param("symbol_count"));
        alphabet(label == "FSK2" ? 2 : 4, k.fsk_span);
    } else if (label == "COSTAS") {
        ref.frequency_law = true;
        ref.costas = true;
        ref.segments = static_cast<int>(p.int_param("costas_order"));
        alphabet(ref.segments, k.costas_span);
    } else if (label == "BPSK") {
        random_chips(k.bpsk_phase);
    } else if (label == "8PSK") {
        random_chips(k.psk8_step);
    } else if (label == "QPSK") {
        random_chips(k.qpsk_step);
    } else if (label == "FRANK") {
        known_chips(reference::frank_chips(static_cast<int>(p.int_param("code_order")), k.frank_scale));
    } else if (label == "P1") {
        known_chips(reference::p1_chips(static_cast<int>(p.int_param("code_order")), k.p1_scale));
    } else if (label == "P2") {
        known_chips(reference::p2_chips(static_cast<int>(p.int_param("code_order")), k.p2_scale));
    } else if (label == "P3") {
        known_chips(reference::p3_chips(static_cast<int>(p.int_param("code_length")), k.p3_scale));
    } else if (label == "P4") {
        known_chips(reference::p4_chips(static_cast<int>(p.int_param("code_length")), k.p4_scale));
    } else if (label.starts_with("BARKER_")) {
        known_chips(reference::barker_chips(label, k.barker_phase));
        ref.barker = true;
    } else if (label == "LFM_BPSK") {
        ref.frequency_law = true;
        ref.sweep = [=](double x) { return k.lfm_sweep * B * x; };
        random_chips(k.bpsk_phase);
    } else if (label == "FSK2_BPSK") {
        ref.frequency_law = true;
        ref.segments = static_cast<int>(p.int_param("symbol_count"));
        alphabet(2, k.fsk_span);
        random_chips(k.bpsk_phase);
    } else if (label == "LFM_SFM") {
        ref.frequency_law = true;
        ref.sweep = [=](double x) { return k.lfm_sfm_split * B * x; };
        staircase(static_cast<int>(p.int_param("step_count")), 1 - k.lfm_sfm_split);
    } else {
        throw Error("oracle: unknown class " + std::string(label));
    }
    return ref;
}

// ---------------------------------------------------------------------------
// Report

enum class Status { pass, fail, not_applicable };

inline const char* to_string(Status s) noexcept {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::not_applicable: return "not_applicable";
    }
    return "?";
}

struct Check {
    std::string name;
    Status status = Status::not_applicable;
    double metric = 0;
    double tolerance = 0;
    std::string detail;
};

struct ValidationReport {
    std::string label;
    std::vector<Check> checks;

    /// True iff no applicable check failed.
    bool pass() const noexcept {
        return std::none_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == Status::fail; });
    }

    const Check* find(std::string_view name) const noexcept {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (c.status == Status::fail) out.push_back(c.name);
        return out;
    }

    Json to_json() const {
        Json j;
        j["label"] = label;
        j["pass"] = pass();
        j["checks"] = Json::array();
        for (const auto& c : checks) {
            Json cj{{"name", c.name}, {"status", to_string(c.status)}, {"metric", c.metric}, {"tolerance", c.tolerance}};
            if (!c.detail.empty()) cj["detail"] = c.detail;
            j["checks"].push_back(std::move(cj));
        }
        return j;
    }
};

/// Tolerances; defaults are the acceptance thresholds.
struct Tolerances {
    double if_median_noiseless = 0.005;  // fraction of B
    double if_median_noisy = 0.05;       // fraction of B, SNR >= law_min_snr_db
    double phase_track_rad = 1e-2;
    double chip_phase_rad = 1e-3;
    double psl_relative = 1e-6;
    double snr_db = 0.15;
    double noise_floor_sigmas = 5.0;     // widens the out-of-pulse check on short captures
    double law_min_snr_db = 0.0;
    int noisy_block = 256;
};

/// Noise context of a capture; absent for noiseless records.
struct NoiseInfo {
    double target_snr_db = 0;
    double measured_snr_db = 0;
};

namespace detail {

inline std::size_t slot(std::size_t m, std::size_t count, std::size_t n_pw) { return m * count / n_pw; }

inline double median(std::vector<double> v) {
    std::erase_if(v, [](double x) { return std::isnan(x); });
    if (v.empty()) return std::numeric_limits<double>::infinity();
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

inline Check make_check(std::string name, double metric, double tol, bool ok, std::string detail = {}) {
    return {std::move(name), ok ? Status::pass : Status::fail, metric, tol, std::move(detail)};
}

inline Check skipped(std::string name, std::string why) {
    return {std::move(name), Status::not_applicable, 0, 0, std::move(why)};
}

}  // namespace detail

/// Runs the class-appropriate checks on one capture.
inline ValidationReport validate_pulse(std::span<const cfloat> iq, const PulseParams& params, std::string_view label,
                                       const GenerationConfig& config, std::optional<NoiseInfo> noise = std::nullopt,
                                       const Tolerances& tol = {}) {
    using detail::make_check;
    using detail::skipped;
    ValidationReport report;
    report.label = std::string(label);
    const ClassReference ref = make_reference(label, params, config);

    const double fs = config.sample_rate;
    const auto n_pw = static_cast<std::size_t>(params.pulse_samples(fs));
    const auto n0 = static_cast<std::size_t>(params.toa_samples(fs));
    if (n_pw < 2 || n0 + n_pw > iq.size()) {
        report.checks.push_back(make_check("support", 0, 0, false, "pulse window outside the capture"));
        return report;
    }
    const double T = static_cast<double>(n_pw) / fs;
    const bool noisy = noise.has_value();

    // Carrier plus smooth sweep phase, cumulative Simpson over sample intervals.
    std::vector<double> sweep_phase(n_pw);
    {
        double acc = 0;
        const double dt = 1.0 / fs;
        for (std::size_t m = 0; m < n_pw; ++m) {
            sweep_phase[m] = acc;
            const double a = static_cast<double>(m) * dt;
            acc += two_pi * dt / 6 *
                   (ref.sweep(a / T) + 4 * ref.sweep((a + dt / 2) / T) + ref.sweep(std::min(a + dt, T) / T));
        }
    }
    std::vector<cdouble> base(n_pw);  // iq with carrier and sweep removed
    for (std::size_t m = 0; m < n_pw; ++m) {
        const double t = static_cast<double>(m) / fs;
        const double cycles = params.carrier_hz * t;
        const double phi = two_pi * (cycles - std::floor(cycles)) + sweep_phase[m];
        base[m] = cdouble(iq[n0 + m]) * std::polar(1.0, -phi);
    }

    // Segment tones: fixed staircase, or decided from the alphabet by a
    // noncoherent matched filter over chip-aligned sub-blocks.
    std::vector<double> tones = ref.fixed_tones;
    if (!ref.tone_alphabet.empty()) {
        tones.assign(static_cast<std::size_t>(ref.segments), 0.0);
        for (int s = 0; s < ref.segments; ++s) {
            std::size_t m_begin = 0;
            while (detail::slot(m_begin, static_cast<std::size_t>(ref.segments), n_pw) < static_cast<std::size_t>(s)) ++m_begin;
            double best = -1;
            for (double f : ref.tone_alphabet) {
                double metric = 0;
                cdouble acc{};
                std::size_t prev_chip = std::numeric_limits<std::size_t>::max();
                for (std::size_t m = m_begin; m < n_pw && detail::slot(m, static_cast<std::size_t>(ref.segments), n_pw) == static_cast<std::size_t>(s); ++m) {
                    const std::size_t c = ref.chips ? detail::slot(m, static_cast<std::size_t>(ref.chips), n_pw) : 0;
                    if (c != prev_chip) {
                        metric += std::norm(acc);
                        acc = {};
                        prev_chip = c;
                    }
                    acc += base[m] * std::polar(1.0, -two_pi * f * static_cast<double>(m) / fs);
                }
                metric += std::norm(acc);
                if (metric > best) {
                    best = metric;
                    tones[static_cast<std::size_t>(s)] = f;
                }
            }
        }
    }
    // Piecewise-linear phase of the segment tones.
    std::vector<double> tone_phase(n_pw, 0.0);
    if (!tones.empty()) {
        const double dwell = T / static_cast<double>(tones.size());
        std::vector<double> start_phase(tones.size());
        double acc = 0;
        for (std::size_t s = 0; s < tones.size(); ++s) {
            start_phase[s] = acc;
            acc += two_pi * tones[s] * dwell;
        }
        for (std::size_t m = 0; m < n_pw; ++m) {
            const std::size_t s = detail::slot(m, tones.size(), n_pw);
            const double t = static_cast<double>(m) / fs;
            tone_phase[m] = start_phase[s] + two_pi * tones[s] * (t - dwell * static_cast<double>(s));
        }
    }
    std::vector<cdouble> fm_removed(n_pw);
    for (std::size_t m = 0; m < n_pw; ++m) fm_removed[m] = base[m] * std::polar(1.0, -tone_phase[m]);

    // Chip phases: measured per chip, reference either known or snapped to the alphabet.
    std::vector<double> chip_measured, chip_expected;
    if (ref.chips > 0) {
        std::vector<cdouble> sums(static_cast<std::size_t>(ref.chips));
        for (std::size_t m = 0; m < n_pw; ++m) sums[detail::slot(m, sums.size(), n_pw)] += fm_removed[m];
        for (const auto& s : sums) chip_measured.push_back(std::arg(s));
        if (!ref.chip_reference.empty()) {
            chip_expected = ref.chip_reference;
        } else {
            for (double ph : chip_measured) {
                const double rel = wrap(ph - chip_measured.front());
                chip_expected.push_back(std::round(rel / ref.random_chip_step) * ref.random_chip_step);
            }
        }
    }
    std::vector<cdouble> residual = fm_removed;
    if (ref.chips > 0)
        for (std::size_t m = 0; m < n_pw; ++m)
            residual[m] *= std::polar(1.0, -chip_expected[detail::slot(m, chip_expected.size(), n_pw)]);

    if (!noisy) {
        // Envelope.
        double env = 0;
        for (std::size_t n = 0; n < iq.size(); ++n) {
            const bool inside = n >= n0 && n < n0 + n_pw;
            env = std::max(env, std::abs(std::abs(cdouble(iq[n])) - (inside ? 1.0 : 0.0)));
        }
        report.checks.push_back(make_check("envelope", env, 1e-4, env <= 1e-4));

        // Instantaneous frequency vs the designed law.
        const auto f_hat = estimate_if(iq, {n0, n0 + n_pw}, fs);
        std::vector<double> err(f_hat.size());
        for (std::size_t m = 0; m + 1 < n_pw; ++m) {
            const double designed = params.carrier_hz + (sweep_phase[m + 1] - sweep_phase[m] + tone_phase[m + 1] - tone_phase[m]) * fs / two_pi;
            err[m] = std::abs(f_hat[m] - designed);
        }
        const double if_err = detail::median(err) / ref.bandwidth;
        report.checks.push_back(make_check("if_law", if_err, tol.if_median_noiseless, if_err < tol.if_median_noiseless));

        // Residual phase must be flat once the full designed phase is removed.
        cdouble mean{};
        for (const auto& r : residual) mean += r;
        double track = 0;
        for (const auto& r : residual) track = std::max(track, std::abs(wrap(std::arg(r) - std::arg(mean))));
        report.checks.push_back(make_check("phase_track", track, tol.phase_track_rad, track < tol.phase_track_rad));

        if (ref.chips > 0) {
            double worst = 0;
            if (!ref.chip_reference.empty()) {
                cdouble off{};
                for (std::size_t c = 0; c < chip_measured.size(); ++c)
                    off += std::polar(1.0, chip_measured[c] - chip_expected[c]);
                for (std::size_t c = 0; c < chip_measured.size(); ++c)
                    worst = std::max(worst, std::abs(wrap(chip_measured[c] - chip_expected[c] - std::arg(off))));
            } else {
                for (std::size_t c = 0; c < chip_measured.size(); ++c)
                    worst = std::max(worst, std::abs(wrap(chip_measured[c] - chip_measured.front() - chip_expected[c])));
            }
            report.checks.push_back(make_check("chip_phase", worst, tol.chip_phase_rad, worst < tol.chip_phase_rad));
        }
        if (ref.barker) {
            const double ratio = psl_of_phases(chip_measured);
            const double len = static_cast<double>(ref.chips);
            const double dev = std::abs(ratio - len);
            report.checks.push_back(make_check("barker_psl", ratio, tol.psl_relative * len, dev <= tol.psl_relative * len,
                                               "expected " + std::to_string(ref.chips)));
        }
        if (ref.costas) {
            std::vector<int> hops;
            const double spacing = ref.tone_alphabet.size() > 1 ? ref.tone_alphabet[1] - ref.tone_alphabet[0] : 1.0;
            for (double f : tones) hops.push_back(static_cast<int>(std::lround(f / spacing)));
            const bool ok = is_costas(hops);
            report.checks.push_back(make_check("costas", ok ? 1.0 : 0.0, 1.0, ok));
        }
        return report;
    }

    // Noisy capture: calibration checks at every SNR, law check above the floor.
    const double snr_dev = std::abs(noise->measured_snr_db - noise->target_snr_db);
    report.checks.push_back(make_check("snr_calibration", snr_dev, tol.snr_db, snr_dev <= tol.snr_db));
    const std::size_t outside = iq.size() - n_pw;
    if (outside >= 1000) {
        double p_out = 0;
        for (std::size_t n = 0; n < iq.size(); ++n)
            if (n < n0 || n >= n0 + n_pw) p_out += std::norm(cdouble(iq[n]));
        p_out /= static_cast<double>(outside);
        const double dev = std::abs(10 * std::log10(1.0 / p_out) - noise->target_snr_db);
        // Power of N complex Gaussian samples: relative spread 1/sqrt(N), 4.34/sqrt(N) dB.
        const double floor_tol =
            std::max(tol.snr_db, tol.noise_floor_sigmas * 10 / std::log(10.0) / std::sqrt(static_cast<double>(outside)));
        report.checks.push_back(make_check("noise_floor", dev, floor_tol, dev <= floor_tol));
    } else {
        report.checks.push_back(skipped("noise_floor", "fewer than 1000 out-of-pulse samples"));
    }
    if (noise->target_snr_db < tol.law_min_snr_db) {
        report.checks.push_back(skipped("if_law", "below the law-check SNR floor"));
        return report;
    }
    // Residual frequency from block means of the de-modulated capture.
    const auto block = static_cast<std::size_t>(tol.noisy_block);
    std::vector<cdouble> means;
    for (std::size_t b = 0; b + block <= n_pw; b += block) {
        cdouble acc{};
        for (std::size_t m = b; m < b + block; ++m) acc += residual[m];
        means.push_back(acc);
    }
    if (means.size() < 2) {
        report.checks.push_back(skipped("if_law", "pulse too short for block estimation"));
        return report;
    }
    std::vector<double> freq_err;
    for (std::size_t i = 0; i + 1 < means.size(); ++i)
        freq_err.push_back(std::abs(std::arg(means[i + 1] * std::conj(means[i]))) * fs / (two_pi * block));
    const double err = detail::median(freq_err) / ref.bandwidth;
    report.checks.push_back(make_check("if_law", err, tol.if_median_noisy, err < tol.if_median_noisy));
    return report;
}

inline ValidationReport validate_pulse(const PulseRecord& record, const GenerationConfig& config,
                                       const Tolerances& tol = {}) {
    return validate_pulse(record.iq, record.params, record.label, config, std::nullopt, tol);
}

inline ValidationReport validate_pulse(const NoisyCapture& capture, const PulseParams& params,
                                       const GenerationConfig& config, const Tolerances& tol = {}) {
    return validate_pulse(capture.iq, params, params.class_id, config,
                          NoiseInfo{capture.target_snr_db, capture.measured_snr_db}, tol);
}

}  // namespace aimc::oracle
