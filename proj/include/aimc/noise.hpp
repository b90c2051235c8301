#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "aimc/errors.hpp"
#include "aimc/rng.hpp"
#include "aimc/synth.hpp"

namespace aimc {

/// Half-open sample range [begin, end).
struct SampleWindow {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

struct NoisyCapture {
    IqBuffer iq;
    double target_snr_db = 0;
    double measured_snr_db = 0;
    std::uint64_t noise_seed = 0;
};

namespace noise {

/// Mean |x|^2 over the window.
inline double measure_power(std::span<const cfloat> iq, SampleWindow window) {
    if (window.size() == 0 || window.end > iq.size()) throw DomainError("power window is empty or out of range");
    double acc = 0;
    for (std::size_t n = window.begin; n < window.end; ++n) acc += std::norm(std::complex<double>(iq[n]));
    return acc / static_cast<double>(window.size());
}

inline SampleWindow pulse_support(const PulseParams& params, double sample_rate) {
    const auto n0 = static_cast<std::size_t>(std::max<std::int64_t>(0, params.toa_samples(sample_rate)));
    return {n0, n0 + static_cast<std::size_t>(std::max<std::int64_t>(0, params.pulse_samples(sample_rate)))};
}

/// Complex AWGN over the whole capture, scaled so that in-pulse signal power
/// over noise power equals `snr_db`. `measured_snr_db` uses the realized noise.
inline NoisyCapture add_awgn(std::span<const cfloat> clean, SampleWindow support, double snr_db, std::uint64_t seed) {
    if (support.size() == 0 || support.end > clean.size()) throw DomainError("pulse support is empty");
    const double signal_power = measure_power(clean, support);
    if (!(signal_power > 0)) throw DomainError("zero-energy pulse");
    const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);
    const double scale = std::sqrt(noise_power / 2.0);

    NoisyCapture out;
    out.target_snr_db = snr_db;
    out.noise_seed = seed;
    out.iq.resize(clean.size());
    Xoshiro256 rng(seed);
    double realized = 0;
    for (std::size_t n = 0; n < clean.size(); ++n) {
        const auto [g1, g2] = rng.normal_pair();
        const double ni = g1 * scale;
        const double nq = g2 * scale;
        realized += ni * ni + nq * nq;
        out.iq[n] = cfloat(static_cast<float>(clean[n].real() + ni), static_cast<float>(clean[n].imag() + nq));
    }
    realized /= static_cast<double>(clean.size());
    out.measured_snr_db = 10.0 * std::log10(signal_power / realized);
    return out;
}

inline NoisyCapture add_awgn(const PulseRecord& pulse, double snr_db, std::uint64_t seed, double sample_rate) {
    return add_awgn(pulse.iq, pulse_support(pulse.params, sample_rate), snr_db, seed);
}

}  // namespace noise
}  // namespace aimc
