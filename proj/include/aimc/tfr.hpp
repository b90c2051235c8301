#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aimc/errors.hpp"
#include "aimc/fft.hpp"
#include "aimc/image.hpp"
#include "aimc/synth.hpp"

namespace aimc {

/// Complex STFT, freq_bins x frames, bins centre-shifted so that
/// bin freq_bins/2 is 0 Hz and bin 0 is -fs/2.
struct Spectrogram {
    int freq_bins = 0;
    int frames = 0;
    int win_len = 0;
    int hop = 0;
    double sample_rate = 1.0;
    std::vector<std::complex<double>> values;  // bin-major: values[bin * frames + frame]

    std::complex<double>& at(int bin, int frame) { return values[static_cast<std::size_t>(bin) * frames + frame]; }
    const std::complex<double>& at(int bin, int frame) const {
        return values[static_cast<std::size_t>(bin) * frames + frame];
    }

    double bin_frequency(int bin) const noexcept { return (bin - freq_bins / 2) * sample_rate / freq_bins; }
    /// Time of the centre of a frame, seconds from capture start.
    double frame_time(int frame) const noexcept { return (frame * hop + win_len / 2.0) / sample_rate; }
    int nearest_bin(double hz) const noexcept {
        const auto k = static_cast<int>(std::lround(hz * freq_bins / sample_rate)) + freq_bins / 2;
        return ((k % freq_bins) + freq_bins) % freq_bins;
    }
};

namespace tfr {

/// Periodic Hann window.
inline std::vector<double> hann(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.5 * (1 - std::cos(2 * std::numbers::pi * i / n));
    return w;
}

inline int frame_count(std::size_t samples, int win_len, int hop) {
    return static_cast<int>((samples - static_cast<std::size_t>(win_len)) / static_cast<std::size_t>(hop)) + 1;
}

inline Spectrogram stft(std::span<const cfloat> iq, int win_len = 256, int hop = 128, double sample_rate = 1.0e8) {
    if (win_len < 2 || hop < 1) throw DomainError("STFT window and hop must be positive");
    if (iq.size() < static_cast<std::size_t>(win_len)) throw DomainError("capture shorter than the STFT window");
    Spectrogram s;
    s.freq_bins = win_len;
    s.frames = frame_count(iq.size(), win_len, hop);
    s.win_len = win_len;
    s.hop = hop;
    s.sample_rate = sample_rate;
    s.values.resize(static_cast<std::size_t>(s.freq_bins) * s.frames);

    const auto window = hann(win_len);
    std::vector<std::complex<double>> frame(static_cast<std::size_t>(win_len)), spectrum(frame.size());
    const int half = win_len / 2;
    for (int f = 0; f < s.frames; ++f) {
        const std::size_t start = static_cast<std::size_t>(f) * hop;
        for (int n = 0; n < win_len; ++n)
            frame[static_cast<std::size_t>(n)] =
                window[static_cast<std::size_t>(n)] * std::complex<double>(iq[start + static_cast<std::size_t>(n)]);
        fft::forward(frame, spectrum);
        for (int k = 0; k < win_len; ++k) s.at(k, f) = spectrum[static_cast<std::size_t>((k + half) % win_len)];
    }
    return s;
}

/// Min-max normalizes in place; a flat image maps to all zeros.
inline void normalize_minmax(std::vector<float>& values) {
    if (values.empty()) return;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const float min = *lo, span = *hi - *lo;
    for (auto& v : values) v = span > 0 ? (v - min) / span : 0.0f;
}

/// 20 log10(|X| + eps), clipped at `floor_db` below the image peak, then
/// min-max scaled into [0, 1]. Rows are frequency bins, columns frames.
inline Image magnitude_db(const Spectrogram& s, double floor_db = -80.0, double eps = 1e-12) {
    Image img(s.freq_bins, s.frames, 1);
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> db(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        db[i] = 20.0 * std::log10(std::abs(s.values[i]) + eps);
        peak = std::max(peak, db[i]);
    }
    const double floor = peak + floor_db;
    for (std::size_t i = 0; i < db.size(); ++i) img.data[i] = static_cast<float>(std::max(db[i], floor));
    normalize_minmax(img.data);
    return img;
}

/// Iterative noise-floor suppression: the threshold mu + k*sigma is
/// re-estimated from the pixels currently below it, pixels under the final
/// threshold are zeroed and the rest rescaled to [0, 1].
inline Image suppress_noise(const Image& gray, double k = 1.0, int iterations = 3) {
    Image out = gray;
    double threshold = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iterations; ++it) {
        double sum = 0, sum2 = 0;
        std::size_t n = 0;
        for (float v : gray.data)
            if (v <= threshold) {
                sum += v;
                sum2 += double(v) * v;
                ++n;
            }
        if (n == 0) break;
        const double mean = sum / n;
        const double var = std::max(0.0, sum2 / n - mean * mean);
        threshold = mean + k * std::sqrt(var);
    }
    const double span = 1.0 - threshold;
    for (auto& v : out.data)
        v = (v <= threshold || span <= 0) ? 0.0f : static_cast<float>((v - threshold) / span);
    return out;
}

enum class Preset { ldc_unet, lpi_net, cdae_dcnn, stft_cnn, vit_phase };

inline Preset parse_preset(std::string_view name) {
    if (name == "ldc_unet") return Preset::ldc_unet;
    if (name == "lpi_net") return Preset::lpi_net;
    if (name == "cdae_dcnn") return Preset::cdae_dcnn;
    if (name == "stft_cnn") return Preset::stft_cnn;
    if (name == "vit_phase") return Preset::vit_phase;
    throw Error("unknown preset: " + std::string(name));
}

inline const char* to_string(Preset p) noexcept {
    switch (p) {
        case Preset::ldc_unet: return "ldc_unet";
        case Preset::lpi_net: return "lpi_net";
        case Preset::cdae_dcnn: return "cdae_dcnn";
        case Preset::stft_cnn: return "stft_cnn";
        case Preset::vit_phase: return "vit_phase";
    }
    return "?";
}

struct PresetOptions {
    double sample_rate = 1.0e8;
    int win_len = 256;
    int hop = 128;
    double floor_db = -80.0;
    int stft_cnn_size = 32;
    double noise_k = 1.0;
    int noise_iterations = 3;
    /// Known carrier for vit_phase; without it the strongest row is used.
    std::optional<double> carrier_hz;
    /// Fixed-row mode for vit_phase (0-based row of the centre-shifted STFT).
    std::optional<int> vit_row;
    int patch = 23;
};

/// Unwrapped phase of one STFT row, truncated to whole patches.
inline Image phase_strip(const Spectrogram& s, int row, int patch) {
    if (row < 0 || row >= s.freq_bins) throw DomainError("phase row outside the spectrogram");
    std::vector<double> phase(static_cast<std::size_t>(s.frames));
    double prev = 0, offset = 0;
    for (int f = 0; f < s.frames; ++f) {
        const double p = std::arg(s.at(row, f));
        if (f > 0) {
            double d = p - prev;
            while (d > std::numbers::pi) { offset -= 2 * std::numbers::pi; d -= 2 * std::numbers::pi; }
            while (d < -std::numbers::pi) { offset += 2 * std::numbers::pi; d += 2 * std::numbers::pi; }
        }
        prev = p;
        phase[static_cast<std::size_t>(f)] = p + offset;
    }
    int width = (s.frames / patch) * patch;
    if (width == 0) width = patch;  // pad short strips with the last value
    Image strip(1, width, 1);
    for (int x = 0; x < width; ++x)
        strip.at(0, x) = static_cast<float>(phase[static_cast<std::size_t>(std::min(x, s.frames - 1))]);
    return strip;
}

inline int strongest_row(const Spectrogram& s) {
    int best = 0;
    double best_power = -1;
    for (int k = 0; k < s.freq_bins; ++k) {
        double acc = 0;
        for (int f = 0; f < s.frames; ++f) acc += std::norm(s.at(k, f));
        if (acc > best_power) {
            best_power = acc;
            best = k;
        }
    }
    return best;
}

inline Image apply_preset(const Spectrogram& s, Preset preset, const PresetOptions& opt = {}) {
    switch (preset) {
        case Preset::ldc_unet: {
            Image rgb = resize(colormap(magnitude_db(s, opt.floor_db)), 128, 128, Interpolation::bicubic);
            clamp_unit(rgb);
            return rgb;
        }
        case Preset::lpi_net: {
            Image gray = resize(magnitude_db(s, opt.floor_db), 64, 64, Interpolation::bicubic);
            clamp_unit(gray);
            return gray;
        }
        case Preset::cdae_dcnn:
            return colormap(resize(magnitude_db(s, opt.floor_db), 64, 64, Interpolation::bilinear));
        case Preset::stft_cnn: {
            const Image cleaned = suppress_noise(magnitude_db(s, opt.floor_db), opt.noise_k, opt.noise_iterations);
            return colormap(resize(cleaned, opt.stft_cnn_size, opt.stft_cnn_size, Interpolation::area));
        }
        case Preset::vit_phase: {
            int row = 0;
            if (opt.vit_row) row = *opt.vit_row;
            else if (opt.carrier_hz) row = s.nearest_bin(*opt.carrier_hz);
            else row = strongest_row(s);
            return phase_strip(s, row, opt.patch);
        }
    }
    throw Error("unknown preset");
}

inline Image apply_preset(std::span<const cfloat> iq, Preset preset, const PresetOptions& opt = {}) {
    return apply_preset(stft(iq, opt.win_len, opt.hop, opt.sample_rate), preset, opt);
}

}  // namespace tfr
}  // namespace aimc
