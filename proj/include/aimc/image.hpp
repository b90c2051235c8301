#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aimc/errors.hpp"

namespace aimc {

/// Row-major height x width x channels float image.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, int c = 1, float fill = 0.0f)
        : height(h), width(w), channels(c), data(static_cast<std::size_t>(h) * w * c, fill) {}

    float& at(int y, int x, int c = 0) { return data[index(y, x, c)]; }
    float at(int y, int x, int c = 0) const { return data[index(y, x, c)]; }
    bool empty() const noexcept { return data.empty(); }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int y, int x, int c) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
};

enum class Interpolation { bicubic, bilinear, area };

inline Interpolation parse_interpolation(std::string_view name) {
    if (name == "bicubic") return Interpolation::bicubic;
    if (name == "bilinear" || name == "linear") return Interpolation::bilinear;
    if (name == "area") return Interpolation::area;
    throw Error("unknown interpolation kernel: " + std::string(name));
}

namespace detail {

struct Tap {
    int index;
    double weight;
};

/// Cubic convolution kernel with a = -0.5 (Catmull-Rom).
inline double cubic_kernel(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1) return ((a + 2) * x - (a + 3)) * x * x + 1;
    if (x < 2) return ((a * x - 5 * a) * x + 8 * a) * x - 4 * a;
    return 0;
}

/// Per-output-sample taps for one axis.
inline std::vector<std::vector<Tap>> axis_taps(int in, int out, Interpolation kind) {
    std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out));
    const double scale = static_cast<double>(in) / out;
    auto clamp = [in](int i) { return std::clamp(i, 0, in - 1); };
    for (int o = 0; o < out; ++o) {
        auto& t = taps[static_cast<std::size_t>(o)];
        if (kind == Interpolation::area) {
            const double lo = o * scale, hi = (o + 1) * scale;
            for (int i = static_cast<int>(std::floor(lo)); i < hi && i < in; ++i) {
                const double overlap = std::min(hi, i + 1.0) - std::max(lo, double(i));
                if (overlap > 1e-12) t.push_back({i, overlap / scale});
            }
            continue;
        }
        const double src = (o + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(src));
        const double frac = src - base;
        if (kind == Interpolation::bilinear) {
            t.push_back({clamp(base), 1 - frac});
            t.push_back({clamp(base + 1), frac});
        } else {
            for (int k = -1; k <= 2; ++k) t.push_back({clamp(base + k), cubic_kernel(frac - k)});
        }
    }
    return taps;
}

}  // namespace detail

/// Separable resampling to width x height. Pixel centres map as
/// src = (dst + 0.5) * in/out - 0.5, edges replicate.
inline Image resize(const Image& src, int width, int height, Interpolation kind) {
    if (width <= 0 || height <= 0) throw DomainError("resize target must be positive");
    if (src.empty()) throw DomainError("resize source is empty");
    const auto xt = detail::axis_taps(src.width, width, kind);
    const auto yt = detail::axis_taps(src.height, height, kind);
    const int c = src.channels;

    Image horizontal(src.height, width, c);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < width; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0;
                for (const auto& tap : xt[static_cast<std::size_t>(x)]) acc += tap.weight * src.at(y, tap.index, ch);
                horizontal.at(y, x, ch) = static_cast<float>(acc);
            }
    Image out(height, width, c);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0;
                for (const auto& tap : yt[static_cast<std::size_t>(y)]) acc += tap.weight * horizontal.at(tap.index, x, ch);
                out.at(y, x, ch) = static_cast<float>(acc);
            }
    return out;
}

inline void clamp_unit(Image& img) {
    for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
}

/// Viridis colormap, nine anchors sampled from the reference table and
/// linearly interpolated. Input is clamped to [0, 1].
inline std::array<float, 3> viridis(float v) {
    static constexpr std::array<std::array<float, 3>, 9> anchors{{
        {0.267004f, 0.004874f, 0.329415f},
        {0.282623f, 0.140926f, 0.457517f},
        {0.229739f, 0.322361f, 0.545706f},
        {0.172719f, 0.448791f, 0.557885f},
        {0.127568f, 0.566949f, 0.550556f},
        {0.157851f, 0.683765f, 0.501686f},
        {0.369214f, 0.788888f, 0.382914f},
        {0.678489f, 0.863742f, 0.189503f},
        {0.993248f, 0.906157f, 0.143936f},
    }};
    const float x = std::clamp(v, 0.0f, 1.0f) * 8.0f;
    const int i = std::min(static_cast<int>(x), 7);
    const float f = x - static_cast<float>(i);
    std::array<float, 3> rgb{};
    for (int c = 0; c < 3; ++c) rgb[c] = anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c]);
    return rgb;
}

/// Single-channel [0,1] image to RGB via viridis.
inline Image colormap(const Image& gray) {
    if (gray.channels != 1) throw DomainError("colormap expects a single-channel image");
    Image rgb(gray.height, gray.width, 3);
    for (int y = 0; y < gray.height; ++y)
        for (int x = 0; x < gray.width; ++x) {
            const auto c = viridis(gray.at(y, x));
            for (int ch = 0; ch < 3; ++ch) rgb.at(y, x, ch) = c[ch];
        }
    return rgb;
}

}  // namespace aimc
