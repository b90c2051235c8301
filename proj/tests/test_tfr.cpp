#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "aimc/image.hpp"
#include "aimc/image_io.hpp"
#include "aimc/noise.hpp"
#include "aimc/synth.hpp"
#include "aimc/tfr.hpp"
#include "support.hpp"

using namespace aimc;
using namespace aimc::image_io;

namespace {

PulseRecord pulse(const std::string& id, std::uint64_t seed) {
    GenerationConfig cfg;
    const auto& reg = default_registry();
    return synth::generate_pulse(sample_pulse_params(reg.at(id), cfg, seed), cfg);
}

}  // namespace

TEST(Stft, DefaultShape) {
    const IqBuffer iq(100000, cfloat{1, 0});
    const auto s = tfr::stft(iq);
    EXPECT_EQ(s.freq_bins, 256);
    EXPECT_EQ(s.frames, 780);
    EXPECT_EQ(s.values.size(), 256u * 780u);
}

TEST(Stft, ShortInputRejected) {
    const IqBuffer iq(100, cfloat{1, 0});
    EXPECT_THROW(tfr::stft(iq), DomainError);
}

TEST(Stft, ZeroInZeroOut) {
    const IqBuffer iq(4096, cfloat{0, 0});
    const auto s = tfr::stft(iq);
    for (const auto& v : s.values) ASSERT_EQ(v, std::complex<double>(0, 0));
}

TEST(Stft, ToneStaysInCarrierBin) {
    GenerationConfig cfg;
    PulseParams p;
    p.class_id = "UNMOD";
    p.carrier_hz = 17.3e6;
    p.pulse_width_s = 2e-4;
    p.toa_s = 1e-4;
    const auto rec = synth::generate_pulse(p, cfg);
    const auto s = tfr::stft(rec.iq);
    const int expect = s.nearest_bin(p.carrier_hz);
    int checked = 0;
    for (int f = 0; f < s.frames; ++f) {
        const std::size_t start = std::size_t(f) * 128;
        if (start < 10000 || start + 256 > 30000) continue;
        int best = 0;
        for (int k = 1; k < s.freq_bins; ++k)
            if (std::abs(s.at(k, f)) > std::abs(s.at(best, f))) best = k;
        ASSERT_EQ(best, expect) << "frame " << f;
        ++checked;
    }
    EXPECT_GT(checked, 100);
    EXPECT_NEAR(s.bin_frequency(expect), p.carrier_hz, 1e8 / 256 / 2);
}

TEST(Stft, ParsevalPerFrame) {
    const auto noisy = noise::add_awgn(pulse("QPSK", 1), 0.0, 3, 1e8);
    const auto s = tfr::stft(noisy.iq);
    const auto w = tfr::hann(256);
    for (int f : {0, 100, 400, 779}) {
        double time = 0, freq = 0;
        for (int n = 0; n < 256; ++n)
            time += std::norm(w[std::size_t(n)] * std::complex<double>(noisy.iq[std::size_t(f) * 128 + std::size_t(n)]));
        for (int k = 0; k < 256; ++k) freq += std::norm(s.at(k, f));
        EXPECT_NEAR(freq / 256, time, 1e-6 * time);
    }
}

TEST(Stft, ShiftByOneHopShiftsColumns) {
    const auto rec = pulse("LFM_up", 2);
    IqBuffer shifted(rec.iq.size(), cfloat{0, 0});
    std::copy(rec.iq.begin(), rec.iq.end() - 128, shifted.begin() + 128);
    const auto a = tfr::stft(rec.iq);
    const auto b = tfr::stft(shifted);
    for (int f = 0; f + 1 < a.frames; ++f)
        for (int k = 0; k < a.freq_bins; ++k) ASSERT_LT(std::abs(a.at(k, f) - b.at(k, f + 1)), 1e-6);
}

TEST(MagnitudeDb, ScaleInvariantAndBounded) {
    const auto rec = pulse("NLFM", 3);
    IqBuffer louder = rec.iq;
    for (auto& v : louder) v *= 10.0f;
    const auto a = tfr::magnitude_db(tfr::stft(rec.iq));
    const auto b = tfr::magnitude_db(tfr::stft(louder));
    ASSERT_EQ(a.data.size(), b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        ASSERT_NEAR(a.data[i], b.data[i], 1e-5);
        ASSERT_GE(a.data[i], 0.0f);
        ASSERT_LE(a.data[i], 1.0f);
    }
}

TEST(MagnitudeDb, ConstantInputConstantOutput) {
    Spectrogram s;
    s.freq_bins = 4;
    s.frames = 3;
    s.values.assign(12, std::complex<double>(2, 0));
    const auto img = tfr::magnitude_db(s);
    for (float v : img.data) EXPECT_EQ(v, img.data[0]);
}

TEST(SuppressNoise, KeepsStrongPixels) {
    Image img(10, 10, 1, 0.1f);
    img.at(5, 5) = 1.0f;
    const auto out = tfr::suppress_noise(img);
    EXPECT_EQ(out.at(0, 0), 0.0f);
    EXPECT_EQ(out.at(5, 5), 1.0f);
}

TEST(Resize, IdentityPreservesImage) {
    Image img(7, 9, 2);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = std::sin(float(i));
    for (auto kind : {Interpolation::bicubic, Interpolation::bilinear, Interpolation::area}) {
        const auto out = resize(img, 9, 7, kind);
        ASSERT_EQ(out.data.size(), img.data.size());
        for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(out.data[i], img.data[i], 1e-6);
    }
}

TEST(Resize, ConstantStaysConstant) {
    const Image img(13, 17, 1, 0.625f);
    for (auto kind : {Interpolation::bicubic, Interpolation::bilinear, Interpolation::area})
        for (auto [w, h] : {std::pair{5, 3}, std::pair{40, 29}}) {
            const auto out = resize(img, w, h, kind);
            EXPECT_EQ(out.width, w);
            EXPECT_EQ(out.height, h);
            for (float v : out.data) EXPECT_NEAR(v, 0.625f, 1e-6);
        }
}

TEST(Resize, AreaOfCheckerboardIsMean) {
    Image img(2, 2);
    img.data = {0.0f, 1.0f, 1.0f, 0.2f};
    const auto out = resize(img, 1, 1, Interpolation::area);
    EXPECT_NEAR(out.data[0], 0.55f, 1e-6);
}

TEST(Resize, BilinearMidpoint) {
    Image img(1, 2);
    img.data = {0.0f, 1.0f};
    const auto out = resize(img, 4, 1, Interpolation::bilinear);
    // Output centres map to -0.25, 0.25, 0.75, 1.25 in source pixels.
    EXPECT_NEAR(out.data[0], 0.0f, 1e-6);
    EXPECT_NEAR(out.data[1], 0.25f, 1e-6);
    EXPECT_NEAR(out.data[2], 0.75f, 1e-6);
    EXPECT_NEAR(out.data[3], 1.0f, 1e-6);
}

TEST(Colormap, EndpointsAndShape) {
    const auto lo = viridis(0.0f), hi = viridis(1.0f);
    EXPECT_LT(lo[0] + lo[1] + lo[2], hi[0] + hi[1] + hi[2]);
    Image g(3, 4, 1, 0.5f);
    const auto rgb = colormap(g);
    EXPECT_EQ(rgb.channels, 3);
    EXPECT_EQ(rgb.height, 3);
    EXPECT_EQ(rgb.width, 4);
}

TEST(Presets, ShapeContract) {
    const auto noisy = noise::add_awgn(pulse("COSTAS", 4), 5.0, 8, 1e8);
    const auto s = tfr::stft(noisy.iq);
    struct Expect {
        tfr::Preset preset;
        int h, w, c;
    };
    for (const auto& e : {Expect{tfr::Preset::ldc_unet, 128, 128, 3}, Expect{tfr::Preset::lpi_net, 64, 64, 1},
                          Expect{tfr::Preset::cdae_dcnn, 64, 64, 3}, Expect{tfr::Preset::stft_cnn, 32, 32, 3}}) {
        const auto img = tfr::apply_preset(s, e.preset);
        EXPECT_EQ(img.height, e.h) << tfr::to_string(e.preset);
        EXPECT_EQ(img.width, e.w);
        EXPECT_EQ(img.channels, e.c);
        for (float v : img.data) {
            ASSERT_GE(v, 0.0f);
            ASSERT_LE(v, 1.0f);
        }
    }
    const auto strip = tfr::apply_preset(s, tfr::Preset::vit_phase);
    EXPECT_EQ(strip.height, 1);
    EXPECT_EQ(strip.channels, 1);
    EXPECT_EQ(strip.width % 23, 0);
    EXPECT_EQ(strip.width, 759);
}

TEST(Presets, VitRowSelection) {
    const auto rec = pulse("UNMOD", 5);
    const auto s = tfr::stft(rec.iq);
    tfr::PresetOptions by_carrier;
    by_carrier.carrier_hz = rec.params.carrier_hz;
    EXPECT_EQ(tfr::strongest_row(s), s.nearest_bin(rec.params.carrier_hz));
    EXPECT_EQ(tfr::apply_preset(s, tfr::Preset::vit_phase, by_carrier), tfr::apply_preset(s, tfr::Preset::vit_phase));
    tfr::PresetOptions fixed;
    fixed.vit_row = 6;
    EXPECT_EQ(tfr::apply_preset(s, tfr::Preset::vit_phase, fixed).width, 759);
    fixed.vit_row = 999;
    EXPECT_THROW(tfr::apply_preset(s, tfr::Preset::vit_phase, fixed), DomainError);
}

TEST(Presets, Deterministic) {
    const auto noisy = noise::add_awgn(pulse("P4", 6), -5.0, 1, 1e8);
    for (auto p : {tfr::Preset::ldc_unet, tfr::Preset::stft_cnn, tfr::Preset::vit_phase})
        EXPECT_EQ(tfr::apply_preset(noisy.iq, p), tfr::apply_preset(noisy.iq, p));
}

TEST(Presets, ParseNames) {
    EXPECT_EQ(tfr::parse_preset("lpi_net"), tfr::Preset::lpi_net);
    EXPECT_THROW(tfr::parse_preset("resnet"), Error);
}

TEST(ImageIo, RawAndPngRoundTrip) {
    test_support::TempDir dir;
    Image img(5, 6, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = float(i % 256) / 255.0f;
    write_raw(dir / "a.raw", img);
    EXPECT_EQ(read_raw(dir / "a.raw"), img);
    EXPECT_EQ(std::filesystem::file_size(dir / "a.raw"), raw_header_size + img.data.size() * 4);
    write_png(dir / "a.png", img);
    const auto back = read_png(dir / "a.png");
    ASSERT_EQ(back.data.size(), img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(back.data[i], img.data[i], 0.5 / 255 + 1e-6);
    std::vector<std::uint8_t> junk(8, 0);
    EXPECT_THROW(decode_raw(junk), Error);
}
