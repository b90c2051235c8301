#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "aimc/codes.hpp"
#include "aimc/noise.hpp"
#include "aimc/oracle.hpp"
#include "aimc/synth.hpp"

using namespace aimc;

namespace {

PulseParams sample(const std::string& id, std::uint64_t seed, const GenerationConfig& cfg = {}) {
    const auto& reg = default_registry();
    return sample_pulse_params(reg.at(id), cfg, derive_pulse_seed(11, 0, reg.index_of(id), seed));
}

}  // namespace

TEST(EstimateIf, ToneIsConstant) {
    GenerationConfig cfg;
    PulseParams p;
    p.class_id = "UNMOD";
    p.carrier_hz = -13.7e6;
    p.pulse_width_s = 1e-4;
    p.toa_s = 0;
    const auto rec = synth::generate_pulse(p, cfg);
    const auto f = oracle::estimate_if(rec.iq, {0, 10000}, cfg.sample_rate);
    ASSERT_EQ(f.size(), 9999u);
    for (double v : f) ASSERT_NEAR(v, p.carrier_hz, 1e-6 * cfg.sample_rate);
}

TEST(EstimateIf, LfmSlope) {
    GenerationConfig cfg;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto p = sample("LFM_up", s);
        const auto rec = synth::generate_pulse(p, cfg);
        const auto w = noise::pulse_support(p, cfg.sample_rate);
        const auto f = oracle::estimate_if(rec.iq, w, cfg.sample_rate);
        double st = 0, sf = 0, stt = 0, stf = 0;
        const double n = double(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double t = double(i) / cfg.sample_rate;
            st += t;
            sf += f[i];
            stt += t * t;
            stf += t * f[i];
        }
        const double slope = (n * stf - st * sf) / (n * stt - st * st);
        const double expect = p.param("bandwidth_hz") / p.pulse_width_s;
        EXPECT_NEAR(slope / expect, 1.0, 0.005);
    }
}

TEST(EstimateIf, ZeroSignalIsAnError) {
    const IqBuffer zeros(100, cfloat{0, 0});
    EXPECT_THROW(oracle::estimate_if(zeros, {0, 100}, 1e8), DomainError);
    IqBuffer half(100, cfloat{0, 0});
    for (std::size_t n = 50; n < 100; ++n) half[n] = cfloat{1, 0};
    const auto f = oracle::estimate_if(half, {0, 100}, 1e8);
    EXPECT_TRUE(std::isnan(f[10]));
    EXPECT_EQ(f[60], 0.0);
}

TEST(EstimateIf, MedianRejectsOutliers) {
    IqBuffer x(200);
    for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::polar(1.0f, 0.1f * float(n));
    x[100] = cfloat{-1, 0};
    const auto f = oracle::estimate_if(x, {0, 200}, 1.0, 5);
    EXPECT_NEAR(f[99], 0.1 / (2 * std::numbers::pi), 1e-6);
}

TEST(Psl, ReferenceValues) {
    const auto b7 = barker("BARKER_7").phases_rad;
    EXPECT_DOUBLE_EQ(std::round(oracle::psl_of_phases(b7) * 1e9) / 1e9, 7.0);
    for (int n : {2, 5, 16}) {
        const std::vector<double> ones(static_cast<std::size_t>(n), 0.0);
        EXPECT_NEAR(oracle::psl_of_phases(ones), double(n) / double(n - 1), 1e-12);
    }
    const std::vector<double> one{0.0};
    EXPECT_EQ(oracle::psl_of_phases(one), std::numeric_limits<double>::infinity());
}

TEST(Psl, FftPathMatchesDirect) {
    std::vector<std::complex<double>> x(5000);
    Xoshiro256 rng(3);
    for (auto& v : x) v = std::polar(1.0, rng.uniform(0, 6.28));
    const auto r = oracle::autocorrelation(x);
    for (std::size_t k : {0u, 1u, 17u, 4999u}) {
        std::complex<double> acc{};
        for (std::size_t i = 0; i + k < x.size(); ++i) acc += x[i + k] * std::conj(x[i]);
        EXPECT_NEAR(r[k], std::abs(acc), 1e-6 * x.size());
    }
}

TEST(ReferenceCodes, AgreeWithGenerators) {
    for (const char* id : {"BARKER_3", "BARKER_11", "BARKER_13"})
        EXPECT_EQ(oracle::reference::barker_chips(id, std::numbers::pi), barker(id).phases_rad) << id;
    for (int m : {3, 4, 6}) {
        const auto a = oracle::reference::frank_chips(m, 2 * std::numbers::pi);
        const auto b = frank(m).phases_rad;
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(wrap_pi(a[i] - b[i]), 0, 1e-9);
    }
}

TEST(ValidatePulse, EveryClassNoiselessPasses) {
    GenerationConfig cfg;
    for (const auto& cls : default_registry()) {
        for (std::uint64_t s = 0; s < 3; ++s) {
            const auto rec = synth::generate_pulse(sample(cls.id, s), cfg);
            const auto report = oracle::validate_pulse(rec, cfg);
            EXPECT_TRUE(report.pass()) << report.to_json().dump();
        }
    }
}

TEST(ValidatePulse, BarkerThirteenPslIsExact) {
    GenerationConfig cfg;
    const auto report = oracle::validate_pulse(synth::generate_pulse(sample("BARKER_13", 0), cfg), cfg);
    const auto* check = report.find("barker_psl");
    ASSERT_NE(check, nullptr);
    EXPECT_EQ(check->status, oracle::Status::pass);
    EXPECT_NEAR(check->metric, 13.0, 1e-6);
}

TEST(ValidatePulse, WrongLabelFails) {
    GenerationConfig cfg;
    const auto up = synth::generate_pulse(sample("LFM_up", 1), cfg);
    EXPECT_FALSE(oracle::validate_pulse(up.iq, up.params, "LFM_down", cfg, std::nullopt).pass());
    const auto bpsk = synth::generate_pulse(sample("BPSK", 1), cfg);
    EXPECT_FALSE(oracle::validate_pulse(bpsk.iq, bpsk.params, "UNMOD", cfg, std::nullopt).pass());
    EXPECT_THROW(oracle::validate_pulse(bpsk.iq, bpsk.params, "NOT_A_CLASS", cfg, std::nullopt), Error);
}

TEST(ValidatePulse, MutatedLawIsFlagged) {
    GenerationConfig cfg;
    GenerationConfig mutated = cfg;
    mutated.laws.nlfm_gamma *= 1.05;
    const auto p = sample("NLFM", 2);
    EXPECT_FALSE(oracle::validate_pulse(synth::generate_pulse(p, mutated), cfg).pass());
    GenerationConfig qpsk = cfg;
    qpsk.laws.qpsk_step *= 1.05;
    EXPECT_FALSE(oracle::validate_pulse(synth::generate_pulse(sample("QPSK", 2), qpsk), cfg).pass());
}

TEST(ValidatePulse, AmplitudeErrorFlagged) {
    GenerationConfig cfg;
    auto rec = synth::generate_pulse(sample("P1", 0), cfg);
    for (auto& v : rec.iq) v *= 0.9f;
    const auto report = oracle::validate_pulse(rec, cfg);
    EXPECT_FALSE(report.pass());
    EXPECT_EQ(report.find("envelope")->status, oracle::Status::fail);
}

TEST(ValidatePulse, NoisyZeroDbCalibrated) {
    GenerationConfig cfg;
    for (const char* id : {"LFM_up", "FSK4", "P4", "LFM_BPSK"}) {
        const auto p = sample(id, 4);
        const auto noisy = noise::add_awgn(synth::generate_pulse(p, cfg), 0.0, 17, cfg.sample_rate);
        const auto report = oracle::validate_pulse(noisy, p, cfg);
        EXPECT_TRUE(report.pass()) << report.to_json().dump();
        const auto* c = report.find("snr_calibration");
        ASSERT_NE(c, nullptr);
        EXPECT_LE(c->metric, 0.15);
    }
}

TEST(ValidatePulse, MislabelledSnrFlagged) {
    GenerationConfig cfg;
    const auto p = sample("EXP", 1);
    auto noisy = noise::add_awgn(synth::generate_pulse(p, cfg), 5.0, 3, cfg.sample_rate);
    noisy.target_snr_db = 10.0;
    EXPECT_FALSE(oracle::validate_pulse(noisy, p, cfg).pass());
}
