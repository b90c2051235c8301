#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "aimc/eval.hpp"
#include "aimc/noise.hpp"
#include "aimc/synth.hpp"
#include "support.hpp"

using namespace aimc;
using namespace aimc::eval;
using test_support::TempDir;

namespace {

Feature unit(std::vector<float> v) {
    double n = 0;
    for (float x : v) n += double(x) * x;
    for (auto& x : v) x = static_cast<float>(x / std::sqrt(n));
    return v;
}

}  // namespace

TEST(Featurize, ShapeAndNorm) {
    GenerationConfig cfg;
    const auto& reg = default_registry();
    const auto p = sample_pulse_params(reg.at("NLFM"), cfg, 5);
    const auto noisy = noise::add_awgn(synth::generate_pulse(p, cfg), 0.0, 1, cfg.sample_rate);
    const auto f = featurize(noisy.iq);
    ASSERT_EQ(f.size(), 1024u);
    EXPECT_NEAR(dot(f, f), 1.0, 1e-5);
    for (float v : f) EXPECT_GE(v, 0.0f);
}

TEST(Featurize, AmplitudeInvariant) {
    GenerationConfig cfg;
    const auto& reg = default_registry();
    for (const char* id : {"LFM_down", "FSK4", "BARKER_7"}) {
        const auto p = sample_pulse_params(reg.at(id), cfg, 8);
        auto noisy = noise::add_awgn(synth::generate_pulse(p, cfg), -4.0, 2, cfg.sample_rate);
        const auto a = featurize(noisy.iq);
        for (auto& v : noisy.iq) v *= 10.0f;
        const auto b = featurize(noisy.iq);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-5) << id << " " << i;
    }
}

TEST(Featurize, PureNoiseStillYieldsUnitVector) {
    IqBuffer zeros(100000, cfloat{0, 0});
    zeros[0] = cfloat{1, 0};
    const auto noisy = noise::add_awgn(zeros, {0, 1}, -30.0, 4);
    const auto f = featurize(noisy.iq);
    EXPECT_NEAR(dot(f, f), 1.0, 1e-5);
}

TEST(NearestCentroid, SingletonsClassifyThemselves) {
    std::vector<Feature> xs{unit({1, 0, 0}), unit({0, 1, 0}), unit({0, 0, 1}), unit({1, 1, 0})};
    std::vector<int> ys{0, 1, 2, 3};
    const auto m = NearestCentroid::fit(xs, ys, 4);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(m.classify(xs[i]), ys[i]);
}

TEST(NearestCentroid, IdenticalClassesAtMostHalf) {
    std::vector<Feature> xs;
    std::vector<int> ys;
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 5; ++i) {
            xs.push_back(unit({1, 2, 3}));
            ys.push_back(c);
        }
    const auto m = NearestCentroid::fit(xs, ys, 2);
    int correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) correct += m.classify(xs[i]) == ys[i];
    EXPECT_LE(correct, 5);
    EXPECT_EQ(m.classify(unit({1, 2, 3})), 0);
}

TEST(NearestCentroid, MissingClassRejected) {
    std::vector<Feature> xs{unit({1, 0})};
    std::vector<int> ys{0};
    EXPECT_THROW(NearestCentroid::fit(xs, ys, 2), Error);
    EXPECT_THROW(NearestCentroid::fit(xs, {0, 1}, 2), Error);
}

TEST(NearestCentroid, NoiselessFmWellAboveChance) {
    GenerationConfig cfg;
    const auto& reg = default_registry();
    std::vector<Feature> train, test;
    std::vector<int> ytrain, ytest;
    int label = 0;
    for (const auto& cls : reg) {
        if (cls.family != Family::FM) continue;
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto p = sample_pulse_params(cls, cfg, derive_pulse_seed(21, 0, reg.index_of(cls.id), i));
            const auto f = featurize(synth::generate_pulse(p, cfg).iq);
            (i < 16 ? train : test).push_back(f);
            (i < 16 ? ytrain : ytest).push_back(label);
        }
        ++label;
    }
    ASSERT_EQ(label, 13);
    const auto m = NearestCentroid::fit(train, ytrain, label);
    int correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) correct += m.classify(test[i]) == ytest[i];
    const double accuracy = double(correct) / double(test.size());
    EXPECT_GE(accuracy, 5.0 / 13.0);
}

TEST(Spearman, KnownValues) {
    EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-12);
    EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-12);
    EXPECT_NEAR(spearman({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}), 0.8, 1e-12);
    EXPECT_TRUE(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
    EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Protocol, ParseNames) {
    EXPECT_EQ(parse_regime("all_to_x"), Regime::all_to_x);
    EXPECT_EQ(parse_subset("fm_only"), Subset::fm_only);
    EXPECT_THROW(parse_regime("cross"), Error);
    EXPECT_THROW(parse_subset("pm"), Error);
}

TEST(Protocol, FmSubsetHasThirteen) {
    std::vector<std::string> all;
    for (const auto& c : default_registry()) all.push_back(c.id);
    const auto fm = subset_classes(all, Subset::fm_only);
    EXPECT_EQ(fm.size(), 13u);
    EXPECT_EQ(subset_classes(all, Subset::all).size(), 33u);
}

TEST(Protocol, ExperimentsOnSmallCorpus) {
    TempDir dir;
    auto cfg = test_support::small_config();
    cfg.pulses_per_class = 5;
    cfg.classes = {"UNMOD", "LFM_up", "FSK4", "BPSK", "P1"};
    const auto m = dataset::build_corpus(cfg, dir.path());
    const auto store = extract_features(m, dir.path(), 2);
    EXPECT_EQ(store.at(10, "BPSK").size(), 5u);
    EXPECT_THROW(store.at(-20, "BPSK"), Error);

    const auto same = run_experiment(store, m, Regime::same_snr, Subset::all, 1);
    ASSERT_EQ(same.results.size(), 2u);
    EXPECT_EQ(same.classes, cfg.classes);
    for (const auto& r : same.results) {
        EXPECT_EQ(r.total, 5u);  // one test pulse per class and SNR
        EXPECT_EQ(r.confusion.size(), 5u);
        std::uint32_t sum = 0;
        for (const auto& row : r.confusion) {
            EXPECT_EQ(row.size(), 5u);
            for (auto v : row) sum += v;
        }
        EXPECT_EQ(sum, r.total);
        EXPECT_NEAR(r.accuracy_pct, 100.0 * r.correct / r.total, 1e-12);
    }
    const auto fm = run_experiment(store, m, Regime::all_to_x, Subset::fm_only, 1);
    EXPECT_EQ(fm.classes, (std::vector<std::string>{"UNMOD", "LFM_up", "FSK4"}));
    EXPECT_EQ(fm.results.front().confusion.size(), 3u);

    const auto again = run_experiment(store, m, Regime::same_snr, Subset::all, 1);
    EXPECT_EQ(again.to_json(), same.to_json());

    const auto csv = accuracy_csv({{"same", &same}, {"fm", &fm}});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "snr_db,same,fm");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    const auto conf = confusion_csv(same, 0);
    EXPECT_EQ(std::count(conf.begin(), conf.end(), '\n'), 6);
    const auto svg = accuracy_svg({{"same", &same}});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
