#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "aimc/dataset.hpp"
#include "aimc/hash.hpp"
#include "support.hpp"

using namespace aimc;
using namespace aimc::dataset;
using test_support::TempDir;

namespace {

GenerationConfig tiny_config() {
    auto c = test_support::small_config();
    c.classes = {"UNMOD", "LFM_up", "COSTAS", "BARKER_13", "P4", "FSK2_BPSK"};
    return c;
}

void flip_byte(const std::filesystem::path& path, std::uint64_t offset) {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(static_cast<std::streamoff>(offset));
    char c;
    f.get(c);
    f.seekp(static_cast<std::streamoff>(offset));
    f.put(static_cast<char>(c ^ 0x10));
}

DatasetManifest synthetic_manifest(std::uint32_t pulses) {
    DatasetManifest m;
    m.config.snr_levels_db = {10, 0};
    for (double snr : m.config.snr_levels_db)
        for (const char* cls : {"BPSK", "LFM_up"})
            m.entries.push_back({snr, cls, snr_dir_name(snr) + "/" + cls + ".aimcspec", pulses, "", 0});
    return m;
}

}  // namespace

TEST(Dataset, SnrFolderNames) {
    EXPECT_EQ(snr_dir_name(10), "snr_10");
    EXPECT_EQ(snr_dir_name(-2), "snr_-2");
    EXPECT_EQ(snr_dir_name(2.5), "snr_2.5");
}

TEST(Dataset, BuildVerifyAndReload) {
    TempDir dir;
    const auto cfg = tiny_config();
    std::size_t callbacks = 0;
    BuildOptions opt;
    opt.jobs = 2;
    opt.on_file = [&](const ManifestEntry&) { ++callbacks; };
    const auto m = build_corpus(cfg, dir.path(), opt);
    ASSERT_EQ(m.entries.size(), 12u);
    EXPECT_EQ(callbacks, 12u);
    std::uint64_t bytes = 0;
    for (const auto& e : m.entries) {
        EXPECT_TRUE(std::filesystem::exists(dir / e.path)) << e.path;
        EXPECT_EQ(sha256_file(dir / e.path), e.sha256);
        EXPECT_EQ(e.pulse_count, 4u);
        bytes += e.byte_len;
    }
    EXPECT_EQ(bytes, estimate_corpus_bytes(cfg, default_registry().select(cfg.classes)));
    EXPECT_EQ(m.entries.front().path, "snr_10/UNMOD.aimcspec");

    const auto loaded = DatasetManifest::load(manifest_path(dir.path()));
    EXPECT_EQ(loaded.entries, m.entries);
    EXPECT_EQ(loaded.master_seed, cfg.master_seed);
    EXPECT_EQ(to_json(loaded.config), to_json(cfg));
    EXPECT_EQ(loaded.snr_levels(), cfg.snr_levels_db);
    EXPECT_EQ(loaded.class_ids(),
              (std::vector<std::string>{"UNMOD", "LFM_up", "COSTAS", "P4", "BARKER_13", "FSK2_BPSK"}));

    const auto report = verify_corpus(loaded, dir.path(), 100.0, 2);
    EXPECT_TRUE(report.ok()) << report.to_json().dump();
    EXPECT_EQ(report.pulses_checked, 48u);
}

TEST(Dataset, RecordsCarryCalibratedNoise) {
    TempDir dir;
    const auto cfg = tiny_config();
    const auto m = build_corpus(cfg, dir.path());
    for (const auto& e : m.entries) {
        container::for_each_record(dir / e.path, [&](std::uint32_t i, const container::ClassRecord& r) {
            const auto si = static_cast<std::size_t>(std::find(cfg.snr_levels_db.begin(), cfg.snr_levels_db.end(), e.snr_db) -
                                                     cfg.snr_levels_db.begin());
            const auto again = generate_cell_pulse(cfg, si, default_registry().index_of(e.class_id), i);
            EXPECT_EQ(r.params, again.params);
            EXPECT_EQ(r.iq, again.capture.iq);
            EXPECT_NEAR(r.measured_snr_db, e.snr_db, 0.5);
        });
    }
}

TEST(Dataset, RebuildIsByteIdenticalAcrossJobCounts) {
    TempDir a, b;
    const auto cfg = tiny_config();
    BuildOptions one, two;
    one.jobs = 1;
    two.jobs = 3;
    const auto ma = build_corpus(cfg, a.path(), one);
    const auto mb = build_corpus(cfg, b.path(), two);
    EXPECT_EQ(ma.entries, mb.entries);
    auto other = cfg;
    other.master_seed += 1;
    TempDir c;
    const auto mc = build_corpus(other, c.path(), one);
    EXPECT_NE(ma.entries.front().sha256, mc.entries.front().sha256);
}

TEST(Dataset, VerifyFindsCorruption) {
    TempDir dir;
    const auto cfg = tiny_config();
    const auto m = build_corpus(cfg, dir.path());
    const auto& e = m.entries[3];
    const auto rec = container::record_size(default_registry().at(e.class_id).param_schema.size(),
                                            static_cast<std::size_t>(cfg.capture_len));
    flip_byte(dir / e.path, container::header_size + 2 * rec + 500);
    auto report = verify_corpus(m, dir.path(), 0.0);
    EXPECT_FALSE(report.ok());
    ASSERT_FALSE(report.files[3].ok);
    EXPECT_EQ(report.files[3].pulse_index, 2u);
    EXPECT_NE(report.files[3].problem.find("checksum"), std::string::npos) << report.files[3].problem;
    for (std::size_t i = 0; i < report.files.size(); ++i)
        if (i != 3) {
            EXPECT_TRUE(report.files[i].ok);
        }

    std::filesystem::remove(dir / m.entries[5].path);
    report = verify_corpus(m, dir.path(), 0.0);
    EXPECT_FALSE(report.files[5].ok);
    EXPECT_NE(report.files[5].problem.find("missing"), std::string::npos) << report.files[5].problem;
}

TEST(Dataset, ManifestErrors) {
    TempDir dir;
    EXPECT_THROW(DatasetManifest::load(dir / "none.json"), ContainerError);
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_THROW(DatasetManifest::load(dir / "bad.json"), ContainerError);
    auto j = synthetic_manifest(4).to_json();
    j["format_version"] = 99;
    try {
        DatasetManifest::from_json(j);
        FAIL();
    } catch (const ContainerError& e) {
        EXPECT_EQ(e.kind(), ContainerError::Kind::version);
    }
}

TEST(Split, EightyTwentyPerStratum) {
    const auto m = synthetic_manifest(1000);
    const auto strata = split_train_test(m, 0.8, 1);
    ASSERT_EQ(strata.size(), 4u);
    for (const auto& s : strata) {
        EXPECT_EQ(s.train.size(), 800u);
        EXPECT_EQ(s.test.size(), 200u);
        std::set<std::uint32_t> all(s.train.begin(), s.train.end());
        for (auto i : s.test) EXPECT_TRUE(all.insert(i).second);
        EXPECT_EQ(all.size(), 1000u);
        EXPECT_EQ(*all.rbegin(), 999u);
    }
}

TEST(Split, DeterministicAndSeeded) {
    const auto m = synthetic_manifest(50);
    const auto a = split_train_test(m, 0.8, 1);
    const auto b = split_train_test(m, 0.8, 1);
    const auto c = split_train_test(m, 0.8, 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].train, b[i].train);
        EXPECT_EQ(a[i].test, b[i].test);
    }
    EXPECT_NE(a[0].train, c[0].train);
    EXPECT_NE(a[0].train, a[1].train);
}

TEST(Split, SmallStrataAndBadRatios) {
    const auto two = split_train_test(synthetic_manifest(2), 0.99, 1);
    EXPECT_EQ(two[0].train.size(), 1u);
    EXPECT_EQ(two[0].test.size(), 1u);
    EXPECT_THROW(split_train_test(synthetic_manifest(1), 0.8, 1), Error);
    EXPECT_THROW(split_train_test(synthetic_manifest(10), 0.0, 1), ConfigError);
    EXPECT_THROW(split_train_test(synthetic_manifest(10), 1.0, 1), ConfigError);
}

TEST(Dataset, SpotCheckIndices) {
    EXPECT_EQ(spot_check_indices(20, 5), std::vector<std::uint32_t>{0});
    EXPECT_EQ(spot_check_indices(4, 100), (std::vector<std::uint32_t>{0, 1, 2, 3}));
    EXPECT_EQ(spot_check_indices(10, 20), (std::vector<std::uint32_t>{0, 5}));
    EXPECT_TRUE(spot_check_indices(10, 0).empty());
}

TEST(Dataset, DefaultGridHas429Files) {
    GenerationConfig cfg;
    EXPECT_EQ(cfg.snr_levels_db.size() * default_registry().select(cfg.classes).size(), 429u);
}
