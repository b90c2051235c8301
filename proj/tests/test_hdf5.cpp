#include <fstream>

#include <gtest/gtest.h>

#include "aimc/hdf5_interop.hpp"
#include "support.hpp"

using namespace aimc;
using test_support::TempDir;

namespace {

GenerationConfig pack_config() {
    auto c = test_support::small_config();
    c.pulses_per_class = 3;
    c.classes = {"LFM_up", "P2", "COSTAS", "LFM_BPSK"};
    return c;
}

}  // namespace

TEST(Hdf5, RoundTripIsByteIdentical) {
    TempDir src, dst;
    const auto m = dataset::build_corpus(pack_config(), src.path());
    const auto h5 = src / "corpus.h5";
    hdf5::export_corpus(m, src.path(), h5);
    const auto back = hdf5::import_corpus(h5, dst.path());
    EXPECT_EQ(back.entries, m.entries);
    EXPECT_EQ(to_json(back.config), to_json(m.config));
    EXPECT_TRUE(std::filesystem::exists(dataset::manifest_path(dst.path())));
    for (const auto& e : back.entries) EXPECT_EQ(sha256_file(dst / e.path), e.sha256) << e.path;
    EXPECT_TRUE(dataset::verify_corpus(back, dst.path(), 0.0).ok());
}

TEST(Hdf5, CustomDatasetNames) {
    TempDir src, dst;
    const auto m = dataset::build_corpus(pack_config(), src.path());
    const auto names = hdf5::DatasetNames::from_json(Json{{"iq", "X"}, {"class_params", "theta"}});
    EXPECT_EQ(names.iq, "X");
    EXPECT_EQ(names.seed, "seed");
    hdf5::export_corpus(m, src.path(), src / "named.h5", names);
    EXPECT_THROW(hdf5::import_corpus(src / "named.h5", dst / "default"), ContainerError);
    const auto back = hdf5::import_corpus(src / "named.h5", dst / "named", names);
    EXPECT_EQ(back.entries, m.entries);
}

TEST(Hdf5, BadInputsRejected) {
    TempDir dir;
    EXPECT_THROW(hdf5::DatasetNames::from_json(Json{{"waveform", "x"}}), ConfigError);
    EXPECT_THROW(hdf5::DatasetNames::from_json(Json{{"iq", ""}}), ConfigError);
    std::ofstream(dir / "junk.h5") << "not hdf5";
    EXPECT_THROW(hdf5::import_corpus(dir / "junk.h5", dir / "out"), ContainerError);
}
