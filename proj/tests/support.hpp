#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "aimc/config.hpp"

namespace aimc::test_support {

class TempDir {
public:
    explicit TempDir(const std::string& tag = "aimc") {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

/// Short captures and few pulses, for corpus-level tests.
inline GenerationConfig small_config() {
    GenerationConfig c;
    c.capture_len = 20000;
    c.pulse_width_range_s = {50e-6, 150e-6};
    c.pulses_per_class = 4;
    c.snr_levels_db = {10, 0};
    c.master_seed = 1234;
    return c;
}

}  // namespace aimc::test_support
