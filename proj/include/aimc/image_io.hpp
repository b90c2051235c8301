#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <vector>

#include <png.h>

#include "aimc/binary.hpp"
#include "aimc/errors.hpp"
#include "aimc/image.hpp"

namespace aimc::image_io {

inline constexpr char raw_magic[8] = {'A', 'I', 'M', 'C', 'I', 'M', 'G', '\0'};
inline constexpr std::size_t raw_header_size = 20;

/// Raw float image: magic "AIMCIMG\0", u32 height, u32 width, u32 channels,
/// then height*width*channels little-endian f32 values, row-major HWC.
inline std::vector<std::uint8_t> encode_raw(const Image& img) {
    std::vector<std::uint8_t> out(std::begin(raw_magic), std::end(raw_magic));
    out.reserve(raw_header_size + img.data.size() * 4);
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(img.height));
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(img.width));
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(img.channels));
    for (float v : img.data) binary::put<float>(out, v);
    return out;
}

inline Image decode_raw(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < raw_header_size || !std::equal(std::begin(raw_magic), std::end(raw_magic), bytes.begin()))
        throw ContainerError(ContainerError::Kind::format, "not an AIMCIMG raw image");
    const auto h = binary::get<std::uint32_t>(bytes.data() + 8);
    const auto w = binary::get<std::uint32_t>(bytes.data() + 12);
    const auto c = binary::get<std::uint32_t>(bytes.data() + 16);
    const std::size_t count = std::size_t(h) * w * c;
    if (bytes.size() != raw_header_size + count * 4)
        throw ContainerError(ContainerError::Kind::truncated, "raw image payload size mismatch");
    Image img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (std::size_t i = 0; i < count; ++i) img.data[i] = binary::get<float>(bytes.data() + raw_header_size + 4 * i);
    return img;
}

inline void write_raw(const std::filesystem::path& path, const Image& img) {
    const auto bytes = encode_raw(img);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ContainerError(ContainerError::Kind::io, "cannot write " + path.string());
}

inline Image read_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContainerError(ContainerError::Kind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_raw(bytes);
}

/// 8-bit PNG (gray or RGB). Values are taken as [0,1] intensities unless
/// `stretch` is set, in which case the image is min-max scaled first.
inline void write_png(const std::filesystem::path& path, const Image& img, bool stretch = false) {
    if (img.channels != 1 && img.channels != 3) throw DomainError("PNG export supports 1 or 3 channels");
    float lo = 0.0f, span = 1.0f;
    if (stretch && !img.data.empty()) {
        const auto [mn, mx] = std::minmax_element(img.data.begin(), img.data.end());
        lo = *mn;
        span = *mx > *mn ? *mx - *mn : 1.0f;
    }
    std::vector<png_byte> pixels(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
        pixels[i] = static_cast<png_byte>(std::lround(std::clamp((img.data[i] - lo) / span, 0.0f, 1.0f) * 255.0f));

    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!file) throw ContainerError(ContainerError::Kind::io, "cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw ContainerError(ContainerError::Kind::io, "libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ContainerError(ContainerError::Kind::io, "PNG encoding failed for " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) png_write_row(png, pixels.data() + stride * static_cast<std::size_t>(y));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Reads an 8-bit gray or RGB PNG back into [0,1] floats.
inline Image read_png(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!file) throw ContainerError(ContainerError::Kind::io, "cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ContainerError(ContainerError::Kind::io, "libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ContainerError(ContainerError::Kind::format, "PNG decoding failed for " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const auto width = static_cast<int>(png_get_image_width(png, info));
    const auto height = static_cast<int>(png_get_image_height(png, info));
    const int channels = png_get_channels(png, info);
    if (png_get_bit_depth(png, info) != 8 || (channels != 1 && channels != 3)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ContainerError(ContainerError::Kind::format, "unsupported PNG layout in " + path.string());
    }
    Image img(height, width, channels);
    std::vector<png_byte> row(static_cast<std::size_t>(width) * channels);
    for (int y = 0; y < height; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (std::size_t i = 0; i < row.size(); ++i)
            img.data[static_cast<std::size_t>(y) * row.size() + i] = row[i] / 255.0f;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace aimc::image_io
