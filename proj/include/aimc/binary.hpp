#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace aimc::binary {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
inline auto to_unsigned(T v) {
    if constexpr (std::is_floating_point_v<T>) {
        if constexpr (sizeof(T) == 4) return std::bit_cast<std::uint32_t>(v);
        else return std::bit_cast<std::uint64_t>(v);
    } else {
        return static_cast<std::make_unsigned_t<T>>(v);
    }
}

/// Appends `v` little-endian.
template <typename T>
inline void put(std::vector<std::uint8_t>& out, T v) {
    auto u = to_unsigned(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>((u >> (8 * i)) & 0xFF));
}

/// Appends `text` zero-padded (or truncated) to exactly `width` bytes.
inline void put_fixed(std::vector<std::uint8_t>& out, std::string_view text, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) out.push_back(i < text.size() ? static_cast<std::uint8_t>(text[i]) : 0);
}

/// Reads a little-endian value at `p`.
template <typename T>
inline T get(const std::uint8_t* p) {
    using U = decltype(to_unsigned(T{}));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
    if constexpr (std::is_floating_point_v<T>) return std::bit_cast<T>(u);
    else return static_cast<T>(u);
}

/// Reads a zero-padded fixed-width string.
inline std::string get_fixed(const std::uint8_t* p, std::size_t width) {
    std::size_t n = 0;
    while (n < width && p[n] != 0) ++n;
    return std::string(reinterpret_cast<const char*>(p), n);
}

}  // namespace aimc::binary
