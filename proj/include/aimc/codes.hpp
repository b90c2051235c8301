#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aimc/errors.hpp"
#include "aimc/rng.hpp"

namespace aimc {

/// Pulse-compression code. Phase codes fill `phases_rad`; hop codes
/// (Costas, FSK symbols) fill `hop_indices`.
struct CodeSequence {
    std::vector<double> phases_rad;
    std::vector<int> hop_indices;

    std::size_t length() const noexcept { return phases_rad.empty() ? hop_indices.size() : phases_rad.size(); }
    friend bool operator==(const CodeSequence&, const CodeSequence&) = default;
};

inline double wrap_2pi(double phase) noexcept {
    constexpr double two_pi = 2 * std::numbers::pi;
    double w = std::fmod(phase, two_pi);
    if (w < 0) w += two_pi;
    if (w >= two_pi) w -= two_pi;
    return w;
}

/// Wraps into (-pi, pi].
inline double wrap_pi(double phase) noexcept {
    constexpr double pi = std::numbers::pi;
    double w = wrap_2pi(phase + pi) - pi;
    return w <= -pi ? w + 2 * pi : w;
}

/// Binary Barker code by class id ("BARKER_13", "BARKER_4_2", ...).
/// `phase` is the phase of a -1 chip (pi for the standard code).
inline CodeSequence barker(std::string_view code_id, double phase = std::numbers::pi) {
    static const std::pair<std::string_view, std::string_view> table[] = {
        {"BARKER_2_1", "+-"},  {"BARKER_2_2", "++"},    {"BARKER_3", "++-"},
        {"BARKER_4_1", "++-+"}, {"BARKER_4_2", "+++-"}, {"BARKER_5", "+++-+"},
        {"BARKER_7", "+++--+-"}, {"BARKER_11", "+++---+--+-"}, {"BARKER_13", "+++++--++-+-+"},
    };
    for (const auto& [id, signs] : table) {
        if (id != code_id) continue;
        CodeSequence code;
        for (char s : signs) code.phases_rad.push_back(s == '+' ? 0.0 : phase);
        return code;
    }
    throw SynthesisError("unknown Barker code: " + std::string(code_id));
}

/// Frank code: phase (scale/M)*i*j over an M x M grid, row-major.
inline CodeSequence frank(int m, double scale = 2 * std::numbers::pi) {
    if (m < 2) throw SynthesisError("Frank code order must be >= 2");
    CodeSequence code;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) code.phases_rad.push_back(wrap_2pi(scale / m * i * j));
    return code;
}

/// P1: -(scale/M) [M - (2j-1)] [(j-1)M + (i-1)], groups j outer, i inner (1-based).
inline CodeSequence p1(int m, double scale = std::numbers::pi) {
    if (m < 2) throw SynthesisError("P1 code order must be >= 2");
    CodeSequence code;
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= m; ++i)
            code.phases_rad.push_back(
                wrap_2pi(-(scale / m) * double(m - (2 * j - 1)) * double((j - 1) * m + (i - 1))));
    return code;
}

/// P2: [(scale/2)(M-1)/M - (scale/M)(i-1)] (M + 1 - 2j), M even.
inline CodeSequence p2(int m, double scale = std::numbers::pi) {
    if (m < 2 || m % 2) throw SynthesisError("P2 code order must be even and >= 2");
    CodeSequence code;
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= m; ++i)
            code.phases_rad.push_back(
                wrap_2pi(((scale / 2) * (m - 1) / m - (scale / m) * (i - 1)) * double(m + 1 - 2 * j)));
    return code;
}

/// P3: scale (i-1)^2 / N.
inline CodeSequence p3(int n, double scale = std::numbers::pi) {
    if (n < 4) throw SynthesisError("P3 code length must be >= 4");
    CodeSequence code;
    for (int i = 0; i < n; ++i) code.phases_rad.push_back(wrap_2pi(scale * double(i) * i / n));
    return code;
}

/// P4: scale (i-1)^2 / N - scale (i-1).
inline CodeSequence p4(int n, double scale = std::numbers::pi) {
    if (n < 4) throw SynthesisError("P4 code length must be >= 4");
    CodeSequence code;
    for (int i = 0; i < n; ++i) code.phases_rad.push_back(wrap_2pi(scale * double(i) * i / n - scale * i));
    return code;
}

/// True when `hops` is a permutation of 0..n-1 whose displacement vectors
/// (dj, dh) over all pairs are pairwise distinct.
inline bool is_costas(std::span<const int> hops) {
    const auto n = static_cast<int>(hops.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int h : hops) {
        if (h < 0 || h >= n || seen[static_cast<std::size_t>(h)]) return false;
        seen[static_cast<std::size_t>(h)] = true;
    }
    std::set<std::pair<int, int>> vectors;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!vectors.emplace(j - i, hops[static_cast<std::size_t>(j)] - hops[static_cast<std::size_t>(i)]).second)
                return false;
    return true;
}

namespace detail {

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<int> primitive_roots(int p) {
    std::vector<int> factors;
    int phi = p - 1, r = phi;
    for (int d = 2; d * d <= r; ++d)
        if (r % d == 0) {
            factors.push_back(d);
            while (r % d == 0) r /= d;
        }
    if (r > 1) factors.push_back(r);
    auto powmod = [p](long long b, long long e) {
        long long acc = 1;
        b %= p;
        while (e) {
            if (e & 1) acc = acc * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return acc;
    };
    std::vector<int> roots;
    for (int g = 2; g < p; ++g)
        if (std::all_of(factors.begin(), factors.end(), [&](int f) { return powmod(g, phi / f) != 1; }))
            roots.push_back(g);
    return roots;
}

inline bool costas_search(std::vector<int>& hops, std::vector<bool>& used, int n, Xoshiro256& rng) {
    const auto k = static_cast<int>(hops.size());
    if (k == n) return true;
    std::vector<int> candidates;
    for (int v = 0; v < n; ++v)
        if (!used[static_cast<std::size_t>(v)]) candidates.push_back(v);
    for (std::size_t i = candidates.size(); i > 1; --i)
        std::swap(candidates[i - 1], candidates[static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(i) - 1))]);
    for (int v : candidates) {
        // New column k adds vectors (k - i, v - hops[i]); row d of the difference triangle must stay distinct.
        bool ok = true;
        for (int d = 1; d <= k && ok; ++d) {
            const int diff = v - hops[static_cast<std::size_t>(k - d)];
            for (int i = 0; i + d < k; ++i)
                if (hops[static_cast<std::size_t>(i + d)] - hops[static_cast<std::size_t>(i)] == diff) {
                    ok = false;
                    break;
                }
        }
        if (!ok) continue;
        hops.push_back(v);
        used[static_cast<std::size_t>(v)] = true;
        if (costas_search(hops, used, n, rng)) return true;
        used[static_cast<std::size_t>(v)] = false;
        hops.pop_back();
    }
    return false;
}

/// One of the eight symmetries of the square; all map Costas arrays to Costas arrays.
inline std::vector<int> dihedral(std::vector<int> hops, int which) {
    const auto n = static_cast<int>(hops.size());
    if (which & 1) std::reverse(hops.begin(), hops.end());
    if (which & 2)
        for (int& h : hops) h = n - 1 - h;
    if (which & 4) {
        std::vector<int> inverse(hops.size());
        for (int i = 0; i < n; ++i) inverse[static_cast<std::size_t>(hops[static_cast<std::size_t>(i)])] = i;
        hops = std::move(inverse);
    }
    return hops;
}

}  // namespace detail

/// Exponential Welch construction: hop[i] = g^(i+1) mod p - 1, order p - 1.
inline CodeSequence welch_costas(int p, int g) {
    if (!detail::is_prime(p)) throw SynthesisError("Welch construction needs a prime modulus");
    CodeSequence code;
    long long v = 1;
    for (int i = 1; i < p; ++i) {
        v = v * g % p;
        code.hop_indices.push_back(static_cast<int>(v) - 1);
    }
    if (!is_costas(code.hop_indices)) throw SynthesisError("generator is not a primitive root");
    return code;
}

/// Seeded Costas array of the given order.
///
/// Welch (order + 1 prime) or corner-stripped Welch (order + 2 prime) when
/// available, otherwise a seeded backtracking search (orders up to 16). A
/// seeded dihedral symmetry is applied on top.
inline CodeSequence costas(int order, std::uint64_t seed) {
    if (order < 2) throw SynthesisError("Costas order must be >= 2");
    Xoshiro256 rng(seed);
    std::vector<int> hops;
    if (detail::is_prime(order + 1)) {
        const auto roots = detail::primitive_roots(order + 1);
        const int g = roots[static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(roots.size()) - 1))];
        hops = welch_costas(order + 1, g).hop_indices;
    } else if (detail::is_prime(order + 2)) {
        const auto roots = detail::primitive_roots(order + 2);
        const int g = roots[static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(roots.size()) - 1))];
        // Welch order p-1 ends with the corner dot (p-2, 0); drop it.
        hops = welch_costas(order + 2, g).hop_indices;
        hops.pop_back();
        for (int& h : hops) h -= 1;
    } else if (order <= 16) {
        std::vector<bool> used(static_cast<std::size_t>(order), false);
        if (!detail::costas_search(hops, used, order, rng))
            throw SynthesisError("no Costas array of order " + std::to_string(order));
    } else {
        throw SynthesisError("no Costas array available for order " + std::to_string(order));
    }
    CodeSequence code;
    code.hop_indices = detail::dihedral(std::move(hops), static_cast<int>(rng.uniform_int(0, 7)));
    return code;
}

}  // namespace aimc
