#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace tmc {

// Lowest word with `k` bits set out of `n`.
inline std::uint64_t first_combination(int k) noexcept {
    return k == 0 ? 0ULL : (k >= 64 ? ~0ULL : (1ULL << k) - 1);
}

// Next word with the same popcount in ascending order (Gosper's hack).
// Returns 0 once the sequence within `n` bits is exhausted by the caller's
// bound check; the caller must stop when the result has bits >= n.
inline std::uint64_t next_combination(std::uint64_t v) noexcept {
    const std::uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

// All n-bit words with exactly k bits set, ascending.
inline std::vector<std::uint64_t> combinations(int n, int k) {
    std::vector<std::uint64_t> out;
    if (k < 0 || k > n) return out;
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    const std::uint64_t last = first_combination(k) << (n - k);
    for (std::uint64_t v = first_combination(k);; v = next_combination(v)) {
        out.push_back(v);
        if (v == last) break;
    }
    return out;
}

// Bits strictly between positions a and b (exclusive on both ends).
inline std::uint64_t between_mask(int a, int b) noexcept {
    if (a > b) { const int t = a; a = b; b = t; }
    if (b - a < 2) return 0;
    return ((1ULL << (b - a - 1)) - 1) << (a + 1);
}

inline std::uint64_t binomial(int n, int k) noexcept {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 num = 1; // intermediate product exceeds 64 bits near C(64, 32)
    for (int i = 0; i < k; ++i)
        num = num * static_cast<unsigned __int128>(n - i) / static_cast<unsigned>(i + 1);
    return static_cast<std::uint64_t>(num);
}

} // namespace tmc
