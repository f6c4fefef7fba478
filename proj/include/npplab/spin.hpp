#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "npplab/errors.hpp"

namespace npplab {

// A spin configuration sigma in {-1,+1}^n stored as a bitset: bit i set
// means sigma_i = +1. Canonical form fixes sigma_1 = +1 (bit 0 set).
class SpinConfig {
public:
    SpinConfig() = default;

    explicit SpinConfig(int n, bool all_plus = true)
        : n_(n), words_((n + 63) / 64, all_plus ? ~0ull : 0ull) {
        require(n >= 1, "SpinConfig: n must be >= 1");
        trim();
    }

    static SpinConfig from_signs(const std::vector<int>& signs) {
        SpinConfig s(static_cast<int>(signs.size()), false);
        for (int i = 0; i < s.n_; ++i)
            if (signs[i] > 0) s.set(i, true);
        return s;
    }

    // n <= 64 only: bit i of mask is sigma_i.
    static SpinConfig from_mask(int n, std::uint64_t mask) {
        require(n >= 1 && n <= 64, "SpinConfig::from_mask: need 1 <= n <= 64");
        SpinConfig s(n, false);
        s.words_[0] = n == 64 ? mask : (mask & ((1ull << n) - 1ull));
        return s;
    }

    // n <= 64 only.
    std::uint64_t mask() const {
        require(n_ <= 64, "SpinConfig::mask: n > 64");
        return words_[0];
    }

    int n() const { return n_; }

    bool bit(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ull; }

    int sign(int i) const { return bit(i) ? +1 : -1; }

    void set(int i, bool plus) {
        const std::uint64_t mask = 1ull << (i & 63);
        if (plus)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(int i) { words_[i >> 6] ^= 1ull << (i & 63); }

    SpinConfig negated() const {
        SpinConfig s(*this);
        for (auto& w : s.words_) w = ~w;
        s.trim();
        return s;
    }

    // Representative of the {sigma, -sigma} class with sigma_1 = +1.
    SpinConfig canonical() const { return bit(0) ? *this : negated(); }

    bool is_canonical() const { return bit(0); }

    int hamming(const SpinConfig& other) const {
        require(n_ == other.n_, "SpinConfig: length mismatch");
        int d = 0;
        for (std::size_t w = 0; w < words_.size(); ++w)
            d += std::popcount(words_[w] ^ other.words_[w]);
        return d;
    }

    // <sigma, sigma'> = n - 2 d_H; always an integer with the parity of n.
    int dot(const SpinConfig& other) const { return n_ - 2 * hamming(other); }

    bool operator==(const SpinConfig& other) const {
        return n_ == other.n_ && words_ == other.words_;
    }
    bool operator!=(const SpinConfig& other) const { return !(*this == other); }

    // Total order used for deterministic tie-breaking: compares the bit
    // vector as a little-endian integer.
    bool operator<(const SpinConfig& other) const {
        if (n_ != other.n_) return n_ < other.n_;
        for (std::size_t w = words_.size(); w-- > 0;)
            if (words_[w] != other.words_[w]) return words_[w] < other.words_[w];
        return false;
    }

    // Hex encoding of the bit vector (fixed width ceil(n/4) digits, most
    // significant nibble first). n travels separately.
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        const int width = (n_ + 3) / 4;
        std::string out(width, '0');
        for (int d = 0; d < width; ++d) {
            const int shift = 4 * (width - 1 - d);
            const int word = shift >> 6;
            const std::uint64_t nib = (words_[word] >> (shift & 63)) & 0xfull;
            out[d] = digits[nib];
        }
        return out;
    }

    static SpinConfig from_hex(int n, const std::string& hex) {
        SpinConfig s(n, false);
        const int width = (n + 3) / 4;
        require(static_cast<int>(hex.size()) == width, "SpinConfig: bad hex width");
        for (int d = 0; d < width; ++d) {
            const char c = hex[d];
            std::uint64_t nib;
            if (c >= '0' && c <= '9')
                nib = static_cast<std::uint64_t>(c - '0');
            else if (c >= 'a' && c <= 'f')
                nib = static_cast<std::uint64_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F')
                nib = static_cast<std::uint64_t>(c - 'A' + 10);
            else
                throw std::invalid_argument("SpinConfig: bad hex digit");
            const int shift = 4 * (width - 1 - d);
            s.words_[shift >> 6] |= nib << (shift & 63);
        }
        SpinConfig check = s;
        check.trim();
        require(check == s, "SpinConfig: hex has bits beyond n");
        return s;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void trim() {
        const int rem = n_ & 63;
        if (rem != 0) words_.back() &= (1ull << rem) - 1ull;
    }

    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

// Normalized overlap. signed: <a,b>/n in [-1,1]; unsigned: its absolute value.
inline double overlap(const SpinConfig& a, const SpinConfig& b, bool signed_overlap) {
    require(a.n() == b.n(), "overlap: length mismatch");
    const double v = static_cast<double>(a.dot(b)) / a.n();
    return signed_overlap ? v : std::abs(v);
}

}  // namespace npplab
