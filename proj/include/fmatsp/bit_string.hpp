#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fmatsp/error.hpp"

namespace fmatsp {

/// Fixed-length sequence of binary variables.
///
/// Storage follows the canonical text form: position 0 is the leftmost
/// character. Global bit index k counts from the right, so position
/// `size() - 1 - k` holds bit k and the leftmost bit is index `size() - 1`.
class BitString {
public:
    BitString() = default;

    explicit BitString(std::size_t length) : bits_(length, 0) {}

    static BitString from_string(std::string_view text) {
        BitString out(text.size());
        for (std::size_t pos = 0; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c != '0' && c != '1') {
                throw ValidationError("bit string contains non-binary character '" +
                                      std::string(1, c) + "'");
            }
            out.bits_[pos] = static_cast<std::uint8_t>(c - '0');
        }
        return out;
    }

    /// Straight-binary expansion of `value` into exactly `length` bits.
    static BitString from_value(std::uint64_t value, std::size_t length) {
        if (length < 64 && (value >> length) != 0) {
            throw ValidationError("value " + std::to_string(value) + " does not fit in " +
                                  std::to_string(length) + " bits");
        }
        BitString out(length);
        for (std::size_t k = 0; k < length && k < 64; ++k) {
            out.set_bit(k, (value >> k) & 1U);
        }
        return out;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    /// Bit at text position `pos` (0 = leftmost).
    std::uint8_t operator[](std::size_t pos) const { return bits_[pos]; }
    void set(std::size_t pos, bool value) { bits_[pos] = value ? 1 : 0; }

    /// Bit with global index k (0 = rightmost).
    std::uint8_t bit(std::size_t k) const { return bits_[bits_.size() - 1 - k]; }
    void set_bit(std::size_t k, bool value) { set(bits_.size() - 1 - k, value); }

    /// b xor 2^k.
    void flip(std::size_t k) { bits_[bits_.size() - 1 - k] ^= 1U; }
    BitString flipped(std::size_t k) const {
        BitString out = *this;
        out.flip(k);
        return out;
    }

    std::size_t popcount() const {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }

    /// Straight-binary integer value. Fails only if set bits lie above index 63.
    std::uint64_t to_value() const {
        std::uint64_t value = 0;
        for (std::size_t k = 0; k < bits_.size(); ++k) {
            if (!bit(k)) continue;
            if (k >= 64) throw ValidationError("bit string value exceeds 64 bits");
            value |= std::uint64_t{1} << k;
        }
        return value;
    }

    std::string to_string() const {
        std::string out(bits_.size(), '0');
        for (std::size_t pos = 0; pos < bits_.size(); ++pos) {
            if (bits_[pos]) out[pos] = '1';
        }
        return out;
    }

    BitString slice(std::size_t pos, std::size_t length) const {
        BitString out;
        out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                         bits_.begin() + static_cast<std::ptrdiff_t>(pos + length));
        return out;
    }

    void append(const BitString& tail) { bits_.insert(bits_.end(), tail.bits_.begin(), tail.bits_.end()); }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    friend bool operator==(const BitString&, const BitString&) = default;
    friend auto operator<=>(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

inline std::size_t hamming_distance(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) {
        throw ValidationError("hamming distance of bit strings with different lengths");
    }
    std::size_t count = 0;
    for (std::size_t pos = 0; pos < a.size(); ++pos) count += (a[pos] != b[pos]) ? 1 : 0;
    return count;
}

/// n_lambda(gamma): the lambda-bit straight binary label of gamma, MSB first.
inline BitString straight_binary_encode(std::uint64_t gamma, std::size_t lambda) {
    return BitString::from_value(gamma, lambda);
}

inline std::uint64_t straight_binary_decode(const BitString& b) { return b.to_value(); }

}  // namespace fmatsp
