#pragma once

// Route <-> bit string labelings for TSP tours with a fixed origin.
//
// Natural labeling: lexicographic rank of the route written in straight
// binary, decoded by reducing the integer modulo (N-1)!.
// Gray labeling: inversion table of the route, each digit written as a
// reflected Gray code of width ceil(log2 i), fields concatenated for
// i = 2 .. N-1; decoded by reducing each digit modulo i.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmatsp/bit_string.hpp"
#include "fmatsp/error.hpp"

namespace fmatsp {

/// Largest city count whose (N-1)! fits exact 64-bit rank arithmetic.
inline constexpr int kMaxCities = 21;

inline void check_city_count(int n_cities) {
    if (n_cities < 3) {
        throw ValidationError("city count must be at least 3, got " + std::to_string(n_cities));
    }
    if (n_cities > kMaxCities) {
        throw ValidationError("city count must be at most " + std::to_string(kMaxCities) + ", got " +
                              std::to_string(n_cities));
    }
}

inline constexpr std::uint64_t factorial(int n) {
    std::uint64_t out = 1;
    for (int i = 2; i <= n; ++i) out *= static_cast<std::uint64_t>(i);
    return out;
}

/// A tour through cities 1..N-1; city 0 is the implicit origin and terminus.
class Route {
public:
    Route() = default;

    explicit Route(std::vector<int> cities) : cities_(std::move(cities)) {
        const int n_cities = static_cast<int>(cities_.size()) + 1;
        check_city_count(n_cities);
        std::vector<bool> seen(cities_.size() + 1, false);
        for (int city : cities_) {
            if (city < 1 || city >= n_cities) {
                throw ValidationError("city index " + std::to_string(city) + " outside 1.." +
                                      std::to_string(n_cities - 1));
            }
            if (seen[static_cast<std::size_t>(city)]) {
                throw ValidationError("city " + std::to_string(city) + " visited twice");
            }
            seen[static_cast<std::size_t>(city)] = true;
        }
    }

    Route(std::initializer_list<int> cities) : Route(std::vector<int>(cities)) {}

    static Route identity(int n_cities) {
        check_city_count(n_cities);
        std::vector<int> cities(static_cast<std::size_t>(n_cities - 1));
        for (std::size_t j = 0; j < cities.size(); ++j) cities[j] = static_cast<int>(j) + 1;
        return Route(std::move(cities));
    }

    /// Accepts indices separated by ',' or '-' (e.g. "7,5,3" or "7-5-3").
    static Route parse(std::string_view text) {
        std::vector<int> cities;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t end = text.find_first_of(",-", pos);
            if (end == std::string_view::npos) end = text.size();
            const std::string_view token = text.substr(pos, end - pos);
            if (token.empty() || !std::all_of(token.begin(), token.end(),
                                              [](char c) { return c >= '0' && c <= '9'; })) {
                throw ValidationError("cannot parse route '" + std::string(text) + "'");
            }
            if (token.size() > 6) throw ValidationError("city index too large in '" + std::string(text) + "'");
            cities.push_back(std::stoi(std::string(token)));
            pos = end + 1;
        }
        return Route(std::move(cities));
    }

    int n_cities() const noexcept { return static_cast<int>(cities_.size()) + 1; }
    std::size_t size() const noexcept { return cities_.size(); }
    int operator[](std::size_t j) const { return cities_[j]; }
    const std::vector<int>& cities() const noexcept { return cities_; }

    Route reversed() const {
        Route out = *this;
        std::reverse(out.cities_.begin(), out.cities_.end());
        return out;
    }

    /// Hyphen-joined indices, e.g. "2-4-1-3".
    std::string to_string() const {
        std::string out;
        for (std::size_t j = 0; j < cities_.size(); ++j) {
            if (j) out += '-';
            out += std::to_string(cities_[j]);
        }
        return out;
    }

    friend bool operator==(const Route&, const Route&) = default;
    friend auto operator<=>(const Route&, const Route&) = default;

private:
    std::vector<int> cities_;
};

/// Inversion counts |S_i| for i = 2..N-1: how many lower-indexed cities are
/// visited after city i. `counts[0]` is the entry for city 2.
struct InversionTable {
    std::vector<std::uint64_t> counts;

    int n_cities() const noexcept { return static_cast<int>(counts.size()) + 2; }
    std::uint64_t at_city(int i) const { return counts[static_cast<std::size_t>(i - 2)]; }

    /// Every entry satisfies counts(i) <= i - 1.
    bool canonical() const noexcept {
        for (std::size_t idx = 0; idx < counts.size(); ++idx) {
            if (counts[idx] > idx + 1) return false;
        }
        return true;
    }

    /// Reduce each entry modulo its city index.
    InversionTable reduced() const {
        InversionTable out = *this;
        for (std::size_t idx = 0; idx < out.counts.size(); ++idx) out.counts[idx] %= (idx + 2);
        return out;
    }

    friend bool operator==(const InversionTable&, const InversionTable&) = default;
};

// ---------------------------------------------------------------------------
// Lexicographic ranking

/// Zero-based lexicographic rank among permutations of 1..N-1 (Lehmer code).
inline std::uint64_t lex_rank(const Route& route) {
    const std::size_t len = route.size();
    std::uint64_t rank = 0;
    for (std::size_t j = 0; j < len; ++j) {
        std::uint64_t smaller_after = 0;
        for (std::size_t t = j + 1; t < len; ++t) smaller_after += route[t] < route[j] ? 1 : 0;
        rank += smaller_after * factorial(static_cast<int>(len - 1 - j));
    }
    return rank;
}

inline Route lex_unrank(std::uint64_t rank, int n_cities) {
    check_city_count(n_cities);
    const std::uint64_t total = factorial(n_cities - 1);
    if (rank >= total) {
        throw ValidationError("rank " + std::to_string(rank) + " out of range for " +
                              std::to_string(n_cities) + " cities");
    }
    std::vector<int> pool(static_cast<std::size_t>(n_cities - 1));
    for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = static_cast<int>(j) + 1;
    std::vector<int> cities;
    cities.reserve(pool.size());
    for (int remaining = n_cities - 1; remaining > 0; --remaining) {
        const std::uint64_t block = factorial(remaining - 1);
        const auto digit = static_cast<std::ptrdiff_t>(rank / block);
        rank %= block;
        cities.push_back(pool[static_cast<std::size_t>(digit)]);
        pool.erase(pool.begin() + digit);
    }
    return Route(std::move(cities));
}

// ---------------------------------------------------------------------------
// Bit lengths

/// ceil(log2 (N-1)!).
inline std::size_t natural_bit_length(int n_cities) {
    check_city_count(n_cities);
    return static_cast<std::size_t>(std::bit_width(factorial(n_cities - 1) - 1));
}

/// ceil(log2 i): width of the Gray field that holds |S_i|.
inline std::size_t gray_field_width(int city) {
    return static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(city - 1)));
}

/// Sum over i = 2..N-1 of ceil(log2 i).
inline std::size_t gray_bit_length(int n_cities) {
    check_city_count(n_cities);
    std::size_t total = 0;
    for (int i = 2; i < n_cities; ++i) total += gray_field_width(i);
    return total;
}

// ---------------------------------------------------------------------------
// Natural labeling

inline BitString natural_encode(const Route& route) {
    return straight_binary_encode(lex_rank(route), natural_bit_length(route.n_cities()));
}

inline Route natural_decode(const BitString& bits, int n_cities) {
    const std::size_t expected = natural_bit_length(n_cities);
    if (bits.size() != expected) {
        throw ValidationError("natural label for " + std::to_string(n_cities) + " cities needs " +
                              std::to_string(expected) + " bits, got " + std::to_string(bits.size()));
    }
    return lex_unrank(straight_binary_decode(bits) % factorial(n_cities - 1), n_cities);
}

// ---------------------------------------------------------------------------
// Inversion tables

inline InversionTable inversion_table(const Route& route) {
    const int n_cities = route.n_cities();
    std::vector<std::size_t> position(static_cast<std::size_t>(n_cities));
    for (std::size_t j = 0; j < route.size(); ++j) position[static_cast<std::size_t>(route[j])] = j;

    InversionTable table;
    table.counts.resize(static_cast<std::size_t>(n_cities - 2));
    for (int i = 2; i < n_cities; ++i) {
        std::uint64_t count = 0;
        for (int lower = 1; lower < i; ++lower) {
            count += position[static_cast<std::size_t>(lower)] > position[static_cast<std::size_t>(i)] ? 1 : 0;
        }
        table.counts[static_cast<std::size_t>(i - 2)] = count;
    }
    return table;
}

/// Inserts cities 1, 2, ..., N-1 in order, placing city i so that exactly
/// |S_i| already-placed cities follow it.
inline Route route_from_inversion_table(const InversionTable& table, int n_cities) {
    check_city_count(n_cities);
    if (table.n_cities() != n_cities) {
        throw ValidationError("inversion table has " + std::to_string(table.counts.size()) +
                              " entries, expected " + std::to_string(n_cities - 2));
    }
    if (!table.canonical()) {
        throw ValidationError("inversion table is not canonical; reduce entries modulo city index first");
    }
    std::vector<int> sequence;
    sequence.reserve(static_cast<std::size_t>(n_cities - 1));
    sequence.push_back(1);
    for (int i = 2; i < n_cities; ++i) {
        const auto follow = static_cast<std::ptrdiff_t>(table.at_city(i));
        sequence.insert(sequence.end() - follow, i);
    }
    return Route(std::move(sequence));
}

// ---------------------------------------------------------------------------
// Gray labeling

/// g_i(value) = n(value) xor n(value / 2) on ceil(log2 i) bits.
inline BitString gray_digit_encode(std::uint64_t value, int city) {
    const std::size_t width = gray_field_width(city);
    if (width < 64 && (value >> width) != 0) {
        throw ValidationError("inversion count " + std::to_string(value) + " does not fit the " +
                              std::to_string(width) + "-bit field of city " + std::to_string(city));
    }
    return straight_binary_encode(value ^ (value >> 1), width);
}

/// Reflected Gray inverse: each output bit is the prefix xor from the MSB.
inline std::uint64_t gray_digit_decode(const BitString& bits) {
    std::uint64_t value = 0;
    std::uint64_t running = 0;
    for (std::size_t pos = 0; pos < bits.size(); ++pos) {
        running ^= bits[pos];
        value = (value << 1) | running;
    }
    return value;
}

inline BitString gray_encode(const Route& route) {
    const InversionTable table = inversion_table(route);
    BitString out;
    for (int i = 2; i < route.n_cities(); ++i) out.append(gray_digit_encode(table.at_city(i), i));
    return out;
}

/// Raw (unreduced) inversion counts read from a Gray label.
inline InversionTable gray_raw_counts(const BitString& bits, int n_cities) {
    const std::size_t expected = gray_bit_length(n_cities);
    if (bits.size() != expected) {
        throw ValidationError("Gray label for " + std::to_string(n_cities) + " cities needs " +
                              std::to_string(expected) + " bits, got " + std::to_string(bits.size()));
    }
    InversionTable table;
    table.counts.reserve(static_cast<std::size_t>(n_cities - 2));
    std::size_t pos = 0;
    for (int i = 2; i < n_cities; ++i) {
        const std::size_t width = gray_field_width(i);
        table.counts.push_back(gray_digit_decode(bits.slice(pos, width)));
        pos += width;
    }
    return table;
}

inline Route gray_decode(const BitString& bits, int n_cities) {
    return route_from_inversion_table(gray_raw_counts(bits, n_cities).reduced(), n_cities);
}

// ---------------------------------------------------------------------------
// Scheme dispatch

enum class LabelingKind { Natural, Gray };

inline std::string_view to_string(LabelingKind kind) {
    return kind == LabelingKind::Natural ? "natural" : "gray";
}

inline LabelingKind parse_labeling_kind(std::string_view name) {
    if (name == "natural") return LabelingKind::Natural;
    if (name == "gray") return LabelingKind::Gray;
    throw ValidationError("unknown labeling scheme '" + std::string(name) + "' (expected natural or gray)");
}

struct LabelingScheme {
    LabelingKind kind = LabelingKind::Gray;
    int n_cities = 5;

    std::size_t bit_length() const {
        return kind == LabelingKind::Natural ? natural_bit_length(n_cities) : gray_bit_length(n_cities);
    }

    BitString encode(const Route& route) const {
        if (route.n_cities() != n_cities) {
            throw ValidationError("route has " + std::to_string(route.n_cities()) + " cities, scheme expects " +
                                  std::to_string(n_cities));
        }
        return kind == LabelingKind::Natural ? natural_encode(route) : gray_encode(route);
    }

    Route decode(const BitString& bits) const {
        return kind == LabelingKind::Natural ? natural_decode(bits, n_cities) : gray_decode(bits, n_cities);
    }

    friend bool operator==(const LabelingScheme&, const LabelingScheme&) = default;
};

inline std::size_t bit_length(const LabelingScheme& scheme) { return scheme.bit_length(); }

}  // namespace fmatsp
