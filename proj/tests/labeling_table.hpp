#pragma once

// Reference labels for all 24 routes of the 5-city problem.

#include <array>
#include <cstdint>
#include <string_view>

namespace fmatsp::testing {

struct LabelRow {
    std::array<int, 4> route;
    std::uint64_t rank;
    std::string_view natural;
    std::array<std::uint64_t, 3> inversions;
    std::string_view gray;
};

inline constexpr std::array<LabelRow, 24> kLabelRows{{
    {{1, 2, 3, 4}, 0, "00000", {0, 0, 0}, "00000"},
    {{1, 2, 4, 3}, 1, "00001", {0, 0, 1}, "00001"},
    {{1, 3, 2, 4}, 2, "00010", {0, 1, 0}, "00100"},
    {{1, 3, 4, 2}, 3, "00011", {0, 1, 1}, "00101"},
    {{1, 4, 2, 3}, 4, "00100", {0, 0, 2}, "00011"},
    {{1, 4, 3, 2}, 5, "00101", {0, 1, 2}, "00111"},
    {{2, 1, 3, 4}, 6, "00110", {1, 0, 0}, "10000"},
    {{2, 1, 4, 3}, 7, "00111", {1, 0, 1}, "10001"},
    {{2, 3, 1, 4}, 8, "01000", {1, 1, 0}, "10100"},
    {{2, 3, 4, 1}, 9, "01001", {1, 1, 1}, "10101"},
    {{2, 4, 1, 3}, 10, "01010", {1, 0, 2}, "10011"},
    {{2, 4, 3, 1}, 11, "01011", {1, 1, 2}, "10111"},
    {{3, 1, 2, 4}, 12, "01100", {0, 2, 0}, "01100"},
    {{3, 1, 4, 2}, 13, "01101", {0, 2, 1}, "01101"},
    {{3, 2, 1, 4}, 14, "01110", {1, 2, 0}, "11100"},
    {{3, 2, 4, 1}, 15, "01111", {1, 2, 1}, "11101"},
    {{3, 4, 1, 2}, 16, "10000", {0, 2, 2}, "01111"},
    {{3, 4, 2, 1}, 17, "10001", {1, 2, 2}, "11111"},
    {{4, 1, 2, 3}, 18, "10010", {0, 0, 3}, "00010"},
    {{4, 1, 3, 2}, 19, "10011", {0, 1, 3}, "00110"},
    {{4, 2, 1, 3}, 20, "10100", {1, 0, 3}, "10010"},
    {{4, 2, 3, 1}, 21, "10101", {1, 1, 3}, "10110"},
    {{4, 3, 1, 2}, 22, "10110", {0, 2, 3}, "01110"},
    {{4, 3, 2, 1}, 23, "10111", {1, 2, 3}, "11110"},
}};

/// Out-of-range labels and the route each decodes to.
struct ExtendedRow {
    std::string_view bits;
    std::array<int, 4> route;
};

// Natural: integers 24..31 reduce modulo 4! onto ranks 0..7.
inline constexpr std::array<ExtendedRow, 8> kNaturalExtended{{
    {"11000", {1, 2, 3, 4}},
    {"11001", {1, 2, 4, 3}},
    {"11010", {1, 3, 2, 4}},
    {"11011", {1, 3, 4, 2}},
    {"11100", {1, 4, 2, 3}},
    {"11101", {1, 4, 3, 2}},
    {"11110", {2, 1, 3, 4}},
    {"11111", {2, 1, 4, 3}},
}};

// Gray: labels whose city-3 digit reads 3 and reduces to 0.
inline constexpr std::array<ExtendedRow, 8> kGrayExtended{{
    {"01000", {1, 2, 3, 4}},
    {"01001", {1, 2, 4, 3}},
    {"01011", {1, 4, 2, 3}},
    {"11000", {2, 1, 3, 4}},
    {"11001", {2, 1, 4, 3}},
    {"11011", {2, 4, 1, 3}},
    {"01010", {4, 1, 2, 3}},
    {"11010", {4, 2, 1, 3}},
}};

}  // namespace fmatsp::testing
