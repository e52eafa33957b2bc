#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fmatsp/error.hpp"
#include "fmatsp/format.hpp"
#include "fmatsp/perm_codec.hpp"

namespace fmatsp {

struct City {
    double alpha = 0.0;
    double beta = 0.0;
};

/// Euclidean TSP instance in the unit square. Immutable after construction.
class TspInstance {
public:
    explicit TspInstance(std::vector<City> coords) : coords_(std::move(coords)) {
        if (coords_.size() < 3) {
            throw ValidationError("instance needs at least 3 cities, got " + std::to_string(coords_.size()));
        }
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            const City& c = coords_[i];
            if (!std::isfinite(c.alpha) || !std::isfinite(c.beta) || c.alpha < 0.0 || c.alpha > 1.0 ||
                c.beta < 0.0 || c.beta > 1.0) {
                throw ValidationError("city " + std::to_string(i) + " lies outside the unit square");
            }
        }
        const std::size_t n = coords_.size();
        table_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double da = coords_[j].alpha - coords_[i].alpha;
                const double db = coords_[j].beta - coords_[i].beta;
                const double d = std::sqrt(da * da + db * db);
                table_[i * n + j] = d;
                table_[j * n + i] = d;
            }
        }
    }

    int n_cities() const noexcept { return static_cast<int>(coords_.size()); }
    const City& city(int i) const { return coords_[static_cast<std::size_t>(i)]; }
    const std::vector<City>& coords() const noexcept { return coords_; }

    double distance(int from, int to) const {
        return table_[static_cast<std::size_t>(from) * coords_.size() + static_cast<std::size_t>(to)];
    }

private:
    std::vector<City> coords_;
    std::vector<double> table_;
};

struct TourResult {
    Route route;
    double distance = 0.0;
};

/// Closed tour length 0 -> r_1 -> ... -> r_{N-1} -> 0.
///
/// Segments are always summed in the orientation whose first city is the
/// smaller of r_1 and r_{N-1}, so a tour and its reversal give bitwise equal
/// lengths and compare as exact ties.
inline double route_distance(const TspInstance& inst, const Route& route) {
    if (route.n_cities() != inst.n_cities()) {
        throw ValidationError("route has " + std::to_string(route.n_cities()) + " cities, instance has " +
                              std::to_string(inst.n_cities()));
    }
    const auto& cities = route.cities();
    double total = 0.0;
    int prev = 0;
    auto walk = [&](auto first, auto last) {
        for (; first != last; ++first) {
            total += inst.distance(prev, *first);
            prev = *first;
        }
    };
    if (cities.front() <= cities.back()) {
        walk(cities.begin(), cities.end());
    } else {
        walk(cities.rbegin(), cities.rend());
    }
    return total + inst.distance(prev, 0);
}

// ---------------------------------------------------------------------------
// Fixed instances used throughout the experiments

namespace detail {

struct BuiltinTable {
    int n_cities;
    std::array<std::string_view, 15> coords;
};

// "alpha beta" strings, three decimals as tabulated.
inline constexpr std::array<BuiltinTable, 6> kBuiltinTables{{
    {5, {"0.069 0.530", "0.204 0.891", "0.531 0.034", "0.837 0.204", "0.695 0.688"}},
    {7, {"0.865 0.693", "0.266 0.285", "0.436 0.059", "0.051 0.984", "0.861 0.032", "0.271 0.592",
         "0.990 0.267"}},
    {9, {"0.961 0.983", "0.598 0.990", "0.080 0.916", "0.511 0.200", "0.468 0.734", "0.980 0.059",
         "0.643 0.676", "0.096 0.167", "0.026 0.378"}},
    {11, {"0.235 0.339", "0.895 0.135", "0.241 0.817", "0.995 0.728", "0.432 0.641", "0.605 0.838",
          "0.999 0.371", "0.283 0.926", "0.504 0.065", "0.982 0.150", "0.673 0.783"}},
    {13, {"0.561 0.048", "0.828 0.879", "0.081 0.271", "0.244 0.897", "0.863 0.387", "0.543 0.096",
          "0.032 0.222", "0.686 0.991", "0.661 0.484", "0.246 0.295", "0.047 0.608", "0.381 0.031",
          "0.773 0.593"}},
    {15, {"0.795 0.361", "0.743 0.529", "0.352 0.303", "0.192 0.074", "0.472 0.679", "0.399 0.021",
          "0.777 0.101", "0.990 0.425", "0.869 0.470", "0.782 0.662", "0.614 0.460", "0.109 0.430",
          "0.000 0.035", "0.427 0.148", "0.395 0.843"}},
}};

}  // namespace detail

inline constexpr std::array<int, 6> kBuiltinSizes{5, 7, 9, 11, 13, 15};

inline TspInstance builtin_instance(int n_cities) {
    for (const auto& table : detail::kBuiltinTables) {
        if (table.n_cities != n_cities) continue;
        std::vector<City> coords;
        for (int i = 0; i < n_cities; ++i) {
            const std::string_view entry = table.coords[static_cast<std::size_t>(i)];
            const std::size_t space = entry.find(' ');
            coords.push_back({parse_double(entry.substr(0, space)), parse_double(entry.substr(space + 1))});
        }
        return TspInstance(std::move(coords));
    }
    throw ValidationError("no builtin instance with " + std::to_string(n_cities) +
                          " cities (available: 5, 7, 9, 11, 13, 15)");
}

/// Uniform i.i.d. coordinates in [0,1)^2, deterministic in `seed`.
inline TspInstance random_instance(int n_cities, std::uint64_t seed) {
    if (n_cities < 3) {
        throw ValidationError("instance needs at least 3 cities, got " + std::to_string(n_cities));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<City> coords(static_cast<std::size_t>(n_cities));
    for (auto& c : coords) {
        c.alpha = unit(rng);
        c.beta = unit(rng);
    }
    return TspInstance(std::move(coords));
}

// ---------------------------------------------------------------------------
// Exact solvers

inline constexpr int kHeldKarpMaxCities = 20;
inline constexpr int kBruteForceMaxCities = 10;

/// Dynamic program over (visited subset, last city); city 0 is excluded from
/// the subsets and closes the tour. The returned route is oriented so that its
/// first city is smaller than its last.
inline TourResult held_karp(const TspInstance& inst) {
    const int n = inst.n_cities();
    if (n > kHeldKarpMaxCities) {
        throw ResourceError("Held-Karp supports at most " + std::to_string(kHeldKarpMaxCities) +
                            " cities, got " + std::to_string(n));
    }
    const int m = n - 1;  // cities 1..n-1 map to bits 0..m-1
    const std::size_t subsets = std::size_t{1} << m;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(subsets * static_cast<std::size_t>(m), kInf);
    std::vector<std::uint8_t> parent(subsets * static_cast<std::size_t>(m), 0xFF);
    auto at = [m](std::size_t mask, int last) { return mask * static_cast<std::size_t>(m) + static_cast<std::size_t>(last); };

    for (int c = 0; c < m; ++c) cost[at(std::size_t{1} << c, c)] = inst.distance(0, c + 1);

    for (std::size_t mask = 1; mask < subsets; ++mask) {
        for (int last = 0; last < m; ++last) {
            if (!(mask >> last & 1U)) continue;
            const double here = cost[at(mask, last)];
            if (here == kInf) continue;
            for (int next = 0; next < m; ++next) {
                if (mask >> next & 1U) continue;
                const std::size_t grown = mask | (std::size_t{1} << next);
                const double candidate = here + inst.distance(last + 1, next + 1);
                if (candidate < cost[at(grown, next)]) {
                    cost[at(grown, next)] = candidate;
                    parent[at(grown, next)] = static_cast<std::uint8_t>(last);
                }
            }
        }
    }

    const std::size_t full = subsets - 1;
    int best_last = 0;
    double best = kInf;
    for (int last = 0; last < m; ++last) {
        const double closed = cost[at(full, last)] + inst.distance(last + 1, 0);
        if (closed < best) {
            best = closed;
            best_last = last;
        }
    }

    std::vector<int> cities(static_cast<std::size_t>(m));
    std::size_t mask = full;
    int last = best_last;
    for (int j = m - 1; j >= 0; --j) {
        cities[static_cast<std::size_t>(j)] = last + 1;
        const int prev = parent[at(mask, last)];
        mask &= ~(std::size_t{1} << last);
        last = prev;
    }
    Route route(std::move(cities));
    if (route[0] > route[route.size() - 1]) route = route.reversed();
    return {route, route_distance(inst, route)};
}

/// Exhaustive search in lexicographic order. Candidates within a relative
/// 1e-12 of the incumbent count as ties, so the lexicographically smallest
/// optimal route is returned.
inline TourResult brute_force(const TspInstance& inst) {
    const int n = inst.n_cities();
    if (n > kBruteForceMaxCities) {
        throw ResourceError("brute force supports at most " + std::to_string(kBruteForceMaxCities) +
                            " cities, got " + std::to_string(n));
    }
    Route candidate = Route::identity(n);
    std::vector<int> cities = candidate.cities();
    std::vector<int> best_cities = cities;
    double best = std::numeric_limits<double>::infinity();
    do {
        const double total = route_distance(inst, Route(cities));
        if (!std::isfinite(best) || total < best - 1e-12 * best) {
            best = total;
            best_cities = cities;
        }
    } while (std::next_permutation(cities.begin(), cities.end()));
    Route route(std::move(best_cities));
    return {route, route_distance(inst, route)};
}

// ---------------------------------------------------------------------------
// Instance file: line 1 = N, then N lines "index alpha beta".

inline void write_instance(std::ostream& out, const TspInstance& inst) {
    out << inst.n_cities() << '\n';
    for (int i = 0; i < inst.n_cities(); ++i) {
        out << i << ' ' << format_double(inst.city(i).alpha) << ' ' << format_double(inst.city(i).beta) << '\n';
    }
}

inline TspInstance read_instance(std::istream& in) {
    std::string line;
    auto next_line = [&](const char* what) {
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) return;
        }
        throw ValidationError(std::string("instance file truncated: missing ") + what);
    };
    auto tokens = [](const std::string& text) {
        std::vector<std::string> out;
        std::istringstream stream(text);
        for (std::string tok; stream >> tok;) out.push_back(tok);
        return out;
    };

    next_line("city count");
    const auto header = tokens(line);
    if (header.size() != 1) throw ValidationError("instance header must be a single integer");
    const double n_value = parse_double(header[0]);
    const int n = static_cast<int>(n_value);
    if (n_value != n || n < 3) throw ValidationError("invalid city count '" + header[0] + "'");

    std::vector<City> coords(static_cast<std::size_t>(n));
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int row = 0; row < n; ++row) {
        next_line("city row");
        const auto fields = tokens(line);
        if (fields.size() != 3) throw ValidationError("instance row must be 'index alpha beta': " + line);
        const double idx_value = parse_double(fields[0]);
        const int idx = static_cast<int>(idx_value);
        if (idx_value != idx || idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)]) {
            throw ValidationError("bad or repeated city index in row: " + line);
        }
        seen[static_cast<std::size_t>(idx)] = true;
        coords[static_cast<std::size_t>(idx)] = {parse_double(fields[1]), parse_double(fields[2])};
    }
    return TspInstance(std::move(coords));
}

}  // namespace fmatsp
