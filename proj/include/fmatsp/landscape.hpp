#pragma once

// Local-solution analysis of a labeling: a bit state is a local solution when
// no single-bit flip of it decodes to a strictly shorter tour. The metric p is
// the fraction of bit states that are local solutions.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fmatsp/bit_string.hpp"
#include "fmatsp/error.hpp"
#include "fmatsp/format.hpp"
#include "fmatsp/perm_codec.hpp"
#include "fmatsp/tsp.hpp"

namespace fmatsp {

inline constexpr std::size_t kExhaustiveMaxBits = 24;
inline constexpr std::uint64_t kDefaultMetricSamples = 100000;

/// Comparison applied against each neighbour. `NonStrict` (d <= d') counts
/// plateaus as local solutions and is the default; `Strict` (d < d') is for
/// sensitivity checks.
enum class TieRule { NonStrict, Strict };

struct MetricMode {
    bool exhaustive = true;
    std::uint64_t samples = kDefaultMetricSamples;
    std::uint64_t seed = 0;

    static MetricMode Exhaustive() { return {}; }
    static MetricMode Sampled(std::uint64_t count, std::uint64_t seed) { return {false, count, seed}; }
};

struct MetricReport {
    LabelingScheme scheme;
    MetricMode mode;
    std::uint64_t n_states_evaluated = 0;
    std::uint64_t n_local = 0;
    double p = 0.0;
};

/// Routes reached by flipping each bit k = 0 .. l-1 (index 0 is the rightmost bit).
inline std::vector<Route> flip_neighbors(const LabelingScheme& scheme, const BitString& b) {
    if (b.size() != scheme.bit_length()) {
        throw ValidationError("state has " + std::to_string(b.size()) + " bits, scheme needs " +
                              std::to_string(scheme.bit_length()));
    }
    std::vector<Route> out;
    out.reserve(b.size());
    for (std::size_t k = 0; k < b.size(); ++k) out.push_back(scheme.decode(b.flipped(k)));
    return out;
}

inline bool local_solution_flag(const TspInstance& inst, const LabelingScheme& scheme, const BitString& b,
                                TieRule rule = TieRule::NonStrict) {
    if (scheme.n_cities != inst.n_cities()) {
        throw ValidationError("scheme and instance disagree on city count");
    }
    if (b.size() != scheme.bit_length()) {
        throw ValidationError("state has " + std::to_string(b.size()) + " bits, scheme needs " +
                              std::to_string(scheme.bit_length()));
    }
    const double here = route_distance(inst, scheme.decode(b));
    for (std::size_t k = 0; k < b.size(); ++k) {
        const double there = route_distance(inst, scheme.decode(b.flipped(k)));
        const bool ok = rule == TieRule::NonStrict ? here <= there : here < there;
        if (!ok) return false;
    }
    return true;
}

inline MetricReport local_solution_metric(const TspInstance& inst, const LabelingScheme& scheme,
                                          const MetricMode& mode, TieRule rule = TieRule::NonStrict) {
    if (scheme.n_cities != inst.n_cities()) {
        throw ValidationError("scheme and instance disagree on city count");
    }
    const std::size_t length = scheme.bit_length();
    auto better_or_equal = [rule](double here, double there) {
        return rule == TieRule::NonStrict ? here <= there : here < there;
    };

    MetricReport report{scheme, mode, 0, 0, 0.0};

    if (mode.exhaustive) {
        if (length > kExhaustiveMaxBits) {
            throw ResourceError("exhaustive scan of 2^" + std::to_string(length) +
                                " states is too large; use sampled mode");
        }
        const std::uint64_t states = std::uint64_t{1} << length;
        // Each state is decoded once; its distance serves as centre and as neighbour.
        std::vector<double> distance(states);
        for (std::uint64_t s = 0; s < states; ++s) {
            distance[s] = route_distance(inst, scheme.decode(BitString::from_value(s, length)));
        }
        std::uint64_t local = 0;
        for (std::uint64_t s = 0; s < states; ++s) {
            bool flag = true;
            for (std::size_t k = 0; k < length && flag; ++k) {
                flag = better_or_equal(distance[s], distance[s ^ (std::uint64_t{1} << k)]);
            }
            local += flag ? 1 : 0;
        }
        report.n_states_evaluated = states;
        report.n_local = local;
    } else {
        if (mode.samples == 0) throw ValidationError("sampled metric needs at least one sample");
        std::mt19937_64 rng(mode.seed);
        auto distance_of = [&](const BitString& b) { return route_distance(inst, scheme.decode(b)); };
        std::uint64_t local = 0;
        BitString b(length);
        for (std::uint64_t sample = 0; sample < mode.samples; ++sample) {
            for (std::size_t pos = 0; pos < length; ++pos) b.set(pos, (rng() >> 63) != 0);
            const double here = distance_of(b);
            bool flag = true;
            for (std::size_t k = 0; k < length && flag; ++k) flag = better_or_equal(here, distance_of(b.flipped(k)));
            local += flag ? 1 : 0;
        }
        report.n_states_evaluated = mode.samples;
        report.n_local = local;
    }
    report.p = static_cast<double>(report.n_local) / static_cast<double>(report.n_states_evaluated);
    return report;
}

inline constexpr const char* kMetricCsvHeader = "N,scheme,mode,states,n_local,p";

inline std::string metric_csv_row(const MetricReport& r) {
    return std::to_string(r.scheme.n_cities) + ',' + std::string(to_string(r.scheme.kind)) + ',' +
           (r.mode.exhaustive ? "exhaustive" : "sampled") + ',' + std::to_string(r.n_states_evaluated) + ',' +
           std::to_string(r.n_local) + ',' + format_double(r.p);
}

}  // namespace fmatsp
