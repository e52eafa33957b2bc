#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fmatsp/bit_string.hpp"
#include "fmatsp/error.hpp"
#include "fmatsp/fm.hpp"

namespace fmatsp {

/// E(b) = offset + sum_{i<=j} Q_ij b_i b_j, upper-triangular storage.
class QuboMatrix {
public:
    QuboMatrix() = default;
    explicit QuboMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }

    /// Q_ij for i <= j; arguments are reordered if given as i > j.
    double at(std::size_t i, std::size_t j) const { return i <= j ? entries_[i * n_ + j] : entries_[j * n_ + i]; }
    void set(std::size_t i, std::size_t j, double value) {
        if (i > j) std::swap(i, j);
        entries_[i * n_ + j] = value;
    }

    double offset = 0.0;

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
};

/// Q_ii = w_i, Q_ij = <v_i, v_j> (i < j), offset = w0.
inline QuboMatrix fm_to_qubo(const FmModel& model) {
    QuboMatrix q(model.n);
    q.offset = model.w0;
    for (std::size_t i = 0; i < model.n; ++i) {
        q.set(i, i, model.w[i]);
        for (std::size_t j = i + 1; j < model.n; ++j) {
            double dot = 0.0;
            for (std::size_t f = 0; f < model.k; ++f) dot += model.latent(i, f) * model.latent(j, f);
            q.set(i, j, dot);
        }
    }
    return q;
}

inline double qubo_energy(const QuboMatrix& q, const BitString& b) {
    if (b.size() != q.size()) {
        throw ValidationError("state has " + std::to_string(b.size()) + " bits, QUBO has " +
                              std::to_string(q.size()) + " variables");
    }
    double energy = q.offset;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!b[i]) continue;
        for (std::size_t j = i; j < q.size(); ++j) {
            if (b[j]) energy += q.at(i, j);
        }
    }
    return energy;
}

// ---------------------------------------------------------------------------
// Simulated annealing

/// Geometric Metropolis schedule. Unset temperatures are derived from the
/// QUBO: 10x and 0.01x the median nonzero |Q_ij| (1.0 and 0.001 if Q = 0).
struct AnnealSchedule {
    std::optional<double> t_initial;
    std::optional<double> t_final;
    int sweeps = 1000;
    int restarts = 10;
    std::uint64_t seed = 0;
};

struct AnnealResult {
    BitString state;
    double energy = 0.0;
    int restart = 0;  // which restart produced `state`
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline double median_abs_coupling(const QuboMatrix& q) {
    std::vector<double> mags;
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = i; j < q.size(); ++j) {
            const double m = std::abs(q.at(i, j));
            if (m > 0.0) mags.push_back(m);
        }
    }
    if (mags.empty()) return 0.0;
    const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    if (mags.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(mags.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace detail

/// Resolved (t_initial, t_final) for a given QUBO.
inline std::pair<double, double> resolve_temperatures(const QuboMatrix& q, const AnnealSchedule& sched) {
    const double median = detail::median_abs_coupling(q);
    const double t0 = sched.t_initial.value_or(median > 0.0 ? 10.0 * median : 1.0);
    const double t1 = sched.t_final.value_or(median > 0.0 ? 0.01 * median : 0.001);
    if (!(t1 > 0.0) || !(t0 >= t1) || !std::isfinite(t0)) {
        throw ValidationError("anneal schedule needs t_initial >= t_final > 0");
    }
    return {t0, t1};
}

/// Per-restart seed derived from the schedule seed.
inline std::uint64_t restart_seed(std::uint64_t seed, int restart) {
    return detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(restart)));
}

/// A QUBO state with cached local fields, so a single-bit flip and its energy
/// delta cost O(n).
class IncrementalQubo {
public:
    explicit IncrementalQubo(const QuboMatrix& q)
        : n_(q.size()), offset_(q.offset), coupling_(n_ * n_, 0.0), diag_(n_), state_(n_, 0), field_(n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) {
            diag_[i] = q.at(i, i);
            for (std::size_t j = i + 1; j < n_; ++j) {
                coupling_[i * n_ + j] = q.at(i, j);
                coupling_[j * n_ + i] = q.at(i, j);
            }
        }
        energy_ = offset_;
    }

    void reset(std::span<const std::uint8_t> bits) {
        std::copy(bits.begin(), bits.end(), state_.begin());
        energy_ = offset_;
        for (std::size_t i = 0; i < n_; ++i) {
            double h = 0.0;
            for (std::size_t j = 0; j < n_; ++j) h += state_[j] ? coupling_[i * n_ + j] : 0.0;
            field_[i] = h;
            if (state_[i]) energy_ += diag_[i] + 0.5 * h;
        }
    }

    /// Energy change if variable i were flipped.
    double delta(std::size_t i) const {
        const double local = diag_[i] + field_[i];
        return state_[i] ? -local : local;
    }

    void flip(std::size_t i) {
        energy_ += delta(i);
        state_[i] ^= 1U;
        const double sign = state_[i] ? 1.0 : -1.0;
        const double* row = coupling_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) field_[j] += sign * row[j];
    }

    std::size_t size() const noexcept { return n_; }
    double energy() const noexcept { return energy_; }
    const std::vector<std::uint8_t>& state() const noexcept { return state_; }

    BitString to_bits() const {
        BitString out(n_);
        for (std::size_t i = 0; i < n_; ++i) out.set(i, state_[i]);
        return out;
    }

private:
    std::size_t n_;
    double offset_;
    std::vector<double> coupling_;  // symmetric, zero diagonal
    std::vector<double> diag_;
    std::vector<std::uint8_t> state_;
    std::vector<double> field_;
    double energy_ = 0.0;
};

/// Single-bit-flip Metropolis annealing under a geometric temperature decay.
/// Returns the lowest-energy state visited over all restarts; ties go to the
/// earliest restart.
inline AnnealResult anneal(const QuboMatrix& q, const AnnealSchedule& sched) {
    const std::size_t n = q.size();
    if (n < 1) throw ValidationError("cannot anneal an empty QUBO");
    if (sched.sweeps < 1 || sched.restarts < 1) throw ValidationError("sweeps and restarts must be at least 1");
    const auto [t_initial, t_final] = resolve_temperatures(q, sched);

    std::vector<double> temperatures(static_cast<std::size_t>(sched.sweeps));
    for (int s = 0; s < sched.sweeps; ++s) {
        const double frac = sched.sweeps > 1 ? static_cast<double>(s) / (sched.sweeps - 1) : 0.0;
        temperatures[static_cast<std::size_t>(s)] = t_initial * std::pow(t_final / t_initial, frac);
    }

    AnnealResult best;
    best.energy = std::numeric_limits<double>::infinity();
    IncrementalQubo walker(q);
    std::vector<std::uint8_t> start(n);

    for (int r = 0; r < sched.restarts; ++r) {
        std::mt19937_64 rng(restart_seed(sched.seed, r));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto& bit : start) bit = static_cast<std::uint8_t>(rng() >> 63);
        walker.reset(start);

        double restart_best = walker.energy();
        std::vector<std::uint8_t> restart_state = walker.state();
        for (double temperature : temperatures) {
            for (std::size_t i = 0; i < n; ++i) {
                const double delta = walker.delta(i);
                if (delta > 0.0 && unit(rng) >= std::exp(-delta / temperature)) continue;
                walker.flip(i);
                if (walker.energy() < restart_best) {
                    restart_best = walker.energy();
                    restart_state = walker.state();
                }
            }
        }

        BitString candidate(n);
        for (std::size_t i = 0; i < n; ++i) candidate.set(i, restart_state[i]);
        const double exact = qubo_energy(q, candidate);
        if (exact < best.energy) {
            best.energy = exact;
            best.state = std::move(candidate);
            best.restart = r;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

inline constexpr std::size_t kExhaustiveMaxVariables = 24;

/// Global minimum over all 2^n states (Gray-order walk with incremental
/// energies). Near-ties within 1e-12 of the energy scale resolve toward the
/// smallest straight-binary value.
inline AnnealResult exhaustive_qubo_min(const QuboMatrix& q) {
    const std::size_t n = q.size();
    if (n > kExhaustiveMaxVariables) {
        throw ResourceError("exhaustive QUBO search supports at most " + std::to_string(kExhaustiveMaxVariables) +
                            " variables, got " + std::to_string(n));
    }
    double scale = std::abs(q.offset);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) scale += std::abs(q.at(i, j));
    }
    const double tie = 1e-12 * (1.0 + scale);

    // Variable i is text position i, i.e. bit n-1-i of the integer value.
    IncrementalQubo walker(q);
    double best_energy = walker.energy();
    std::uint64_t best_value = 0;
    std::uint64_t value = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
        const auto k = static_cast<std::size_t>(std::countr_zero(step));
        walker.flip(n - 1 - k);
        value ^= std::uint64_t{1} << k;
        const double energy = walker.energy();
        if (energy < best_energy - tie || (energy <= best_energy + tie && value < best_value)) {
            best_energy = energy;
            best_value = value;
        }
    }
    AnnealResult out;
    out.state = BitString::from_value(best_value, n);
    out.energy = qubo_energy(q, out.state);
    return out;
}

}  // namespace fmatsp
