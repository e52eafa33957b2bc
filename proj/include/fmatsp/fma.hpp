#pragma once

// Factorization machines with annealing over TSP tours. Each step trains an
// FM on every evaluated (bits, distance) pair, anneals its QUBO form to propose
// one bit string, decodes that string into a route, evaluates the route and
// appends the pair to the training data.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "fmatsp/bit_string.hpp"
#include "fmatsp/error.hpp"
#include "fmatsp/fm.hpp"
#include "fmatsp/format.hpp"
#include "fmatsp/perm_codec.hpp"
#include "fmatsp/qubo.hpp"
#include "fmatsp/tsp.hpp"

namespace fmatsp {

struct ExperimentConfig {
    int n_cities = 5;
    LabelingKind scheme = LabelingKind::Gray;
    int n_initial = 15;
    int n_steps = 45;
    FmHyperParams fm;
    AnnealSchedule schedule;
    std::uint64_t seed = 0;
    /// Continue SGD from the previous step's model instead of a fresh one.
    bool warm_start = false;

    LabelingScheme labeling() const { return {scheme, n_cities}; }

    void validate() const {
        check_city_count(n_cities);
        if (n_initial < 1) throw ValidationError("n_initial must be at least 1");
        if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
        if (fm.k < 1) throw ValidationError("fm.k must be at least 1");
        if (fm.epochs < 0) throw ValidationError("fm.epochs must be nonnegative");
        if (!(fm.learning_rate > 0.0)) throw ValidationError("fm.learning_rate must be positive");
        if (fm.batch_size < 1) throw ValidationError("fm.batch_size must be at least 1");
        if (schedule.sweeps < 1) throw ValidationError("anneal.sweeps must be at least 1");
        if (schedule.restarts < 1) throw ValidationError("anneal.restarts must be at least 1");
        if (schedule.t_initial && !(*schedule.t_initial > 0.0)) throw ValidationError("anneal.t_initial must be positive");
        if (schedule.t_final && !(*schedule.t_final > 0.0)) throw ValidationError("anneal.t_final must be positive");
        if (schedule.t_initial && schedule.t_final && *schedule.t_initial < *schedule.t_final) {
            throw ValidationError("anneal.t_initial must be >= anneal.t_final");
        }
    }
};

struct StepRecord {
    int step = 0;
    BitString bits;
    Route route;
    double distance = 0.0;
    double d_min = 0.0;
};

struct ExperimentTrace {
    std::vector<StepRecord> steps;
    double initial_d_min = 0.0;  // best over the random initial samples
    TourResult best;
    std::optional<double> d_opt;
    std::optional<FmModel> model;  // surrogate trained at the last step
};

/// Training data plus the running best; advanced by `fma_step`.
struct FmaState {
    TrainingSet data;
    int step = 0;
    TourResult best{{}, std::numeric_limits<double>::infinity()};
    std::optional<FmModel> model;
};

namespace detail {

// Independent streams for the initial samples and for each step's FM and annealer.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1));
}

inline void note_best(FmaState& state, const Route& route, double distance) {
    if (distance < state.best.distance) state.best = {route, distance};
}

}  // namespace detail

/// N_i uniformly random bit strings (duplicates allowed), each paired with the
/// length of its decoded route.
inline TrainingSet init_training(const ExperimentConfig& cfg, const TspInstance& inst) {
    cfg.validate();
    if (inst.n_cities() != cfg.n_cities) throw ValidationError("instance and config disagree on city count");
    const LabelingScheme scheme = cfg.labeling();
    const std::size_t length = scheme.bit_length();
    std::mt19937_64 rng(detail::stream_seed(cfg.seed, 0));
    TrainingSet data(length);
    for (int s = 0; s < cfg.n_initial; ++s) {
        BitString b(length);
        for (std::size_t pos = 0; pos < length; ++pos) b.set(pos, (rng() >> 63) != 0);
        const double d = route_distance(inst, scheme.decode(b));
        data.add(std::move(b), d);
    }
    return data;
}

inline FmaState initial_state(const ExperimentConfig& cfg, const TspInstance& inst) {
    FmaState state;
    state.data = init_training(cfg, inst);
    const LabelingScheme scheme = cfg.labeling();
    for (const auto& sample : state.data) detail::note_best(state, scheme.decode(sample.x), sample.y);
    return state;
}

/// Training, sampling, conversion and evaluation for one iteration. The
/// proposed bit string itself (not a re-encoding of its route) joins the data.
inline StepRecord fma_step(FmaState& state, const ExperimentConfig& cfg, const TspInstance& inst) {
    if (state.data.empty()) throw ValidationError("FMA step needs a nonempty training set");
    const LabelingScheme scheme = cfg.labeling();
    const int step = state.step + 1;

    FmHyperParams hyper = cfg.fm;
    hyper.seed = detail::stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(step) - 1);
    const std::optional<FmModel> warm = cfg.warm_start ? state.model : std::nullopt;
    FmModel model = fm_train(state.data, hyper, warm);

    AnnealSchedule sched = cfg.schedule;
    sched.seed = detail::stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(step));
    const AnnealResult proposal = anneal(fm_to_qubo(model), sched);

    const Route route = scheme.decode(proposal.state);
    const double distance = route_distance(inst, route);

    state.data.add(proposal.state, distance);
    state.model = std::move(model);
    state.step = step;
    detail::note_best(state, route, distance);
    return {step, proposal.state, route, distance, state.best.distance};
}

inline ExperimentTrace run_fma(const ExperimentConfig& cfg, const TspInstance& inst) {
    cfg.validate();
    ExperimentTrace trace;
    if (inst.n_cities() <= kHeldKarpMaxCities) trace.d_opt = held_karp(inst).distance;

    FmaState state = initial_state(cfg, inst);
    trace.initial_d_min = state.best.distance;
    trace.steps.reserve(static_cast<std::size_t>(cfg.n_steps));
    for (int s = 0; s < cfg.n_steps; ++s) trace.steps.push_back(fma_step(state, cfg, inst));
    trace.best = state.best;
    trace.model = std::move(state.model);
    return trace;
}

/// Runs on the fixed instance with `cfg.n_cities` cities.
inline ExperimentTrace run_fma(const ExperimentConfig& cfg) {
    return run_fma(cfg, builtin_instance(cfg.n_cities));
}

inline double final_ratio(const ExperimentTrace& trace) {
    if (!trace.d_opt) throw ValidationError("trace has no optimal distance");
    return trace.best.distance / *trace.d_opt;
}

// ---------------------------------------------------------------------------
// CSV: step,bits,route,distance,d_min,ratio

inline constexpr const char* kTraceCsvHeader = "step,bits,route,distance,d_min,ratio";

inline void write_trace_csv(std::ostream& out, const ExperimentTrace& trace) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : trace.steps) {
        out << r.step << ',' << r.bits.to_string() << ',' << r.route.to_string() << ',' << format_double(r.distance)
            << ',' << format_double(r.d_min) << ',';
        if (trace.d_opt) out << format_double(r.d_min / *trace.d_opt);
        out << '\n';
    }
}

/// Closed tour as an ordered coordinate list (origin first and last).
inline void write_route_coordinates(std::ostream& out, const TspInstance& inst, const Route& route) {
    out << "order,city,alpha,beta\n";
    int order = 0;
    auto row = [&](int city) {
        out << order++ << ',' << city << ',' << format_double(inst.city(city).alpha) << ','
            << format_double(inst.city(city).beta) << '\n';
    };
    row(0);
    for (int city : route.cities()) row(city);
    row(0);
}

}  // namespace fmatsp
