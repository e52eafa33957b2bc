#pragma once

// JSON forms of experiment configs, run manifests and FM checkpoints.

#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "fmatsp/error.hpp"
#include "fmatsp/fm.hpp"
#include "fmatsp/fma.hpp"
#include "fmatsp/perm_codec.hpp"

namespace fmatsp {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Experiment config: a flat object whose keys mirror ExperimentConfig.

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["n_cities"] = cfg.n_cities;
    j["scheme"] = std::string(to_string(cfg.scheme));
    j["n_initial"] = cfg.n_initial;
    j["n_steps"] = cfg.n_steps;
    j["seed"] = cfg.seed;
    j["warm_start"] = cfg.warm_start;
    j["fm_k"] = cfg.fm.k;
    j["fm_learning_rate"] = cfg.fm.learning_rate;
    j["fm_epochs"] = cfg.fm.epochs;
    j["fm_init_scale"] = cfg.fm.init_scale;
    j["fm_batch_size"] = cfg.fm.batch_size;
    j["fm_center_targets"] = cfg.fm.center_targets;
    j["anneal_t_initial"] = cfg.schedule.t_initial ? nlohmann::json(*cfg.schedule.t_initial) : nlohmann::json(nullptr);
    j["anneal_t_final"] = cfg.schedule.t_final ? nlohmann::json(*cfg.schedule.t_final) : nlohmann::json(nullptr);
    j["anneal_sweeps"] = cfg.schedule.sweeps;
    j["anneal_restarts"] = cfg.schedule.restarts;
    return j;
}

namespace detail {

template <typename T>
T field(const nlohmann::json& j, const char* key) {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        const auto& value = j.at(key);
        const bool ok = std::is_unsigned_v<T> ? value.is_number_unsigned() : value.is_number_integer();
        if (!ok) {
            throw ValidationError(std::string("config field '") + key + "': expected " +
                                  (std::is_unsigned_v<T> ? "a nonnegative integer" : "an integer"));
        }
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config field '") + key + "': " + e.what());
    }
}

inline std::optional<double> optional_field(const nlohmann::json& j, const char* key) {
    if (j.at(key).is_null()) return std::nullopt;
    return field<double>(j, key);
}

}  // namespace detail

/// Reads the keys present in `j` over `base`. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    static const std::set<std::string> known{
        "n_cities",      "scheme",           "n_initial",     "n_steps",           "seed",
        "warm_start",    "fm_k",             "fm_learning_rate", "fm_epochs",      "fm_init_scale",
        "fm_batch_size", "fm_center_targets", "anneal_t_initial", "anneal_t_final", "anneal_sweeps",
        "anneal_restarts"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ValidationError("config field '" + key + "': unknown field");
    }
    using detail::field;
    if (j.contains("n_cities")) base.n_cities = field<int>(j, "n_cities");
    if (j.contains("scheme")) {
        try {
            base.scheme = parse_labeling_kind(field<std::string>(j, "scheme"));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("config field 'scheme': ") + e.what());
        }
    }
    if (j.contains("n_initial")) base.n_initial = field<int>(j, "n_initial");
    if (j.contains("n_steps")) base.n_steps = field<int>(j, "n_steps");
    if (j.contains("seed")) base.seed = field<std::uint64_t>(j, "seed");
    if (j.contains("warm_start")) base.warm_start = field<bool>(j, "warm_start");
    if (j.contains("fm_k")) base.fm.k = field<std::size_t>(j, "fm_k");
    if (j.contains("fm_learning_rate")) base.fm.learning_rate = field<double>(j, "fm_learning_rate");
    if (j.contains("fm_epochs")) base.fm.epochs = field<int>(j, "fm_epochs");
    if (j.contains("fm_init_scale")) base.fm.init_scale = field<double>(j, "fm_init_scale");
    if (j.contains("fm_batch_size")) base.fm.batch_size = field<std::size_t>(j, "fm_batch_size");
    if (j.contains("fm_center_targets")) base.fm.center_targets = field<bool>(j, "fm_center_targets");
    if (j.contains("anneal_t_initial")) base.schedule.t_initial = detail::optional_field(j, "anneal_t_initial");
    if (j.contains("anneal_t_final")) base.schedule.t_final = detail::optional_field(j, "anneal_t_final");
    if (j.contains("anneal_sweeps")) base.schedule.sweeps = field<int>(j, "anneal_sweeps");
    if (j.contains("anneal_restarts")) base.schedule.restarts = field<int>(j, "anneal_restarts");
    return base;
}

// ---------------------------------------------------------------------------
// FM checkpoint: {"n", "k", "w0", "w": [n], "V": [n*k row-major]}

inline nlohmann::json model_to_json(const FmModel& model) {
    return {{"n", model.n}, {"k", model.k}, {"w0", model.w0}, {"w", model.w}, {"V", model.v}};
}

inline FmModel model_from_json(const nlohmann::json& j) {
    FmModel model;
    try {
        model.n = j.at("n").get<std::size_t>();
        model.k = j.at("k").get<std::size_t>();
        model.w0 = j.at("w0").get<double>();
        model.w = j.at("w").get<std::vector<double>>();
        model.v = j.at("V").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed FM checkpoint: ") + e.what());
    }
    if (model.w.size() != model.n || model.v.size() != model.n * model.k) {
        throw ValidationError("FM checkpoint dimensions do not match n and k");
    }
    if (!model.finite()) throw ValidationError("FM checkpoint contains non-finite parameters");
    return model;
}

}  // namespace fmatsp
