#include <random>

#include "catch_amalgamated.hpp"
#include "fmatsp/io.hpp"

using namespace fmatsp;
using nlohmann::json;

TEST_CASE("config round trip") {
    ExperimentConfig cfg;
    cfg.n_cities = 9;
    cfg.scheme = LabelingKind::Natural;
    cfg.n_initial = 20;
    cfg.n_steps = 60;
    cfg.seed = 123456789012345ULL;
    cfg.warm_start = true;
    cfg.fm.k = 4;
    cfg.fm.learning_rate = 0.003;
    cfg.fm.epochs = 77;
    cfg.fm.batch_size = 5;
    cfg.fm.center_targets = false;
    cfg.schedule.t_initial = 2.5;
    cfg.schedule.sweeps = 321;
    cfg.schedule.restarts = 4;

    const json j = config_to_json(cfg);
    CHECK(j["anneal_t_final"].is_null());
    const ExperimentConfig back = config_from_json(json::parse(j.dump()));
    CHECK(config_to_json(back) == j);
    CHECK(back.schedule.t_initial == 2.5);
    CHECK_FALSE(back.schedule.t_final.has_value());
}

TEST_CASE("partial configs overlay a base") {
    ExperimentConfig base;
    base.n_steps = 300;
    const ExperimentConfig cfg = config_from_json(json::parse(R"({"n_cities": 7, "scheme": "natural"})"), base);
    CHECK(cfg.n_cities == 7);
    CHECK(cfg.scheme == LabelingKind::Natural);
    CHECK(cfg.n_steps == 300);
    CHECK(cfg.fm.k == 8);
}

TEST_CASE("config errors name the field") {
    auto message = [](const char* text) {
        try {
            config_from_json(json::parse(text));
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(R"({"n_citys": 5})").find("'n_citys'") != std::string::npos);
    CHECK(message(R"({"n_cities": "five"})").find("'n_cities'") != std::string::npos);
    CHECK(message(R"({"n_cities": 5.5})").find("'n_cities'") != std::string::npos);
    CHECK(message(R"({"fm_k": -1})").find("'fm_k'") != std::string::npos);
    CHECK(message(R"({"scheme": "binary"})").find("'scheme'") != std::string::npos);
    CHECK(message(R"([1, 2])").find("object") != std::string::npos);
}

TEST_CASE("checkpoint round trip") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FmModel m(7, 3);
    m.w0 = gauss(rng);
    for (double& w : m.w) w = gauss(rng);
    for (double& v : m.v) v = gauss(rng);
    const FmModel back = model_from_json(json::parse(model_to_json(m).dump()));
    CHECK(back == m);
}

TEST_CASE("malformed checkpoints") {
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"n": 2, "k": 1, "w0": 0})")), ValidationError);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"n": 2, "k": 1, "w0": 0, "w": [1], "V": [1, 2]})")),
                    ValidationError);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"n": 1, "k": 1, "w0": 0, "w": ["a"], "V": [1]})")),
                    ValidationError);
}
