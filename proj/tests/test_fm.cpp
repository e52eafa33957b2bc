#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "fmatsp/fm.hpp"

using namespace fmatsp;

namespace {

// Direct double-loop evaluation of the model equation.
double naive_predict(const FmModel& m, const BitString& x) {
    double y = m.w0;
    for (std::size_t i = 0; i < m.n; ++i) y += m.w[i] * x[i];
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = i + 1; j < m.n; ++j) {
            double dot = 0.0;
            for (std::size_t f = 0; f < m.k; ++f) dot += m.latent(i, f) * m.latent(j, f);
            y += dot * x[i] * x[j];
        }
    }
    return y;
}

FmModel random_model(std::size_t n, std::size_t k, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    FmModel m(n, k);
    m.w0 = gauss(rng);
    for (double& w : m.w) w = gauss(rng);
    for (double& v : m.v) v = gauss(rng);
    return m;
}

BitString random_bits(std::size_t n, std::mt19937_64& rng) {
    BitString b(n);
    for (std::size_t pos = 0; pos < n; ++pos) b.set(pos, rng() & 1U);
    return b;
}

// Visits every scalar parameter of a model.
template <typename Fn>
void for_each_parameter(FmModel& m, Fn&& fn) {
    fn(m.w0);
    for (double& w : m.w) fn(w);
    for (double& v : m.v) fn(v);
}

}  // namespace

TEST_CASE("prediction basics") {
    std::mt19937_64 rng(1);
    FmModel m = random_model(6, 3, rng);
    CHECK(fm_predict(m, BitString(6)) == m.w0);

    FmModel linear = m;
    std::fill(linear.v.begin(), linear.v.end(), 0.0);
    for (std::size_t i = 0; i < 6; ++i) {
        BitString e(6);
        e.set(i, true);
        CHECK(fm_predict(linear, e) == Catch::Approx(linear.w0 + linear.w[i]).margin(1e-15));
    }
    CHECK_THROWS_AS(fm_predict(m, BitString(5)), ValidationError);
}

TEST_CASE("hand-set three-feature model") {
    FmModel m(3, 2);
    m.w0 = 0.5;
    m.w = {1.0, -2.0, 0.25};
    m.v = {1.0, 2.0,   // v_1
           -1.0, 0.5,  // v_2
           3.0, -1.0}; // v_3
    // <v1,v2> = 0, <v1,v3> = 1, <v2,v3> = -3.5
    const BitString all = BitString::from_string("111");
    CHECK(naive_predict(m, all) == Catch::Approx(0.5 + 1.0 - 2.0 + 0.25 + 0.0 + 1.0 - 3.5));
    CHECK(fm_predict(m, all) == Catch::Approx(naive_predict(m, all)).margin(1e-12));
}

TEST_CASE("factorized sum equals the double loop") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        const std::size_t k = 1 + rng() % 8;
        const FmModel m = random_model(n, k, rng);
        for (int s = 0; s < 5; ++s) {
            const BitString x = random_bits(n, rng);
            REQUIRE(std::abs(fm_predict(m, x) - naive_predict(m, x)) <= 1e-10);
        }
    }
}

TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 rng(3);
    const double h = 1e-3;  // loss is quadratic in each single parameter, so no truncation error
    for (int point = 0; point < 10; ++point) {
        const std::size_t n = 4 + rng() % 8;
        const std::size_t k = 1 + rng() % 4;
        FmModel m = random_model(n, k, rng, 0.5);
        const BitString x = random_bits(n, rng);
        const double y = std::normal_distribution<double>(0.0, 1.0)(rng);

        FmModel grad = fm_gradient(m, x, y);
        std::vector<double> analytic;
        for_each_parameter(grad, [&](double& g) { analytic.push_back(g); });

        std::size_t idx = 0;
        for_each_parameter(m, [&](double& p) {
            const double saved = p;
            p = saved + h;
            const double up = std::pow(fm_predict(m, x) - y, 2);
            p = saved - h;
            const double down = std::pow(fm_predict(m, x) - y, 2);
            p = saved;
            const double numeric = (up - down) / (2 * h);
            const double a = analytic[idx++];
            const double scale = std::max({std::abs(a), std::abs(numeric), 1e-6});
            REQUIRE(std::abs(a - numeric) / scale <= 1e-5);
        });
    }
}

TEST_CASE("training validates its input") {
    CHECK_THROWS_AS(fm_train(TrainingSet{}, FmHyperParams{}), ValidationError);
    TrainingSet data;
    data.add(BitString::from_string("01"), 1.0);
    FmHyperParams bad;
    bad.k = 0;
    CHECK_THROWS_AS(fm_train(data, bad), ValidationError);
    CHECK_THROWS_AS(data.add(BitString::from_string("011"), 1.0), ValidationError);
    CHECK_THROWS_AS(data.add(BitString::from_string("01"), NAN), ValidationError);
}

TEST_CASE("divergent training reports the epoch") {
    TrainingSet data;
    std::mt19937_64 rng(4);
    for (int s = 0; s < 20; ++s) data.add(random_bits(8, rng), 1e3 * static_cast<double>(rng() % 7));
    FmHyperParams hyper;
    hyper.learning_rate = 10.0;
    hyper.init_scale = 1.0;
    CHECK_THROWS_AS(fm_train(data, hyper), TrainingError);
}

TEST_CASE("constant target is learned") {
    TrainingSet data;
    std::mt19937_64 rng(5);
    for (int s = 0; s < 30; ++s) data.add(random_bits(6, rng), 2.5);
    for (bool center : {true, false}) {
        FmHyperParams hyper;
        hyper.center_targets = center;
        hyper.epochs = 400;
        const FmModel m = fm_train(data, hyper);
        CHECK(fm_mse(m, data) < 1e-4);
    }
}

TEST_CASE("planted model is recovered") {
    std::mt19937_64 rng(6);
    const FmModel planted = random_model(10, 2, rng, 0.5);
    TrainingSet train(10);
    TrainingSet test(10);
    for (int s = 0; s < 500; ++s) {
        BitString x = random_bits(10, rng);
        train.add(x, fm_predict(planted, x));
    }
    double mean = 0.0;
    std::vector<double> ys;
    for (int s = 0; s < 500; ++s) {
        BitString x = random_bits(10, rng);
        ys.push_back(fm_predict(planted, x));
        mean += ys.back();
        test.add(std::move(x), ys.back());
    }
    mean /= static_cast<double>(ys.size());
    double variance = 0.0;
    for (double y : ys) variance += (y - mean) * (y - mean);
    variance /= static_cast<double>(ys.size());

    FmHyperParams hyper;
    hyper.k = 4;
    hyper.learning_rate = 0.005;
    hyper.init_scale = 0.1;
    hyper.seed = 17;
    const FmModel m = fm_train(train, hyper);
    CHECK(fm_mse(m, test) * 10.0 < variance);
}

TEST_CASE("training is deterministic and never worse than its start") {
    std::mt19937_64 rng(7);
    TrainingSet data;
    for (int s = 0; s < 40; ++s) {
        BitString x = random_bits(9, rng);
        data.add(x, static_cast<double>(x.popcount()) + 0.3 * static_cast<double>(x[0] * x[4]));
    }
    FmHyperParams hyper;
    hyper.seed = 99;
    hyper.epochs = 50;
    CHECK(fm_train(data, hyper) == fm_train(data, hyper));

    double initial_total = 0.0;
    double final_total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        hyper.seed = seed;
        const double initial = fm_mse(fm_initial_model(9, hyper), data);
        const double trained = fm_mse(fm_train(data, hyper), data);
        CHECK(trained <= initial);
        initial_total += initial;
        final_total += trained;
    }
    CHECK(final_total < initial_total);
}

TEST_CASE("minibatches and warm starts") {
    std::mt19937_64 rng(8);
    TrainingSet data;
    for (int s = 0; s < 64; ++s) {
        BitString x = random_bits(7, rng);
        data.add(x, 1.0 + static_cast<double>(x[1]) - 0.5 * static_cast<double>(x[2] * x[3]));
    }
    FmHyperParams hyper;
    hyper.batch_size = 8;
    hyper.learning_rate = 0.05;
    hyper.epochs = 500;
    const FmModel first = fm_train(data, hyper);
    CHECK(fm_mse(first, data) < 0.05);
    const FmModel second = fm_train(data, hyper, first);
    CHECK(fm_mse(second, data) <= fm_mse(first, data) + 1e-12);

    FmHyperParams other = hyper;
    other.k = 3;
    CHECK_THROWS_AS(fm_train(data, other, first), ValidationError);
}
