#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "common/error.hpp"
#include "common/seed.hpp"
#include "nn/model.hpp"
#include "synth/generator.hpp"
#include "train/dataset.hpp"
#include "train/pipeline.hpp"
#include "train/trainer.hpp"

using namespace nd::train;
using nd::Error;
using nd::nn::MlpModel;
using nd::synth::Recording;
using Catch::Approx;

namespace {

Recording flat_recording(std::size_t n, std::vector<nd::synth::EventAnnotation> events = {}) {
    Recording r;
    r.samples.assign(n, 1.0f);
    r.events = std::move(events);
    return r;
}

WindowedDataset labelled(std::size_t pos, std::size_t neg, std::size_t len = 4) {
    WindowedDataset ds;
    ds.window_len = len;
    for (std::size_t i = 0; i < pos + neg; ++i) {
        for (std::size_t j = 0; j < len; ++j) ds.windows.push_back(static_cast<double>(i));
        ds.labels.push_back(i < pos ? 1 : 0);
        ds.starts.push_back(i * len);
    }
    return ds;
}

WindowedDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t len) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    WindowedDataset ds;
    ds.window_len = len;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < len; ++j) ds.windows.push_back(u(rng));
        ds.labels.push_back(static_cast<std::uint8_t>(i % 2));
        ds.starts.push_back(i * len);
    }
    return ds;
}

void randomize(MlpModel& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto* p : parameter_pointers(m)) *p = u(rng);
}

// Central differences of the mean BCE, evaluated with the logistic output in
// closed form, independent of the backprop code path.
double oracle_loss(const MlpModel& m, const WindowedDataset& ds, std::span<const std::size_t> rows) {
    double sum = 0.0;
    for (auto r : rows) {
        const double p = nd::nn::mlp_forward(m, ds.window(r));
        const double y = ds.labels[r];
        sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return sum / static_cast<double>(rows.size());
}

double max_relative_gradient_error(MlpModel m, const WindowedDataset& ds, std::span<const std::size_t> rows) {
    const auto g = loss_gradient(m, ds, rows);
    auto params = parameter_pointers(m);
    REQUIRE(params.size() == g.gradient.size());
    const double eps = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = *params[i];
        *params[i] = keep + eps;
        const double up = oracle_loss(m, ds, rows);
        *params[i] = keep - eps;
        const double down = oracle_loss(m, ds, rows);
        *params[i] = keep;
        const double fd = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(fd), std::abs(g.gradient[i]), 1e-6});
        worst = std::max(worst, std::abs(fd - g.gradient[i]) / denom);
    }
    return worst;
}

}  // namespace

TEST_CASE("one second at 256 Hz tiles into 12 windows of 20") {
    const auto ds = window_dataset(flat_recording(256), 20, 20);
    CHECK(ds.size() == 12);
    CHECK(ds.windows.size() == 12 * 20);
    CHECK(ds.starts.back() == 220);
    CHECK(ds.window(3)[0] == Approx(1.0 / 50.0));
}

TEST_CASE("window labels follow the half-inside rule") {
    // Event covers samples [30, 50): window [20, 40) has exactly 10 of 20 inside.
    const auto ds = window_dataset(flat_recording(256, {{30.0 / 256, 50.0 / 256, "seizure"}}), 20, 20);
    CHECK(ds.labels[0] == 0);
    CHECK(ds.labels[1] == 1);
    CHECK(ds.labels[2] == 1);  // [40, 60) has 10 inside
    CHECK(ds.labels[3] == 0);
    const auto d2 = window_dataset(flat_recording(256, {{31.0 / 256, 49.0 / 256, "seizure"}}), 20, 20);
    CHECK(d2.labels[1] == 0);  // 9 of 20
    const auto d3 = window_dataset(flat_recording(256, {{0.0, 1.0, "seizure"}}), 20, 20);
    CHECK(d3.positives() == d3.size());
}

TEST_CASE("windowing preconditions") {
    CHECK_THROWS_AS(window_dataset(flat_recording(0), 20, 20), Error);
    CHECK_THROWS_AS(window_dataset(flat_recording(10), 20, 20), Error);
    CHECK_THROWS_AS(window_dataset(flat_recording(100), 0, 20), Error);
    CHECK_THROWS_AS(window_dataset(flat_recording(100), 20, 0), Error);
}

TEST_CASE("rebalance keeps every positive and ratio times as many negatives") {
    const auto ds = labelled(100, 1000);
    const auto r = rebalance(ds, 3.0, 5);
    CHECK(r.positives() == 100);
    CHECK(r.negatives() == 300);
    CHECK(r.starts == rebalance(ds, 3.0, 5).starts);
    CHECK(r.starts != rebalance(ds, 3.0, 6).starts);
    CHECK(std::is_sorted(r.starts.begin(), r.starts.end()));
    CHECK(rebalance(labelled(100, 200), 3.0, 5).negatives() == 200);
    CHECK_THROWS_AS(rebalance(labelled(0, 10), 3.0, 5), Error);
    CHECK_THROWS_AS(rebalance(labelled(10, 0), 3.0, 5), Error);
    CHECK_THROWS_AS(rebalance(ds, 0.5, 5), Error);
}

TEST_CASE("stratified split sizes and proportions") {
    const auto ds = labelled(100, 300);
    const auto s = split_dataset(ds, 0.7, 9);
    CHECK(s.train.size() == 280);
    CHECK(s.validation.size() == 120);
    CHECK(s.train.positives() == 70);
    CHECK(s.validation.positives() == 30);
    CHECK(s.warnings.empty());
    const auto again = split_dataset(ds, 0.7, 9);
    CHECK(again.train.starts == s.train.starts);
    CHECK_THROWS_AS(split_dataset(ds, 1.0, 9), Error);
    CHECK_THROWS_AS(split_dataset(labelled(1, 0), 0.7, 9), Error);
}

TEST_CASE("a singleton class goes wholly to training with a warning") {
    const auto s = split_dataset(labelled(1, 20), 0.7, 1);
    CHECK(s.train.positives() == 1);
    CHECK(s.validation.positives() == 0);
    CHECK(s.warnings.size() == 1);
}

TEST_CASE("rebalance and split are deterministic, disjoint and exhaustive") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pos = std::uniform_int_distribution<std::size_t>(2, 60)(rng);
        const auto neg = std::uniform_int_distribution<std::size_t>(2, 400)(rng);
        const double ratio = std::uniform_real_distribution<double>(1.0, 5.0)(rng);
        const double frac = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        const auto ds = labelled(pos, neg);
        const auto r = rebalance(ds, ratio, trial);
        REQUIRE(r.positives() == pos);
        const auto s = split_dataset(r, frac, trial);
        std::set<std::size_t> tr(s.train.starts.begin(), s.train.starts.end());
        std::set<std::size_t> va(s.validation.starts.begin(), s.validation.starts.end());
        for (auto v : va) REQUIRE(tr.count(v) == 0);
        REQUIRE(tr.size() + va.size() == r.size());
        const double global = static_cast<double>(r.positives()) / static_cast<double>(r.size());
        if (s.validation.size() > 0)
            REQUIRE(std::abs(static_cast<double>(s.validation.positives()) - global * s.validation.size()) <= 1.0 + 1e-9);
        REQUIRE(std::abs(static_cast<double>(s.train.positives()) - global * s.train.size()) <= 1.0 + 1e-9);
        REQUIRE(split_dataset(r, frac, trial).validation.starts == s.validation.starts);
    }
}

TEST_CASE("windows of a split never share recording samples") {
    nd::synth::SynthConfig c;
    c.duration_s = 300;
    c.n_events = 4;
    const auto rec = nd::synth::generate_recording(c);
    const auto ds = rebalance(window_dataset(rec, 20, 20), 3.0, 1);
    const auto s = split_dataset(ds, 0.7, 2);
    std::vector<int> owner(rec.samples.size(), 0);
    for (auto st : s.train.starts)
        for (std::size_t j = 0; j < 20; ++j) owner[st + j] |= 1;
    for (auto st : s.validation.starts)
        for (std::size_t j = 0; j < 20; ++j) owner[st + j] |= 2;
    CHECK(std::count(owner.begin(), owner.end(), 3) == 0);
}

TEST_CASE("backprop matches central differences for the MLP") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t hidden[] = {8};
        auto m = nd::nn::make_mlp(20, hidden);
        randomize(m, rng);
        const auto ds = random_dataset(rng, 16, 20);
        std::vector<std::size_t> rows(ds.size());
        std::iota(rows.begin(), rows.end(), 0);
        CHECK(max_relative_gradient_error(m, ds, rows) <= 1e-4);
    }
}

TEST_CASE("backprop matches central differences for deeper and convolutional models") {
    std::mt19937_64 rng(4048);
    for (int trial = 0; trial < 20; ++trial) {
        const auto len = std::uniform_int_distribution<std::size_t>(8, 32)(rng);
        const auto h1 = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        const auto h2 = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        MlpModel m;
        if (trial % 2 == 0) {
            const std::size_t hidden[] = {h1, h2};
            m = nd::nn::make_mlp(len, hidden);
        } else {
            const std::size_t hidden[] = {h1};
            m = nd::nn::make_cnn(len, 4, std::min<std::size_t>(8, len), 2, hidden);
        }
        randomize(m, rng);
        const auto ds = random_dataset(rng, 8, len);
        const std::size_t rows[] = {0, 1, 2, 3, 4, 5, 6, 7};
        INFO("trial " << trial);
        CHECK(max_relative_gradient_error(m, ds, rows) <= 1e-4);
    }
}

TEST_CASE("untrained losses sit near ln 2 on balanced data") {
    std::mt19937_64 rng(3);
    const auto ds = random_dataset(rng, 200, 20);
    const std::size_t hidden[] = {8};
    auto zero = nd::nn::make_mlp(20, hidden);
    CHECK(bce_loss(zero, ds) == Approx(std::log(2.0)).epsilon(1e-12));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto m = zero;
        initialize(m, seed);
        WindowedDataset small = ds;
        for (auto& v : small.windows) v *= 0.1;
        CHECK(std::abs(bce_loss(m, small) - std::log(2.0)) <= 0.1);
    }
}

TEST_CASE("glorot initialization respects its bound") {
    const std::size_t hidden[] = {8};
    auto m = nd::nn::make_mlp(20, hidden);
    initialize(m, 5);
    const double l0 = std::sqrt(6.0 / 28.0), l1 = std::sqrt(6.0 / 9.0);
    for (double w : m.layers[0].weights) CHECK(std::abs(w) <= l0);
    for (double w : m.layers[1].weights) CHECK(std::abs(w) <= l1);
    for (double b : m.layers[0].biases) CHECK(b == 0.0);
}

TEST_CASE("separable toy set trains to low loss") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.1);
    WindowedDataset ds;
    ds.window_len = 20;
    for (std::size_t i = 0; i < 200; ++i) {
        const double mean = i % 2 ? 0.5 : -0.5;
        for (std::size_t j = 0; j < 20; ++j) ds.windows.push_back(mean + noise(rng));
        ds.labels.push_back(i % 2);
        ds.starts.push_back(i * 20);
    }
    TrainConfig tc;
    tc.epochs = 500;
    const std::size_t hidden[] = {8};
    const auto r = train_mlp(ds, ds, nd::nn::make_mlp(20, hidden), tc);
    CHECK(r.history.best_validation() <= 0.05);
    CHECK(r.history.train.size() == 500);
    for (double v : r.history.train) CHECK((std::isfinite(v) && v >= 0.0));
    CHECK(bce_loss(r.model, ds) == Approx(r.history.best_validation()));
}

TEST_CASE("training is deterministic for a fixed seed") {
    std::mt19937_64 rng(10);
    const auto ds = random_dataset(rng, 100, 10);
    TrainConfig tc;
    tc.epochs = 20;
    const std::size_t hidden[] = {4};
    const auto topo = nd::nn::make_mlp(10, hidden);
    const auto a = train_mlp(ds, ds, topo, tc);
    const auto b = train_mlp(ds, ds, topo, tc);
    CHECK(a.history.train == b.history.train);
    CHECK(a.history.validation == b.history.validation);
    CHECK(flatten_parameters(a.model) == flatten_parameters(b.model));
    tc.seed = 2;
    CHECK(train_mlp(ds, ds, topo, tc).history.train != a.history.train);
}

TEST_CASE("divergence reports the epoch") {
    std::mt19937_64 rng(11);
    const auto ds = random_dataset(rng, 64, 10);
    TrainConfig tc;
    tc.learning_rate = 1e300;
    tc.epochs = 5;
    const std::size_t hidden[] = {4};
    try {
        train_mlp(ds, ds, nd::nn::make_mlp(10, hidden), tc);
        FAIL("expected divergence");
    } catch (const nd::DivergenceError& e) {
        CHECK(e.epoch() < 5);
        CHECK(e.code() == nd::ErrorCode::Numeric);
    }
}

TEST_CASE("training rejects mismatched window length") {
    const auto ds = labelled(4, 4, 10);
    const std::size_t hidden[] = {4};
    CHECK_THROWS_AS(train_mlp(ds, ds, nd::nn::make_mlp(20, hidden), TrainConfig{}), Error);
    TrainConfig bad;
    bad.train_fraction = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("grid search shape, cell seeds and failure marking") {
    nd::synth::SynthConfig c;
    c.duration_s = 240;
    c.n_events = 4;
    const auto rec = nd::synth::generate_recording(c);
    TrainConfig tc;
    tc.epochs = 5;
    const auto s = grid_search(rec, {10, 20, 400000}, {2, 4}, tc, 2);
    CHECK(s.cells.size() == 6);
    CHECK(s.at(2, 1).window_len == 400000);
    CHECK_FALSE(s.at(2, 0).loss.has_value());
    CHECK_FALSE(s.at(2, 0).error.empty());
    CHECK(s.at(0, 0).loss.has_value());
    CHECK(s.at(1, 1).seed == nd::derive_seed(tc.seed, {20, 4}));

    // A 1x1 grid equals a standalone run with the derived seed.
    const auto one = grid_search(rec, {20}, {4}, tc, 1);
    TrainConfig cell = tc;
    cell.seed = grid_cell_seed(tc.seed, 20, 4);
    const std::size_t hidden[] = {4};
    const auto solo = run_pipeline(rec, nd::nn::make_mlp(20, hidden), cell);
    CHECK(*one.cells[0].loss == solo.history.best_validation());
    CHECK(*s.at(1, 1).loss == solo.history.best_validation());

    CHECK_THROWS_AS(grid_search(rec, {}, {2}, tc), Error);
}
