#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "common/error.hpp"
#include "dsp/filter_chain.hpp"
#include "eval/events.hpp"
#include "eval/freqmap.hpp"
#include "eval/resources.hpp"
#include "eval/roc.hpp"
#include "nn/model.hpp"
#include "nn/stream.hpp"

using namespace nd::eval;
using nd::Error;
using nd::synth::EventAnnotation;
using Catch::Approx;

namespace {

// Fraction of (positive, negative) pairs ranked correctly; ties count one half.
double concordance(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
    double hits = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1.0;
                hits += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            }
    return hits / pairs;
}

}  // namespace

TEST_CASE("ROC corners and degenerate sweeps") {
    const std::vector<double> sep = {0.9, 0.8, 0.2, 0.1};
    const std::vector<std::uint8_t> y = {1, 1, 0, 0};
    const auto c = roc_curve(sep, y);
    CHECK(c.auc == 1.0);
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.front().tpr == 0.0);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
    CHECK(roc_curve(std::vector<double>(4, 0.3), y).auc == 0.5);
    CHECK(roc_curve(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y).auc == 0.0);
}

TEST_CASE("ROC preconditions") {
    const std::vector<double> s = {0.1, 0.2};
    CHECK_THROWS_AS(roc_curve(s, std::vector<std::uint8_t>{1, 1}), Error);
    CHECK_THROWS_AS(roc_curve(s, std::vector<std::uint8_t>{1}), Error);
}

TEST_CASE("AUC equals pairwise concordance and the curve is monotone") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s(20);
        std::vector<std::uint8_t> y(20);
        std::uniform_int_distribution<int> coarse(0, 6);
        for (std::size_t i = 0; i < 20; ++i) {
            y[i] = static_cast<std::uint8_t>(i % 3 == 0);
            // Coarse scores force ties on some trials.
            s[i] = trial % 2 ? coarse(rng) / 6.0 : std::uniform_real_distribution<double>(0, 1)(rng);
        }
        const auto c = roc_curve(s, y);
        REQUIRE(std::abs(c.auc - concordance(s, y)) <= 1e-12);
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            REQUIRE(c.points[i].fpr >= c.points[i - 1].fpr);
            REQUIRE(c.points[i].tpr >= c.points[i - 1].tpr);
            REQUIRE(c.points[i].threshold < c.points[i - 1].threshold);
        }
    }
}

TEST_CASE("operating point is the highest threshold reaching the TPR") {
    const std::vector<double> s = {0.9, 0.7, 0.6, 0.5, 0.4, 0.3};
    const std::vector<std::uint8_t> y = {1, 0, 1, 1, 0, 1};
    const auto op = operating_point(roc_curve(s, y), 0.75);
    CHECK(op.threshold == 0.5);
    CHECK(op.tpr == 0.75);
    CHECK(op.fpr == 0.5);
}

TEST_CASE("latency examples") {
    std::vector<std::uint8_t> l(2000, 0);
    const EventAnnotation ev{1.0, 5.0, "seizure"};
    CHECK_FALSE(detection_latency(l, ev, 256.0).has_value());
    l[256] = 1;
    CHECK(*detection_latency(l, ev, 256.0) == 0.0);
    l[256] = 0;
    l[256 + 154] = 1;
    CHECK(*detection_latency(l, ev, 256.0) == Approx(0.6015625).epsilon(1e-15));
    // Positives before onset or after the end do not count.
    std::vector<std::uint8_t> outside(2000, 0);
    outside[100] = outside[1400] = 1;
    CHECK_FALSE(detection_latency(outside, ev, 256.0).has_value());
}

TEST_CASE("missed events are excluded from the mean latency") {
    std::vector<std::uint8_t> l(3000, 0);
    l[256 + 128] = 1;
    const std::vector<EventAnnotation> ev = {{1.0, 2.0, "seizure"}, {5.0, 6.0, "seizure"}, {8.0, 10.0, "seizure"}};
    for (std::size_t n = 8 * 256 + 64; n < 10 * 256; ++n) l[n] = 1;
    const auto m = event_metrics(l, ev, 256.0);
    CHECK(m.detected == 2);
    CHECK(m.missed == 1);
    CHECK_FALSE(m.latencies[1].has_value());
    CHECK(*m.mean_latency() == Approx((0.5 + 0.25) / 2));
}

TEST_CASE("overlap examples") {
    const EventAnnotation ev{1.0, 2.0, "seizure"};
    std::vector<std::uint8_t> l(1024, 0);
    CHECK(overlap_percent(l, ev, 256.0) == 0.0);
    for (std::size_t n = 256; n < 384; ++n) l[n] = 1;
    CHECK(overlap_percent(l, ev, 256.0) == 50.0);
    for (std::size_t n = 0; n < 1024; ++n) l[n] = 1;
    CHECK(overlap_percent(l, ev, 256.0) == 100.0);
}

TEST_CASE("latency and overlap are invariant to prepending negatives") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> l(4096);
        for (auto& v : l) v = std::bernoulli_distribution(0.05)(rng);
        const std::vector<EventAnnotation> ev = {{2.0, 4.5, "seizure"}, {7.0, 12.0, "seizure"}};
        const auto base = event_metrics(l, ev, 256.0);
        const std::size_t pad = std::uniform_int_distribution<std::size_t>(1, 2000)(rng);
        std::vector<std::uint8_t> shifted(pad, 0);
        shifted.insert(shifted.end(), l.begin(), l.end());
        const double dt = static_cast<double>(pad) / 256.0;
        const std::vector<EventAnnotation> ev2 = {{2.0 + dt, 4.5 + dt, "seizure"}, {7.0 + dt, 12.0 + dt, "seizure"}};
        const auto moved = event_metrics(shifted, ev2, 256.0);
        REQUIRE(moved.latencies == base.latencies);
        REQUIRE(moved.overlaps == base.overlaps);
    }
}

TEST_CASE("hold expansion is causal") {
    const std::vector<int> w = {1, 2, 3};
    const auto s = hold_expand<int>(w, 4, 14);
    CHECK(s == std::vector<int>{0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3});
}

TEST_CASE("hold expansion matches the windowed stream") {
    const std::size_t hidden[] = {3};
    auto m = nd::nn::make_mlp(5, hidden);
    std::mt19937_64 rng(1);
    for (auto& l : m.layers)
        for (auto& v : l.weights) v = std::uniform_real_distribution<double>(-2, 2)(rng);
    nd::synth::Recording rec;
    for (int i = 0; i < 53; ++i) rec.samples.push_back(std::uniform_real_distribution<float>(-50, 50)(rng));
    auto net = std::make_shared<const nd::nn::Network>(m);
    nd::nn::WindowedNetClassifier clf(net, {});
    const auto tr = run_stream(clf, rec);
    std::vector<double> per_window;
    for (std::size_t k = 0; k + 5 <= rec.samples.size(); k += 5) {
        std::vector<double> x;
        for (std::size_t j = 0; j < 5; ++j) x.push_back(rec.normalized(k + j));
        per_window.push_back(nd::nn::mlp_forward(m, x));
    }
    CHECK(hold_expand<double>(per_window, 5, rec.samples.size()) == tr.score);
}

TEST_CASE("frequency map of the filter chain") {
    nd::dsp::FilterChainConfig fc;
    fc.threshold = 0.1;
    const nd::dsp::FilterChainClassifier f(fc);
    // 4x the threshold-equivalent tone amplitude, in microvolts.
    const double amp = 4.0 * nd::dsp::threshold_equivalent_amplitude(0.1) * 50.0;
    FreqMapOptions o;
    o.threads = 2;
    const auto m = frequency_response_map(f, {13.0, 50.0}, {amp, amp / 2}, o);
    REQUIRE(m.values.size() == 4);
    CHECK(m.at(0, 0) >= 0.9);
    CHECK(m.at(1, 0) <= 0.1);
    for (double v : m.values) CHECK((v >= 0.0 && v <= 1.0));

    o.threads = 1;
    const auto again = frequency_response_map(f, {13.0, 50.0}, {amp, amp / 2}, o);
    CHECK(again.values == m.values);
    CHECK_THROWS_AS(frequency_response_map(f, {200.0}, {amp}, o), Error);
    o.repeats = 0;
    CHECK_THROWS_AS(frequency_response_map(f, {13.0}, {amp}, o), Error);
}

TEST_CASE("resource counts by construction") {
    const std::size_t hidden[] = {8};
    const auto mlp = nd::nn::make_mlp(20, hidden);
    const auto r = resource_report(mlp);
    CHECK(r.macs_per_window == 168);
    CHECK(r.macs_per_sample == 8.4);
    CHECK(r.parameters == 177);
    CHECK(r.coefficient_bytes == 177 + 2 * 2 * 4);
    CHECK(r.state_bytes == 20 + 9 * 4);
    CHECK(resource_report(mlp, true).state_bytes == r.state_bytes + 12);
    const auto q = resource_report(nd::nn::quantize_model(mlp));
    CHECK(q.parameters == r.parameters);
    CHECK(q.macs_per_sample == r.macs_per_sample);

    const auto f = resource_report(nd::dsp::make_design({}));
    CHECK(f.macs_per_sample == 11.0);
    CHECK(f.coefficient_bytes == 20);
    CHECK(f.state_bytes == 36);

    const auto empty = resource_report(std::span<const Stage>{}, 20);
    CHECK(empty.macs_per_sample == 0.0);
    CHECK(empty.parameters == 0);
    CHECK(empty.coefficient_bytes == 0);
    CHECK(empty.state_bytes == 0);

    const auto cnn = nd::nn::make_cnn(20, 4, 8, 2, hidden);
    const auto c = resource_report(cnn);
    CHECK(c.macs_per_window == 4 * 8 * 7 + 28 * 8 + 8);
    CHECK(c.parameters == cnn.parameter_count());
}
