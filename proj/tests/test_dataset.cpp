#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "horizonbench/dataset.hpp"
#include "horizonbench/rng.hpp"

using namespace hb;
using namespace hb::data;

namespace {

series::TimeSeries make_series(std::vector<double> v) { return {"test", std::move(v), "inline"}; }

series::TimeSeries counting_series(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    return make_series(std::move(v));
}

}  // namespace

TEST_CASE("min-max scaling maps endpoints to 0 and 1") {
    const auto [scaled, params] = fit_scale(make_series({0, 5, 10}));
    CHECK(scaled.values == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(params.min == 0.0);
    CHECK(params.max == 10.0);
}

TEST_CASE("scaling an already normalized series changes nothing") {
    const auto [scaled, params] = fit_scale(make_series({0.0, 0.25, 1.0}));
    CHECK(scaled.values == std::vector<double>{0.0, 0.25, 1.0});
    CHECK(params.min == 0.0);
    CHECK(params.max == 1.0);
}

TEST_CASE("constant series cannot be scaled") {
    CHECK_THROWS_AS(fit_scale(make_series({2, 2, 2})), std::invalid_argument);
}

TEST_CASE("inverse scaling is exact at the ends and tight elsewhere") {
    const ScaleParams p{0.0, 10.0};
    CHECK(inverse_scale(0.5, p) == 5.0);
    CHECK(inverse_scale(0.0, p) == 0.0);

    Rng rng(99);
    std::vector<double> raw(300);
    for (auto& v : raw) v = rng.uniform(-40.0, 75.0);
    const auto [scaled, params] = fit_scale(make_series(raw));
    const auto back = inverse_scale(scaled.values, params);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(std::abs(back[i] - raw[i]) < 1e-12);
    }
}

TEST_CASE("embedding 1..20 with D=5 T=1 H=10 gives the forced layout") {
    const auto d = embed(counting_series(20), 5, 1, 10);
    CHECK(d.samples() == 6);
    for (int j = 0; j < 5; ++j) CHECK(d.inputs(0, j) == j + 1);
    for (int h = 0; h < 10; ++h) CHECK(d.targets(0, h) == 6 + h);
    // last sample: inputs 6..10, targets 11..20
    for (int j = 0; j < 5; ++j) CHECK(d.inputs(5, j) == 6 + j);
    for (int h = 0; h < 10; ++h) CHECK(d.targets(5, h) == 11 + h);
}

TEST_CASE("embedding boundary: exactly one sample, one fewer errors") {
    // N = (D-1)T + H + 1 = 4 + 10 + 1 = 15
    CHECK(embed(counting_series(15), 5, 1, 10).samples() == 1);
    CHECK_THROWS_WITH_AS(embed(counting_series(14), 5, 1, 10), doctest::Contains("at least 15"),
                         std::invalid_argument);
}

TEST_CASE("embedding matches a brute-force index oracle on random shapes") {
    Rng rng(7777);
    for (int trial = 0; trial < 100; ++trial) {
        const int D = 1 + static_cast<int>(rng.below(6));
        const int T = 1 + static_cast<int>(rng.below(4));
        const int H = 1 + static_cast<int>(rng.below(12));
        const int min_len = (D - 1) * T + H + 1;
        const int N = min_len + static_cast<int>(rng.below(40));
        const auto s = counting_series(N);
        const auto d = embed(s, D, T, H);

        // brute-force enumeration straight from the definition
        const int expected_samples = N - (D - 1) * T - H;
        REQUIRE(static_cast<int>(d.samples()) == expected_samples);
        for (int i = 0; i < expected_samples; ++i) {
            for (int j = 0; j < D; ++j) {
                CHECK(d.inputs(i, j) == s.values[static_cast<std::size_t>(i + j * T)]);
            }
            const int last = i + (D - 1) * T;
            for (int h = 0; h < H; ++h) {
                CHECK(d.targets(i, h) == s.values[static_cast<std::size_t>(last + 1 + h)]);
            }
        }
    }
}

TEST_CASE("scale-then-embed equals embed-then-scale cellwise") {
    Rng rng(4);
    std::vector<double> raw(60);
    for (auto& v : raw) v = rng.uniform(3.0, 9.0);
    const auto series = make_series(raw);

    const auto [scaled, params] = fit_scale(series);
    const auto a = embed(scaled, 4, 2, 3);
    const auto b = embed(series, 4, 2, 3);
    auto check_affine = [&](const Matrix& s, const Matrix& r) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double expect = (r.flat()[k] - params.min) / (params.max - params.min);
            CHECK(std::abs(s.flat()[k] - expect) < 1e-15);
        }
    };
    check_affine(a.inputs, b.inputs);
    check_affine(a.targets, b.targets);
}

TEST_CASE("split is chronological and exhaustive") {
    const auto d = embed(counting_series(24), 5, 1, 10);  // 10 samples
    REQUIRE(d.samples() == 10);
    const auto [train, test] = split(d, 0.6);
    CHECK(train.samples() == 6);
    CHECK(test.samples() == 4);
    // order preserved: train rows 0..5, test rows 6..9
    for (int j = 0; j < 5; ++j) {
        CHECK(train.inputs(0, j) == d.inputs(0, j));
        CHECK(train.inputs(5, j) == d.inputs(5, j));
        CHECK(test.inputs(0, j) == d.inputs(6, j));
        CHECK(test.inputs(3, j) == d.inputs(9, j));
    }
}

TEST_CASE("six samples split 0.5 gives 3/3") {
    const auto d = embed(counting_series(20), 5, 1, 10);
    REQUIRE(d.samples() == 6);
    const auto [train, test] = split(d, 0.5);
    CHECK(train.samples() == 3);
    CHECK(test.samples() == 3);
}

TEST_CASE("split rejects fractions that leave a side empty") {
    const auto d = embed(counting_series(20), 5, 1, 10);
    CHECK_THROWS_AS(split(d, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(split(d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(split(d, 0.05), std::invalid_argument);  // floor(0.3) = 0 train rows
}

TEST_CASE("split concatenation reconstructs the dataset") {
    const auto d = embed(counting_series(40), 3, 2, 4);
    const auto [train, test] = split(d, 0.6);
    REQUIRE(train.samples() + test.samples() == d.samples());
    for (std::size_t i = 0; i < d.samples(); ++i) {
        const bool in_train = i < train.samples();
        const auto& part = in_train ? train : test;
        const std::size_t r = in_train ? i : i - train.samples();
        for (std::size_t j = 0; j < d.inputs.cols(); ++j) {
            CHECK(part.inputs(r, j) == d.inputs(i, j));
        }
        for (std::size_t j = 0; j < d.targets.cols(); ++j) {
            CHECK(part.targets(r, j) == d.targets(i, j));
        }
    }
}
