#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

using namespace modelsr;

TEST_CASE("wrap distance: reference values") {
    CHECK(wrap_distance(WrapPosition(0.1), WrapPosition(0.9)) == doctest::Approx(0.2));
    CHECK(wrap_distance(WrapPosition(0.3), WrapPosition(0.3)) == 0.0);
    CHECK(wrap_distance(WrapPosition(0.0), WrapPosition(0.5)) == 0.5);
}

TEST_CASE("wrap distance: metric properties over random triples") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        WrapPosition a(u(rng)), b(u(rng)), c(u(rng));
        double ab = wrap_distance(a, b), ba = wrap_distance(b, a);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 0.5);
        CHECK(wrap_distance(a, a) == 0.0);
        CHECK(ab <= wrap_distance(a, c) + wrap_distance(c, b) + 1e-15);
    }
}

TEST_CASE("wrap position: construction and reduction") {
    CHECK_THROWS_AS(WrapPosition(1.0), std::invalid_argument);
    CHECK_THROWS_AS(WrapPosition(-0.1), std::invalid_argument);
    CHECK(WrapPosition::wrap(1.25).value == doctest::Approx(0.25));
    CHECK(WrapPosition::wrap(-0.25).value == doctest::Approx(0.75));
    CHECK(WrapPosition::wrap(3.0).value == 0.0);
}

TEST_CASE("rayleigh length and SRF") {
    CHECK(rayleigh_length(10) == doctest::Approx(0.05));
    CHECK(rayleigh_length(5) == doctest::Approx(0.1));
    CHECK(rayleigh_length(1) == 0.5);
    CHECK_THROWS_AS(rayleigh_length(0), std::invalid_argument);
    CHECK(srf(10, 100) == doctest::Approx(10.0));
    CHECK(srf(10, 200) == doctest::Approx(20.0));
    CHECK(srf(7, 7) == 1.0);
    CHECK_THROWS_AS(srf(10, 9), std::invalid_argument);
}

TEST_CASE("frequency grid: enumeration and masks") {
    FrequencyGrid g(3);
    CHECK(g.size() == 7);
    CHECK(g.index(0) == -3);
    CHECK(g.index(6) == 3);
    CHECK(g.omega(4) == doctest::Approx(1.0));

    FrequencyGrid masked(3, std::vector<int>{2, -1});
    CHECK(masked.size() == 2);
    CHECK(masked.index(0) == -1);  // masks are sorted ascending
    CHECK(masked.index(1) == 2);

    CHECK_THROWS_AS(FrequencyGrid(-1), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(3, std::vector<int>{}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(3, std::vector<int>{4}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(3, std::vector<int>{1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyGrid(3, std::nullopt, 0.5), std::invalid_argument);
}

TEST_CASE("downsample: index arithmetic on a raw vector") {
    Measurement m(FrequencyGrid(2), {cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0), cplx(5, 0)});
    Measurement low = downsample(m, 1);
    REQUIRE(low.values.size() == 3);
    CHECK(low.values[0] == cplx(2, 0));
    CHECK(low.values[1] == cplx(3, 0));
    CHECK(low.values[2] == cplx(4, 0));
    CHECK_THROWS_AS(downsample(m, 3), std::invalid_argument);
}

TEST_CASE("downsample commutes with sampling: Q o G_H = G_L bit-exact") {
    std::mt19937_64 rng(2);
    for (int which = 0; which < 4; ++which) {
        ModelInstance m = oracles::random_model(which, rng);
        int k_high = which == 3 ? 12 : 30;  // chirp grid is 64 samples
        Measurement high = forward(m, FrequencyGrid(k_high));
        Measurement low = forward(m, FrequencyGrid(k_high / 3));
        Measurement down = downsample(high, k_high / 3);
        REQUIRE(down.values.size() == low.values.size());
        for (std::size_t i = 0; i < low.values.size(); ++i)
            CHECK(down.values[i] == low.values[i]);  // bitwise
    }
}

TEST_CASE("downsample: restriction of a mask equals mask of the restriction") {
    // enumerate all nonempty masks of [-3,3] whose restriction to [-2,2] is nonempty
    std::mt19937_64 rng(3);
    ModelInstance m = oracles::random_point(rng);
    Measurement high = forward(m, FrequencyGrid(3));
    for (int bits = 1; bits < (1 << 7); ++bits) {
        std::vector<int> mask, inner;
        for (int i = 0; i < 7; ++i)
            if (bits & (1 << i)) {
                mask.push_back(i - 3);
                if (std::abs(i - 3) <= 2) inner.push_back(i - 3);
            }
        if (inner.empty()) continue;
        Measurement a = downsample(apply_mask(high, mask), 2);
        Measurement b = apply_mask(downsample(high, 2), inner);
        REQUIRE(a.values.size() == b.values.size());
        for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    }
}

TEST_CASE("downsample: repeated restriction collapses") {
    std::mt19937_64 rng(4);
    Measurement high = forward(ModelInstance(oracles::random_point(rng)), FrequencyGrid(9));
    Measurement once = downsample(high, 3);
    Measurement twice = downsample(downsample(high, 6), 3);
    for (std::size_t i = 0; i < once.values.size(); ++i) CHECK(once.values[i] == twice.values[i]);
}

TEST_CASE("apply_mask: identity, singleton, direct-evaluation agreement") {
    std::mt19937_64 rng(5);
    PointSourceParams p = oracles::random_point(rng);
    Measurement m = forward(ModelInstance(p), FrequencyGrid(3));

    std::vector<int> full{-3, -2, -1, 0, 1, 2, 3};
    Measurement same = apply_mask(m, full);
    for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(same.values[i] == m.values[i]);

    Measurement zero = apply_mask(m, {0});
    REQUIRE(zero.values.size() == 1);
    CHECK(zero.values[0] == m.at_k(0));

    Measurement two = apply_mask(m, {-2, 1});
    auto oracle = oracles::direct_forward(p, FrequencyGrid(3, std::vector<int>{-2, 1}));
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(two.values[i] - oracle[i]) < 1e-13);

    CHECK_THROWS_AS(apply_mask(m, {}), std::invalid_argument);
}

TEST_CASE("forward on a masked grid matches direct evaluation per index") {
    std::mt19937_64 rng(6);
    PointSourceParams p = oracles::random_point(rng);
    Measurement masked = forward(ModelInstance(p), FrequencyGrid(3, std::vector<int>{-2, 1}));
    Measurement full = forward(ModelInstance(p), FrequencyGrid(3));
    CHECK(masked.values[0] == full.at_k(-2));
    CHECK(masked.values[1] == full.at_k(1));
}

TEST_CASE("measurement CSV: lossless round trip") {
    std::mt19937_64 rng(7);
    Measurement m = forward(ModelInstance(oracles::random_gauss(rng)), FrequencyGrid(5));
    std::stringstream ss;
    write_measurement_csv(m, ss);
    Measurement back = read_measurement_csv(ss);
    CHECK(back.grid == m.grid);
    REQUIRE(back.values.size() == m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(back.values[i] == m.values[i]);
}

TEST_CASE("measurement CSV: masked grids round trip and bad input rejected") {
    std::mt19937_64 rng(8);
    Measurement m = forward(ModelInstance(oracles::random_point(rng)),
                            FrequencyGrid(4, std::vector<int>{-3, 0, 2}));
    std::stringstream ss;
    write_measurement_csv(m, ss);
    Measurement back = read_measurement_csv(ss);
    CHECK(back.grid.masked());
    CHECK(back.grid.mask() == std::vector<int>{-3, 0, 2});
    for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(back.values[i] == m.values[i]);

    std::stringstream bad("x,y\n1,2\n");
    CHECK_THROWS(read_measurement_csv(bad));
    std::stringstream empty("k,re,im\n");
    CHECK_THROWS(read_measurement_csv(empty));
}

TEST_CASE("measurement: at_k and norm") {
    Measurement m(FrequencyGrid(1), {cplx(0, 1), cplx(2, 0), cplx(0, -2)});
    CHECK(m.at_k(-1) == cplx(0, 1));
    CHECK(m.at_k(1) == cplx(0, -2));
    CHECK_THROWS_AS(m.at_k(2), std::out_of_range);
    CHECK(m.norm() == doctest::Approx(3.0));
}
