#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace modelsr;

TEST_CASE("point forward: closed-form reference values") {
    PointSourceParams origin{{1.0}, {WrapPosition(0.0)}};
    Measurement m = forward(origin, FrequencyGrid(3));
    for (const auto& v : m.values) CHECK(std::abs(v - cplx(1, 0)) < 1e-15);

    PointSourceParams half{{1.0}, {WrapPosition(0.5)}};
    Measurement mh = forward(half, FrequencyGrid(1));
    CHECK(std::abs(mh.at_k(1) - cplx(-1, 0)) < 1e-15);  // e^{-pi i} = -1
}

TEST_CASE("point forward: matches direct summation oracle") {
    PointSourceParams p{{1.3, 1.7}, {WrapPosition(0.2), WrapPosition(0.6)}};
    Measurement m = forward(p, FrequencyGrid(4));
    auto oracle = oracles::direct_forward(p, FrequencyGrid(4));
    for (std::size_t i = 0; i < m.values.size(); ++i)
        CHECK(std::abs(m.values[i] - oracle[i]) < 1e-14);
}

TEST_CASE("fri forward: matches direct summation oracle") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        FriParams p = oracles::random_fri(rng);
        Measurement m = forward(p, FrequencyGrid(6));
        auto oracle = oracles::direct_forward(p, FrequencyGrid(6));
        for (std::size_t i = 0; i < m.values.size(); ++i)
            CHECK(std::abs(m.values[i] - oracle[i]) < 1e-12 * (1.0 + std::abs(oracle[i])));
    }
}

TEST_CASE("gauss forward: matches real-line quadrature to 1e-8") {
    GaussParams p{{1.0}, {0.1}, {WrapPosition(0.3)}};
    Measurement m = forward(p, FrequencyGrid(3));
    CHECK(std::abs(m.at_k(2) - oracles::gauss_quadrature_gk(p, 2.0)) < 1e-8);

    std::mt19937_64 rng(12);
    GaussParams q = oracles::random_gauss(rng);
    Measurement mq = forward(q, FrequencyGrid(2));
    for (std::size_t i = 0; i < mq.values.size(); ++i)
        CHECK(std::abs(mq.values[i] -
                       oracles::gauss_quadrature_gk(q, FrequencyGrid(2).omega(i))) < 1e-8);
}

TEST_CASE("chirp forward: single-sample DFT sanity and endpoint tail") {
    // with one wide flat-ish component, g_0 is the plain sample sum
    ChirpParams p;
    p.fft_grid_size = 16;
    p.components.push_back({1.0, 0.0, 0.0, 0.0, 0.5, 10.0});
    Measurement m = forward(p, FrequencyGrid(2));
    cplx sum{};
    for (std::size_t t = 0; t < 16; ++t) {
        double x = static_cast<double>(t) / 16.0;
        sum += detail::chirp_envelope(p.components[0], x);
    }
    CHECK(std::abs(m.at_k(0) - sum) < 1e-12);

    // endpoint grid: g_k = sum over t/(G-1) samples directly
    p.endpoint_grid = true;
    Measurement me = forward(p, FrequencyGrid(2));
    for (std::size_t i = 0; i < me.values.size(); ++i) {
        double k = FrequencyGrid(2).omega(i);
        cplx direct{};
        for (std::size_t t = 0; t < 16; ++t) {
            double x = static_cast<double>(t) / 15.0;
            cplx ph = std::polar(1.0, -kTwoPi * k * x);
            direct += detail::chirp_envelope(p.components[0], x) * ph;
        }
        CHECK(std::abs(me.values[i] - direct) < 1e-11);
    }
}

TEST_CASE("conjugate symmetry where the model guarantees it") {
    std::mt19937_64 rng(13);
    auto check_sym = [](const ModelInstance& m) {
        Measurement v = forward(m, FrequencyGrid(5));
        for (int k = 1; k <= 5; ++k)
            CHECK(std::abs(v.at_k(-k) - std::conj(v.at_k(k))) < 1e-12);
    };
    ModelInstance pt = oracles::random_point(rng);
    ModelInstance gs = oracles::random_gauss(rng);
    CHECK(guarantees_conjugate_symmetry(pt));
    CHECK(guarantees_conjugate_symmetry(gs));
    check_sym(pt);
    check_sym(gs);

    FriParams even;
    even.orders.push_back({0, {1.2}, {WrapPosition(0.2)}});
    even.orders.push_back({2, {0.8}, {WrapPosition(0.7)}});
    CHECK(guarantees_conjugate_symmetry(ModelInstance(even)));
    check_sym(even);

    ModelInstance odd = oracles::random_fri(rng);  // contains an r=1 block
    CHECK_FALSE(guarantees_conjugate_symmetry(odd));
    CHECK_FALSE(guarantees_conjugate_symmetry(ModelInstance(oracles::random_chirp(rng))));
}

TEST_CASE("amplitude linearity") {
    std::mt19937_64 rng(14);
    PointSourceParams p = oracles::random_point(rng);
    PointSourceParams scaled = p;
    for (double& a : scaled.amplitudes) a *= 2.5;
    Measurement m1 = forward(p, FrequencyGrid(4));
    Measurement m2 = forward(scaled, FrequencyGrid(4));
    for (std::size_t i = 0; i < m1.values.size(); ++i)
        CHECK(std::abs(m2.values[i] - 2.5 * m1.values[i]) < 1e-12);

    GaussParams g = oracles::random_gauss(rng);
    GaussParams gs = g;
    for (double& w : gs.weights) w *= 0.7;
    Measurement g1 = forward(g, FrequencyGrid(4));
    Measurement g2 = forward(gs, FrequencyGrid(4));
    for (std::size_t i = 0; i < g1.values.size(); ++i)
        CHECK(std::abs(g2.values[i] - 0.7 * g1.values[i]) < 1e-12);
}

TEST_CASE("translation covariance and integer-shift equivalence (point model)") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        PointSourceParams p = oracles::random_point(rng);
        double s = u(rng);
        PointSourceParams shifted = p;
        for (auto& x : shifted.positions) x = WrapPosition::wrap(x.value + s);
        Measurement m = forward(p, FrequencyGrid(4));
        Measurement ms = forward(shifted, FrequencyGrid(4));
        for (std::size_t i = 0; i < m.values.size(); ++i) {
            double k = FrequencyGrid(4).omega(i);
            CHECK(std::abs(ms.values[i] - m.values[i] * std::polar(1.0, -kTwoPi * s * k)) <
                  1e-12);
        }
    }
    // theta and theta + 1 sample identically after wrap reduction, up to the
    // one rounding step the wrap subtraction itself introduces
    PointSourceParams a{{1.0}, {WrapPosition(0.3)}};
    PointSourceParams b{{1.0}, {WrapPosition::wrap(1.3)}};
    Measurement ma = forward(a, FrequencyGrid(4)), mb = forward(b, FrequencyGrid(4));
    for (std::size_t i = 0; i < ma.values.size(); ++i)
        CHECK(std::abs(ma.values[i] - mb.values[i]) < 1e-14);
}

TEST_CASE("flatten/unflatten: identity and parameter counts") {
    std::mt19937_64 rng(16);
    for (int which = 0; which < 4; ++which) {
        ModelInstance m = oracles::random_model(which, rng);
        VectorXd theta = flatten(m);
        std::size_t expected = 0;
        if (const auto* p = std::get_if<PointSourceParams>(&m)) expected = 2 * p->n();
        if (const auto* p = std::get_if<FriParams>(&m)) expected = 2 * p->total_sources();
        if (const auto* p = std::get_if<GaussParams>(&m)) expected = 3 * p->n();
        if (const auto* p = std::get_if<ChirpParams>(&m)) expected = 6 * p->n();
        CHECK(static_cast<std::size_t>(theta.size()) == expected);
        CHECK(param_count(m) == expected);
        ModelInstance back = unflatten(m, theta);
        CHECK(flatten(back) == theta);
        CHECK(model_tag(back) == model_tag(m));
    }
    ModelInstance m = oracles::random_point(rng);
    CHECK_THROWS_AS(unflatten(m, VectorXd::Zero(1)), std::invalid_argument);
}

TEST_CASE("model validation rejects malformed parameters") {
    CHECK_THROWS(validate(PointSourceParams{{}, {}}));
    CHECK_THROWS(validate(PointSourceParams{{0.0}, {WrapPosition(0.1)}}));
    CHECK_THROWS(validate(PointSourceParams{{1.0, 1.0}, {WrapPosition(0.1), WrapPosition(0.1)}}));
    FriParams bad_order;
    bad_order.orders.push_back({1, {1.0}, {WrapPosition(0.1)}});
    bad_order.orders.push_back({1, {1.0}, {WrapPosition(0.2)}});
    CHECK_THROWS(validate(bad_order));
    CHECK_THROWS(validate(GaussParams{{1.0}, {0.0}, {WrapPosition(0.1)}}));
    ChirpParams bad_grid;
    bad_grid.components.push_back({});
    bad_grid.fft_grid_size = 12;  // not a power of two
    CHECK_THROWS(validate(bad_grid));
    ChirpParams bad_width;
    bad_width.components.push_back({1.0, 0.0, 0.0, 0.0, 0.5, 0.0});
    CHECK_THROWS(validate(bad_width));
}

TEST_CASE("jacobian: reference entries") {
    // point model at k = 0
    PointSourceParams p{{1.4}, {WrapPosition(0.37)}};
    MatrixXcd J = jacobian(ModelInstance(p), FrequencyGrid(2));
    CHECK(std::abs(J(2, 0) - cplx(1, 0)) < 1e-15);  // d g_0 / d amplitude
    CHECK(std::abs(J(2, 1)) < 1e-15);               // d g_0 / d position

    // FRI dipole at k = 1: d g_1 / d y = b (-2 pi i)^2 e^{-2 pi i y}
    double b = 1.9, y = 0.23;
    FriParams d;
    d.orders.push_back({1, {b}, {WrapPosition(y)}});
    MatrixXcd Jd = jacobian(ModelInstance(d), FrequencyGrid(1));
    cplx expect = b * std::pow(cplx(0.0, -kTwoPi), 2) * std::polar(1.0, -kTwoPi * y);
    CHECK(std::abs(Jd(2, 1) - expect) < 1e-12);
}

TEST_CASE("jacobian: finite-difference agreement for all models") {
    std::mt19937_64 rng(17);
    for (int which = 0; which < 4; ++which) {
        for (int rep = 0; rep < 3; ++rep) {
            ModelInstance m = oracles::random_model(which, rng);
            FrequencyGrid grid(which == 3 ? 8 : 5);
            MatrixXcd J = jacobian(m, grid);
            CHECK(oracles::fd_jacobian_error(m, grid, flatten(m), J) < 1e-6);
        }
    }
}

TEST_CASE("hessian norms: point model reference and eigen oracle") {
    PointSourceParams p{{1.6}, {WrapPosition(0.4)}};
    auto xi = hessian_norms(ModelInstance(p), FrequencyGrid(3));
    CHECK(xi[3] == 0.0);  // k = 0: all second derivatives vanish

    // dense oracle: the per-k Hessian is [[0, c], [c, d]] with known entries
    for (std::size_t i = 0; i < 7; ++i) {
        double k = FrequencyGrid(3).omega(i);
        cplx e = std::polar(1.0, -kTwoPi * 0.4 * k);
        cplx c = cplx(0.0, -kTwoPi * k) * e;
        cplx dd = cplx(0.0, -kTwoPi * k) * cplx(0.0, -kTwoPi * k) * 1.6 * e;
        MatrixXcd H(2, 2);
        H << cplx{}, c, c, dd;
        Eigen::JacobiSVD<MatrixXcd> svd(H);
        CHECK(xi[i] == doctest::Approx(svd.singularValues().maxCoeff()).epsilon(1e-9));
    }
}

TEST_CASE("hessian norms: gauss FD estimate against quadrature-differentiated oracle") {
    GaussParams p{{1.3}, {0.12}, {WrapPosition(0.45)}};
    FrequencyGrid grid(2);
    auto xi = hessian_norms(ModelInstance(p), grid);

    // oracle: second differences of the quadrature forward map, dense SVD
    VectorXd theta = flatten(ModelInstance(p));
    const double h = 1e-4;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k = grid.omega(i);
        MatrixXcd H(3, 3);
        for (Eigen::Index a = 0; a < 3; ++a)
            for (Eigen::Index b = 0; b < 3; ++b) {
                auto eval = [&](double da, double db) {
                    VectorXd t = theta;
                    t[a] += da;
                    t[b] += db;
                    auto q = std::get<GaussParams>(unflatten(ModelInstance(p), t, false));
                    // include the model's sqrt(2 pi) normalization via the
                    // quadrature of the density itself
                    return oracles::gauss_quadrature_gk(q, k);
                };
                H(a, b) = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) /
                          (4.0 * h * h);
            }
        Eigen::JacobiSVD<MatrixXcd> svd(H);
        double oracle = svd.singularValues().maxCoeff();
        CHECK(std::fabs(xi[i] - oracle) < 1e-4 * std::max(1.0, oracle));
    }
}

TEST_CASE("identifiability warnings") {
    PointSourceParams p{{1.0, 1.0, 1.0}, {WrapPosition(0.1), WrapPosition(0.5), WrapPosition(0.9)}};
    CHECK(identifiability_warning(ModelInstance(p), FrequencyGrid(2)).has_value());
    CHECK_FALSE(identifiability_warning(ModelInstance(p), FrequencyGrid(5)).has_value());
    GaussParams g{{1.0, 1.0}, {0.1, 0.2}, {WrapPosition(0.2), WrapPosition(0.7)}};
    CHECK(identifiability_warning(ModelInstance(g), FrequencyGrid(2)).has_value());
    CHECK_FALSE(identifiability_warning(ModelInstance(g), FrequencyGrid(3)).has_value());
}

TEST_CASE("model JSON: lossless round trip for every model") {
    std::mt19937_64 rng(18);
    for (int which = 0; which < 4; ++which) {
        ModelInstance m = oracles::random_model(which, rng);
        ModelInstance back = model_from_json(to_json(m));
        CHECK(model_tag(back) == model_tag(m));
        CHECK(flatten(back) == flatten(m));
    }
    CHECK_THROWS(model_from_json(json{{"model", "mystery"}}));
}
