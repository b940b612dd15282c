#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace modelsr;

TEST_CASE("objective: reference values and oracle agreement") {
    std::mt19937_64 rng(21);
    ModelInstance m = oracles::random_point(rng);
    Measurement y = forward(m, FrequencyGrid(4));
    CHECK(objective(m, y) < 1e-28);  // long-double re-evaluation leaves rounding dust

    Measurement ye = y;
    ye.values[2] += cplx(0.0, 2.0);  // single entry of modulus 2
    CHECK(objective(m, ye) == doctest::Approx(2.0));

    // random measurement: phi matches long-double direct summation
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Measurement yr = y;
    for (auto& v : yr.values) v = cplx(u(rng), u(rng));
    auto g = oracles::direct_forward(std::get<PointSourceParams>(m), yr.grid);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::complex<long double> d = std::complex<long double>(g[i]) -
                                      std::complex<long double>(yr.values[i]);
        acc += d.real() * d.real() + d.imag() * d.imag();
    }
    double oracle = static_cast<double>(0.5L * acc);
    CHECK(objective(m, yr) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("gradient: zero at truth, closed form at k=0, FD agreement") {
    std::mt19937_64 rng(22);
    ModelInstance m = oracles::random_gauss(rng);
    Measurement y = forward(m, FrequencyGrid(4));
    CHECK(gradient(m, y).norm() < 1e-12);

    // single source, grid {0} only, real y_0: gradient = (a - y_0, 0)
    PointSourceParams p{{1.7}, {WrapPosition(0.31)}};
    Measurement y0(FrequencyGrid(0), {cplx(0.4, 0.0)});
    VectorXd g0 = gradient(ModelInstance(p), y0);
    CHECK(g0[0] == doctest::Approx(1.7 - 0.4));
    CHECK(g0[1] == doctest::Approx(0.0));

    for (int which = 0; which < 4; ++which) {
        ModelInstance mm = oracles::random_model(which, rng);
        FrequencyGrid grid(which == 3 ? 8 : 5);
        Measurement yy = forward(mm, grid);
        for (auto& v : yy.values) v += cplx(0.03, -0.02);
        auto f = [&](const VectorXd& t) { return objective(unflatten(mm, t, false), yy); };
        CHECK(oracles::fd_gradient_error(f, flatten(mm), gradient(mm, yy)) < 1e-6);
    }
}

TEST_CASE("admissible: strict inequality semantics") {
    std::mt19937_64 rng(23);
    ModelInstance m = oracles::random_point(rng);
    Measurement y = forward(m, FrequencyGrid(4));
    CHECK(admissible(m, y, 1e-12));  // exact data, any positive sigma

    Measurement yn = y;
    yn.values[0] += cplx(0.9, 0.0);
    CHECK(admissible(m, yn, 1.0));        // ||W|| = 0.9 < sigma
    CHECK_FALSE(admissible(m, yn, 0.9));  // equality is not admissible
    CHECK_THROWS_AS(admissible(m, y, 0.0), std::invalid_argument);
}

TEST_CASE("perturb_init: offsets, signs, midpoint amplitudes") {
    std::mt19937_64 rng(24);
    PointSourceParams truth{{1.1, 1.9}, {WrapPosition(0.2), WrapPosition(0.7)}};

    auto zero = std::get<PointSourceParams>(perturb_init(ModelInstance(truth), 0.0, rng));
    CHECK(zero.positions[0].value == 0.2);
    CHECK(zero.positions[1].value == 0.7);
    CHECK(zero.amplitudes[0] == 1.5);
    CHECK(zero.amplitudes[1] == 1.5);

    for (int rep = 0; rep < 10; ++rep) {
        auto moved = std::get<PointSourceParams>(perturb_init(ModelInstance(truth), 0.02, rng));
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(wrap_distance(moved.positions[j], truth.positions[j]) ==
                  doctest::Approx(0.02));
    }
    // wrap-around: displacement 0.6 is 0.4 in the wrap metric
    auto far = std::get<PointSourceParams>(perturb_init(ModelInstance(truth), 0.6, rng));
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(wrap_distance(far.positions[j], truth.positions[j]) == doctest::Approx(0.4));

    CHECK_THROWS_AS(perturb_init(ModelInstance(truth), -0.1, rng), std::invalid_argument);
}

TEST_CASE("perturb_init: fri midpoint applies to the monopole block only") {
    std::mt19937_64 rng(25);
    FriParams truth;
    truth.orders.push_back({0, {1.2, 1.8}, {WrapPosition(0.1), WrapPosition(0.5)}});
    truth.orders.push_back({1, {0.07}, {WrapPosition(0.8)}});
    auto init = std::get<FriParams>(perturb_init(ModelInstance(truth), 0.01, rng));
    CHECK(init.orders[0].amplitudes[0] == 1.5);
    CHECK(init.orders[0].amplitudes[1] == 1.5);
    CHECK(init.orders[1].amplitudes[0] == 0.07);  // derivative block keeps truth scale
}

TEST_CASE("perturb_init: chirp centers move, everything else stays") {
    std::mt19937_64 rng(26);
    ChirpParams truth = oracles::random_chirp(rng);
    auto init = std::get<ChirpParams>(perturb_init(ModelInstance(truth), 0.01, rng));
    for (std::size_t j = 0; j < truth.n(); ++j) {
        CHECK(std::fabs(init.components[j].center - truth.components[j].center) ==
              doctest::Approx(0.01));
        CHECK(init.components[j].amp_re == truth.components[j].amp_re);
        CHECK(init.components[j].width == truth.components[j].width);
        CHECK(init.components[j].quad_phase == truth.components[j].quad_phase);
    }
}

TEST_CASE("solve: starting at the truth terminates immediately") {
    std::mt19937_64 rng(27);
    ModelInstance m = oracles::random_point(rng);
    Measurement y = forward(m, FrequencyGrid(5));
    SolveOptions opts;
    SolveReport rep = nesterov_solve(m, y, opts);
    CHECK(rep.iterations == 0);
    CHECK(rep.objective_history.front() < 1e-20);
    CHECK(flatten(rep.theta_hat) == flatten(m));
}

TEST_CASE("solve: noiseless sub-Rayleigh pair is recovered") {
    // K_L = 5, separation RL/100 = 1e-3, init at truth +/- half the separation
    const int k_low = 5;
    const double sep = rayleigh_length(k_low) / 100.0;
    PointSourceParams truth{{1.4, 1.7}, {WrapPosition(0.5), WrapPosition(0.5 + sep)}};
    Measurement y = forward(ModelInstance(truth), FrequencyGrid(k_low));
    PointSourceParams init{{1.5, 1.5},
                           {WrapPosition(0.5 - 0.5 * sep), WrapPosition(0.5 + 1.5 * sep)}};
    SolveOptions opts;
    opts.max_iters = 200000;
    opts.tol_residual = 0.5e-14;  // phi = ||r||^2 / 2 <= 1e-7 squared over two
    SolveReport rep = nesterov_solve(ModelInstance(init), y, opts);
    double rnorm = std::sqrt(2.0 * rep.objective_history.back());
    CHECK(rnorm <= 1e-7);
    auto est = std::get<PointSourceParams>(rep.theta_hat);
    auto me = match_errors(est.positions, truth.positions);
    for (double e : me.position_errors) CHECK(e < sep / 10.0);
}

TEST_CASE("solve: noisy single source is admissible") {
    std::mt19937_64 rng(28);
    PointSourceParams truth{{1.5}, {WrapPosition(0.42)}};
    Measurement y = forward(ModelInstance(truth), FrequencyGrid(5));
    auto [noise, sigma] = gen_noise(y, 30.0, rng);
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += noise.values[i];
    ModelInstance init = perturb_init(ModelInstance(truth), 0.02, rng);
    SolveOptions opts;
    opts.sigma = sigma;
    opts.max_iters = 5000;
    SolveReport rep = nesterov_solve(init, y, opts);
    CHECK(rep.admissible);
    CHECK(rep.sigma_used == sigma);
}

TEST_CASE("solve: objective history is non-increasing") {
    std::mt19937_64 rng(29);
    ModelInstance truth = oracles::random_gauss(rng);
    Measurement y = forward(truth, FrequencyGrid(5));
    auto [noise, sigma] = gen_noise(y, 20.0, rng);
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += noise.values[i];
    ModelInstance init = perturb_init(truth, 0.01, rng);
    SolveOptions opts;
    opts.max_iters = 2000;
    SolveReport rep = nesterov_solve(init, y, opts);
    for (std::size_t i = 1; i < rep.objective_history.size(); ++i)
        CHECK(rep.objective_history[i] <= rep.objective_history[i - 1]);
}

TEST_CASE("solve: deterministic given identical inputs") {
    std::mt19937_64 rng(30);
    ModelInstance truth = oracles::random_chirp(rng);
    Measurement y = forward(truth, FrequencyGrid(8));
    auto [noise, sigma] = gen_noise(y, 15.0, rng);
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += noise.values[i];
    ModelInstance init = perturb_init(truth, 0.01, rng);
    SolveOptions opts;
    opts.max_iters = 300;
    opts.seed = 99;
    SolveReport a = nesterov_solve(init, y, opts);
    SolveReport b = nesterov_solve(init, y, opts);
    CHECK(flatten(a.theta_hat) == flatten(b.theta_hat));
    CHECK(a.objective_history == b.objective_history);
    CHECK(a.iterations == b.iterations);
    CHECK(a.reinit_count == b.reinit_count);
}

TEST_CASE("solve: chirp widths are reported positive") {
    std::mt19937_64 rng(31);
    ChirpParams truth = oracles::random_chirp(rng, 1);
    Measurement y = forward(ModelInstance(truth), FrequencyGrid(8));
    ChirpParams init = truth;
    init.components[0].center += 0.01;
    SolveOptions opts;
    opts.max_iters = 500;
    SolveReport rep = nesterov_solve(ModelInstance(init), y, opts);
    for (const auto& c : std::get<ChirpParams>(rep.theta_hat).components)
        CHECK(c.width > 0.0);
}

TEST_CASE("solve: input validation") {
    std::mt19937_64 rng(32);
    ModelInstance m = oracles::random_point(rng);
    Measurement y = forward(m, FrequencyGrid(4));
    SolveOptions opts;
    opts.max_iters = 0;
    CHECK_THROWS_AS(nesterov_solve(m, y, opts), std::invalid_argument);
    opts.max_iters = 10;
    opts.tol_residual = 0.0;
    CHECK_THROWS_AS(nesterov_solve(m, y, opts), std::invalid_argument);
    opts.tol_residual = 1e-7;
    Measurement bad = y;
    bad.values[0] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(nesterov_solve(m, bad, opts), std::invalid_argument);
}
