#include <doctest.h>

#include <cmath>
#include <random>

#include "dynrb/hht.hpp"
#include "oracles.hpp"

using namespace dynrb;

namespace {

std::vector<Vec> zero_loads(int n_free, int nt) {
    return std::vector<Vec>(nt + 1, Vec::Zero(n_free));
}

SystemMatrices sdof_oscillator() {
    const double w = 2.0 * M_PI;
    return testing::make_sdof(1.0, 0.0, w * w);
}

} // namespace

TEST_CASE("hht parameter family") {
    const HHTParams p = HHTParams::from_alpha(0.05);
    CHECK(p.beta == doctest::Approx((1.05 * 1.05) / 4.0));
    CHECK(p.delta == doctest::Approx(0.55));
    CHECK_THROWS_AS(HHTParams::from_alpha(0.4), std::invalid_argument);
    HHTParams bad = p;
    bad.beta = 0.3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("effective operators on a scalar system") {
    const SystemMatrices sys = testing::make_sdof(1.0, 0.0, 1.0);
    const TimeGrid grid{1, 0.1};
    const HHTParams hht = HHTParams::from_alpha(0.0);
    const auto eff = effective_operators(sys, grid, hht);
    CHECK(Mat(eff.Mhat1)(0, 0) == doctest::Approx(1.0025).epsilon(1e-14));
    CHECK(Mat(eff.Mhat0)(0, 0) == doctest::Approx(0.0025).epsilon(1e-14));
    CHECK(Mat(eff.Chat0)(0, 0) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("initial acceleration") {
    const SystemMatrices trivial = testing::make_sdof(2.0, 0.0, 8.0);
    Vec zero = Vec::Zero(1), d0(1), v0 = Vec::Zero(1);
    d0 << 1.0;
    CHECK(initial_acceleration(trivial, zero, Vec::Zero(1), zero)[0] == 0.0);
    CHECK(initial_acceleration(trivial, zero, d0, v0)[0] == doctest::Approx(-4.0));

    std::mt19937_64 rng(17);
    const int n = 10;
    const SystemMatrices sys = testing::make_dense_system(
        testing::random_spd(n, rng), testing::random_spd(n, rng, 0.1),
        testing::random_spd(n, rng, 2.0));
    const Vec f0 = testing::random_vec(n, rng), d = testing::random_vec(n, rng),
              v = testing::random_vec(n, rng);
    const Vec a0 = initial_acceleration(sys, f0, d, v);
    CHECK((sys.M * a0 + sys.C * v + sys.K * d - f0).norm() < 1e-10 * (f0.norm() + 1.0));
}

TEST_CASE("zero load and zero initial conditions give a zero trajectory") {
    std::mt19937_64 rng(2);
    const int n = 6;
    const SystemMatrices sys = testing::make_dense_system(
        testing::random_spd(n, rng), testing::random_spd(n, rng, 0.05),
        testing::random_spd(n, rng, 3.0));
    const TimeGrid grid{20, 0.01};
    const HHTParams hht = HHTParams::from_alpha(0.05);
    const auto eff = effective_operators(sys, grid, hht);
    const auto traj = hht_solve(sys, eff, zero_loads(n, 20), grid, hht, Vec::Zero(n),
                                Vec::Zero(n));
    for (int i = 0; i <= 20; ++i) {
        CHECK(traj.d[i].norm() == 0.0);
        CHECK(traj.v[i].norm() == 0.0);
        CHECK(traj.a[i].norm() == 0.0);
    }
}

TEST_CASE("undamped oscillator: accuracy and second-order convergence") {
    const SystemMatrices sys = sdof_oscillator();
    const HHTParams hht = HHTParams::from_alpha(0.05);
    Vec d0(1), v0(1);
    d0 << 1.0;
    v0 << 0.0;

    auto max_error = [&](int nt) {
        const TimeGrid grid = TimeGrid::from_total(nt, 1.0);
        const auto eff = effective_operators(sys, grid, hht);
        const auto traj = hht_solve(sys, eff, zero_loads(1, nt), grid, hht, d0, v0);
        double err = 0.0;
        for (int i = 0; i <= nt; ++i)
            err = std::max(err, std::abs(traj.d[i][0] - std::cos(2.0 * M_PI * i * grid.dt)));
        return err;
    };

    const double e200 = max_error(200);
    const double e400 = max_error(400);
    CHECK(e200 < 5e-3);
    const double ratio = e200 / e400;
    CHECK(ratio >= 3.4);
    CHECK(ratio <= 4.6);
}

TEST_CASE("step load settles to the static solution") {
    const double w = 2.0 * M_PI; // 1 Hz
    const double zeta = 0.1;
    const SystemMatrices sys = testing::make_sdof(1.0, 2.0 * zeta * w, w * w);
    const double t_damped = 2.0 * M_PI / (w * std::sqrt(1.0 - zeta * zeta));
    const int nt = 4000;
    const TimeGrid grid = TimeGrid::from_total(nt, 10.0 * t_damped);
    const HHTParams hht = HHTParams::from_alpha(0.05);
    const auto eff = effective_operators(sys, grid, hht);
    std::vector<Vec> loads(nt + 1, Vec::Constant(1, 3.0));
    const auto traj =
        hht_solve(sys, eff, std::move(loads), grid, hht, Vec::Zero(1), Vec::Zero(1));
    const double d_static = 3.0 / (w * w);
    CHECK(std::abs(traj.d[nt][0] - d_static) < 0.01 * d_static);
}

TEST_CASE("alpha = 0 matches an independent average-acceleration reference") {
    std::mt19937_64 rng(9);
    const int n = 6, nt = 40;
    const Mat M = testing::random_spd(n, rng);
    const Mat C = testing::random_spd(n, rng, 0.02);
    const Mat K = testing::random_spd(n, rng, 4.0);
    const SystemMatrices sys = testing::make_dense_system(M, C, K);
    const TimeGrid grid{nt, 0.02};
    const HHTParams hht = HHTParams::from_alpha(0.0);
    const auto eff = effective_operators(sys, grid, hht);

    std::vector<Vec> loads;
    for (int i = 0; i <= nt; ++i) loads.push_back(testing::random_vec(n, rng));
    const Vec d0 = testing::random_vec(n, rng, 0.1), v0 = testing::random_vec(n, rng, 0.1);

    const auto traj = hht_solve(sys, eff, loads, grid, hht, d0, v0);
    const auto ref = testing::newmark_average_acceleration(M, C, K, loads, grid.dt, d0, v0);
    double scale = 0.0;
    for (int i = 0; i <= nt; ++i) scale = std::max(scale, ref.d[i].norm());
    for (int i = 0; i <= nt; ++i) {
        CHECK((traj.d[i] - ref.d[i]).norm() <= 1e-10 * scale);
        CHECK((traj.v[i] - ref.v[i]).norm() <= 1e-8 * scale / grid.dt);
    }
}

TEST_CASE("algorithmic damping never grows free-vibration energy") {
    std::mt19937_64 rng(21);
    const int n = 5;
    const Mat M = testing::random_spd(n, rng);
    const Mat K = testing::random_spd(n, rng, 5.0);
    const SystemMatrices sys = testing::make_dense_system(M, Mat::Zero(n, n), K);
    const HHTParams hht = HHTParams::from_alpha(0.05);
    const Vec d0 = testing::random_vec(n, rng);

    for (double dt : {1e-3, 1e-2, 1e-1, 1.0}) {
        const int nt = 300;
        const TimeGrid grid{nt, dt};
        const auto eff = effective_operators(sys, grid, hht);
        const auto traj =
            hht_solve(sys, eff, zero_loads(n, nt), grid, hht, d0, Vec::Zero(n));
        double prev = 0.5 * traj.v[0].dot(M * traj.v[0]) + 0.5 * traj.d[0].dot(K * traj.d[0]);
        for (int i = 1; i <= nt; ++i) {
            const double energy =
                0.5 * traj.v[i].dot(M * traj.v[i]) + 0.5 * traj.d[i].dot(K * traj.d[i]);
            CHECK(energy <= prev * (1.0 + 1e-12));
            prev = energy;
        }
    }
}

TEST_CASE("stored steps satisfy the blended balance and the update relations") {
    std::mt19937_64 rng(31);
    const int n = 7, nt = 30;
    const SystemMatrices sys = testing::make_dense_system(
        testing::random_spd(n, rng), testing::random_spd(n, rng, 0.05),
        testing::random_spd(n, rng, 3.0));
    const TimeGrid grid{nt, 0.015};
    const HHTParams hht = HHTParams::from_alpha(0.05);
    const auto eff = effective_operators(sys, grid, hht);
    std::vector<Vec> loads;
    for (int i = 0; i <= nt; ++i) loads.push_back(testing::random_vec(n, rng, 2.0));
    const auto traj = hht_solve(sys, eff, loads, grid, hht, Vec::Zero(n), Vec::Zero(n));

    const double al = hht.alpha, b = hht.beta, dl = hht.delta, dt = grid.dt;
    double ref = 1.0;
    for (int i = 0; i <= nt; ++i) ref = std::max(ref, traj.f[i].norm());
    for (int i = 1; i <= nt; ++i) {
        const Vec balance = sys.M * traj.a[i] + (1 - al) * (sys.C * traj.v[i]) +
                            al * (sys.C * traj.v[i - 1]) + (1 - al) * (sys.K * traj.d[i]) +
                            al * (sys.K * traj.d[i - 1]) - (1 - al) * traj.f[i] -
                            al * traj.f[i - 1];
        CHECK(balance.norm() <= 1e-9 * ref);

        const Vec dv = traj.v[i] - traj.v[i - 1] -
                       ((1 - dl) * traj.a[i - 1] + dl * traj.a[i]) * dt;
        const Vec dd = traj.d[i] - traj.d[i - 1] - traj.v[i - 1] * dt -
                       ((0.5 - b) * traj.a[i - 1] + b * traj.a[i]) * dt * dt;
        const double state_ref =
            traj.v[i].norm() + traj.d[i].norm() + traj.a[i].norm() * dt + 1e-30;
        CHECK(dv.norm() <= 1e-10 * state_ref);
        CHECK(dd.norm() <= 1e-10 * state_ref);
    }
}

TEST_CASE("time grid and input validation") {
    CHECK_THROWS_AS(TimeGrid::from_total(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::from_total(10, 0.0), std::invalid_argument);

    const SystemMatrices sys = testing::make_sdof(1.0, 0.0, 1.0);
    const TimeGrid grid{3, 0.1};
    const HHTParams hht = HHTParams::from_alpha(0.0);
    const auto eff = effective_operators(sys, grid, hht);
    CHECK_THROWS_AS(
        hht_solve(sys, eff, zero_loads(1, 5), grid, hht, Vec::Zero(1), Vec::Zero(1)),
        std::invalid_argument);
    CHECK_THROWS_AS(
        hht_solve(sys, eff, zero_loads(1, 3), grid, hht, Vec::Zero(2), Vec::Zero(1)),
        std::invalid_argument);
}
