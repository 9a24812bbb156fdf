#include <doctest.h>

#include <random>

#include "dynrb/material.hpp"
#include "dynrb/mesh.hpp"
#include "oracles.hpp"

using namespace dynrb;

TEST_CASE("volume projection endpoints and threshold") {
    for (double chi : {0.5, 4.0, 8.0, 16.0}) {
        for (double eta : {0.3, 0.5, 0.7}) {
            CHECK(volume_projection(0.0, chi, eta) == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(volume_projection(1.0, chi, eta) == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    CHECK(volume_projection(0.5, 8.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("volume projection approaches identity as chi -> 0") {
    for (double b : {0.0, 0.2, 0.5, 0.77, 1.0})
        CHECK(std::abs(volume_projection(b, 1e-6, 0.5) - b) < 1e-5);
}

TEST_CASE("RAMP interpolation") {
    CHECK(stiffness_interp(1.0, 3.0) == doctest::Approx(1.0));
    CHECK(stiffness_interp(0.0, 3.0) == doctest::Approx(0.0));
    CHECK(stiffness_interp(0.5, 3.0) == doctest::Approx(0.2).epsilon(1e-14));
    for (double v : {0.1, 0.4, 0.9}) CHECK(stiffness_interp(v, 0.0) == doctest::Approx(v));
}

TEST_CASE("ersatz blend") {
    CHECK(ersatz_blend(0.0, 1e-4) == doctest::Approx(1e-4));
    CHECK(ersatz_blend(1.0, 1e-4) == doctest::Approx(1.0));
    CHECK(ersatz_blend(0.5, 1e-4) == doctest::Approx(0.50005).epsilon(1e-14));
}

TEST_CASE("interpolation derivatives match central differences") {
    MaterialParams p;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        p.chi = 1.0 + 15.0 * testing::unit_draw(rng);
        p.eta = 0.3 + 0.4 * testing::unit_draw(rng);
        p.kappa = 8.0 * testing::unit_draw(rng);
        const double b = trial < 3 ? std::array{0.1, 0.5, 0.9}[trial]
                                   : 0.05 + 0.9 * testing::unit_draw(rng);
        const auto derivs = interp_derivatives(b, p);
        const double h = 1e-7;
        const double fd_v = testing::central_fd(
            [&](double x) { return interp_values(x, p).Vbar; }, b, h);
        const double fd_e = testing::central_fd(
            [&](double x) { return interp_values(x, p).Ebar; }, b, h);
        CHECK(derivs.dVbar_db == doctest::Approx(fd_v).epsilon(1e-6));
        CHECK(derivs.dEbar_db == doctest::Approx(fd_e).epsilon(1e-6));
        CHECK(derivs.dVbar_db > 0.0);
        CHECK(derivs.dEbar_db > 0.0);
    }
}

TEST_CASE("kappa = 0, chi -> 0 derivative limit") {
    MaterialParams p;
    p.kappa = 0.0;
    p.chi = 1e-6;
    const auto derivs = interp_derivatives(0.37, p);
    CHECK(std::abs(derivs.dEbar_db - (1.0 - p.ersatz)) < 1e-5);
}

TEST_CASE("interpolation is monotone with range [ersatz, 1]") {
    MaterialParams p;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        p.chi = 1.0 + 15.0 * testing::unit_draw(rng);
        p.eta = 0.3 + 0.4 * testing::unit_draw(rng);
        p.kappa = 8.0 * testing::unit_draw(rng);
        double b1 = testing::unit_draw(rng), b2 = testing::unit_draw(rng);
        if (b1 > b2) std::swap(b1, b2);
        if (b2 - b1 < 1e-9) continue;
        const auto v1 = interp_values(b1, p), v2 = interp_values(b2, p);
        CHECK(v1.Vbar < v2.Vbar);
        CHECK(v1.Ebar < v2.Ebar);
        for (const auto& v : {v1, v2}) {
            CHECK(v.Vbar >= p.ersatz);
            CHECK(v.Vbar <= 1.0);
            CHECK(v.Ebar >= p.ersatz);
            CHECK(v.Ebar <= 1.0);
        }
    }
}

TEST_CASE("material parameter validation") {
    MaterialParams p;
    p.eta = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = MaterialParams{};
    p.ersatz = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = MaterialParams{};
    p.nu = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("density field validation") {
    const Mesh mesh = build_structured_mesh(2, 2, 1.0, 1.0, 0.01);
    DensityField f = DensityField::uniform(mesh, 0.5);
    CHECK_NOTHROW(f.validate());
    f.values[1] = 1.5;
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
    f = DensityField::uniform(mesh, 0.5);
    f.values.conservativeResize(3);
    CHECK_THROWS_AS(f.validate(), std::invalid_argument);
}

TEST_CASE("density filter: partition of unity and transpose chain") {
    const Mesh mesh = build_structured_mesh(6, 4, 0.6, 0.4, 0.01);
    const DensityFilter filter(mesh, 0.25);
    const Vec ones = Vec::Ones(mesh.n_elements());
    CHECK((filter.apply(ones) - ones).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(3);
    const Vec g = testing::random_vec(mesh.n_elements(), rng);
    const Vec x = testing::random_vec(mesh.n_elements(), rng);
    // <W^T g, x> == <g, W x>
    CHECK(filter.chain(g).dot(x) == doctest::Approx(g.dot(filter.apply(x))).epsilon(1e-12));
}
