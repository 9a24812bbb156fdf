#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "dynrb/assembly.hpp"
#include "dynrb/elements.hpp"
#include "dynrb/loads.hpp"
#include "dynrb/mesh.hpp"
#include "oracles.hpp"

using namespace dynrb;

TEST_CASE("structured mesh counts and volumes") {
    const Mesh m1 = build_structured_mesh(1, 1, 1.0, 1.0, 0.01);
    CHECK(m1.n_nodes() == 4);
    CHECK(m1.n_elements() == 1);
    CHECK(m1.element_volumes[0] == doctest::Approx(0.01).epsilon(1e-14));

    const Mesh m2 = build_structured_mesh(2, 1, 2.0, 1.0, 0.01);
    CHECK(m2.n_nodes() == 6);
    CHECK(m2.n_elements() == 2);

    const Mesh m3 = build_structured_mesh(60, 30, 4.0, 2.0, 0.01);
    CHECK(m3.n_nodes() == 1891);
    CHECK(m3.n_elements() == 1800);
    CHECK(m3.total_volume() == doctest::Approx(4.0 * 2.0 * 0.01).epsilon(1e-12));
}

TEST_CASE("mesh connectivity is valid and counter-clockwise") {
    const Mesh m = build_structured_mesh(3, 2, 1.5, 1.0, 0.02);
    for (const auto& conn : m.element_connectivity) {
        double area2 = 0.0;
        for (int k = 0; k < 4; ++k) {
            CHECK(conn[k] >= 0);
            CHECK(conn[k] < m.n_nodes());
            const auto& p = m.node_coords[conn[k]];
            const auto& q = m.node_coords[conn[(k + 1) % 4]];
            area2 += p[0] * q[1] - q[0] * p[1];
        }
        CHECK(area2 > 0.0); // shoelace area, positive orientation
    }
}

TEST_CASE("mesh rejects bad dimensions") {
    CHECK_THROWS_AS(build_structured_mesh(0, 1, 1, 1, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(build_structured_mesh(1, 1, -1, 1, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(build_structured_mesh(1, 1, 1, 1, 0.0), std::invalid_argument);
}

TEST_CASE("element stiffness: symmetry, rigid modes, refined-quadrature oracle") {
    const ElemMat K = element_stiffness(1.0, 0.3, 1.0, 1.0, 1.0);
    CHECK((K - K.transpose()).norm() <= 1e-12 * K.norm());

    ElemVec tx = ElemVec::Zero(), ty = ElemVec::Zero(), rot = ElemVec::Zero();
    const double xs[4] = {0, 1, 1, 0};
    const double ys[4] = {0, 0, 1, 1};
    for (int k = 0; k < 4; ++k) {
        tx[2 * k] = 1.0;
        ty[2 * k + 1] = 1.0;
        rot[2 * k] = -ys[k];
        rot[2 * k + 1] = xs[k];
    }
    CHECK((K * tx).norm() < 1e-9 * K.norm());
    CHECK((K * ty).norm() < 1e-9 * K.norm());
    CHECK((K * rot).norm() < 1e-9 * K.norm());

    Eigen::SelfAdjointEigenSolver<ElemMat> eig(K);
    int zero_modes = 0;
    for (int i = 0; i < 8; ++i)
        if (std::abs(eig.eigenvalues()[i]) < 1e-10 * K.norm()) ++zero_modes;
    CHECK(zero_modes == 3);

    const auto K_ref = testing::element_stiffness_refquad(1.0, 0.3, 1.0, 1.0, 1.0);
    CHECK((K - K_ref).norm() <= 1e-10 * K_ref.norm());

    // also a stretched element against the oracle
    const ElemMat K2 = element_stiffness(210e9, 0.25, 0.01, 0.05, 0.02);
    const auto K2_ref = testing::element_stiffness_refquad(210e9, 0.25, 0.01, 0.05, 0.02);
    CHECK((K2 - K2_ref).norm() <= 1e-10 * K2_ref.norm());

    CHECK_THROWS_AS(element_stiffness(1.0, 0.5, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(element_stiffness(-1.0, 0.3, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("element mass: conservation, symmetry, positive definiteness") {
    const ElemMat M = element_mass(1.0, 1.0, 1.0, 1.0);
    double mass_x = 0.0, mass_y = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            mass_x += M(2 * a, 2 * b);
            mass_y += M(2 * a + 1, 2 * b + 1);
        }
    CHECK(mass_x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mass_y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((M - M.transpose()).norm() <= 1e-12 * M.norm());

    const ElemMat M2 = element_mass(7800.0, 0.01, 0.04, 0.04);
    Eigen::SelfAdjointEigenSolver<ElemMat> eig(M2);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);

    CHECK_THROWS_AS(element_mass(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

namespace {

SystemMatrices assemble_uniform(const Mesh& mesh, double b, const MaterialParams& mat) {
    return assemble(mesh, DensityField::uniform(mesh, b), mat);
}

} // namespace

TEST_CASE("assembly: scaling, damping, ersatz floor") {
    Mesh mesh = build_structured_mesh(3, 2, 0.3, 0.2, 0.01);
    fix_edge(mesh, Edge::Left);
    MaterialParams mat;
    mat.E0 = 70e9;
    mat.alpha_M = 0.0;
    mat.alpha_K = 0.0;

    const SystemMatrices full = assemble_uniform(mesh, 1.0, mat);
    CHECK(full.C.norm() == 0.0);

    // b = 1 leaves the element stiffness unscaled
    Mat raw = Mat::Zero(full.n_free, full.n_free);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& dofs = full.elem_free_dofs[e];
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                if (dofs[r] >= 0 && dofs[c] >= 0) raw(dofs[r], dofs[c]) += full.Ke0(r, c);
    }
    CHECK((Mat(full.K) - raw).norm() <= 1e-12 * raw.norm());

    const SystemMatrices empty = assemble_uniform(mesh, 0.0, mat);
    CHECK((Mat(empty.K) - mat.ersatz * Mat(full.K)).norm() <= 1e-12 * Mat(full.K).norm());

    mat.alpha_M = 3.0;
    mat.alpha_K = 2e-4;
    const SystemMatrices damped = assemble_uniform(mesh, 0.7, mat);
    CHECK((Mat(damped.C) - (3.0 * Mat(damped.M) + 2e-4 * Mat(damped.K))).norm() <=
          1e-12 * Mat(damped.C).norm());

    // linear in the element scale factors: doubling E0 doubles K
    MaterialParams mat2 = mat;
    mat2.E0 = 2.0 * mat.E0;
    const SystemMatrices doubled = assemble_uniform(mesh, 0.7, mat2);
    CHECK((Mat(doubled.K) - 2.0 * Mat(damped.K)).norm() <= 1e-12 * Mat(damped.K).norm());
}

TEST_CASE("assembly: symmetry and definiteness on free dofs") {
    Mesh mesh = build_structured_mesh(4, 3, 0.4, 0.3, 0.01);
    fix_edge(mesh, Edge::Bottom);
    MaterialParams mat;
    const SystemMatrices sys = assemble_uniform(mesh, 0.5, mat);

    const Mat M = Mat(sys.M), K = Mat(sys.K);
    CHECK((M - M.transpose()).norm() <= 1e-12 * M.norm());
    CHECK((K - K.transpose()).norm() <= 1e-12 * K.norm());

    Eigen::SelfAdjointEigenSolver<Mat> em(M), ek(K);
    CHECK(em.eigenvalues().minCoeff() > 0.0);
    CHECK(ek.eigenvalues().minCoeff() > -1e-10 * ek.eigenvalues().maxCoeff());
}

TEST_CASE("assembly: refinement keeps volume and mass invariant") {
    MaterialParams mat;
    double mass[2], volume[2];
    int idx = 0;
    for (int scale : {1, 3}) {
        const Mesh mesh = build_structured_mesh(4 * scale, 2 * scale, 0.8, 0.4, 0.01);
        const SystemMatrices sys = assemble_uniform(mesh, 0.6, mat);
        Vec iota_x = Vec::Zero(sys.n_free);
        for (int n = 0; n < mesh.n_nodes(); ++n) {
            const int fd = sys.free_of_full[Mesh::dof_id(n, 0)];
            if (fd >= 0) iota_x[fd] = 1.0;
        }
        mass[idx] = iota_x.dot(sys.M * iota_x);
        volume[idx] = 0.0;
        for (int e = 0; e < mesh.n_elements(); ++e)
            volume[idx] += mesh.element_volumes[e] * sys.Vbar[e];
        ++idx;
    }
    CHECK(mass[0] == doctest::Approx(mass[1]).epsilon(1e-10));
    CHECK(volume[0] == doctest::Approx(volume[1]).epsilon(1e-10));
}

TEST_CASE("assembly: all-fixed structure is rejected") {
    Mesh mesh = build_structured_mesh(1, 1, 1.0, 1.0, 0.01);
    fix_edge(mesh, Edge::Left);
    fix_edge(mesh, Edge::Right);
    MaterialParams mat;
    CHECK_THROWS_AS(assemble_uniform(mesh, 0.5, mat), std::invalid_argument);
}

TEST_CASE("lumped masses enter the mass diagonal only") {
    Mesh mesh = build_structured_mesh(3, 2, 0.3, 0.2, 0.01);
    fix_edge(mesh, Edge::Left);
    MaterialParams mat;
    const DensityField dens = DensityField::uniform(mesh, 0.5);
    const SystemMatrices plain = assemble(mesh, dens, mat);
    const int node = mesh.node_id(3, 1);
    const SystemMatrices lumped = assemble(mesh, dens, mat, {{node, 12.5}});

    Mat diff = Mat(lumped.M) - Mat(plain.M);
    for (int comp = 0; comp < 2; ++comp) {
        const int fd = plain.free_of_full[Mesh::dof_id(node, comp)];
        CHECK(diff(fd, fd) == doctest::Approx(12.5).epsilon(1e-14));
        diff(fd, fd) = 0.0;
    }
    CHECK(diff.norm() == 0.0);
}

TEST_CASE("ground acceleration load equals -(M iota + lumped) a_g") {
    Mesh mesh = build_structured_mesh(2, 2, 0.2, 0.2, 0.01);
    fix_edge(mesh, Edge::Bottom);
    MaterialParams mat;
    LoadCase load;
    load.kind = LoadCase::Kind::GroundAcceleration;
    load.direction = 0;
    load.amplitude = 3.0;
    load.omega = 5.0;
    load.lumped_masses.push_back({mesh.node_id(1, 2), 7.0});

    const SystemMatrices sys =
        assemble(mesh, DensityField::uniform(mesh, 0.8), mat, load.lumped_masses);
    const TimeGrid grid{4, 0.01};
    const auto f = sample_loads(sys, load, grid);

    // full-space influence vector restricted to free rows
    Vec iota_full = Vec::Zero(mesh.n_dofs());
    for (int n = 0; n < mesh.n_nodes(); ++n) iota_full[Mesh::dof_id(n, 0)] = 1.0;
    // assemble M iota from element contributions, fixed columns included
    Vec mi = Vec::Zero(sys.n_free);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto dofs = mesh.element_dofs(e);
        for (int r = 0; r < 8; ++r) {
            const int fr = sys.free_of_full[dofs[r]];
            if (fr < 0) continue;
            for (int c = 0; c < 8; ++c)
                mi[fr] += sys.Vbar[e] * sys.Me0(r, c) * iota_full[dofs[c]];
        }
    }
    // the lumped mass sits on a free dof of the excited direction
    mi[sys.free_of_full[Mesh::dof_id(mesh.node_id(1, 2), 0)]] += 7.0;

    for (int i = 0; i <= 4; ++i) {
        const double ag = 3.0 * std::sin(5.0 * (i * grid.dt));
        CHECK((f[i] + ag * mi).norm() <= 1e-12 * (mi.norm() * 3.0 + 1.0));
    }
}
