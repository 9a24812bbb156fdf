#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <functional>
#include <random>
#include <vector>

#include "dynrb/assembly.hpp"
#include "dynrb/types.hpp"

namespace dynrb::testing {

inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * (2.0 * unit_draw(rng) - 1.0);
    return v;
}

inline Mat random_spd(int n, std::mt19937_64& rng, double scale = 1.0) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 2.0 * unit_draw(rng) - 1.0;
    return scale * (a * a.transpose() + n * Mat::Identity(n, n));
}

/// SystemMatrices carrying only the assembled operators; enough for the time
/// integrator, the adjoint recursions and the projections.
inline SystemMatrices make_dense_system(const Mat& m, const Mat& c, const Mat& k) {
    SystemMatrices sys;
    sys.n_free = static_cast<int>(m.rows());
    sys.M = m.sparseView();
    sys.C = c.sparseView();
    sys.K = k.sparseView();
    return sys;
}

inline SystemMatrices make_sdof(double m, double c, double k) {
    Mat mm(1, 1), cc(1, 1), kk(1, 1);
    mm << m;
    cc << c;
    kk << k;
    return make_dense_system(mm, cc, kk);
}

/// Average-acceleration Newmark in displacement form; an independent
/// reference for the alpha = 0 integrator.
struct NewmarkReference {
    std::vector<Vec> d, v, a;
};

inline NewmarkReference newmark_average_acceleration(const Mat& M, const Mat& C, const Mat& K,
                                                     const std::vector<Vec>& f, double dt,
                                                     const Vec& d0, const Vec& v0) {
    NewmarkReference out;
    const int nt = static_cast<int>(f.size()) - 1;
    const Mat Keff = K + (4.0 / (dt * dt)) * M + (2.0 / dt) * C;
    const Eigen::LLT<Mat> solver(Keff);
    const Eigen::LLT<Mat> msolver(M);
    out.d.push_back(d0);
    out.v.push_back(v0);
    out.a.push_back(msolver.solve(f[0] - C * v0 - K * d0));
    for (int i = 1; i <= nt; ++i) {
        const Vec rhs = f[i] +
                        M * ((4.0 / (dt * dt)) * out.d[i - 1] + (4.0 / dt) * out.v[i - 1] +
                             out.a[i - 1]) +
                        C * ((2.0 / dt) * out.d[i - 1] + out.v[i - 1]);
        const Vec di = solver.solve(rhs);
        const Vec ai =
            (4.0 / (dt * dt)) * (di - out.d[i - 1]) - (4.0 / dt) * out.v[i - 1] - out.a[i - 1];
        const Vec vi = out.v[i - 1] + 0.5 * dt * (out.a[i - 1] + ai);
        out.d.push_back(di);
        out.v.push_back(vi);
        out.a.push_back(ai);
    }
    return out;
}

/// Plane-stress quad stiffness by generic isoparametric assembly with 4x4
/// Gauss quadrature; independent of the production element routine.
inline Eigen::Matrix<double, 8, 8> element_stiffness_refquad(double E, double nu,
                                                             double thickness, double dx,
                                                             double dy) {
    const double gp[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                          0.8611363115940526};
    const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                          0.3478548451374538};
    const double xs[4] = {0.0, dx, dx, 0.0};
    const double ys[4] = {0.0, 0.0, dy, dy};
    const double xin[4] = {-1.0, 1.0, 1.0, -1.0};
    const double etn[4] = {-1.0, -1.0, 1.0, 1.0};

    Eigen::Matrix3d D;
    const double c = E / (1.0 - nu * nu);
    D << c, c * nu, 0, c * nu, c, 0, 0, 0, c * (1.0 - nu) / 2.0;

    Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double xi = gp[a], et = gp[b];
            Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
            double dn_dxi[4], dn_det[4];
            for (int k = 0; k < 4; ++k) {
                dn_dxi[k] = 0.25 * xin[k] * (1.0 + etn[k] * et);
                dn_det[k] = 0.25 * etn[k] * (1.0 + xin[k] * xi);
                J(0, 0) += dn_dxi[k] * xs[k];
                J(0, 1) += dn_dxi[k] * ys[k];
                J(1, 0) += dn_det[k] * xs[k];
                J(1, 1) += dn_det[k] * ys[k];
            }
            const Eigen::Matrix2d Jinv = J.inverse();
            Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
            for (int k = 0; k < 4; ++k) {
                const double dn_dx = Jinv(0, 0) * dn_dxi[k] + Jinv(0, 1) * dn_det[k];
                const double dn_dy = Jinv(1, 0) * dn_dxi[k] + Jinv(1, 1) * dn_det[k];
                B(0, 2 * k) = dn_dx;
                B(1, 2 * k + 1) = dn_dy;
                B(2, 2 * k) = dn_dy;
                B(2, 2 * k + 1) = dn_dx;
            }
            K += gw[a] * gw[b] * thickness * J.determinant() * B.transpose() * D * B;
        }
    }
    return K;
}

inline double central_fd(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace dynrb::testing
