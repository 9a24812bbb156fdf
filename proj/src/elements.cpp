#include "dynrb/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace dynrb {

namespace {

// Natural coordinates of the CCW node order.
constexpr double kXi[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double kEta[4] = {-1.0, -1.0, 1.0, 1.0};

} // namespace

ElemMat element_stiffness(double E, double nu, double thickness, double dx, double dy) {
    if (E <= 0.0) throw std::invalid_argument("element_stiffness: E must be positive");
    if (nu < 0.0 || nu >= 0.5)
        throw std::invalid_argument("element_stiffness: nu must be in [0, 0.5)");
    if (thickness <= 0.0 || dx <= 0.0 || dy <= 0.0)
        throw std::invalid_argument("element_stiffness: dimensions must be positive");

    const double c = E / (1.0 - nu * nu);
    Eigen::Matrix3d D;
    D << c, c * nu, 0.0,
         c * nu, c, 0.0,
         0.0, 0.0, c * (1.0 - nu) / 2.0;

    const double g = 1.0 / std::sqrt(3.0);
    const double det_j = dx * dy / 4.0;
    ElemMat K = ElemMat::Zero();
    for (int gx = 0; gx < 2; ++gx) {
        for (int gy = 0; gy < 2; ++gy) {
            const double xi = (gx == 0 ? -g : g);
            const double et = (gy == 0 ? -g : g);
            Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
            for (int a = 0; a < 4; ++a) {
                const double dn_dx = 0.25 * kXi[a] * (1.0 + kEta[a] * et) * (2.0 / dx);
                const double dn_dy = 0.25 * kEta[a] * (1.0 + kXi[a] * xi) * (2.0 / dy);
                B(0, 2 * a) = dn_dx;
                B(1, 2 * a + 1) = dn_dy;
                B(2, 2 * a) = dn_dy;
                B(2, 2 * a + 1) = dn_dx;
            }
            K += thickness * det_j * B.transpose() * D * B;
        }
    }
    // enforce exact symmetry against rounding drift
    K = 0.5 * (K + K.transpose()).eval();
    return K;
}

ElemMat element_mass(double rho, double thickness, double dx, double dy) {
    if (rho <= 0.0) throw std::invalid_argument("element_mass: rho must be positive");
    if (thickness <= 0.0 || dx <= 0.0 || dy <= 0.0)
        throw std::invalid_argument("element_mass: dimensions must be positive");

    const double g = 1.0 / std::sqrt(3.0);
    const double det_j = dx * dy / 4.0;
    ElemMat M = ElemMat::Zero();
    for (int gx = 0; gx < 2; ++gx) {
        for (int gy = 0; gy < 2; ++gy) {
            const double xi = (gx == 0 ? -g : g);
            const double et = (gy == 0 ? -g : g);
            double N[4];
            for (int a = 0; a < 4; ++a)
                N[a] = 0.25 * (1.0 + kXi[a] * xi) * (1.0 + kEta[a] * et);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    const double m = rho * thickness * det_j * N[a] * N[b];
                    M(2 * a, 2 * b) += m;
                    M(2 * a + 1, 2 * b + 1) += m;
                }
            }
        }
    }
    M = 0.5 * (M + M.transpose()).eval();
    return M;
}

} // namespace dynrb
