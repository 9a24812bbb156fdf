#pragma once

#include "dynrb/types.hpp"

namespace dynrb {

/// Plane-stress bilinear quad stiffness, 2x2 Gauss quadrature, for a
/// rectangular dx-by-dy element. Node order counter-clockwise, dofs
/// (u_x, u_y) interleaved.
ElemMat element_stiffness(double E, double nu, double thickness, double dx, double dy);

/// Consistent mass for the same element.
ElemMat element_mass(double rho, double thickness, double dx, double dy);

} // namespace dynrb
