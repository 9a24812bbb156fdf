#pragma once

#include "dynrb/mesh.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

struct MaterialParams {
    double E0 = 200e9;      // Pa
    double nu = 0.3;
    double rho0 = 7800.0;   // kg/m^3
    double chi = 8.0;       // projection sharpness
    double eta = 0.5;       // projection threshold
    double kappa = 8.0;     // RAMP penalty
    double ersatz = 1e-4;
    double alpha_M = 10.0;  // Rayleigh mass coefficient, 1/s
    double alpha_K = 1e-5;  // Rayleigh stiffness coefficient, s

    void validate() const;
};

/// Per-element design variables on a mesh, each in [0,1].
struct DensityField {
    const Mesh* mesh = nullptr;
    Vec values;

    static DensityField uniform(const Mesh& mesh, double value);
    void validate() const;
};

/// Smoothed threshold projection; identity in the chi -> 0 limit.
double volume_projection(double b, double chi, double eta);
double volume_projection_deriv(double b, double chi, double eta);

/// RAMP stiffness interpolation V / (1 + kappa (1 - V)).
double stiffness_interp(double V, double kappa);
double stiffness_interp_deriv(double V, double kappa);

/// Ersatz floor: eps + (1 - eps) x.
double ersatz_blend(double x, double ersatz);

struct InterpValues {
    double Vbar; // mass scale
    double Ebar; // stiffness scale
};
struct InterpDerivs {
    double dVbar_db;
    double dEbar_db;
};

InterpValues interp_values(double b, const MaterialParams& p);
InterpDerivs interp_derivatives(double b, const MaterialParams& p);

/// Linear radius-based density filter (optional, off by default). The weight
/// matrix is row-normalized; chain() applies its transpose for gradients.
class DensityFilter {
  public:
    DensityFilter() = default;
    DensityFilter(const Mesh& mesh, double radius);

    bool enabled() const { return weights_.rows() > 0; }
    Vec apply(const Vec& b) const;
    Vec chain(const Vec& grad) const;

  private:
    SpMat weights_;
};

} // namespace dynrb
