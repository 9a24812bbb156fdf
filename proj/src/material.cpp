#include "dynrb/material.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dynrb {

void MaterialParams::validate() const {
    if (E0 <= 0.0) throw std::invalid_argument("material: E0 must be positive");
    if (nu < 0.0 || nu >= 0.5) throw std::invalid_argument("material: nu must be in [0, 0.5)");
    if (rho0 <= 0.0) throw std::invalid_argument("material: rho0 must be positive");
    if (eta <= 0.0 || eta >= 1.0) throw std::invalid_argument("material: eta must be in (0,1)");
    if (chi <= 0.0) throw std::invalid_argument("material: chi must be positive");
    if (ersatz <= 0.0 || ersatz >= 1e-2)
        throw std::invalid_argument("material: ersatz must be in (0, 1e-2)");
    if (kappa < 0.0) throw std::invalid_argument("material: kappa must be non-negative");
}

DensityField DensityField::uniform(const Mesh& mesh, double value) {
    DensityField f;
    f.mesh = &mesh;
    f.values = Vec::Constant(mesh.n_elements(), value);
    return f;
}

void DensityField::validate() const {
    if (!mesh) throw std::invalid_argument("density: missing mesh");
    if (values.size() != mesh->n_elements())
        throw std::invalid_argument("density: length != element count");
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (!(values[i] >= 0.0 && values[i] <= 1.0))
            throw std::invalid_argument("density: entry outside [0,1]");
}

double volume_projection(double b, double chi, double eta) {
    const double denom = std::tanh(chi * eta) + std::tanh(chi * (1.0 - eta));
    return (std::tanh(chi * eta) + std::tanh(chi * (b - eta))) / denom;
}

double volume_projection_deriv(double b, double chi, double eta) {
    const double denom = std::tanh(chi * eta) + std::tanh(chi * (1.0 - eta));
    const double t = std::tanh(chi * (b - eta));
    return chi * (1.0 - t * t) / denom;
}

double stiffness_interp(double V, double kappa) {
    return V / (1.0 + kappa * (1.0 - V));
}

double stiffness_interp_deriv(double V, double kappa) {
    const double denom = 1.0 + kappa * (1.0 - V);
    return (1.0 + kappa) / (denom * denom);
}

double ersatz_blend(double x, double ersatz) {
    return ersatz + (1.0 - ersatz) * x;
}

InterpValues interp_values(double b, const MaterialParams& p) {
    const double V = volume_projection(b, p.chi, p.eta);
    const double E = stiffness_interp(V, p.kappa);
    return {ersatz_blend(V, p.ersatz), ersatz_blend(E, p.ersatz)};
}

InterpDerivs interp_derivatives(double b, const MaterialParams& p) {
    const double V = volume_projection(b, p.chi, p.eta);
    const double dV = volume_projection_deriv(b, p.chi, p.eta);
    const double dE = stiffness_interp_deriv(V, p.kappa) * dV;
    return {(1.0 - p.ersatz) * dV, (1.0 - p.ersatz) * dE};
}

DensityFilter::DensityFilter(const Mesh& mesh, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("filter: radius must be positive");
    const int ne = mesh.n_elements();
    const double hx = mesh.dx(), hy = mesh.dy();
    const int span_x = static_cast<int>(std::ceil(radius / hx));
    const int span_y = static_cast<int>(std::ceil(radius / hy));
    std::vector<Triplet> trips;
    for (int ej = 0; ej < mesh.ny; ++ej) {
        for (int ei = 0; ei < mesh.nx; ++ei) {
            const int e = ej * mesh.nx + ei;
            double wsum = 0.0;
            std::vector<std::pair<int, double>> row;
            for (int j = std::max(0, ej - span_y); j <= std::min(mesh.ny - 1, ej + span_y); ++j) {
                for (int i = std::max(0, ei - span_x); i <= std::min(mesh.nx - 1, ei + span_x);
                     ++i) {
                    const double dist =
                        std::hypot((i - ei) * hx, (j - ej) * hy);
                    const double w = radius - dist;
                    if (w <= 0.0) continue;
                    row.emplace_back(j * mesh.nx + i, w);
                    wsum += w;
                }
            }
            for (const auto& [k, w] : row) trips.emplace_back(e, k, w / wsum);
        }
    }
    weights_.resize(ne, ne);
    weights_.setFromTriplets(trips.begin(), trips.end());
}

Vec DensityFilter::apply(const Vec& b) const { return weights_ * b; }

Vec DensityFilter::chain(const Vec& grad) const { return weights_.transpose() * grad; }

} // namespace dynrb
