#include "dynrb/assembly.hpp"

#include <stdexcept>

#include "dynrb/elements.hpp"

namespace dynrb {

ElemVec SystemMatrices::gather(int e, const Vec& x) const {
    ElemVec out;
    const auto& dofs = elem_free_dofs[e];
    for (int k = 0; k < 8; ++k) out[k] = dofs[k] >= 0 ? x[dofs[k]] : 0.0;
    return out;
}

SystemMatrices assemble(const Mesh& mesh, const DensityField& density,
                        const MaterialParams& material,
                        const std::vector<PointMass>& lumped_masses) {
    density.validate();
    material.validate();
    if (density.mesh != &mesh) throw std::invalid_argument("assemble: density/mesh mismatch");

    SystemMatrices sys;
    sys.mesh = &mesh;
    sys.Ke0 = element_stiffness(material.E0, material.nu, mesh.thickness, mesh.dx(), mesh.dy());
    sys.Me0 = element_mass(material.rho0, mesh.thickness, mesh.dx(), mesh.dy());

    const int n_full = mesh.n_dofs();
    sys.free_of_full.assign(n_full, 0);
    for (int dof : mesh.fixed_dofs) {
        if (dof < 0 || dof >= n_full)
            throw std::invalid_argument("assemble: fixed dof out of range");
        sys.free_of_full[dof] = -1;
    }
    for (int dof = 0; dof < n_full; ++dof) {
        if (sys.free_of_full[dof] == 0) {
            sys.free_of_full[dof] = sys.n_free++;
            sys.full_of_free.push_back(dof);
        }
    }
    if (sys.n_free == 0)
        throw std::invalid_argument("assemble: all dofs constrained, singular system");

    const int ne = mesh.n_elements();
    sys.Vbar.resize(ne);
    sys.Ebar.resize(ne);
    sys.dVbar.resize(ne);
    sys.dEbar.resize(ne);
    sys.elem_free_dofs.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const auto values = interp_values(density.values[e], material);
        const auto derivs = interp_derivatives(density.values[e], material);
        sys.Vbar[e] = values.Vbar;
        sys.Ebar[e] = values.Ebar;
        sys.dVbar[e] = derivs.dVbar_db;
        sys.dEbar[e] = derivs.dEbar_db;
        const auto dofs = mesh.element_dofs(e);
        for (int k = 0; k < 8; ++k) sys.elem_free_dofs[e][k] = sys.free_of_full[dofs[k]];
    }

    std::vector<Triplet> tk, tm;
    tk.reserve(static_cast<size_t>(ne) * 64);
    tm.reserve(static_cast<size_t>(ne) * 64 + 2 * lumped_masses.size());
    for (int e = 0; e < ne; ++e) {
        const auto& dofs = sys.elem_free_dofs[e];
        for (int r = 0; r < 8; ++r) {
            if (dofs[r] < 0) continue;
            for (int c = 0; c < 8; ++c) {
                if (dofs[c] < 0) continue;
                tk.emplace_back(dofs[r], dofs[c], sys.Ebar[e] * sys.Ke0(r, c));
                tm.emplace_back(dofs[r], dofs[c], sys.Vbar[e] * sys.Me0(r, c));
            }
        }
    }
    for (const auto& pm : lumped_masses) {
        if (pm.node < 0 || pm.node >= mesh.n_nodes())
            throw std::invalid_argument("assemble: lumped mass node out of range");
        for (int comp = 0; comp < 2; ++comp) {
            const int fd = sys.free_of_full[Mesh::dof_id(pm.node, comp)];
            if (fd >= 0) tm.emplace_back(fd, fd, pm.mass);
        }
    }

    sys.K.resize(sys.n_free, sys.n_free);
    sys.M.resize(sys.n_free, sys.n_free);
    sys.K.setFromTriplets(tk.begin(), tk.end());
    sys.M.setFromTriplets(tm.begin(), tm.end());
    sys.C = material.alpha_M * sys.M + material.alpha_K * sys.K;
    return sys;
}

} // namespace dynrb
