#pragma once

#include <array>
#include <vector>

#include "dynrb/loads.hpp"
#include "dynrb/material.hpp"
#include "dynrb/mesh.hpp"
#include "dynrb/types.hpp"

namespace dynrb {

/// Assembled free-dof system plus the element-level data needed for design
/// derivatives. Immutable after assembly.
struct SystemMatrices {
    SpMat M, C, K;

    int n_free = 0;
    std::vector<int> free_of_full; // full dof id -> free index, -1 if fixed
    std::vector<int> full_of_free;
    std::vector<std::array<int, 8>> elem_free_dofs;

    const Mesh* mesh = nullptr;
    ElemMat Ke0, Me0;             // unit-density element matrices
    Vec Vbar, Ebar, dVbar, dEbar; // per-element interpolation values and derivatives

    /// Gather a free-dof vector onto the 8 local slots of an element
    /// (fixed slots read as zero).
    ElemVec gather(int e, const Vec& x) const;
};

SystemMatrices assemble(const Mesh& mesh, const DensityField& density,
                        const MaterialParams& material,
                        const std::vector<PointMass>& lumped_masses = {});

} // namespace dynrb
