#include "dynrb/problem.hpp"

#include <stdexcept>

namespace dynrb {

Objective ProblemDef::make_objective(const SystemMatrices& sys) const {
    Objective obj;
    obj.kind = objective_kind;
    if (objective_kind == Objective::Kind::SquaredTargetDisplacement) {
        if (target_node < 0 || target_node >= mesh.n_nodes())
            throw std::invalid_argument("problem: target node out of range");
        const int full = Mesh::dof_id(target_node, target_comp);
        obj.target_dof = sys.free_of_full[full];
        if (obj.target_dof < 0)
            throw std::invalid_argument("problem: target dof is constrained");
    }
    return obj;
}

const DensityFilter& ProblemDef::filter() const {
    if (filter_radius && !filter_cache_.enabled())
        filter_cache_ = DensityFilter(mesh, *filter_radius);
    return filter_cache_;
}

Vec ProblemDef::physical_density(const Vec& b) const {
    return filter_radius ? filter().apply(b) : b;
}

ForwardSolution solve_forward(const ProblemDef& problem, const Vec& design) {
    ForwardSolution fs;
    DensityField density;
    density.mesh = &problem.mesh;
    density.values = problem.physical_density(design);
    fs.sys = assemble(problem.mesh, density, problem.material, problem.load.lumped_masses);
    fs.eff = effective_operators(fs.sys, problem.grid, problem.hht);
    fs.traj = hht_solve(fs.sys, fs.eff, problem.load, problem.grid, problem.hht);
    fs.obj = problem.make_objective(fs.sys);
    fs.partials = state_partials(fs.obj, fs.traj, fs.sys, problem.grid);
    fs.objective_value = eval(fs.obj, fs.traj, fs.sys, problem.grid);
    return fs;
}

ProblemDef make_cantilever_benchmark(int nx, int ny) {
    ProblemDef p;
    p.mesh = build_structured_mesh(nx, ny, 4.0, 2.0, 0.01);
    fix_edge(p.mesh, Edge::Left);
    p.material = MaterialParams{};
    p.load.kind = LoadCase::Kind::PointTransient;
    p.load.node = p.mesh.nearest_node(4.0, 1.0); // centre of the free edge
    p.load.direction = 1;
    p.load.amplitude = 1000.0;
    p.load.half_sine_duration = 0.05;
    p.objective_kind = Objective::Kind::SquaredTargetDisplacement;
    p.target_node = p.load.node;
    p.target_comp = 1;
    p.grid = TimeGrid::from_total(200, 0.05);
    return p;
}

ProblemDef make_support_benchmark(int nx, int ny) {
    ProblemDef p;
    p.mesh = build_structured_mesh(nx, ny, 4.0, 4.0, 0.01);
    fix_edge(p.mesh, Edge::Bottom);
    p.material = MaterialParams{};
    p.load.kind = LoadCase::Kind::RotatingConstant;
    p.load.node = p.mesh.nearest_node(2.0, 4.0); // middle of the top edge
    p.load.amplitude = 1000.0;
    p.load.omega = 20.0 * M_PI;
    p.objective_kind = Objective::Kind::MeanDynamicCompliance;
    p.grid = TimeGrid::from_total(200, 0.05);
    return p;
}

ProblemDef make_building_benchmark(int nx, int ny) {
    ProblemDef p;
    p.mesh = build_structured_mesh(nx, ny, 30.0, 75.0, 1.0);
    fix_edge(p.mesh, Edge::Bottom);
    p.material = MaterialParams{};
    p.load.kind = LoadCase::Kind::GroundAcceleration;
    p.load.direction = 0; // horizontal shaking
    p.load.amplitude = 5.0;
    p.load.omega = 2.5 * M_PI;
    p.load.lumped_masses.push_back({p.mesh.nearest_node(15.0, 75.0), 0.4e6});
    p.objective_kind = Objective::Kind::MeanStrainEnergy;
    p.grid = TimeGrid::from_total(200, 4.8);
    return p;
}

} // namespace dynrb
