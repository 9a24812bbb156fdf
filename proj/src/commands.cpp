#include "dynrb/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dynrb/adjoint.hpp"
#include "dynrb/io.hpp"

namespace dynrb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Paths {
    fs::path dir;
    fs::path operator/(const std::string& name) const { return dir / name; }
};

Paths prepare_output(const RunConfig& config, const CliOverrides& cli,
                     const std::string& collision_marker, bool force_required) {
    Paths p{fs::path(cli.out_dir.value_or(config.output.directory))};
    if (force_required && !cli.force && !collision_marker.empty() &&
        fs::exists(p / collision_marker))
        throw std::runtime_error("output collision: " + (p / collision_marker).string() +
                                 " exists; pass --force to overwrite");
    fs::create_directories(p.dir);
    return p;
}

std::uint64_t effective_seed(const RunConfig& config, const CliOverrides& cli) {
    return cli.seed.value_or(config.seed);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string model_name(ModelKind m) { return m == ModelKind::Full ? "full" : "reduced"; }

int resolve_watch_dof(const ProblemDef& problem, const SystemMatrices& sys) {
    int node = problem.target_node, comp = problem.target_comp;
    if (node < 0) {
        node = problem.load.node;
        comp = problem.load.direction;
    }
    if (node < 0) return 0;
    const int fd = sys.free_of_full[Mesh::dof_id(node, comp)];
    return fd >= 0 ? fd : 0;
}

} // namespace

std::string problem_signature(const ProblemDef& p) {
    std::ostringstream os;
    os << "mesh:" << p.mesh.nx << "x" << p.mesh.ny << ":" << p.mesh.lx << ":" << p.mesh.ly
       << ":" << p.mesh.thickness << ";fixed:" << p.mesh.fixed_dofs.size();
    os << ";mat:" << p.material.E0 << ":" << p.material.nu << ":" << p.material.rho0 << ":"
       << p.material.chi << ":" << p.material.eta << ":" << p.material.kappa << ":"
       << p.material.ersatz << ":" << p.material.alpha_M << ":" << p.material.alpha_K;
    os << ";load:" << static_cast<int>(p.load.kind) << ":" << p.load.node << ":"
       << p.load.direction << ":" << p.load.amplitude << ":" << p.load.half_sine_duration
       << ":" << p.load.omega << ":" << p.load.lumped_masses.size();
    os << ";obj:" << static_cast<int>(p.objective_kind) << ":" << p.target_node << ":"
       << p.target_comp;
    os << ";grid:" << p.grid.n_steps << ":" << p.grid.dt << ";hht:" << p.hht.alpha;
    return os.str();
}

void cmd_forward(const RunConfig& config, const CliOverrides& cli) {
    const Paths out = prepare_output(config, cli, "", false);
    const ProblemDef& problem = config.problem;
    const int ne = problem.mesh.n_elements();

    const Vec b = Vec::Constant(ne, config.optimizer.volume_fraction);
    const ForwardSolution fsol = solve_forward(problem, b);
    const int nt = problem.grid.n_steps;
    const int watch = resolve_watch_dof(problem, fsol.sys);

    CsvTable table;
    table.header = {"step", "t", "d_watch", "v_watch", "a_watch"};
    double peak_watch = 0.0, peak_energy = 0.0;
    for (int i = 0; i <= nt; ++i) {
        const double t = i * problem.grid.dt;
        table.rows.push_back({std::to_string(i), format_double(t),
                              format_double(fsol.traj.d[i][watch]),
                              format_double(fsol.traj.v[i][watch]),
                              format_double(fsol.traj.a[i][watch])});
        peak_watch = std::max(peak_watch, std::abs(fsol.traj.d[i][watch]));
        const double energy = 0.5 * fsol.traj.v[i].dot(fsol.sys.M * fsol.traj.v[i]) +
                              0.5 * fsol.traj.d[i].dot(fsol.sys.K * fsol.traj.d[i]);
        peak_energy = std::max(peak_energy, energy);
    }
    write_csv((out / "trajectory.csv").string(), table);

    Mat snapshots(fsol.sys.n_free, nt + 1);
    for (int i = 0; i <= nt; ++i) snapshots.col(i) = fsol.traj.d[i];
    write_matrix_rbm1((out / "displacement_snapshots.rbm1").string(), snapshots);

    json summary;
    summary["objective"] = fsol.objective_value;
    summary["peak_watch_displacement"] = peak_watch;
    summary["peak_energy"] = peak_energy;
    summary["n_free_dofs"] = fsol.sys.n_free;
    summary["watch_dof"] = watch;
    std::ofstream(out / "summary.json") << summary.dump(2) << "\n";
    std::cout << "forward: objective " << fsol.objective_value << ", peak displacement "
              << peak_watch << "\n";
}

bool cmd_gradcheck(const RunConfig& config, int n_probes, double fd_step,
                   const CliOverrides& cli) {
    if (fd_step <= 0.0) throw ConfigError("gradcheck: fd step must be positive");
    if (n_probes < 1) throw ConfigError("gradcheck: need at least one probe");
    const Paths out = prepare_output(config, cli, "", false);
    const ProblemDef& problem = config.problem;
    const int ne = problem.mesh.n_elements();

    std::mt19937_64 rng(effective_seed(config, cli));
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    Vec b(ne);
    for (int e = 0; e < ne; ++e) b[e] = 0.3 + 0.6 * unit();

    const ForwardSolution fsol = solve_forward(problem, b);
    const auto adj = solve_adjoint_full(fsol.sys, fsol.eff, fsol.partials, problem.grid,
                                        problem.hht);
    Vec grad = assemble_gradient(adj.vartheta, fsol.traj, fsol.sys, problem.material,
                                 fsol.obj, problem.load, problem.grid, problem.hht);
    if (problem.filter_radius) grad = problem.filter().chain(grad);

    std::vector<int> probes;
    while (static_cast<int>(probes.size()) < std::min(n_probes, ne)) {
        const int e = static_cast<int>(rng() % static_cast<std::uint64_t>(ne));
        if (std::find(probes.begin(), probes.end(), e) == probes.end()) probes.push_back(e);
    }

    auto objective_at = [&](const Vec& design) {
        return solve_forward(problem, design).objective_value;
    };

    CsvTable table;
    table.header = {"element", "adjoint", "central_fd", "rel_error"};
    double max_rel = 0.0;
    for (int e : probes) {
        Vec bp = b, bm = b;
        bp[e] += fd_step;
        bm[e] -= fd_step;
        const double fd = (objective_at(bp) - objective_at(bm)) / (2.0 * fd_step);
        const double rel = std::abs(grad[e] - fd) / std::max(std::abs(fd), 1e-300);
        max_rel = std::max(max_rel, rel);
        table.rows.push_back({std::to_string(e), format_double(grad[e]), format_double(fd),
                              format_double(rel)});
    }
    write_csv((out / "gradcheck.csv").string(), table);

    const bool pass = max_rel < 1e-4;
    json report;
    report["max_rel_error"] = max_rel;
    report["threshold"] = 1e-4;
    report["fd_step"] = fd_step;
    report["n_probes"] = static_cast<int>(probes.size());
    report["verdict"] = pass ? "PASS" : "FAIL";
    std::ofstream(out / "gradcheck.json") << report.dump(2) << "\n";
    std::cout << "gradcheck: max relative error " << max_rel << " -> "
              << (pass ? "PASS" : "FAIL") << "\n";
    return pass;
}

void cmd_offline(const RunConfig& config, const CliOverrides& cli) {
    const Paths out = prepare_output(config, cli, "basis.rbm1", true);
    const ProblemDef& problem = config.problem;

    GreedyConfig greedy;
    greedy.tol = config.rom.tol;
    greedy.max_basis = config.rom.max_basis;
    greedy.oracle = config.rom.estimator;
    greedy.seed = config.rom.seed;

    FeedforwardNet preload_model;
    GainTable preload_table;
    if (greedy.oracle == ErrorOracle::Fnn) {
        const fs::path model_path = out / "error_model.json";
        if (!fs::exists(model_path))
            throw std::runtime_error("offline: estimator \"fnn\" needs " +
                                     model_path.string() + " from a previous run");
        preload_model = load_fnn_json(model_path.string());
        greedy.error_model = &preload_model;
    } else if (greedy.oracle == ErrorOracle::GainBaseline) {
        const fs::path table_path = out / "gain_table.json";
        if (!fs::exists(table_path))
            throw std::runtime_error("offline: estimator \"gain_baseline\" needs " +
                                     table_path.string() + " from a previous run");
        preload_table = load_gain_table_json(table_path.string());
        greedy.gain_table = &preload_table;
    }

    std::cout << "offline: harvesting " << config.rom.sample_count << " samples from "
              << config.rom.harvest_iterations << " full-order iterations\n";
    const std::vector<Vec> samples = harvest_density_samples(
        problem, config.optimizer, config.rom.sample_count, config.rom.harvest_iterations);

    GreedyResult greedy_result = greedy_offline(problem, samples, greedy);
    std::cout << "offline: basis size " << greedy_result.basis.dim() << ", "
              << (greedy_result.converged ? "converged" : "max basis reached")
              << ", final max error " << greedy_result.iterations.back().max_error << "\n";

    // Error-vs-basis-size curve.
    CsvTable curve;
    curve.header = {"basis_size", "max_error", "worst_sample"};
    for (const auto& it : greedy_result.iterations)
        curve.rows.push_back({std::to_string(it.basis_size), format_double(it.max_error),
                              std::to_string(it.worst_sample)});
    write_csv((out / "greedy_curve.csv").string(), curve);

    write_matrix_rbm1((out / "basis.rbm1").string(), greedy_result.basis.V);

    // Train the residual-to-error regressor on the harvested pairs.
    TrainReport train_report;
    bool model_trained = false;
    if (greedy_result.pairs.size() >= 4) {
        const int dim = problem.grid.n_steps + 1;
        FeedforwardNet net = make_fnn({dim, config.rom.fnn_hidden, dim}, config.rom.seed);
        ErrorTrainingSet data;
        for (const auto& pair : greedy_result.pairs) {
            data.inputs.push_back(pair.residual_norms);
            data.targets.push_back(pair.error_norms);
        }
        TrainOptions topts;
        topts.learning_rate = config.rom.fnn_learning_rate;
        topts.epochs = config.rom.fnn_epochs;
        topts.holdout_fraction = config.rom.fnn_holdout_fraction;
        topts.seed = config.rom.seed;
        train_report = fnn_train(net, data, topts);
        save_fnn_json((out / "error_model.json").string(), net, &train_report);
        model_trained = true;
        std::cout << "offline: error model holdout RMSE " << train_report.holdout_rmse
                  << ", R^2 " << train_report.holdout_r2 << " (" << train_report.n_train
                  << " train / " << train_report.n_holdout << " holdout)\n";
    } else {
        std::cout << "offline: too few training pairs ("
                  << greedy_result.pairs.size() << "), error model not trained\n";
    }

    // Euclidean-distance gain table at the final basis size.
    GainTable table;
    const int final_size = greedy_result.basis.dim();
    for (const auto& pair : greedy_result.pairs) {
        if (pair.basis_size != final_size) continue;
        table.params.push_back(samples[pair.sample_index]);
        table.lambdas.push_back(gain_lambda(pair.error_norms, pair.residual_norms));
    }
    if (!table.params.empty())
        save_gain_table_json((out / "gain_table.json").string(), table);

    json sidecar;
    sidecar["problem_hash"] = fnv1a(problem_signature(problem));
    sidecar["n_steps"] = problem.grid.n_steps;
    sidecar["dt"] = problem.grid.dt;
    sidecar["hht_alpha"] = problem.hht.alpha;
    sidecar["n_free_dofs"] = greedy_result.basis.V.rows();
    sidecar["basis_size"] = final_size;
    std::ofstream(out / "basis_meta.json") << sidecar.dump(2) << "\n";

    json report;
    report["converged"] = greedy_result.converged;
    report["basis_size"] = final_size;
    report["final_max_error"] = greedy_result.iterations.back().max_error;
    report["n_samples"] = static_cast<int>(samples.size());
    report["n_training_pairs"] = static_cast<int>(greedy_result.pairs.size());
    if (model_trained) {
        report["holdout_rmse"] = train_report.holdout_rmse;
        report["holdout_r2"] = train_report.holdout_r2;
    }
    std::ofstream(out / "offline_report.json") << report.dump(2) << "\n";
}

void cmd_optimize(const RunConfig& config, const CliOverrides& cli) {
    const Paths out = prepare_output(config, cli, "history.csv", true);
    const ProblemDef& problem = config.problem;

    OfflineArtifacts artifacts;
    const OfflineArtifacts* artifacts_ptr = nullptr;
    if (config.optimizer.rom_enabled) {
        const fs::path basis_path = out / "basis.rbm1";
        const fs::path meta_path = out / "basis_meta.json";
        if (!fs::exists(basis_path))
            throw std::runtime_error("optimize: rom enabled but " + basis_path.string() +
                                     " is missing; run the offline command first");
        artifacts.basis.V = read_matrix_rbm1(basis_path.string());
        if (fs::exists(meta_path)) {
            json meta;
            std::ifstream(meta_path) >> meta;
            if (meta.contains("problem_hash") &&
                meta["problem_hash"].get<std::uint64_t>() !=
                    fnv1a(problem_signature(problem)))
                throw std::runtime_error(
                    "optimize: offline basis was built for a different problem");
        }
        artifacts_ptr = &artifacts;
    }

    OptResult result;
    try {
        result = optimize(problem, config.optimizer, artifacts_ptr);
    } catch (const OptimizeAbort& abort) {
        CsvTable bad;
        bad.header = {"element", "density"};
        for (Eigen::Index e = 0; e < abort.iterate.size(); ++e)
            bad.rows.push_back({std::to_string(e), format_double(abort.iterate[e])});
        write_csv((out / "abort_density.csv").string(), bad);
        throw std::runtime_error(std::string(abort.what()) + " (iterate saved to " +
                                 (out / "abort_density.csv").string() + ")");
    }

    if (config.output.csv) {
        CsvTable hist;
        hist.header = {"iteration", "objective", "volume", "model_used", "max_change",
                       "gradient_norm"};
        CsvTable times;
        times.header = {"iteration", "model_used", "adjoint_seconds"};
        for (const auto& row : result.history) {
            hist.rows.push_back({std::to_string(row.iteration), format_double(row.objective),
                                 format_double(row.volume_fraction), model_name(row.model),
                                 format_double(row.max_change),
                                 format_double(row.gradient_norm)});
            times.rows.push_back({std::to_string(row.iteration), model_name(row.model),
                                  format_double(row.adjoint_seconds)});
        }
        write_csv((out / "history.csv").string(), hist);
        write_csv((out / "timings.csv").string(), times);

        CsvTable dens;
        dens.header = {"element", "density"};
        for (Eigen::Index e = 0; e < result.final_design.size(); ++e)
            dens.rows.push_back(
                {std::to_string(e), format_double(result.final_design[e])});
        write_csv((out / "final_density.csv").string(), dens);
    }
    if (config.output.vtk) {
        write_vtk_cell_scalars((out / "final_density.vtk").string(), problem.mesh,
                               problem.physical_density(result.final_design), "density");
    }

    double full_total = 0.0, red_total = 0.0;
    int full_count = 0, red_count = 0;
    for (const auto& row : result.history) {
        if (row.model == ModelKind::Full) {
            full_total += row.adjoint_seconds;
            ++full_count;
        } else {
            red_total += row.adjoint_seconds;
            ++red_count;
        }
    }
    json summary;
    summary["iterations"] = static_cast<int>(result.history.size());
    summary["converged"] = result.converged;
    summary["final_objective"] =
        result.history.empty() ? 0.0 : result.history.back().objective;
    summary["final_volume"] =
        result.history.empty() ? 0.0 : result.history.back().volume_fraction;
    summary["n_free_dofs"] = 2 * problem.mesh.n_nodes() -
                             static_cast<int>(problem.mesh.fixed_dofs.size());
    summary["n_elements"] = problem.mesh.n_elements();
    summary["full_adjoint_count"] = full_count;
    summary["reduced_adjoint_count"] = red_count;
    summary["mean_full_adjoint_seconds"] = full_count ? full_total / full_count : 0.0;
    summary["mean_reduced_adjoint_seconds"] = red_count ? red_total / red_count : 0.0;
    summary["adjoint_speedup"] =
        (full_count && red_count && red_total > 0.0)
            ? (full_total / full_count) / (red_total / red_count)
            : 0.0;
    std::ofstream(out / "timing_summary.json") << summary.dump(2) << "\n";

    std::cout << "optimize: " << result.history.size() << " iterations, final objective "
              << (result.history.empty() ? 0.0 : result.history.back().objective)
              << ", reduced adjoints " << red_count << "/" << result.history.size() << "\n";
}

void cmd_report(const std::vector<std::string>& artifact_dirs, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<std::pair<double, double>> speedup_points; // (dofs, speedup)

    for (const auto& dir : artifact_dirs) {
        const fs::path base(dir);
        const std::string stem = base.filename().string();

        if (fs::exists(base / "greedy_curve.csv")) {
            const CsvTable curve = read_csv((base / "greedy_curve.csv").string());
            SvgSeries series;
            series.label = "max sample error";
            series.markers = true;
            for (const auto& row : curve.rows)
                series.points.emplace_back(std::stod(row[0]), std::stod(row[1]));
            if (series.points.empty()) {
                std::cout << "report: " << dir << " has an empty greedy curve, skipped\n";
            } else {
                SvgPlotOptions opts;
                opts.title = "Greedy error vs basis size (" + stem + ")";
                opts.xlabel = "basis vectors";
                opts.ylabel = "summed error norm";
                opts.log_y = true;
                write_svg_lineplot((fs::path(out_dir) / (stem + "_greedy_error.svg")).string(),
                                   opts, {series});
            }
        }

        if (fs::exists(base / "timings.csv")) {
            const CsvTable times = read_csv((base / "timings.csv").string());
            SvgSeries full_series, red_series;
            full_series.label = "full";
            full_series.color = "#d62728";
            full_series.markers = true;
            red_series.label = "reduced";
            red_series.color = "#2ca02c";
            red_series.markers = true;
            for (const auto& row : times.rows) {
                const double it = std::stod(row[0]);
                const double sec = std::stod(row[2]);
                (row[1] == "full" ? full_series : red_series).points.emplace_back(it, sec);
            }
            if (full_series.points.empty() && red_series.points.empty()) {
                std::cout << "report: " << dir << " has an empty history, nothing to plot\n";
            } else {
                SvgPlotOptions opts;
                opts.title = "Adjoint time per iteration (" + stem + ")";
                opts.xlabel = "iteration";
                opts.ylabel = "seconds";
                write_svg_lineplot((fs::path(out_dir) / (stem + "_adjoint_time.svg")).string(),
                                   opts, {full_series, red_series});
            }
        }

        if (fs::exists(base / "timing_summary.json")) {
            json summary;
            std::ifstream(base / "timing_summary.json") >> summary;
            const double speedup = summary.value("adjoint_speedup", 0.0);
            const double dofs = summary.value("n_free_dofs", 0);
            if (speedup > 0.0) speedup_points.emplace_back(dofs, speedup);
        }
    }

    if (speedup_points.size() >= 1) {
        std::sort(speedup_points.begin(), speedup_points.end());
        SvgSeries series;
        series.label = "adjoint speedup";
        series.markers = true;
        series.points = speedup_points;
        SvgPlotOptions opts;
        opts.title = "Adjoint speedup vs problem size";
        opts.xlabel = "free dofs";
        opts.ylabel = "mean full / mean reduced time";
        write_svg_lineplot((fs::path(out_dir) / "speedup_vs_dof.svg").string(), opts,
                           {series});
    }
}

} // namespace dynrb
