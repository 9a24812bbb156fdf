#include "dynrb/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace dynrb {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(path + "." + key + ": unknown key");
    }
}

const json* find(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T require(const json& obj, const std::string& path, const std::string& key) {
    const json* v = find(obj, key);
    if (!v) throw ConfigError(path + "." + key + ": missing required key");
    try {
        return v->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key + ": wrong type");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key, T fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    try {
        return v->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key + ": wrong type");
    }
}

int parse_direction(const json& obj, const std::string& path, const std::string& key,
                    int fallback) {
    const std::string s = get_or<std::string>(obj, path, key, fallback == 0 ? "x" : "y");
    if (s == "x") return 0;
    if (s == "y") return 1;
    throw ConfigError(path + "." + key + ": must be \"x\" or \"y\"");
}

std::array<double, 2> parse_position(const json& obj, const std::string& path,
                                     const std::string& key) {
    const json* v = find(obj, key);
    if (!v || !v->is_array() || v->size() != 2)
        throw ConfigError(path + "." + key + ": expected [x, y]");
    try {
        return {(*v)[0].get<double>(), (*v)[1].get<double>()};
    } catch (const json::exception&) {
        throw ConfigError(path + "." + key + ": expected numbers");
    }
}

void apply_material(const json& m, const std::string& path, MaterialParams& out) {
    check_keys(m, path,
               {"E0", "nu", "rho0", "chi", "eta", "kappa", "ersatz", "alpha_M", "alpha_K"});
    out.E0 = get_or(m, path, "E0", out.E0);
    out.nu = get_or(m, path, "nu", out.nu);
    out.rho0 = get_or(m, path, "rho0", out.rho0);
    out.chi = get_or(m, path, "chi", out.chi);
    out.eta = get_or(m, path, "eta", out.eta);
    out.kappa = get_or(m, path, "kappa", out.kappa);
    out.ersatz = get_or(m, path, "ersatz", out.ersatz);
    out.alpha_M = get_or(m, path, "alpha_M", out.alpha_M);
    out.alpha_K = get_or(m, path, "alpha_K", out.alpha_K);
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

LoadCase parse_load(const json& l, const std::string& path, const Mesh& mesh) {
    check_keys(l, path,
               {"kind", "position", "direction", "amplitude", "half_sine_duration", "omega",
                "lumped_masses"});
    LoadCase load;
    const std::string kind = require<std::string>(l, path, "kind");
    if (kind == "point_transient") {
        load.kind = LoadCase::Kind::PointTransient;
        const auto pos = parse_position(l, path, "position");
        load.node = mesh.nearest_node(pos[0], pos[1]);
        load.direction = parse_direction(l, path, "direction", 1);
        load.amplitude = require<double>(l, path, "amplitude");
        load.half_sine_duration = require<double>(l, path, "half_sine_duration");
    } else if (kind == "rotating_constant") {
        load.kind = LoadCase::Kind::RotatingConstant;
        const auto pos = parse_position(l, path, "position");
        load.node = mesh.nearest_node(pos[0], pos[1]);
        load.amplitude = require<double>(l, path, "amplitude");
        load.omega = require<double>(l, path, "omega");
    } else if (kind == "ground_acceleration") {
        load.kind = LoadCase::Kind::GroundAcceleration;
        load.direction = parse_direction(l, path, "direction", 0);
        load.amplitude = require<double>(l, path, "amplitude");
        load.omega = require<double>(l, path, "omega");
    } else {
        throw ConfigError(path + ".kind: unknown load kind \"" + kind + "\"");
    }
    if (const json* lm = find(l, "lumped_masses")) {
        if (!lm->is_array()) throw ConfigError(path + ".lumped_masses: expected an array");
        for (size_t i = 0; i < lm->size(); ++i) {
            const std::string ipath = path + ".lumped_masses[" + std::to_string(i) + "]";
            check_keys((*lm)[i], ipath, {"position", "mass"});
            const auto pos = parse_position((*lm)[i], ipath, "position");
            load.lumped_masses.push_back(
                {mesh.nearest_node(pos[0], pos[1]), require<double>((*lm)[i], ipath, "mass")});
        }
    }
    try {
        load.validate(mesh);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return load;
}

Objective::Kind parse_objective_kind(const std::string& s, const std::string& path) {
    if (s == "mean_dynamic_compliance") return Objective::Kind::MeanDynamicCompliance;
    if (s == "mean_strain_energy") return Objective::Kind::MeanStrainEnergy;
    if (s == "squared_target_displacement")
        return Objective::Kind::SquaredTargetDisplacement;
    throw ConfigError(path + ": unknown objective kind \"" + s + "\"");
}

ProblemDef parse_problem(const json& p, const std::string& path) {
    check_keys(p, path,
               {"benchmark", "nx", "ny", "mesh", "fixed_edges", "material", "load",
                "objective", "filter_radius"});

    ProblemDef problem;
    const json* bench = find(p, "benchmark");
    if (bench) {
        const std::string name = bench->get<std::string>();
        const int nx = get_or(p, path, "nx", 0);
        const int ny = get_or(p, path, "ny", 0);
        if (name == "cantilever")
            problem = make_cantilever_benchmark(nx > 0 ? nx : 60, ny > 0 ? ny : 30);
        else if (name == "support_structure")
            problem = make_support_benchmark(nx > 0 ? nx : 40, ny > 0 ? ny : 40);
        else if (name == "building")
            problem = make_building_benchmark(nx > 0 ? nx : 20, ny > 0 ? ny : 50);
        else
            throw ConfigError(path + ".benchmark: unknown benchmark \"" + name + "\"");
        if (find(p, "mesh") || find(p, "fixed_edges") || find(p, "load") ||
            find(p, "objective"))
            throw ConfigError(path + ": benchmark and explicit problem blocks are exclusive");
    } else {
        const json* m = find(p, "mesh");
        if (!m) throw ConfigError(path + ".mesh: missing required key");
        check_keys(*m, path + ".mesh", {"nx", "ny", "lx", "ly", "thickness"});
        try {
            problem.mesh = build_structured_mesh(
                require<int>(*m, path + ".mesh", "nx"), require<int>(*m, path + ".mesh", "ny"),
                require<double>(*m, path + ".mesh", "lx"),
                require<double>(*m, path + ".mesh", "ly"),
                require<double>(*m, path + ".mesh", "thickness"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ".mesh: " + e.what());
        }

        const json* fixed = find(p, "fixed_edges");
        if (!fixed || !fixed->is_array() || fixed->empty())
            throw ConfigError(path + ".fixed_edges: need at least one fixed edge");
        for (const auto& edge : *fixed) {
            const std::string s = edge.get<std::string>();
            if (s == "left")
                fix_edge(problem.mesh, Edge::Left);
            else if (s == "right")
                fix_edge(problem.mesh, Edge::Right);
            else if (s == "bottom")
                fix_edge(problem.mesh, Edge::Bottom);
            else if (s == "top")
                fix_edge(problem.mesh, Edge::Top);
            else
                throw ConfigError(path + ".fixed_edges: unknown edge \"" + s + "\"");
        }

        const json* l = find(p, "load");
        if (!l) throw ConfigError(path + ".load: missing required key");
        problem.load = parse_load(*l, path + ".load", problem.mesh);

        const json* o = find(p, "objective");
        if (!o) throw ConfigError(path + ".objective: missing required key");
        check_keys(*o, path + ".objective", {"kind", "position", "direction"});
        problem.objective_kind = parse_objective_kind(
            require<std::string>(*o, path + ".objective", "kind"), path + ".objective.kind");
        if (problem.objective_kind == Objective::Kind::SquaredTargetDisplacement) {
            const auto pos = parse_position(*o, path + ".objective", "position");
            problem.target_node = problem.mesh.nearest_node(pos[0], pos[1]);
            problem.target_comp = parse_direction(*o, path + ".objective", "direction", 1);
        }
    }

    if (const json* m = find(p, "material")) apply_material(*m, path + ".material", problem.material);
    if (const json* fr = find(p, "filter_radius")) {
        const double r = fr->get<double>();
        if (r <= 0.0) throw ConfigError(path + ".filter_radius: must be positive");
        problem.filter_radius = r;
    }
    return problem;
}

ErrorOracle parse_estimator(const std::string& s, const std::string& path) {
    if (s == "true") return ErrorOracle::True;
    if (s == "fnn") return ErrorOracle::Fnn;
    if (s == "gain_baseline") return ErrorOracle::GainBaseline;
    throw ConfigError(path + ": unknown estimator \"" + s + "\"");
}

} // namespace

RunConfig parse_config_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"version", "seed", "problem", "time", "rom", "optimizer", "output"});
    const int version = require<int>(root, "config", "version");
    if (version != 1) throw ConfigError("config.version: unsupported schema version");

    RunConfig cfg;
    cfg.seed = get_or<std::uint64_t>(root, "config", "seed", 42);

    const json* p = find(root, "problem");
    if (!p) throw ConfigError("config.problem: missing required key");
    cfg.problem = parse_problem(*p, "config.problem");

    if (const json* t = find(root, "time")) {
        check_keys(*t, "config.time", {"n_steps", "total_time", "hht_alpha"});
        const int n_steps = get_or(*t, "config.time", "n_steps", cfg.problem.grid.n_steps);
        const double total =
            get_or(*t, "config.time", "total_time", cfg.problem.grid.total_time());
        try {
            cfg.problem.grid = TimeGrid::from_total(n_steps, total);
            cfg.problem.hht = HHTParams::from_alpha(
                get_or(*t, "config.time", "hht_alpha", cfg.problem.hht.alpha));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config.time: ") + e.what());
        }
    }

    if (const json* r = find(root, "rom")) {
        check_keys(*r, "config.rom",
                   {"sample_count", "harvest_iterations", "tol", "max_basis", "estimator",
                    "seed", "fnn"});
        cfg.rom.sample_count = get_or(*r, "config.rom", "sample_count", cfg.rom.sample_count);
        cfg.rom.harvest_iterations =
            get_or(*r, "config.rom", "harvest_iterations", cfg.rom.harvest_iterations);
        cfg.rom.tol = get_or(*r, "config.rom", "tol", cfg.rom.tol);
        cfg.rom.max_basis = get_or(*r, "config.rom", "max_basis", cfg.rom.max_basis);
        cfg.rom.seed = get_or<std::uint64_t>(*r, "config.rom", "seed", cfg.seed);
        if (const json* est = find(*r, "estimator"))
            cfg.rom.estimator =
                parse_estimator(est->get<std::string>(), "config.rom.estimator");
        if (const json* f = find(*r, "fnn")) {
            check_keys(*f, "config.rom.fnn",
                       {"hidden", "learning_rate", "epochs", "holdout_fraction"});
            cfg.rom.fnn_hidden = get_or(*f, "config.rom.fnn", "hidden", cfg.rom.fnn_hidden);
            cfg.rom.fnn_learning_rate =
                get_or(*f, "config.rom.fnn", "learning_rate", cfg.rom.fnn_learning_rate);
            cfg.rom.fnn_epochs = get_or(*f, "config.rom.fnn", "epochs", cfg.rom.fnn_epochs);
            cfg.rom.fnn_holdout_fraction = get_or(*f, "config.rom.fnn", "holdout_fraction",
                                                  cfg.rom.fnn_holdout_fraction);
        }
        if (cfg.rom.sample_count < 1)
            throw ConfigError("config.rom.sample_count: must be >= 1");
        if (cfg.rom.max_basis < 1) throw ConfigError("config.rom.max_basis: must be >= 1");
    } else {
        cfg.rom.seed = cfg.seed;
    }

    if (const json* o = find(root, "optimizer")) {
        check_keys(*o, "config.optimizer",
                   {"volume_fraction", "max_iterations", "move_limit", "tol_change", "eps1",
                    "eps2", "rom_enabled", "rom_fixed_dim", "estimator"});
        cfg.optimizer.volume_fraction =
            get_or(*o, "config.optimizer", "volume_fraction", cfg.optimizer.volume_fraction);
        cfg.optimizer.max_iterations =
            get_or(*o, "config.optimizer", "max_iterations", cfg.optimizer.max_iterations);
        cfg.optimizer.move_limit =
            get_or(*o, "config.optimizer", "move_limit", cfg.optimizer.move_limit);
        cfg.optimizer.tol_change =
            get_or(*o, "config.optimizer", "tol_change", cfg.optimizer.tol_change);
        cfg.optimizer.eps1 = get_or(*o, "config.optimizer", "eps1", cfg.optimizer.eps1);
        cfg.optimizer.eps2 = get_or(*o, "config.optimizer", "eps2", cfg.optimizer.eps2);
        cfg.optimizer.rom_enabled =
            get_or(*o, "config.optimizer", "rom_enabled", cfg.optimizer.rom_enabled);
        cfg.optimizer.rom_fixed_dim =
            get_or(*o, "config.optimizer", "rom_fixed_dim", cfg.optimizer.rom_fixed_dim);
        if (const json* est = find(*o, "estimator"))
            cfg.optimizer.estimator =
                parse_estimator(est->get<std::string>(), "config.optimizer.estimator");
        try {
            cfg.optimizer.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config.optimizer: ") + e.what());
        }
    }

    if (const json* out = find(root, "output")) {
        check_keys(*out, "config.output", {"directory", "formats"});
        cfg.output.directory =
            get_or<std::string>(*out, "config.output", "directory", cfg.output.directory);
        if (const json* fmts = find(*out, "formats")) {
            if (!fmts->is_array())
                throw ConfigError("config.output.formats: expected an array");
            cfg.output.csv = cfg.output.vtk = false;
            for (const auto& f : *fmts) {
                const std::string s = f.get<std::string>();
                if (s == "csv")
                    cfg.output.csv = true;
                else if (s == "vtk")
                    cfg.output.vtk = true;
                else
                    throw ConfigError("config.output.formats: unknown format \"" + s + "\"");
            }
        }
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_json(text);
}

} // namespace dynrb
