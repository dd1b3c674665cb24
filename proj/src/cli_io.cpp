#include "ouswitch/cli_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

namespace ouswitch {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSchemaVersion = 1;

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// strict-schema helper: every present key must be known, every required key present
void require_keys(const json& j, const std::string& ctx,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {}) {
    if (!j.is_object()) throw std::runtime_error(ctx + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& k : required) known = known || k == key;
        for (const auto& k : optional) known = known || k == key;
        if (!known) throw std::runtime_error(ctx + ": unknown key '" + key + "'");
    }
    for (const auto& k : required)
        if (!j.contains(k)) throw std::runtime_error(ctx + ": missing key '" + k + "'");
}

json bound_to_json(double b) {
    if (b == kInf) return "inf";
    if (b == -kInf) return "-inf";
    return b;
}

double bound_from_json(const json& j, const std::string& ctx) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::runtime_error(ctx + ": bad interval bound '" + s + "'");
    }
    return j.get<double>();
}

json params_to_json(const ModelParams& p) {
    return {{"theta", p.theta},   {"mu", p.mu},       {"sigma", p.sigma},
            {"lambda", p.lambda}, {"delta", p.delta}, {"cost_k", p.cost_k}};
}

ModelParams params_from_json(const json& j) {
    require_keys(j, "params", {"theta", "mu", "sigma", "lambda", "delta", "cost_k"});
    return {j["theta"].get<double>(),  j["mu"].get<double>(),
            j["sigma"].get<double>(),  j["lambda"].get<double>(),
            j["delta"].get<double>(),  j["cost_k"].get<double>()};
}

}  // namespace

std::string store_to_json(const SolutionStore& store) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["params"] = params_to_json(store.params);
    doc["constants"] = {{"nu", store.constants.nu},
                        {"k0", store.constants.k0},
                        {"k1", store.constants.k1},
                        {"k2", store.constants.k2}};
    doc["n_max"] = store.n_max;
    json levels = json::array();
    for (const auto& f : store.levels) {
        json pieces = json::array();
        for (const Piece& p : f.pieces) {
            json pj;
            pj["z_lo"] = bound_to_json(p.z_lo);
            pj["z_hi"] = bound_to_json(p.z_hi);
            if (p.kind == Piece::Kind::continuation) {
                pj["kind"] = "C";
                pj["c_plus"] = p.c_plus;
                pj["c_minus"] = p.c_minus;
            } else {
                pj["kind"] = "S";
                pj["target"] = p.target;
            }
            pieces.push_back(pj);
        }
        levels.push_back({{"xi", f.xi}, {"n", f.n}, {"pieces", pieces}});
    }
    doc["levels"] = levels;
    doc["checksum"] = hex64(fnv1a(doc.dump()));
    return doc.dump(2) + "\n";
}

void save_store(const SolutionStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_store: cannot open " + path);
    out << store_to_json(store);
}

SolutionStore load_store(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_store: cannot open " + path);
    json doc = json::parse(in);
    require_keys(doc, "store",
                 {"schema_version", "params", "constants", "n_max", "levels",
                  "checksum"});
    if (doc["schema_version"].get<int>() != kSchemaVersion)
        throw std::runtime_error("load_store: schema version mismatch");
    const std::string checksum = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    if (hex64(fnv1a(doc.dump())) != checksum)
        throw std::runtime_error("load_store: checksum mismatch (corrupt file)");

    SolutionStore store;
    store.params = params_from_json(doc["params"]);
    validate_params(store.params);
    store.constants = derived_constants(store.params);
    require_keys(doc["constants"], "constants", {"nu", "k0", "k1", "k2"});
    store.n_max = doc["n_max"].get<int>();
    for (const auto& lj : doc["levels"]) {
        require_keys(lj, "level", {"xi", "n", "pieces"});
        PiecewiseValueFunction f;
        f.xi = lj["xi"].get<int>();
        f.n = lj["n"].get<int>();
        for (const auto& pj : lj["pieces"]) {
            Piece p;
            p.z_lo = bound_from_json(pj.at("z_lo"), "piece");
            p.z_hi = bound_from_json(pj.at("z_hi"), "piece");
            const std::string kind = pj.at("kind").get<std::string>();
            if (kind == "C") {
                require_keys(pj, "piece", {"kind", "z_lo", "z_hi", "c_plus", "c_minus"});
                p.kind = Piece::Kind::continuation;
                p.c_plus = pj["c_plus"].get<double>();
                p.c_minus = pj["c_minus"].get<double>();
            } else if (kind == "S") {
                require_keys(pj, "piece", {"kind", "z_lo", "z_hi", "target"});
                p.kind = Piece::Kind::switching;
                p.target = pj["target"].get<int>();
            } else {
                throw std::runtime_error("load_store: bad piece kind '" + kind + "'");
            }
            f.pieces.push_back(p);
        }
        check_invariants(f);
        store.levels.push_back(std::move(f));
    }
    if (store.levels.size() != static_cast<size_t>(store.n_max + 1) * 3)
        throw std::runtime_error("load_store: level count mismatch");
    for (int n = 0; n <= store.n_max; ++n)
        for (Regime xi : {-1, 0, 1}) {
            const auto& f = store.at(xi, n);
            if (f.xi != xi || f.n != n)
                throw std::runtime_error("load_store: levels out of order");
        }
    return store;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    json doc = json::parse(in);
    require_keys(doc, "config", {"params", "n_max"},
                 {"solver", "grid", "simulate"});
    RunConfig cfg;
    cfg.params = params_from_json(doc["params"]);
    cfg.n_max = doc["n_max"].get<int>();
    if (cfg.n_max < 0) throw std::runtime_error("config: n_max must be >= 0");
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        require_keys(s, "solver", {},
                     {"bracket_grid", "tol_boundary", "tol_check", "z_max", "max_iter"});
        if (s.contains("bracket_grid")) cfg.solver.bracket_grid = s["bracket_grid"].get<int>();
        if (s.contains("tol_boundary")) cfg.solver.tol_boundary = s["tol_boundary"].get<double>();
        if (s.contains("tol_check")) cfg.solver.tol_check = s["tol_check"].get<double>();
        if (s.contains("z_max")) cfg.solver.z_max = s["z_max"].get<double>();
        if (s.contains("max_iter")) cfg.solver.max_iter = s["max_iter"].get<int>();
        if (cfg.solver.bracket_grid < 16)
            throw std::runtime_error("config: bracket_grid must be >= 16");
    }
    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        require_keys(g, "grid", {}, {"z_lo", "z_hi", "nodes", "add_boundary_offsets"});
        if (g.contains("z_lo")) cfg.grid.z_lo = g["z_lo"].get<double>();
        if (g.contains("z_hi")) cfg.grid.z_hi = g["z_hi"].get<double>();
        if (g.contains("nodes")) cfg.grid.nodes = g["nodes"].get<int>();
        if (g.contains("add_boundary_offsets"))
            cfg.grid.add_boundary_offsets = g["add_boundary_offsets"].get<bool>();
    }
    if (doc.contains("simulate")) {
        const json& s = doc["simulate"];
        require_keys(s, "simulate", {},
                     {"z0", "xi0", "n", "dt", "horizon", "paths", "seed"});
        if (s.contains("z0")) cfg.sim.z0 = s["z0"].get<double>();
        if (s.contains("xi0")) cfg.sim.xi0 = s["xi0"].get<int>();
        if (s.contains("n")) cfg.sim.n = s["n"].get<int>();
        if (s.contains("dt")) cfg.sim.dt = s["dt"].get<double>();
        if (s.contains("horizon")) cfg.sim.horizon = s["horizon"].get<double>();
        if (s.contains("paths")) cfg.sim.paths = s["paths"].get<long>();
        if (s.contains("seed")) cfg.sim.seed = s["seed"].get<std::uint64_t>();
        if (cfg.sim.dt <= 0 || cfg.sim.horizon <= 0 || cfg.sim.paths < 1)
            throw std::runtime_error("config: bad simulate section");
    }
    validate_params(cfg.params);
    return cfg;
}

std::string report_to_json(const VerifyReport& r) {
    json doc;
    doc["pass"] = r.pass;
    doc["failures"] = r.failures;
    doc["max_pde_resid"] = r.max_pde_resid;
    doc["max_super_deficit"] = r.max_super_deficit;
    doc["min_dominance_margin"] = r.min_dominance_margin;
    doc["max_value_mismatch"] = r.max_value_mismatch;
    doc["max_d1_mismatch"] = r.max_d1_mismatch;
    doc["max_jump_error"] = r.max_jump_error;
    doc["max_symmetry_error"] = r.max_symmetry_error;
    doc["min_monotone_margin"] = r.min_monotone_margin;
    doc["min_vhat_margin"] = r.min_vhat_margin;
    doc["growth_bounded"] = r.growth_bounded;
    doc["outer_decay"] = r.outer_decay;
    doc["any_recurrent_chain"] = r.any_recurrent_chain;
    json levels = json::array();
    for (const auto& lr : r.levels)
        levels.push_back({{"xi", lr.xi},
                          {"n", lr.n},
                          {"piece_count", lr.piece_count},
                          {"continuation_count", lr.continuation_count},
                          {"switching_count", lr.switching_count},
                          {"max_pde_resid", lr.max_pde_resid},
                          {"max_super_deficit", lr.max_super_deficit},
                          {"min_dominance_margin", lr.min_dominance_margin},
                          {"min_midpoint_margin", lr.min_midpoint_margin},
                          {"s_in_q", lr.s_in_q},
                          {"one_region_per_comp", lr.one_region_per_comp},
                          {"targets_separated", lr.targets_separated}});
    doc["levels"] = levels;
    json bounds = json::array();
    for (const auto& b : r.boundaries)
        bounds.push_back({{"xi", b.xi},
                          {"n", b.n},
                          {"z", b.z},
                          {"target", b.target},
                          {"value_mismatch", b.value_mismatch},
                          {"d1_mismatch", b.d1_mismatch},
                          {"jump_error", b.jump_error}});
    doc["boundaries"] = bounds;
    json chains = json::array();
    for (const auto& c : r.chains)
        chains.push_back({{"xi", c.xi},
                          {"n", c.n},
                          {"z", c.z},
                          {"chain", c.chain},
                          {"recurrent", c.recurrent}});
    doc["chains"] = chains;
    return doc.dump(2) + "\n";
}

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void emit_grid(const SolutionStore& store, const GridSpec& spec,
               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_grid: cannot open " + path);
    out << "z,xi,n,value,d1,region,piece_index,target\n";
    for (int i = 0; i < spec.nodes; ++i) {
        const double z = spec.z_lo + (spec.z_hi - spec.z_lo) * i / (spec.nodes - 1);
        for (Regime xi : {-1, 0, 1})
            for (int n = 0; n <= store.n_max; ++n) {
                const Classification c = classify(store, z, xi, n);
                out << fmt17(z) << ',' << xi << ',' << n << ','
                    << fmt17(evaluate(store, z, xi, n)) << ','
                    << fmt17(derivative(store, z, xi, n)) << ','
                    << (c.kind == Piece::Kind::continuation ? 'C' : 'S') << ','
                    << c.piece_index << ',';
                if (c.kind == Piece::Kind::switching) out << c.target;
                out << '\n';
            }
    }
}

namespace {

struct Canvas {
    double z_lo = -4, z_hi = 4, v_lo = 0, v_hi = 1;
    static constexpr int w = 900, h = 600, pad = 50;
    double px(double z) const {
        return pad + (z - z_lo) / (z_hi - z_lo) * (w - 2 * pad);
    }
    double py(double v) const {
        return h - pad - (v - v_lo) / (v_hi - v_lo) * (h - 2 * pad);
    }
};

const char* regime_color(Regime xi) {
    if (xi > 0) return "#1f77b4";  // +1 blue
    if (xi < 0) return "#2ca02c";  // -1 green
    return "#d62728";              // 0 red
}

void write_figure(const SolutionStore& store, const std::string& path,
                  int n_lo, int n_hi, bool arrows) {
    const int samples = 800;
    Canvas cv;
    cv.v_lo = 1e300;
    cv.v_hi = -1e300;
    for (int i = 0; i <= samples; ++i) {
        const double z = cv.z_lo + (cv.z_hi - cv.z_lo) * i / samples;
        for (Regime xi : {-1, 0, 1})
            for (int n = n_lo; n <= n_hi; ++n) {
                const double v = evaluate(store, z, xi, n);
                cv.v_lo = std::min(cv.v_lo, v);
                cv.v_hi = std::max(cv.v_hi, v);
            }
    }
    const double margin = 0.05 * (cv.v_hi - cv.v_lo + 1e-12);
    cv.v_lo -= margin;
    cv.v_hi += margin;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Canvas::w
        << "\" height=\"" << Canvas::h << "\" viewBox=\"0 0 " << Canvas::w << ' '
        << Canvas::h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    out << "<line x1=\"" << cv.px(cv.z_lo) << "\" y1=\"" << cv.py(0)
        << "\" x2=\"" << cv.px(cv.z_hi) << "\" y2=\"" << cv.py(0)
        << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << cv.px(0) << "\" y1=\"" << cv.py(cv.v_lo)
        << "\" x2=\"" << cv.px(0) << "\" y2=\"" << cv.py(cv.v_hi)
        << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    for (Regime xi : {-1, 0, 1})
        for (int n = n_lo; n <= n_hi; ++n) {
            out << "<polyline fill=\"none\" stroke=\"" << regime_color(xi)
                << "\" stroke-width=\"" << (1.0 + 0.4 * (n - n_lo))
                << "\" stroke-opacity=\"" << (0.45 + 0.55 * (n - n_lo + 1.0) /
                                              (n_hi - n_lo + 1.0))
                << "\" data-xi=\"" << xi << "\" data-n=\"" << n << "\" points=\"";
            for (int i = 0; i <= samples; ++i) {
                const double z = cv.z_lo + (cv.z_hi - cv.z_lo) * i / samples;
                out << cv.px(z) << ',' << cv.py(evaluate(store, z, xi, n)) << ' ';
            }
            out << "\"/>\n";
        }
    if (arrows) {
        // switch arrows of length K: from the post-switch curve down onto
        // v(., xi, 1) at each free boundary
        for (Regime xi : {-1, 0, 1}) {
            const auto& f = store.at(xi, 1);
            for (size_t i = 0; i + 1 < f.pieces.size(); ++i) {
                const double z = f.pieces[i].z_hi;
                if (z < cv.z_lo || z > cv.z_hi) continue;
                const double v1 = evaluate(store, z, xi, 1);
                out << "<line class=\"switch-arrow\" x1=\"" << cv.px(z)
                    << "\" y1=\"" << cv.py(v1 + store.params.cost_k)
                    << "\" x2=\"" << cv.px(z) << "\" y2=\"" << cv.py(v1)
                    << "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
            }
        }
    }
    out << "</svg>\n";
}

}  // namespace

void emit_plot(const SolutionStore& store, const std::string& out_dir) {
    write_figure(store, out_dir + "/figure1.svg", 0, std::min(1, store.n_max), true);
    write_figure(store, out_dir + "/figure2.svg", 0, std::min(1, store.n_max), false);
    write_figure(store, out_dir + "/figure3.svg", 0, store.n_max, false);
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Optimal switching for an OU spread: solve, verify, simulate"};
    app.require_subcommand(1);

    std::string config_path, store_path, out_path, report_path, out_dir, spec_path;

    auto* solve = app.add_subcommand("solve", "solve the recursion from a config");
    solve->add_option("--config", config_path)->required();
    solve->add_option("--out", out_path)->required();

    auto* verify = app.add_subcommand("verify", "run all checks on a store");
    verify->add_option("--store", store_path)->required();
    verify->add_option("--report", report_path);

    auto* oracle = app.add_subcommand("oracle", "finite-difference cross-check");
    int oracle_n = 2, oracle_nodes = 4001;
    oracle->add_option("--store", store_path)->required();
    oracle->add_option("--n", oracle_n);
    oracle->add_option("--nodes", oracle_nodes);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo policy check");
    SimConfig sim;
    simulate->add_option("--store", store_path)->required();
    simulate->add_option("--z0", sim.z0);
    simulate->add_option("--xi", sim.xi0);
    simulate->add_option("--n", sim.n);
    simulate->add_option("--paths", sim.paths);
    simulate->add_option("--dt", sim.dt);
    simulate->add_option("--horizon", sim.horizon);
    simulate->add_option("--seed", sim.seed);

    auto* plot = app.add_subcommand("plot", "emit SVG figure analogs");
    plot->add_option("--store", store_path)->required();
    plot->add_option("--out-dir", out_dir)->required();

    auto* grid = app.add_subcommand("grid", "emit CSV value grid");
    grid->add_option("--store", store_path)->required();
    grid->add_option("--spec", spec_path);
    grid->add_option("--out", out_path)->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) {
            const RunConfig cfg = load_config(config_path);
            const SolutionStore store = solve_all(cfg.params, cfg.n_max, cfg.solver);
            save_store(store, out_path);
            return 0;
        }
        if (verify->parsed()) {
            const SolutionStore store = load_store(store_path);
            const VerifyReport report = run_all_checks(store);
            const std::string doc = report_to_json(report);
            if (!report_path.empty()) {
                std::ofstream out(report_path, std::ios::binary);
                out << doc;
            }
            std::fputs(doc.c_str(), stdout);
            return report.pass ? 0 : 1;
        }
        if (oracle->parsed()) {
            const SolutionStore store = load_store(store_path);
            if (oracle_n > store.n_max)
                throw std::runtime_error("oracle: store has fewer levels");
            const FdOracleResult fd =
                fd_oracle(store.params, oracle_n, oracle_nodes, 8.0, 1e-8);
            json doc;
            bool ok = true;
            for (int n = 1; n <= oracle_n; ++n)
                for (Regime xi : {-1, 0, 1}) {
                    double sup_v = 0;
                    for (double v : fd.values[n][xi + 1])
                        sup_v = std::max(sup_v, std::abs(v));
                    const double gap = fd_gap(fd, store, xi, n);
                    doc["gaps"].push_back({{"xi", xi},
                                           {"n", n},
                                           {"gap", gap},
                                           {"tol", 1e-3 * (1 + sup_v)}});
                    ok = ok && gap <= 1e-3 * (1 + sup_v);
                }
            doc["pass"] = ok;
            std::fputs((doc.dump(2) + "\n").c_str(), stdout);
            return ok ? 0 : 1;
        }
        if (simulate->parsed()) {
            const SolutionStore store = load_store(store_path);
            if (sim.n > store.n_max)
                throw std::runtime_error("simulate: store has fewer levels");
            const McResult r = mc_value(store, sim);
            const double analytic = evaluate(store, sim.z0, sim.xi0, sim.n);
            json doc = {{"mean", r.mean},
                        {"stderr", r.stderr_},
                        {"truncation_bound", r.truncation_bound},
                        {"analytic", analytic},
                        {"abs_error", std::abs(r.mean - analytic)}};
            std::fputs((doc.dump(2) + "\n").c_str(), stdout);
            return 0;
        }
        if (plot->parsed()) {
            const SolutionStore store = load_store(store_path);
            emit_plot(store, out_dir);
            return 0;
        }
        if (grid->parsed()) {
            const SolutionStore store = load_store(store_path);
            GridSpec spec;
            if (!spec_path.empty()) {
                std::ifstream in(spec_path);
                if (!in) throw std::runtime_error("grid: cannot open " + spec_path);
                json g = json::parse(in);
                require_keys(g, "grid", {}, {"z_lo", "z_hi", "nodes"});
                if (g.contains("z_lo")) spec.z_lo = g["z_lo"].get<double>();
                if (g.contains("z_hi")) spec.z_hi = g["z_hi"].get<double>();
                if (g.contains("nodes")) spec.nodes = g["nodes"].get<int>();
            }
            emit_grid(store, spec, out_path);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

}  // namespace ouswitch
