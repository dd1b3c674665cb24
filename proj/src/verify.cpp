#include "ouswitch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ouswitch/specfun.hpp"

namespace ouswitch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared Hermite basis at one node; H evaluations are the dominant cost of
// verification, and the same four values serve every (xi, n) function.
struct Basis {
    double z;
    double hp, hm;    // H_nu(+-z)
    double hdp, hdm;  // H'_nu(+-z)
};

Basis basis_at(double nu, double z) {
    return {z, specfun::hermite_h(nu, z), specfun::hermite_h(nu, -z),
            specfun::hermite_h_d1(nu, z), specfun::hermite_h_d1(nu, -z)};
}

Jet jet_with(const SolutionStore& st, const Basis& b, Regime xi, int n) {
    const auto& f = st.at(xi, n);
    const Piece& p = f.pieces[find_piece(f, b.z)];
    if (p.kind == Piece::Kind::switching) {
        Jet j = jet_with(st, b, p.target, n - 1);
        j.value -= st.params.cost_k;
        return j;
    }
    const double nu = st.constants.nu;
    Jet j = v_hat(st.params, b.z, xi);
    j.value += p.c_plus * b.hp + p.c_minus * b.hm;
    j.d1 += p.c_plus * b.hdp - p.c_minus * b.hdm;
    // H'' from the ODE, evaluated at +z and -z respectively
    j.d2 += p.c_plus * (2 * b.z * b.hdp - 2 * nu * b.hp) +
            p.c_minus * (2 * (-b.z) * b.hdm - 2 * nu * b.hm);
    return j;
}

double value_with(const SolutionStore& st, const Basis& b, Regime xi, int n) {
    const auto& f = st.at(xi, n);
    const Piece& p = f.pieces[find_piece(f, b.z)];
    if (p.kind == Piece::Kind::switching)
        return value_with(st, b, p.target, n - 1) - st.params.cost_k;
    return v_hat(st.params, b.z, xi).value + p.c_plus * b.hp + p.c_minus * b.hm;
}

double obstacle_with(const SolutionStore& st, const Basis& b, Regime xi, int n) {
    double best = -kInf;
    for (Regime t : feasible_set(xi))
        best = std::max(best, value_with(st, b, t, n - 1) - st.params.cost_k);
    return best;
}

// Follow switching targets at a fixed point until a continuation piece.
std::vector<Regime> resolve_chain(const SolutionStore& st, double z, Regime xi,
                                  int n) {
    std::vector<Regime> chain{xi};
    Regime cur = xi;
    int lvl = n;
    while (lvl > 0) {
        const Classification c = classify(st, z, cur, lvl);
        if (c.kind == Piece::Kind::continuation) break;
        cur = c.target;
        --lvl;
        chain.push_back(cur);
    }
    return chain;
}

bool has_repeat(const std::vector<Regime>& chain) {
    for (size_t i = 0; i < chain.size(); ++i)
        for (size_t j = i + 1; j < chain.size(); ++j)
            if (chain[i] == chain[j]) return true;
    return false;
}

LevelReport& level_report(VerifyReport& r, const SolutionStore& st, Regime xi,
                          int n) {
    for (auto& lr : r.levels)
        if (lr.xi == xi && lr.n == n) return lr;
    LevelReport lr;
    lr.xi = xi;
    lr.n = n;
    for (const Piece& p : st.at(xi, n).pieces) {
        ++lr.piece_count;
        if (p.kind == Piece::Kind::continuation)
            ++lr.continuation_count;
        else
            ++lr.switching_count;
    }
    r.levels.push_back(lr);
    return r.levels.back();
}

}  // namespace

std::vector<double> build_grid(const SolutionStore& store, const GridSpec& spec) {
    std::vector<double> g;
    g.reserve(spec.nodes + 128);
    for (int i = 0; i < spec.nodes; ++i)
        g.push_back(spec.z_lo + (spec.z_hi - spec.z_lo) * i / (spec.nodes - 1));
    if (spec.add_boundary_offsets) {
        for (const auto& f : store.levels)
            for (size_t i = 0; i + 1 < f.pieces.size(); ++i) {
                const double b = f.pieces[i].z_hi;
                if (b >= spec.z_lo && b <= spec.z_hi) g.push_back(b);
                for (double off : {1e-7, 1e-5, 1e-3}) {
                    for (double z : {b - off, b + off})
                        if (z >= spec.z_lo && z <= spec.z_hi) g.push_back(z);
                }
            }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

void check_variational_inequality(const SolutionStore& store,
                                  const GridSpec& spec, VerifyReport& report) {
    const ModelParams& p = store.params;
    const std::vector<double> grid = build_grid(store, spec);
    for (double z : grid) {
        const Basis b = basis_at(store.constants.nu, z);
        for (int n = 0; n <= store.n_max; ++n)
            for (Regime xi : {-1, 0, 1}) {
                LevelReport& lr = level_report(report, store, xi, n);
                const Classification c = classify(store, z, xi, n);
                if (c.kind == Piece::Kind::continuation) {
                    const Jet j = jet_with(store, b, xi, n);
                    const double resid = pde_residual(p, j.value, j.d1, j.d2, z, xi);
                    const double scale =
                        1 + std::abs(reward(p, z, xi)) + p.delta * std::abs(j.value);
                    lr.max_pde_resid =
                        std::max(lr.max_pde_resid, std::abs(resid) / scale);
                    if (n >= 1) {
                        const double margin =
                            jet_with(store, b, xi, n).value -
                            obstacle_with(store, b, xi, n);
                        lr.min_dominance_margin =
                            std::min(lr.min_dominance_margin, margin);
                    }
                } else {
                    // Supersolution side via the reference-set inequality:
                    // resolving the switch chain xi -> ... -> xi_m, the PDE
                    // residual equals f(z, xi_m) - f(z, xi) - m delta K.
                    const auto chain = resolve_chain(store, z, xi, n);
                    const int m = static_cast<int>(chain.size()) - 1;
                    const double lhs = reward(p, z, chain.back()) - reward(p, z, xi);
                    const double deficit = m * p.delta * p.cost_k - lhs;
                    const double scale = 1 + std::abs(reward(p, z, xi));
                    lr.max_super_deficit = std::max(
                        lr.max_super_deficit, deficit / scale);
                }
            }
    }
    // strict dominance at continuation midpoints
    for (int n = 1; n <= store.n_max; ++n)
        for (Regime xi : {-1, 0, 1}) {
            LevelReport& lr = level_report(report, store, xi, n);
            for (const Piece& pc : store.at(xi, n).pieces) {
                if (pc.kind != Piece::Kind::continuation) continue;
                const double lo = std::max(pc.z_lo, spec.z_lo);
                const double hi = std::min(pc.z_hi, spec.z_hi);
                if (!(lo < hi)) continue;
                const double zm = 0.5 * (lo + hi);
                const Basis b = basis_at(store.constants.nu, zm);
                const double margin =
                    jet_with(store, b, xi, n).value - obstacle_with(store, b, xi, n);
                lr.min_midpoint_margin =
                    lr.min_midpoint_margin == 0
                        ? margin
                        : std::min(lr.min_midpoint_margin, margin);
            }
        }
    for (const auto& lr : report.levels) {
        report.max_pde_resid = std::max(report.max_pde_resid, lr.max_pde_resid);
        report.max_super_deficit =
            std::max(report.max_super_deficit, lr.max_super_deficit);
        report.min_dominance_margin =
            std::min(report.min_dominance_margin, lr.min_dominance_margin);
    }
}

void check_pasting(const SolutionStore& store, VerifyReport& report) {
    for (const auto& f : store.levels) {
        for (size_t i = 0; i + 1 < f.pieces.size(); ++i) {
            const double z = f.pieces[i].z_hi;
            const Piece& pl = f.pieces[i];
            const Piece& pr = f.pieces[i + 1];
            const Basis b = basis_at(store.constants.nu, z);
            auto side = [&](const Piece& pc) -> Jet {
                if (pc.kind == Piece::Kind::switching) {
                    Jet j = jet_with(store, b, pc.target, f.n - 1);
                    j.value -= store.params.cost_k;
                    return j;
                }
                Jet j = v_hat(store.params, z, f.xi);
                j.value += pc.c_plus * b.hp + pc.c_minus * b.hm;
                j.d1 += pc.c_plus * b.hdp - pc.c_minus * b.hdm;
                return j;
            };
            const Jet jl = side(pl);
            const Jet jr = side(pr);
            BoundaryCheck bc;
            bc.xi = f.xi;
            bc.n = f.n;
            bc.z = z;
            const Piece& sw = pl.kind == Piece::Kind::switching ? pl : pr;
            bc.target = sw.target;
            bc.value_mismatch = jl.value - jr.value;
            bc.d1_mismatch = jl.d1 - jr.d1;
            bc.jump_error = jet_with(store, b, f.xi, f.n).value -
                            (jet_with(store, b, sw.target, f.n - 1).value -
                             store.params.cost_k);
            report.boundaries.push_back(bc);
            const double vscale = 1 + std::abs(jl.value);
            report.max_value_mismatch = std::max(
                report.max_value_mismatch, std::abs(bc.value_mismatch) / vscale);
            report.max_d1_mismatch = std::max(
                report.max_d1_mismatch, std::abs(bc.d1_mismatch) / (1 + std::abs(jl.d1)));
            report.max_jump_error = std::max(report.max_jump_error,
                                             std::abs(bc.jump_error) / vscale);
        }
    }
}

void check_structure(const SolutionStore& store, VerifyReport& report) {
    const double slack = 1e-9;
    for (const auto& f : store.levels) {
        LevelReport& lr = level_report(report, store, f.xi, f.n);
        // containment in Q closures and one switching piece per component
        std::vector<std::pair<Interval, int>> occupancy;  // comp -> count
        for (Regime t : feasible_set(f.xi))
            for (const Interval& iv : reference_region(store.params, f.xi, t, 1))
                occupancy.push_back({iv, 0});
        int last_sw_target = 99;
        bool seen_cont_since = true;
        for (const Piece& pc : f.pieces) {
            if (pc.kind == Piece::Kind::continuation) {
                seen_cont_since = true;
                continue;
            }
            bool contained = false;
            for (auto& [iv, count] : occupancy)
                if (pc.z_lo >= iv.lo - slack && pc.z_hi <= iv.hi + slack) {
                    contained = true;
                    ++count;
                }
            if (!contained) lr.s_in_q = false;
            if (!seen_cont_since && pc.target != last_sw_target)
                lr.targets_separated = false;
            last_sw_target = pc.target;
            seen_cont_since = false;
            // chain audit at the piece midpoint (clipped for outer pieces)
            const double lo = std::max(pc.z_lo, -8.0);
            const double hi = std::min(pc.z_hi, 8.0);
            const double zm = 0.5 * (lo + hi);
            ChainEntry ce;
            ce.xi = f.xi;
            ce.n = f.n;
            ce.z = zm;
            ce.chain = resolve_chain(store, zm, f.xi, f.n);
            ce.recurrent = has_repeat(ce.chain);
            report.any_recurrent_chain |= ce.recurrent;
            report.chains.push_back(ce);
        }
        for (const auto& [iv, count] : occupancy)
            if (count > 1) lr.one_region_per_comp = false;
    }
}

void check_bounds_and_growth(const SolutionStore& store, const GridSpec& spec,
                             VerifyReport& report) {
    const std::vector<double> grid = build_grid(store, spec);
    double min_mono = kInf, min_vhat = kInf, max_sym = 0;
    bool growth = true;
    for (double z : grid) {
        const Basis b = basis_at(store.constants.nu, z);
        const Basis bm = {-z, b.hm, b.hp, b.hdm, b.hdp};  // basis at -z
        for (Regime xi : {-1, 0, 1}) {
            double prev = 0;
            for (int n = 0; n <= store.n_max; ++n) {
                const double v = value_with(store, b, xi, n);
                if (!std::isfinite(v)) growth = false;
                if (n >= 1) {
                    min_mono = std::min(min_mono, v - prev);
                    min_vhat =
                        std::min(min_vhat, v - v_hat(store.params, z, xi).value);
                }
                const double vm = value_with(store, bm, -xi, n);
                max_sym = std::max(max_sym,
                                   std::abs(v - vm) / (1 + std::abs(v)));
                prev = v;
            }
        }
    }
    report.min_monotone_margin = min_mono;
    report.min_vhat_margin = min_vhat;
    report.max_symmetry_error = max_sym;
    report.growth_bounded = growth;
    // outer decay of |v - v_hat| beyond the last boundary
    for (const auto& f : store.levels) {
        const Piece& last = f.pieces.back();
        const Piece& first = f.pieces.front();
        for (const Piece* pc : {&first, &last}) {
            if (pc->kind != Piece::Kind::continuation) continue;
            if (pc->z_lo != -kInf && pc->z_hi != kInf) continue;
            const double sgn = pc->z_hi == kInf ? 1.0 : -1.0;
            double prev_gap = kInf;
            for (double az : {4.0, 5.0, 6.0, 7.0}) {
                const double z = sgn * az;
                if (sgn > 0 ? z <= pc->z_lo : z >= pc->z_hi) continue;
                const double gap =
                    std::abs(evaluate(store, z, f.xi, f.n) -
                             v_hat(store.params, z, f.xi).value);
                if (gap > 1e-300 && gap >= prev_gap) report.outer_decay = false;
                if (gap > 1e-300) prev_gap = gap;
            }
        }
    }
}

VerifyReport run_all_checks(const SolutionStore& store, const GridSpec& spec,
                            const VerifyTolerances& tol) {
    VerifyReport r;
    check_variational_inequality(store, spec, r);
    check_pasting(store, r);
    check_structure(store, r);
    check_bounds_and_growth(store, spec, r);

    auto fail = [&](bool ok, const std::string& what) {
        if (!ok) r.failures.push_back(what);
    };
    fail(r.max_pde_resid <= tol.pde, "pde residual");
    fail(r.max_super_deficit <= tol.pde, "supersolution inequality");
    fail(r.min_dominance_margin >= -tol.dominance, "dominance margin");
    fail(r.max_value_mismatch <= tol.pasting, "pasting value continuity");
    fail(r.max_d1_mismatch <= tol.pasting, "pasting C1");
    fail(r.max_jump_error <= tol.pasting, "switch jump = K");
    fail(r.max_symmetry_error <= tol.symmetry, "mirror symmetry");
    fail(r.min_monotone_margin >= -tol.order, "monotonicity in n");
    fail(r.min_vhat_margin >= -tol.order, "lower bound v >= v_hat");
    fail(r.growth_bounded, "finite growth");
    fail(r.outer_decay, "outer decay of v - v_hat");
    for (const auto& lr : r.levels) {
        fail(lr.s_in_q, "S inside Q closure");
        fail(lr.one_region_per_comp, "one switching region per component");
        fail(lr.targets_separated, "distinct targets separated");
        if (lr.n >= 1 && lr.continuation_count > 0)
            fail(lr.min_midpoint_margin > 0 || lr.switching_count == 0,
                 "strict dominance at midpoints");
    }
    r.pass = r.failures.empty();
    return r;
}

}  // namespace ouswitch
