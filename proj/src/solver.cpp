#include "ouswitch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "ouswitch/specfun.hpp"

namespace ouswitch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCondLimit = 1e12;

// Basis/obstacle data at one point, for one expected obstacle branch.
struct PointData {
    double z;
    double hp, hm;    // H_nu(z), H_nu(-z)
    double hdp, hdm;  // H'_nu(z), H'_nu(-z)  (d/dz H_nu(-z) = -hdm)
    double vh, vhd;   // v_hat jet
    double g, gd;     // obstacle branch v(z, target, n-1) - K and derivative
};

PointData point_data(const SolutionStore& st, double z, Regime xi, int n,
                     Regime target) {
    const double nu = st.constants.nu;
    PointData d;
    d.z = z;
    d.hp = specfun::hermite_h(nu, z);
    d.hm = specfun::hermite_h(nu, -z);
    d.hdp = specfun::hermite_h_d1(nu, z);
    d.hdm = specfun::hermite_h_d1(nu, -z);
    const Jet vj = v_hat(st.params, z, xi);
    d.vh = vj.value;
    d.vhd = vj.d1;
    d.g = evaluate(st, z, target, n - 1) - st.params.cost_k;
    d.gd = derivative(st, z, target, n - 1);
    return d;
}

struct PairEval {
    double r_left, r_right, c_plus, c_minus, cond;
};

// Solve the 2x2 value-match system for (c_plus, c_minus) and return the
// derivative mismatches at both boundaries.
PairEval pair_eval(const PointData& a, const PointData& b) {
    const double det = a.hp * b.hm - a.hm * b.hp;
    const double ra = a.g - a.vh;
    const double rb = b.g - b.vh;
    // Conditioning is judged after column equilibration: the two basis
    // columns differ in scale by up to e^{z^2} (the growing branch), which
    // is benign; only genuine near-degeneracy should trip the limit.
    const double m1 = std::max(std::abs(a.hp), std::abs(b.hp));
    const double m2 = std::max(std::abs(a.hm), std::abs(b.hm));
    const double det_s = det / (m1 * m2);
    const double norm = std::max(std::abs(a.hp) / m1 + std::abs(b.hp) / m1,
                                 std::abs(a.hm) / m2 + std::abs(b.hm) / m2);
    const double inv_norm = std::max(std::abs(b.hm) / m2 + std::abs(b.hp) / m1,
                                     std::abs(a.hm) / m2 + std::abs(a.hp) / m1);
    PairEval e;
    e.cond = norm * inv_norm / std::abs(det_s);
    e.c_plus = (ra * b.hm - a.hm * rb) / det;
    e.c_minus = (a.hp * rb - ra * b.hp) / det;
    e.r_left = e.c_plus * a.hdp - e.c_minus * a.hdm + a.vhd - a.gd;
    e.r_right = e.c_plus * b.hdp - e.c_minus * b.hdm + b.vhd - b.gd;
    return e;
}

// Semi-infinite pieces: one coefficient from the value match, one residual.
double left_coef(const PointData& a) { return (a.g - a.vh) / a.hm; }
double left_resid(const PointData& a) {
    return -left_coef(a) * a.hdm + a.vhd - a.gd;
}
double right_coef(const PointData& b) { return (b.g - b.vh) / b.hp; }
double right_resid(const PointData& b) {
    return right_coef(b) * b.hdp + b.vhd - b.gd;
}

double clip(double z, double z_max) {
    return std::min(z_max, std::max(-z_max, z));
}

// Bracketed root refinement: bisection with a clipped secant step.
template <typename F>
double refine_root(const F& f, double lo, double hi, double flo, double fhi,
                   const SolverSettings& s) {
    for (int it = 0; it < s.max_iter && hi - lo > s.tol_boundary; ++it) {
        double x = lo - flo * (hi - lo) / (fhi - flo);  // secant
        const double w = hi - lo;
        if (!std::isfinite(x) || x <= lo + 0.05 * w || x >= hi - 0.05 * w)
            x = 0.5 * (lo + hi);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((flo < 0) == (fx < 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

struct Candidate {
    double x_l, x_r, c_plus, c_minus, r_left, r_right;
};

// Admission: boundaries in component closures, matching obstacle branch
// without tie, residual size, and dominance on the continuation interval.
bool admit(const SolutionStore& st, const Subproblem& sp,
           const SolverSettings& settings, const Candidate& c) {
    const double slack = 64 * settings.tol_boundary;
    if (sp.kind != Subproblem::Kind::left_infinite) {
        if (c.x_l < sp.left_bracket.lo - slack || c.x_l > sp.left_bracket.hi + slack)
            return false;
        if (std::abs(c.r_left) > settings.tol_check) return false;
        const ObstacleValue o = obstacle(st, c.x_l, sp.xi, sp.n);
        if (o.tie || o.argmax != sp.left_target) return false;
    }
    if (sp.kind != Subproblem::Kind::right_infinite) {
        if (c.x_r < sp.right_bracket.lo - slack || c.x_r > sp.right_bracket.hi + slack)
            return false;
        if (std::abs(c.r_right) > settings.tol_check) return false;
        const ObstacleValue o = obstacle(st, c.x_r, sp.xi, sp.n);
        if (o.tie || o.argmax != sp.right_target) return false;
    }
    // dominance of the continuation candidate over the obstacle
    const double lo = sp.kind == Subproblem::Kind::left_infinite
                          ? -settings.z_max
                          : c.x_l;
    const double hi = sp.kind == Subproblem::Kind::right_infinite
                          ? settings.z_max
                          : c.x_r;
    const double nu = st.constants.nu;
    const int m = 512;
    for (int i = 0; i <= m; ++i) {
        const double z = lo + (hi - lo) * i / m;
        double u = v_hat(st.params, z, sp.xi).value;
        if (c.c_plus != 0.0) u += c.c_plus * specfun::hermite_h(nu, z);
        if (c.c_minus != 0.0) u += c.c_minus * specfun::hermite_h(nu, -z);
        const double margin = u - obstacle(st, z, sp.xi, sp.n).value;
        if (margin < -settings.tol_check) return false;
        if (i == m / 2 && !(margin > 0)) return false;  // strict at midpoint
    }
    return true;
}

SubproblemSolution pick_unique(const SolutionStore& st, const Subproblem& sp,
                               const SolverSettings& settings,
                               std::vector<Candidate>& cands) {
    std::vector<Candidate> admitted;
    for (const Candidate& c : cands) {
        bool dup = false;
        for (const Candidate& d : admitted)
            dup = dup || (std::abs(c.x_l - d.x_l) < 1e-8 &&
                          std::abs(c.x_r - d.x_r) < 1e-8);
        if (!dup && admit(st, sp, settings, c)) admitted.push_back(c);
    }
    if (admitted.size() > 1)
        throw std::runtime_error(
            "solve_subproblem: multiple admissible roots in one subproblem");
    SubproblemSolution sol;
    if (admitted.empty()) return sol;
    sol.found = true;
    sol.x_l = admitted[0].x_l;
    sol.x_r = admitted[0].x_r;
    sol.c_plus = admitted[0].c_plus;
    sol.c_minus = admitted[0].c_minus;
    return sol;
}

}  // namespace

std::vector<QComp> sorted_components(const ModelParams& p, Regime xi, int m) {
    std::vector<QComp> comps;
    for (Regime t : feasible_set(xi))
        for (const Interval& iv : reference_region(p, xi, t, m))
            comps.push_back({iv.lo, iv.hi, t});
    std::sort(comps.begin(), comps.end(),
              [](const QComp& a, const QComp& b) { return a.lo < b.lo; });
    for (size_t i = 0; i + 1 < comps.size(); ++i)
        if (comps[i].hi >= comps[i + 1].lo)
            throw std::runtime_error("sorted_components: overlapping reference regions");
    return comps;
}

std::vector<Subproblem> subproblems_for(const std::vector<QComp>& comps,
                                        Regime xi, int n) {
    std::vector<Subproblem> out;
    if (comps.empty()) return out;
    if (comps.front().lo > -kInf) {
        Subproblem sp;
        sp.xi = xi;
        sp.n = n;
        sp.kind = Subproblem::Kind::left_infinite;
        sp.right_bracket = {comps.front().lo, comps.front().hi};
        sp.right_target = comps.front().target;
        out.push_back(sp);
    }
    for (size_t i = 0; i + 1 < comps.size(); ++i) {
        Subproblem sp;
        sp.xi = xi;
        sp.n = n;
        sp.kind = Subproblem::Kind::bounded;
        sp.left_bracket = {comps[i].lo, comps[i].hi};
        sp.left_target = comps[i].target;
        sp.right_bracket = {comps[i + 1].lo, comps[i + 1].hi};
        sp.right_target = comps[i + 1].target;
        out.push_back(sp);
    }
    if (comps.back().hi < kInf) {
        Subproblem sp;
        sp.xi = xi;
        sp.n = n;
        sp.kind = Subproblem::Kind::right_infinite;
        sp.left_bracket = {comps.back().lo, comps.back().hi};
        sp.left_target = comps.back().target;
        out.push_back(sp);
    }
    return out;
}

std::vector<Subproblem> enumerate_subproblems(const SolutionStore& store,
                                              Regime xi, int n) {
    return subproblems_for(sorted_components(store.params, xi), xi, n);
}

PastingResult pasting_residual(const SolutionStore& store, const Subproblem& sp,
                               double x_l, double x_r) {
    PastingResult res;
    auto check_tie = [&](double z) {
        if (obstacle(store, z, sp.xi, sp.n).tie)
            throw std::runtime_error("pasting_residual: obstacle tie at boundary");
    };
    switch (sp.kind) {
        case Subproblem::Kind::left_infinite: {
            check_tie(x_r);
            const PointData b = point_data(store, x_r, sp.xi, sp.n, sp.right_target);
            res.c_minus = left_coef(b);
            res.r_right = left_resid(b);
            break;
        }
        case Subproblem::Kind::right_infinite: {
            check_tie(x_l);
            const PointData a = point_data(store, x_l, sp.xi, sp.n, sp.left_target);
            res.c_plus = right_coef(a);
            res.r_left = right_resid(a);
            break;
        }
        case Subproblem::Kind::bounded: {
            check_tie(x_l);
            check_tie(x_r);
            const PointData a = point_data(store, x_l, sp.xi, sp.n, sp.left_target);
            const PointData b = point_data(store, x_r, sp.xi, sp.n, sp.right_target);
            const PairEval e = pair_eval(a, b);
            if (e.cond > kCondLimit)
                throw std::runtime_error(
                    "pasting_residual: ill-conditioned basis system, cond = " +
                    std::to_string(e.cond));
            res = {e.r_left, e.r_right, e.c_plus, e.c_minus, e.cond};
            break;
        }
    }
    return res;
}

SubproblemSolution solve_subproblem(const SolutionStore& store,
                                    const Subproblem& sp,
                                    const SolverSettings& settings) {
    const int N = settings.bracket_grid;
    std::vector<Candidate> cands;

    if (sp.kind != Subproblem::Kind::bounded) {
        const bool left = sp.kind == Subproblem::Kind::left_infinite;
        const Interval br = left ? sp.right_bracket : sp.left_bracket;
        const Regime target = left ? sp.right_target : sp.left_target;
        const double lo = clip(br.lo, settings.z_max);
        const double hi = clip(br.hi, settings.z_max);
        auto resid = [&](double z) {
            const PointData d = point_data(store, z, sp.xi, sp.n, target);
            return left ? left_resid(d) : right_resid(d);
        };
        double prev_z = lo, prev_f = resid(lo);
        for (int i = 1; i < N; ++i) {
            const double z = lo + (hi - lo) * i / (N - 1);
            const double f = resid(z);
            if ((prev_f < 0) != (f < 0) || prev_f == 0.0) {
                const double root =
                    prev_f == 0.0 ? prev_z
                                  : refine_root(resid, prev_z, z, prev_f, f, settings);
                const PointData d = point_data(store, root, sp.xi, sp.n, target);
                Candidate c{};
                if (left) {
                    c.x_l = -kInf;
                    c.x_r = root;
                    c.c_minus = left_coef(d);
                    c.r_right = left_resid(d);
                } else {
                    c.x_l = root;
                    c.x_r = kInf;
                    c.c_plus = right_coef(d);
                    c.r_left = right_resid(d);
                }
                cands.push_back(c);
            }
            prev_z = z;
            prev_f = f;
        }
        return pick_unique(store, sp, settings, cands);
    }

    // bounded: nested scan, outer over the left boundary
    const double lo_a = clip(sp.left_bracket.lo, settings.z_max);
    const double hi_a = clip(sp.left_bracket.hi, settings.z_max);
    const double lo_b = clip(sp.right_bracket.lo, settings.z_max);
    const double hi_b = clip(sp.right_bracket.hi, settings.z_max);

    std::vector<PointData> grid_b;
    grid_b.reserve(N);
    for (int j = 0; j < N; ++j)
        grid_b.push_back(point_data(store, lo_b + (hi_b - lo_b) * j / (N - 1),
                                    sp.xi, sp.n, sp.right_target));

    // For a fixed left boundary, locate the right boundary where the right
    // residual vanishes; returns the full pair evaluation there.
    auto inner = [&](const PointData& a) -> std::optional<std::pair<double, PairEval>> {
        double prev_z = grid_b[0].z;
        double prev_f = pair_eval(a, grid_b[0]).r_right;
        for (int j = 1; j < N; ++j) {
            const double f = pair_eval(a, grid_b[j]).r_right;
            const double z = grid_b[j].z;
            if ((prev_f < 0) != (f < 0) || prev_f == 0.0) {
                auto fb = [&](double zb) {
                    return pair_eval(a, point_data(store, zb, sp.xi, sp.n,
                                                   sp.right_target))
                        .r_right;
                };
                const double root =
                    prev_f == 0.0 ? prev_z
                                  : refine_root(fb, prev_z, z, prev_f, f, settings);
                const PointData b =
                    point_data(store, root, sp.xi, sp.n, sp.right_target);
                return std::make_pair(root, pair_eval(a, b));
            }
            prev_z = z;
            prev_f = f;
        }
        return std::nullopt;
    };

    std::optional<double> prev_r1;
    double prev_a = lo_a;
    for (int i = 0; i < N; ++i) {
        const double za = lo_a + (hi_a - lo_a) * i / (N - 1);
        const PointData a = point_data(store, za, sp.xi, sp.n, sp.left_target);
        const auto in = inner(a);
        std::optional<double> r1;
        if (in) r1 = in->second.r_left;
        if (prev_r1 && r1 && ((*prev_r1 < 0) != (*r1 < 0) || *prev_r1 == 0.0)) {
            auto fa = [&](double z) {
                const PointData ad = point_data(store, z, sp.xi, sp.n, sp.left_target);
                const auto res = inner(ad);
                if (!res) throw std::runtime_error(
                    "solve_subproblem: inner root lost during outer refinement");
                return res->second.r_left;
            };
            const double root_a =
                *prev_r1 == 0.0 ? prev_a
                                : refine_root(fa, prev_a, za, *prev_r1, *r1, settings);
            const PointData ad = point_data(store, root_a, sp.xi, sp.n, sp.left_target);
            const auto res = inner(ad);
            if (res) {
                const PairEval& e = res->second;
                if (e.cond > kCondLimit)
                    throw std::runtime_error(
                        "solve_subproblem: ill-conditioned basis system");
                cands.push_back({root_a, res->first, e.c_plus, e.c_minus,
                                 e.r_left, e.r_right});
            }
        }
        prev_r1 = r1;
        prev_a = za;
    }
    return pick_unique(store, sp, settings, cands);
}

namespace {

// Attempt a full level-(xi, n) assembly using only the given components.
std::optional<std::vector<Piece>> attempt_assembly(
    const SolutionStore& st, Regime xi, int n, const std::vector<QComp>& comps,
    const SolverSettings& settings) {
    if (comps.empty()) {
        // pure continuation: v_hat must dominate the obstacle everywhere
        const int m = 512;
        for (int i = 0; i <= m; ++i) {
            const double z = -settings.z_max + 2 * settings.z_max * i / m;
            const double margin =
                v_hat(st.params, z, xi).value - obstacle(st, z, xi, n).value;
            if (margin < -settings.tol_check) return std::nullopt;
        }
        return std::vector<Piece>{
            {Piece::Kind::continuation, -kInf, kInf, 0.0, 0.0, 0}};
    }

    const auto sps = subproblems_for(comps, xi, n);
    std::vector<SubproblemSolution> sols;
    for (const auto& sp : sps) {
        SubproblemSolution s = solve_subproblem(st, sp, settings);
        if (!s.found) return std::nullopt;
        sols.push_back(s);
    }

    // switching interval [s_i, t_i] per component
    const size_t nc = comps.size();
    std::vector<double> s(nc), t(nc);
    std::vector<const SubproblemSolution*> left_of(nc + 1, nullptr);
    size_t si = 0;
    const bool has_left = comps.front().lo > -kInf;
    if (has_left) left_of[0] = &sols[si++];
    for (size_t i = 0; i + 1 < nc; ++i) left_of[i + 1] = &sols[si++];
    const bool has_right = comps.back().hi < kInf;
    const SubproblemSolution* right_sol = has_right ? &sols[si++] : nullptr;

    for (size_t i = 0; i < nc; ++i) {
        s[i] = left_of[i] ? left_of[i]->x_r : -kInf;
        if (i + 1 < nc)
            t[i] = left_of[i + 1]->x_l;
        else
            t[i] = right_sol ? right_sol->x_l : kInf;
        if (!(s[i] < t[i])) return std::nullopt;  // component carries no region
    }

    std::vector<Piece> pieces;
    auto cont_piece = [](double lo, double hi, const SubproblemSolution& s) {
        return Piece{Piece::Kind::continuation, lo, hi, s.c_plus, s.c_minus, 0};
    };
    if (has_left) pieces.push_back(cont_piece(-kInf, s[0], *left_of[0]));
    for (size_t i = 0; i < nc; ++i) {
        pieces.push_back(
            {Piece::Kind::switching, s[i], t[i], 0.0, 0.0, comps[i].target});
        if (i + 1 < nc) pieces.push_back(cont_piece(t[i], s[i + 1], *left_of[i + 1]));
    }
    if (has_right) pieces.push_back(cont_piece(t[nc - 1], kInf, *right_sol));
    return pieces;
}

}  // namespace

void solve_level(SolutionStore& store, int n, const SolverSettings& settings) {
    if (store.levels.size() != static_cast<size_t>(n) * 3)
        throw std::logic_error("solve_level: levels 0..n-1 must be present");
    std::vector<PiecewiseValueFunction> done;
    for (Regime xi : {-1, 0, 1}) {
        const auto comps = sorted_components(store.params, xi);
        std::optional<std::vector<Piece>> best;
        // Merging rule: drop components that carry no switching region.
        // Subsets tried largest-first in lexicographic order; the first
        // fully admissible assembly wins.
        const size_t nc = comps.size();
        for (size_t drop_count = 0; drop_count <= nc && !best; ++drop_count) {
            const size_t keep_count = nc - drop_count;
            std::vector<bool> mask(nc, false);
            std::fill(mask.begin(), mask.begin() + keep_count, true);
            do {
                std::vector<QComp> sub;
                for (size_t i = 0; i < nc; ++i)
                    if (mask[i]) sub.push_back(comps[i]);
                best = attempt_assembly(store, xi, n, sub, settings);
                if (best) break;
            } while (std::prev_permutation(mask.begin(), mask.end()));
        }
        if (!best)
            throw std::runtime_error(
                "solve_level: no admissible structure for xi=" + std::to_string(xi) +
                ", n=" + std::to_string(n));
        PiecewiseValueFunction f;
        f.xi = xi;
        f.n = n;
        f.pieces = std::move(*best);
        check_invariants(f);
        done.push_back(std::move(f));
    }
    for (auto& f : done) store.levels.push_back(std::move(f));
    store.n_max = n;
}

SolutionStore solve_all(const ModelParams& p, int n_max,
                        const SolverSettings& settings) {
    validate_params(p);
    SolutionStore store = empty_store(p);
    for (int n = 1; n <= n_max; ++n) solve_level(store, n, settings);
    store.n_max = n_max;
    return store;
}

}  // namespace ouswitch
