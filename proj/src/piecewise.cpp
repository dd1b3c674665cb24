#include "ouswitch/piecewise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ouswitch/specfun.hpp"

namespace ouswitch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PiecewiseValueFunction level_zero(Regime xi) {
    PiecewiseValueFunction f;
    f.xi = xi;
    f.n = 0;
    f.pieces.push_back({Piece::Kind::continuation, -kInf, kInf, 0.0, 0.0, 0});
    return f;
}

SolutionStore empty_store(const ModelParams& p) {
    SolutionStore s;
    s.params = p;
    s.constants = derived_constants(p);
    s.n_max = 0;
    for (Regime xi : {-1, 0, 1})  // index order n*3 + (xi+1)
        s.levels.push_back(level_zero(xi));
    return s;
}

int find_piece(const PiecewiseValueFunction& f, double z) {
    const auto& ps = f.pieces;
    for (size_t i = 0; i < ps.size(); ++i) {
        if (z < ps[i].z_lo || z > ps[i].z_hi) continue;
        // boundary point shared with the next piece: prefer switching
        if (z == ps[i].z_hi && i + 1 < ps.size() &&
            ps[i].kind == Piece::Kind::continuation &&
            ps[i + 1].kind == Piece::Kind::switching)
            return static_cast<int>(i + 1);
        return static_cast<int>(i);
    }
    throw std::domain_error("find_piece: z outside tiling (NaN?)");
}

Classification classify(const SolutionStore& store, double z, Regime xi, int n) {
    const auto& f = store.at(xi, n);
    const int idx = find_piece(f, z);
    const Piece& p = f.pieces[idx];
    return {p.kind, p.target, idx};
}

double evaluate(const SolutionStore& store, double z, Regime xi, int n) {
    const auto& f = store.at(xi, n);
    const Piece& p = f.pieces[find_piece(f, z)];
    if (p.kind == Piece::Kind::switching)
        return evaluate(store, z, p.target, n - 1) - store.params.cost_k;
    double h = v_hat(store.params, z, xi).value;
    const double nu = store.constants.nu;
    if (p.c_plus != 0.0) h += p.c_plus * specfun::hermite_h(nu, z);
    if (p.c_minus != 0.0) h += p.c_minus * specfun::hermite_h(nu, -z);
    return h;
}

double derivative(const SolutionStore& store, double z, Regime xi, int n) {
    const auto& f = store.at(xi, n);
    const Piece& p = f.pieces[find_piece(f, z)];
    if (p.kind == Piece::Kind::switching)
        return derivative(store, z, p.target, n - 1);
    double h = v_hat(store.params, z, xi).d1;
    const double nu = store.constants.nu;
    if (p.c_plus != 0.0) h += p.c_plus * specfun::hermite_h_d1(nu, z);
    if (p.c_minus != 0.0) h -= p.c_minus * specfun::hermite_h_d1(nu, -z);
    return h;
}

double second_derivative(const SolutionStore& store, double z, Regime xi, int n) {
    const auto& f = store.at(xi, n);
    const Piece& p = f.pieces[find_piece(f, z)];
    if (p.kind == Piece::Kind::switching)
        return second_derivative(store, z, p.target, n - 1);
    double h = v_hat(store.params, z, xi).d2;
    const double nu = store.constants.nu;
    if (p.c_plus != 0.0) h += p.c_plus * specfun::hermite_h_d2(nu, z);
    if (p.c_minus != 0.0) h += p.c_minus * specfun::hermite_h_d2(nu, -z);
    return h;
}

ObstacleValue obstacle(const SolutionStore& store, double z, Regime xi, int n) {
    if (n < 1) throw std::logic_error("obstacle: n must be >= 1");
    ObstacleValue best{-kInf, 0, false};
    for (Regime t : feasible_set(xi)) {
        const double v = evaluate(store, z, t, n - 1) - store.params.cost_k;
        if (v > best.value) {
            best = {v, t, false};
        } else if (v == best.value) {
            best.tie = true;
        }
    }
    return best;
}

void check_invariants(const PiecewiseValueFunction& f) {
    const auto& ps = f.pieces;
    if (ps.empty()) throw std::logic_error("piecewise: empty piece list");
    if (ps.front().z_lo != -kInf || ps.back().z_hi != kInf)
        throw std::logic_error("piecewise: tiling does not span the real line");
    for (size_t i = 0; i < ps.size(); ++i) {
        if (!(ps[i].z_lo < ps[i].z_hi))
            throw std::logic_error("piecewise: degenerate piece");
        if (i + 1 < ps.size()) {
            if (ps[i].z_hi != ps[i + 1].z_lo)
                throw std::logic_error("piecewise: gap or overlap between pieces");
            if (ps[i].kind == Piece::Kind::switching &&
                ps[i + 1].kind == Piece::Kind::switching)
                throw std::logic_error("piecewise: adjacent switching pieces");
        }
        if (ps[i].kind == Piece::Kind::continuation) {
            // H_nu(z) blows up as z -> -inf and H_nu(-z) as z -> +inf, so a
            // piece unbounded on one side must drop the growing branch.
            if (ps[i].z_lo == -kInf && ps[i].c_plus != 0.0)
                throw std::logic_error("piecewise: growing branch on left-infinite piece");
            if (ps[i].z_hi == kInf && ps[i].c_minus != 0.0)
                throw std::logic_error("piecewise: growing branch on right-infinite piece");
        } else {
            bool ok = false;
            for (Regime t : feasible_set(f.xi)) ok = ok || t == ps[i].target;
            if (!ok) throw std::logic_error("piecewise: infeasible switching target");
        }
    }
    if (f.n == 0 &&
        (ps.size() != 1 || ps[0].kind != Piece::Kind::continuation ||
         ps[0].c_plus != 0.0 || ps[0].c_minus != 0.0))
        throw std::logic_error("piecewise: level 0 must be the bare v_hat");
}

}  // namespace ouswitch
