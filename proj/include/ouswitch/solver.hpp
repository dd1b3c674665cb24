#pragma once

#include <vector>

#include "ouswitch/piecewise.hpp"

// Level-by-level construction of the SolutionStore: reference-region
// enumeration, smooth-pasting subproblems, asymptotic (semi-infinite)
// subproblems, and assembly with a merging rule for reference components
// that carry no switching region.
namespace ouswitch {

struct SolverSettings {
    int bracket_grid = 2001;     // scan resolution per reference component
    double tol_boundary = 1e-12; // root tolerance in z
    double tol_check = 1e-9;     // pasting-residual / dominance acceptance
    double z_max = 8.0;          // working domain half-width
    int max_iter = 200;          // refinement iteration cap
};

// One connected component of a reference region, tagged with its target.
struct QComp {
    double lo;
    double hi;
    Regime target;
};

// All reference components for regime xi at switch-count threshold m,
// sorted left to right.  Throws std::runtime_error if components overlap
// (Assumption 3.1 violated).
std::vector<QComp> sorted_components(const ModelParams& p, Regime xi, int m = 1);

struct Subproblem {
    Regime xi = 0;
    int n = 0;
    enum class Kind { bounded, left_infinite, right_infinite };
    Kind kind = Kind::bounded;
    // Each subproblem determines one continuation piece [x_l, x_r]; the
    // brackets localize the unknown boundaries inside reference components.
    Interval left_bracket{0, 0};   // absent for left_infinite
    Interval right_bracket{0, 0};  // absent for right_infinite
    Regime left_target = 0;
    Regime right_target = 0;
};

// Subproblems induced by a sorted component list (used directly by
// solve_level, including on merged sublists).
std::vector<Subproblem> subproblems_for(const std::vector<QComp>& comps,
                                        Regime xi, int n);

// Subproblems for the full component list of (xi, n).
std::vector<Subproblem> enumerate_subproblems(const SolutionStore& store,
                                              Regime xi, int n);

struct PastingResult {
    double r_left = 0;   // u'(x_l) - g'(x_l); 0 where the side is absent
    double r_right = 0;
    double c_plus = 0;
    double c_minus = 0;
    double cond = 1;     // 1-norm condition estimate of the 2x2 system
};

// Eliminates the linear coefficients through the value-match equations and
// returns the derivative mismatches.  For semi-infinite kinds only the
// relevant boundary argument is read.  Throws std::runtime_error when the
// 2x2 system's condition number exceeds 1e12 or the obstacle ties at a
// candidate boundary.
PastingResult pasting_residual(const SolutionStore& store, const Subproblem& sp,
                               double x_l, double x_r);

struct SubproblemSolution {
    bool found = false;   // false: "no switching region here" verdict
    double x_l = 0;       // left boundary of the continuation piece
    double x_r = 0;
    double c_plus = 0;
    double c_minus = 0;
};

// Scan + bisection + secant polish inside the brackets; admits a root only
// if boundaries stay in their component closures, the dominance condition
// holds on a dense grid, and residuals are within tol_check.  Throws on
// ambiguous (multiple admissible) roots.
SubproblemSolution solve_subproblem(const SolutionStore& store,
                                    const Subproblem& sp,
                                    const SolverSettings& settings);

// Solves level n for all three regimes (levels 0..n-1 must be present).
void solve_level(SolutionStore& store, int n, const SolverSettings& settings);

SolutionStore solve_all(const ModelParams& p, int n_max,
                        const SolverSettings& settings = {});

}  // namespace ouswitch
