#pragma once

#include <vector>

#include "ouswitch/model.hpp"

// Piecewise representation of the value functions v(., xi, n): ordered
// pieces tiling the real line, each either a continuation piece (two
// Hermite coefficients on top of v_hat) or a switching piece that delegates
// to a level-(n-1) function minus the transaction cost.
namespace ouswitch {

struct Piece {
    enum class Kind { continuation, switching };
    Kind kind;
    double z_lo;  // -inf allowed on the first piece
    double z_hi;  // +inf allowed on the last piece
    // continuation only: coefficients of H_nu(z) and H_nu(-z)
    double c_plus = 0.0;
    double c_minus = 0.0;
    // switching only: regime attaining the obstacle max on this piece
    Regime target = 0;
};

struct PiecewiseValueFunction {
    Regime xi = 0;
    int n = 0;
    std::vector<Piece> pieces;
};

struct SolutionStore {
    ModelParams params;
    DerivedConstants constants;
    int n_max = 0;
    // index: n * 3 + (xi + 1)
    std::vector<PiecewiseValueFunction> levels;

    const PiecewiseValueFunction& at(Regime xi, int n) const {
        return levels[static_cast<size_t>(n) * 3 + (xi + 1)];
    }
    PiecewiseValueFunction& at(Regime xi, int n) {
        return levels[static_cast<size_t>(n) * 3 + (xi + 1)];
    }
};

// Level-0 function: a single continuation piece with zero coefficients.
PiecewiseValueFunction level_zero(Regime xi);

// Store containing only the three level-0 functions.
SolutionStore empty_store(const ModelParams& p);

// Index of the piece owning z.  Boundary points belong to the adjacent
// switching piece when there is one (S is closed, C is open); between two
// continuation pieces the left piece wins.
int find_piece(const PiecewiseValueFunction& f, double z);

struct Classification {
    Piece::Kind kind;
    Regime target;    // meaningful for switching only
    int piece_index;
};
Classification classify(const SolutionStore& store, double z, Regime xi, int n);

double evaluate(const SolutionStore& store, double z, Regime xi, int n);
double derivative(const SolutionStore& store, double z, Regime xi, int n);
// One-sided at piece boundaries: the owning piece per find_piece is used.
double second_derivative(const SolutionStore& store, double z, Regime xi, int n);

struct ObstacleValue {
    double value;
    Regime argmax;
    bool tie;
};
// max over feasible targets of v(z, target, n-1) - K.  Requires n >= 1.
ObstacleValue obstacle(const SolutionStore& store, double z, Regime xi, int n);

// Throws std::logic_error if the tiling/ordering invariants are violated.
void check_invariants(const PiecewiseValueFunction& f);

}  // namespace ouswitch
