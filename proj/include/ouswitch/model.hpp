#pragma once

#include <vector>

// Problem instance: parameters, regimes, running reward, the closed-form
// zero-switch value function, derived constants and reference regions.
namespace ouswitch {

// Regimes: +1 long A / short B, -1 long B / short A, 0 square.
using Regime = int;

struct ModelParams {
    double theta;   // mean-reversion intensity, > 0
    double mu;      // long-run mean of the raw spread X
    double sigma;   // volatility of X, > 0
    double lambda;  // risk-aversion weight, > 0
    double delta;   // discount rate, > 0
    double cost_k;  // transaction cost per switch, > 0
};

struct DerivedConstants {
    double nu;  // Hermite degree -delta/theta
    double k0;
    double k1;
    double k2;  // = (delta/theta) * k0
};

struct Jet {
    double value;
    double d1;
    double d2;
};

// Closed interval, possibly unbounded on one side.
struct Interval {
    double lo;
    double hi;
};

// Throws std::invalid_argument naming the violated invariant.  Includes the
// structural feasibility check: the two reference regions for regime 0 must
// be non-empty and disjoint.
void validate_params(const ModelParams& p);

std::vector<Regime> feasible_set(Regime xi);

// Running reward f(z, xi) = -(xi sqrt(theta) sigma z + lambda |xi| sigma^2/theta z^2).
double reward(const ModelParams& p, double z, Regime xi);

// No-switch value v_hat(z, xi) = -(k2 |xi| z^2 + k1 xi z + k0 |xi|) with
// first two derivatives.
Jet v_hat(const ModelParams& p, double z, Regime xi);

DerivedConstants derived_constants(const ModelParams& p);

// Solution set of f(z, xi_hat) - f(z, xi) >= m * delta * K as 0, 1 or 2
// disjoint closed intervals in increasing order.
std::vector<Interval> reference_region(const ModelParams& p, Regime xi,
                                       Regime xi_hat, int m);

double spread_to_state(const ModelParams& p, double x);
double state_to_spread(const ModelParams& p, double z);

// Residual of delta*V - (theta/2) V'' + theta z V' - f(z, xi) at a jet.
double pde_residual(const ModelParams& p, double value, double d1, double d2,
                    double z, Regime xi);

}  // namespace ouswitch
