#include "ouswitch/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ouswitch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<Regime> feasible_set(Regime xi) {
    if (xi == 0) return {-1, 1};
    return {0};
}

double reward(const ModelParams& p, double z, Regime xi) {
    const double axi = std::abs(xi);
    return -(xi * std::sqrt(p.theta) * p.sigma * z +
             p.lambda * axi * p.sigma * p.sigma / p.theta * z * z);
}

DerivedConstants derived_constants(const ModelParams& p) {
    DerivedConstants c;
    c.nu = -p.delta / p.theta;
    c.k2 = p.lambda * p.sigma * p.sigma / (p.theta * (2 * p.theta + p.delta));
    c.k1 = std::sqrt(p.theta) * p.sigma / (p.delta + p.theta);
    c.k0 = p.lambda * p.sigma * p.sigma / (p.delta * (2 * p.theta + p.delta));
    return c;
}

Jet v_hat(const ModelParams& p, double z, Regime xi) {
    const DerivedConstants c = derived_constants(p);
    const double axi = std::abs(xi);
    Jet j;
    j.value = -(c.k2 * axi * z * z + c.k1 * xi * z + c.k0 * axi);
    j.d1 = -(2 * c.k2 * axi * z + c.k1 * xi);
    j.d2 = -2 * c.k2 * axi;
    return j;
}

std::vector<Interval> reference_region(const ModelParams& p, Regime xi,
                                       Regime xi_hat, int m) {
    // f(z, xi_hat) - f(z, xi) >= m delta K, a quadratic inequality
    //   c2 z^2 + c1 z + c0 >= 0.
    const double A = std::sqrt(p.theta) * p.sigma;
    const double B = p.lambda * p.sigma * p.sigma / p.theta;
    const double c2 = B * (std::abs(xi) - std::abs(xi_hat));
    const double c1 = A * (xi - xi_hat);
    const double c0 = -m * p.delta * p.cost_k;

    std::vector<Interval> out;
    if (c2 == 0.0) {
        if (c1 == 0.0) {
            if (c0 >= 0.0) out.push_back({-kInf, kInf});
            return out;
        }
        const double r = -c0 / c1;
        if (c1 > 0)
            out.push_back({r, kInf});
        else
            out.push_back({-kInf, r});
        return out;
    }
    const double disc = c1 * c1 - 4 * c2 * c0;
    if (disc < 0.0) {
        if (c2 > 0) out.push_back({-kInf, kInf});
        return out;
    }
    const double sq = std::sqrt(disc);
    const double r1 = (-c1 - sq) / (2 * c2);
    const double r2 = (-c1 + sq) / (2 * c2);
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    if (c2 > 0) {
        out.push_back({-kInf, lo});
        out.push_back({hi, kInf});
    } else {
        out.push_back({lo, hi});
    }
    return out;
}

void validate_params(const ModelParams& p) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(p.theta > 0)) fail("theta must be > 0");
    if (!(p.sigma > 0)) fail("sigma must be > 0");
    if (!(p.delta > 0)) fail("delta must be > 0");
    if (!(p.cost_k > 0)) fail("cost_k must be > 0");
    if (!(p.lambda > 0)) fail("lambda must be > 0");
    if (!std::isfinite(p.mu)) fail("mu must be finite");
    // Structural feasibility for regime 0: both reference regions exist and
    // do not touch.
    auto qp = reference_region(p, 0, 1, 1);
    auto qm = reference_region(p, 0, -1, 1);
    if (qp.empty()) fail("empty reference region for xi=0 (target +1)");
    if (qm.empty()) fail("empty reference region for xi=0 (target -1)");
    for (const auto& a : qp)
        for (const auto& b : qm)
            if (a.lo <= b.hi && b.lo <= a.hi)
                fail("overlapping reference regions for xi=0");
}

double spread_to_state(const ModelParams& p, double x) {
    return (x - p.mu) * std::sqrt(p.theta) / p.sigma;
}

double state_to_spread(const ModelParams& p, double z) {
    return p.mu + z * p.sigma / std::sqrt(p.theta);
}

double pde_residual(const ModelParams& p, double value, double d1, double d2,
                    double z, Regime xi) {
    return p.delta * value - 0.5 * p.theta * d2 + p.theta * z * d1 -
           reward(p, z, xi);
}

}  // namespace ouswitch
