#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ouswitch/verify.hpp"

namespace ouswitch {

namespace {

// Tridiagonal solve (Thomas algorithm); overwrites its scratch copies.
void thomas(const std::vector<double>& sub, const std::vector<double>& diag,
            const std::vector<double>& sup, const std::vector<double>& rhs,
            std::vector<double>& x) {
    const size_t n = diag.size();
    static thread_local std::vector<double> c, d;
    c.assign(n, 0.0);
    d.assign(n, 0.0);
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (size_t i = 1; i < n; ++i) {
        const double m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    x.assign(n, 0.0);
    x[n - 1] = d[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
}

}  // namespace

FdOracleResult fd_oracle(const ModelParams& p, int n_levels, int nodes,
                         double z_max, double oracle_tol, double buffer) {
    if (nodes < 201) throw std::invalid_argument("fd_oracle: nodes < 201");
    const double h = 2 * z_max / (nodes - 1);
    const int extra = static_cast<int>(std::ceil(buffer / h));
    const int m = nodes + 2 * extra;  // working nodes on [-z_ext, z_ext]
    const double z_lo = -z_max - extra * h;

    std::vector<double> z(m);
    for (int i = 0; i < m; ++i) z[i] = z_lo + i * h;

    // discrete operator rows of delta*V - (theta/2)V'' + theta z V'
    // (central differences; the drift never dominates diffusion here since
    // |z| << 1/h, but fall back to one-sided drift if it ever does)
    std::vector<double> a_sub(m), a_diag(m), a_sup(m);
    for (int i = 0; i < m; ++i) {
        const double diff = 0.5 * p.theta / (h * h);
        const double drift = p.theta * z[i];
        if (std::abs(z[i]) < 1.0 / h) {
            a_sub[i] = -diff - drift / (2 * h);
            a_diag[i] = p.delta + 2 * diff;
            a_sup[i] = -diff + drift / (2 * h);
        } else if (drift > 0) {  // upwind: one-sided difference
            a_sub[i] = -diff - drift / h;
            a_diag[i] = p.delta + 2 * diff + drift / h;
            a_sup[i] = -diff;
        } else {
            a_sub[i] = -diff;
            a_diag[i] = p.delta + 2 * diff - drift / h;
            a_sup[i] = -diff + drift / h;
        }
    }

    FdOracleResult out;
    out.values.resize(n_levels + 1);

    // full working-grid solutions per (xi, n)
    std::vector<std::array<std::vector<double>, 3>> full(n_levels + 1);
    for (Regime xi : {-1, 0, 1}) {
        auto& v0 = full[0][xi + 1];
        v0.resize(m);
        for (int i = 0; i < m; ++i) v0[i] = v_hat(p, z[i], xi).value;
    }

    std::vector<double> sub(m), diag(m), sup(m), rhs(m), v(m), g(m);
    std::vector<char> active(m);
    for (int n = 1; n <= n_levels; ++n) {
        for (Regime xi : {-1, 0, 1}) {
            for (int i = 0; i < m; ++i) {
                double best = -1e300;
                for (Regime t : feasible_set(xi))
                    best = std::max(best, full[n - 1][t + 1][i] - p.cost_k);
                g[i] = best;
            }
            std::fill(active.begin(), active.end(), 0);
            v = full[0][xi + 1];  // warm start from v_hat
            bool stable = false;
            // the active-set boundary can travel only one node per sweep when
            // started far from the solution, so the cap must scale with m
            const int max_sweeps = 10 * m;
            for (int it = 0; it < max_sweeps && !stable; ++it) {
                ++out.iterations_total;
                for (int i = 0; i < m; ++i) {
                    if (i == 0 || i == m - 1) {
                        sub[i] = 0;
                        diag[i] = 1;
                        sup[i] = 0;
                        rhs[i] = v_hat(p, z[i], xi).value;
                    } else if (active[i]) {
                        sub[i] = 0;
                        diag[i] = 1;
                        sup[i] = 0;
                        rhs[i] = g[i];
                    } else {
                        sub[i] = a_sub[i];
                        diag[i] = a_diag[i];
                        sup[i] = a_sup[i];
                        rhs[i] = reward(p, z[i], xi);
                    }
                }
                thomas(sub, diag, sup, rhs, v);
                stable = true;
                double resid = 0, scale = 1;
                for (int i = 1; i + 1 < m; ++i) {
                    const double pde_r = a_sub[i] * v[i - 1] + a_diag[i] * v[i] +
                                         a_sup[i] * v[i + 1] -
                                         reward(p, z[i], xi);
                    resid = std::max(resid, std::abs(std::min(pde_r, v[i] - g[i])));
                    scale = std::max(scale, std::abs(v[i]));
                    const char want = pde_r > v[i] - g[i] ? 1 : 0;
                    if (want != active[i]) {
                        active[i] = want;
                        stable = false;
                    }
                }
                // borderline nodes can flip at roundoff level forever; the
                // complementarity residual is the quantity that matters
                if (resid <= 1e-12 * scale) stable = true;
            }
            if (!stable)
                throw std::runtime_error("fd_oracle: policy iteration stalled");
            // complementarity residual of the discrete system
            for (int i = 1; i + 1 < m; ++i) {
                const double pde_r = a_sub[i] * v[i - 1] + a_diag[i] * v[i] +
                                     a_sup[i] * v[i + 1] - reward(p, z[i], xi);
                const double r = std::min(pde_r, v[i] - g[i]);
                out.max_complementarity_resid =
                    std::max(out.max_complementarity_resid, std::abs(r));
            }
            full[n][xi + 1] = v;
        }
    }
    if (out.max_complementarity_resid > oracle_tol)
        throw std::runtime_error("fd_oracle: complementarity residual too large");

    out.grid.assign(z.begin() + extra, z.end() - extra);
    for (int n = 0; n <= n_levels; ++n)
        for (int k = 0; k < 3; ++k)
            out.values[n][k].assign(full[n][k].begin() + extra,
                                    full[n][k].end() - extra);
    return out;
}

double fd_gap(const FdOracleResult& fd, const SolutionStore& store, Regime xi,
              int n) {
    double gap = 0;
    for (size_t i = 0; i < fd.grid.size(); ++i)
        gap = std::max(gap, std::abs(fd.values[n][xi + 1][i] -
                                     evaluate(store, fd.grid[i], xi, n)));
    return gap;
}

}  // namespace ouswitch
