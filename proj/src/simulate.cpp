#include "ouswitch/simulate.hpp"

#include <cmath>
#include <cstdlib>

namespace ouswitch {

namespace {

// --- deterministic per-path RNG: splitmix64-seeded xoshiro256++ ---

struct SplitMix64 {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

struct Xoshiro256pp {
    std::uint64_t s[4];
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : s) w = sm.next();
    }
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
    std::uint32_t next32() { return static_cast<std::uint32_t>(next() >> 32); }
    double uniform() {  // (0,1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// --- 128-layer ziggurat for the standard normal (Marsaglia & Tsang) ---

struct Ziggurat {
    std::uint32_t kn[128];
    double wn[128], fn[128];
    Ziggurat() {
        const double m = 2147483648.0;
        double dn = 3.442619855899, tn = dn;
        const double vn = 9.91256303526217e-3;
        double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint32_t>((dn / q) * m);
        kn[1] = 0;
        wn[0] = q / m;
        wn[127] = dn / m;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m;
        }
    }
};

const Ziggurat kZig;

double normal_tail(Xoshiro256pp& rng, bool negative) {
    const double r = 3.442619855899;
    double x, y;
    do {
        x = -std::log(rng.uniform()) / r;
        y = -std::log(rng.uniform());
    } while (y + y < x * x);
    return negative ? -(r + x) : r + x;
}

double normal(Xoshiro256pp& rng) {
    for (;;) {
        const std::int32_t hz = static_cast<std::int32_t>(rng.next32());
        const std::uint32_t iz = hz & 127;
        const std::uint32_t ahz = hz < 0 ? -static_cast<std::int64_t>(hz) : hz;
        if (ahz < kZig.kn[iz]) return hz * kZig.wn[iz];
        if (iz == 0) return normal_tail(rng, hz < 0);
        const double x = hz * kZig.wn[iz];
        if (kZig.fn[iz] + rng.uniform() * (kZig.fn[iz - 1] - kZig.fn[iz]) <
            std::exp(-0.5 * x * x))
            return x;
    }
}

// switching intervals of (xi, rem), with the regime switched into
struct SwitchTable {
    int count = 0;
    double lo[4], hi[4];
    Regime target[4];
    bool empty() const { return count == 0; }
};

SwitchTable switch_table(const SolutionStore& st, Regime xi, int rem) {
    SwitchTable t;
    for (const Piece& p : st.at(xi, rem).pieces)
        if (p.kind == Piece::Kind::switching) {
            t.lo[t.count] = p.z_lo;
            t.hi[t.count] = p.z_hi;
            t.target[t.count] = p.target;
            ++t.count;
        }
    return t;
}

}  // namespace

double ou_step(double z, double theta, double dt, double gaussian) {
    const double decay = std::exp(-theta * dt);
    const double s = std::sqrt(0.5 * (1.0 - decay * decay));
    return z * decay + s * gaussian;
}

SimulationRecord run_policy(const SolutionStore& store, const SimConfig& config,
                            long path_index) {
    const ModelParams& p = store.params;
    SimulationRecord rec;
    Xoshiro256pp rng(config.seed * 0x9e3779b97f4a7c15ULL +
                     static_cast<std::uint64_t>(path_index) + 1);

    const double decay = std::exp(-p.theta * config.dt);
    const double snoise = std::sqrt(0.5 * (1.0 - decay * decay));
    const double ed = std::exp(-p.delta * config.dt);
    const double c1 = std::sqrt(p.theta) * p.sigma;
    const double c2 = p.lambda * p.sigma * p.sigma / p.theta;
    const long steps = std::lround(config.horizon / config.dt);

    double z = config.z0;
    Regime xi = config.xi0;
    int rem = config.n;
    double disc = 1.0;

    SwitchTable table = switch_table(store, xi, rem);
    for (long step = 0; step < steps;) {
        // simultaneous multi-switch chain at the current instant
        bool switched = true;
        while (switched && rem > 0) {
            switched = false;
            for (int k = 0; k < table.count; ++k)
                if (z >= table.lo[k] && z <= table.hi[k]) {
                    const double t_now = step * config.dt;
                    xi = table.target[k];
                    --rem;
                    rec.switch_cost += disc * p.cost_k;
                    rec.switches.push_back({t_now, xi});
                    table = rem > 0 ? switch_table(store, xi, rem) : SwitchTable{};
                    switched = true;
                    break;
                }
        }
        // nothing further can ever happen: zero reward and no switch left
        if (xi == 0 && table.empty()) break;

        // integrate until the state enters a switching interval
        if (rem > 0 && !table.empty()) {
            rec.reward_integral +=
                disc * -(z * (c1 * xi + c2 * z * std::abs(xi))) * config.dt;
            z = z * decay + snoise * normal(rng);
            disc *= ed;
            ++step;
            bool inside = false;
            for (int k = 0; k < table.count; ++k)
                inside = inside || (z >= table.lo[k] && z <= table.hi[k]);
            if (!inside) continue;
        } else {
            // free run: no switches remain (or none reachable for this regime)
            for (; step < steps; ++step) {
                rec.reward_integral +=
                disc * -(z * (c1 * xi + c2 * z * std::abs(xi))) * config.dt;
                z = z * decay + snoise * normal(rng);
                disc *= ed;
            }
        }
    }
    rec.total = rec.reward_integral - rec.switch_cost;
    return rec;
}

McResult mc_value(const SolutionStore& store, const SimConfig& config) {
    // Neumaier-compensated accumulation keeps the reduction deterministic to
    // well below reporting precision.
    double sum = 0, comp = 0, sumsq = 0, compsq = 0;
    for (long i = 0; i < config.paths; ++i) {
        const double x = run_policy(store, config, i).total;
        double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        const double x2 = x * x;
        t = sumsq + x2;
        compsq += std::abs(sumsq) >= std::abs(x2) ? (sumsq - t) + x2
                                                  : (x2 - t) + sumsq;
        sumsq = t;
    }
    const double n = static_cast<double>(config.paths);
    McResult r;
    r.mean = (sum + comp) / n;
    const double var =
        std::max(0.0, ((sumsq + compsq) / n - r.mean * r.mean) * n / (n - 1));
    r.stderr_ = std::sqrt(var / n);
    double vmax = 0;
    for (int i = 0; i <= 320; ++i) {
        const double z = -8.0 + 16.0 * i / 320;
        for (Regime xi : {-1, 0, 1})
            vmax = std::max(vmax, std::abs(evaluate(store, z, xi, config.n)));
    }
    r.truncation_bound = std::exp(-store.params.delta * config.horizon) * vmax;
    return r;
}

}  // namespace ouswitch
