#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ouswitch/model.hpp"

using namespace ouswitch;

namespace {

const ModelParams kDefault{1.0, 0.0, 1.0, 0.3, 0.1, 0.05};

}  // namespace

TEST_CASE("derived constants at the default instance") {
    const DerivedConstants c = derived_constants(kDefault);
    CHECK(c.nu == doctest::Approx(-0.1).epsilon(1e-15));
    // k2 = lambda sigma^2 / (theta (2 theta + delta)) = 0.3/2.1
    CHECK(c.k2 == doctest::Approx(0.3 / 2.1).epsilon(1e-15));
    // k1 = sqrt(theta) sigma / (delta + theta) = 1/1.1
    CHECK(c.k1 == doctest::Approx(1.0 / 1.1).epsilon(1e-15));
    // k0 = lambda sigma^2 / (delta (2 theta + delta)) = 0.3/0.21
    CHECK(c.k0 == doctest::Approx(0.3 / 0.21).epsilon(1e-15));
    CHECK(c.k2 == doctest::Approx(c.k0 * kDefault.delta / kDefault.theta));
}

TEST_CASE("feasible sets") {
    CHECK(feasible_set(0) == std::vector<Regime>{-1, 1});
    CHECK(feasible_set(1) == std::vector<Regime>{0});
    CHECK(feasible_set(-1) == std::vector<Regime>{0});
}

TEST_CASE("reward and its symmetry f(z,xi) = f(-z,-xi)") {
    CHECK(reward(kDefault, 0.0, 1) == 0.0);
    CHECK(reward(kDefault, 0.0, 0) == 0.0);
    CHECK(reward(kDefault, 2.0, -1) == doctest::Approx(2.0 - 0.3 * 4.0));
    for (double z : {-3.0, -0.7, 0.4, 2.6})
        for (Regime xi : {-1, 0, 1})
            CHECK(reward(kDefault, z, xi) ==
                  doctest::Approx(reward(kDefault, -z, -xi)).epsilon(1e-15));
}

TEST_CASE("v_hat is the particular solution: PDE residual vanishes") {
    for (double z = -8.0; z <= 8.0; z += 0.25)
        for (Regime xi : {-1, 0, 1}) {
            const Jet j = v_hat(kDefault, z, xi);
            const double scale = 1.0 + std::abs(reward(kDefault, z, xi));
            CHECK(std::abs(pde_residual(kDefault, j.value, j.d1, j.d2, z, xi)) <=
                  1e-12 * scale);
        }
    // regime 0 collects nothing and pays nothing
    CHECK(v_hat(kDefault, 1.7, 0).value == 0.0);
    CHECK(v_hat(kDefault, 1.7, 0).d1 == 0.0);
}

TEST_CASE("v_hat jet is internally consistent") {
    const double h = 1e-6;
    for (double z : {-2.0, 0.3, 4.1})
        for (Regime xi : {-1, 1}) {
            const Jet j = v_hat(kDefault, z, xi);
            const double fd1 = (v_hat(kDefault, z + h, xi).value -
                                v_hat(kDefault, z - h, xi).value) /
                               (2 * h);
            CHECK(j.d1 == doctest::Approx(fd1).epsilon(1e-8));
            CHECK(j.d2 == doctest::Approx(-2.0 * 0.3 / 2.1).epsilon(1e-12));
        }
}

TEST_CASE("reference regions at the default instance") {
    // [DERIVED] Q(0,+1): -z - 0.3 z^2 >= 0.005, endpoints (-1 -+ sqrt(0.994))/0.6
    auto q = reference_region(kDefault, 0, 1, 1);
    REQUIRE(q.size() == 1);
    CHECK(q[0].lo == doctest::Approx(-3.328325810748602356091).epsilon(1e-14));
    CHECK(q[0].hi == doctest::Approx(-0.005007522584730977242146).epsilon(1e-10));
    // mirror component for target -1
    auto qm = reference_region(kDefault, 0, -1, 1);
    REQUIRE(qm.size() == 1);
    CHECK(qm[0].lo == doctest::Approx(-q[0].hi).epsilon(1e-12));
    CHECK(qm[0].hi == doctest::Approx(-q[0].lo).epsilon(1e-12));
    // Q(+1,0): z + 0.3 z^2 >= 0.005, complement-type pair of rays
    auto q1 = reference_region(kDefault, 1, 0, 1);
    REQUIRE(q1.size() == 2);
    CHECK(std::isinf(q1[0].lo));
    CHECK(q1[0].hi == doctest::Approx(-3.338325855749311121127).epsilon(1e-13));
    CHECK(q1[1].lo == doctest::Approx(0.004992522415977787793845).epsilon(1e-9));
    CHECK(std::isinf(q1[1].hi));
    // m = 2 shrinks the region strictly
    auto q2 = reference_region(kDefault, 0, 1, 2);
    REQUIRE(q2.size() == 1);
    CHECK(q2[0].lo > q[0].lo);
    CHECK(q2[0].hi < q[0].hi);
}

TEST_CASE("reference regions, structure instance K = 0.01") {
    ModelParams p = kDefault;
    p.cost_k = 0.01;
    auto q = reference_region(p, 0, 1, 1);
    REQUIRE(q.size() == 1);
    CHECK(q[0].lo == doctest::Approx(-3.332333033153198219831).epsilon(1e-14));
    CHECK(q[0].hi == doctest::Approx(-0.001000300180135113502156).epsilon(1e-10));
}

TEST_CASE("validate_params") {
    CHECK_NOTHROW(validate_params(kDefault));
    ModelParams bad = kDefault;
    bad.theta = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = kDefault;
    bad.sigma = -1.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = kDefault;
    bad.delta = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    bad = kDefault;
    bad.cost_k = 0.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
    // structural feasibility: delta K above the vertex of f(.,+1) - f(.,0)
    // (max = theta sigma^2 / (4 lambda) scaled form; here 1/(4*0.3) = 0.8333)
    bad = kDefault;
    bad.cost_k = 9.0;
    CHECK_THROWS_AS(validate_params(bad), std::invalid_argument);
}

TEST_CASE("spread/state transforms invert each other") {
    ModelParams p{2.0, 0.4, 1.7, 0.3, 0.1, 0.05};
    for (double x : {-3.0, 0.0, 0.4, 5.2}) {
        CHECK(state_to_spread(p, spread_to_state(p, x)) ==
              doctest::Approx(x).epsilon(1e-14));
    }
    CHECK(spread_to_state(p, 0.4) == 0.0);
}
