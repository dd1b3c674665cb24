#include <doctest.h>

#include <cmath>

#include "ouswitch/solver.hpp"

using namespace ouswitch;

namespace {

const ModelParams kDefault{1.0, 0.0, 1.0, 0.3, 0.1, 0.05};
const ModelParams kStructure{1.0, 0.0, 1.0, 0.3, 0.1, 0.01};

const SolutionStore& store_default() {
    static const SolutionStore st = solve_all(kDefault, 5);
    return st;
}

const SolutionStore& store_structure() {
    static const SolutionStore st = solve_all(kStructure, 5);
    return st;
}

void check_boundary(double got, double want) {
    CHECK(std::abs(got - want) <= 1e-9);
}

}  // namespace

TEST_CASE("sorted components at the default instance") {
    auto c0 = sorted_components(kDefault, 0);
    REQUIRE(c0.size() == 2);
    CHECK(c0[0].target == 1);
    CHECK(c0[1].target == -1);
    CHECK(c0[0].hi < c0[1].lo);  // disjoint, ordered
    auto c1 = sorted_components(kDefault, 1);
    REQUIRE(c1.size() == 2);
    CHECK(c1[0].target == 0);
    CHECK(c1[1].target == 0);
    CHECK(std::isinf(c1[0].lo));
    CHECK(std::isinf(c1[1].hi));
}

// all reference values below are [DERIVED]: frozen from an independent
// 30-digit mpmath implementation of the same pasting system

TEST_CASE("default instance, level 1: regime -1 has two asymptotic boundaries") {
    const auto& f = store_default().at(-1, 1);
    REQUIRE(f.pieces.size() == 3);
    CHECK(f.pieces[0].kind == Piece::Kind::switching);
    CHECK(f.pieces[0].target == 0);
    check_boundary(f.pieces[0].z_hi, -0.8550091377606224074597);
    CHECK(f.pieces[1].kind == Piece::Kind::continuation);
    CHECK(f.pieces[1].c_plus ==
          doctest::Approx(1.716784196671586610545).epsilon(1e-10));
    CHECK(f.pieces[1].c_minus ==
          doctest::Approx(3.797440485075441997321e-18).epsilon(1e-6));
    check_boundary(f.pieces[1].z_hi, 6.391400027696992874621);
    CHECK(f.pieces[2].kind == Piece::Kind::switching);
    CHECK(f.pieces[2].target == 0);
}

TEST_CASE("default instance, level 1: regime 0 never switches (K too large)") {
    const auto& f = store_default().at(0, 1);
    REQUIRE(f.pieces.size() == 1);
    CHECK(f.pieces[0].kind == Piece::Kind::continuation);
    CHECK(f.pieces[0].c_plus == 0.0);
    CHECK(f.pieces[0].c_minus == 0.0);
}

TEST_CASE("default instance, level 2: regime 0 has the five-piece structure") {
    const auto& f = store_default().at(0, 2);
    REQUIRE(f.pieces.size() == 5);
    CHECK(f.pieces[0].kind == Piece::Kind::continuation);
    CHECK(f.pieces[0].c_minus ==
          doctest::Approx(1.6778329146482478281).epsilon(1e-9));
    check_boundary(f.pieces[0].z_hi, -3.178431150588178383955);
    CHECK(f.pieces[1].kind == Piece::Kind::switching);
    CHECK(f.pieces[1].target == 1);
    check_boundary(f.pieces[1].z_hi, -1.150886683354967731396);
    CHECK(f.pieces[2].kind == Piece::Kind::continuation);
    CHECK(f.pieces[2].c_plus ==
          doctest::Approx(0.3732101392905446048017).epsilon(1e-9));
    CHECK(f.pieces[2].c_minus ==
          doctest::Approx(0.3732101392905446048017).epsilon(1e-9));
    CHECK(f.pieces[3].kind == Piece::Kind::switching);
    CHECK(f.pieces[3].target == -1);
    check_boundary(f.pieces[3].z_hi, 3.178431150588178383955);
    CHECK(f.pieces[4].kind == Piece::Kind::continuation);
    CHECK(f.pieces[4].c_minus == 0.0);
}

TEST_CASE("default instance: levels alternate refinement") {
    const auto& st = store_default();
    // regime +-1 change only when regime 0 changed a level below
    for (Regime xi : {-1, 1}) {
        CHECK(st.at(xi, 2).pieces.size() == st.at(xi, 1).pieces.size());
        CHECK(st.at(xi, 2).pieces[1].z_hi ==
              doctest::Approx(st.at(xi, 1).pieces[1].z_hi));
    }
    CHECK(st.at(0, 3).pieces.size() == st.at(0, 2).pieces.size());
    CHECK(st.at(0, 3).pieces[2].c_plus ==
          doctest::Approx(st.at(0, 2).pieces[2].c_plus));
}

TEST_CASE("default instance, level 3: regime -1 boundaries tighten") {
    const auto& f = store_default().at(-1, 3);
    REQUIRE(f.pieces.size() == 3);
    check_boundary(f.pieces[0].z_hi, -0.7578658335465179549962);
    check_boundary(f.pieces[1].z_hi, 5.339735790803130242797);
    CHECK(f.pieces[1].c_plus ==
          doctest::Approx(2.360098530752516287052).epsilon(1e-10));
}

TEST_CASE("default instance: frozen sample values") {
    const auto& st = store_default();
    CHECK(evaluate(st, 0.0, 1, 1) ==
          doctest::Approx(0.3281904214709325821958).epsilon(1e-11));
    CHECK(evaluate(st, -1.0, 1, 1) ==
          doctest::Approx(0.9111589479750305273178).epsilon(1e-11));
    CHECK(evaluate(st, 2.0, -1, 1) ==
          doctest::Approx(1.303972969766732724611).epsilon(1e-11));
    CHECK(evaluate(st, 0.5, 0, 2) ==
          doctest::Approx(0.7846882293415588057802).epsilon(1e-11));
    CHECK(evaluate(st, -3.2, 0, 2) ==
          doctest::Approx(1.390090467108196313983).epsilon(1e-11));
    // inside a switching piece the value is exactly v(., 0, 1) - K = -K
    CHECK(evaluate(st, 1.5, 1, 2) == doctest::Approx(-0.05).epsilon(1e-13));
    CHECK(evaluate(st, 0.0, 0, 3) ==
          doctest::Approx(0.7638016892580305931761).epsilon(1e-11));
    CHECK(evaluate(st, -2.0, -1, 3) ==
          doctest::Approx(1.203972969766732724611).epsilon(1e-11));
}

TEST_CASE("structure instance K = 0.01, level 1: regime 0 five-piece structure") {
    const auto& f = store_structure().at(0, 1);
    REQUIRE(f.pieces.size() == 5);
    check_boundary(f.pieces[0].z_hi, -3.182625835588576507522);
    check_boundary(f.pieces[1].z_hi, -3.065150593686852312955);
    CHECK(f.pieces[1].target == 1);
    CHECK(f.pieces[2].c_plus ==
          doctest::Approx(6.665814028111884972062e-6).epsilon(1e-8));
    CHECK(f.pieces[3].target == -1);
    CHECK(f.pieces[0].c_minus ==
          doctest::Approx(0.009300469579519388722431).epsilon(1e-9));
}

TEST_CASE("structure instance: frozen boundaries for higher levels") {
    const auto& st = store_structure();
    const auto& f1 = st.at(-1, 1);
    check_boundary(f1.pieces[0].z_hi, -0.8454908284118751421676);
    check_boundary(f1.pieces[1].z_hi, 6.373688831278375457339);
    CHECK(f1.pieces[1].c_plus ==
          doctest::Approx(1.747239496793712257267).epsilon(1e-10));
    const auto& f3 = st.at(-1, 3);
    check_boundary(f3.pieces[0].z_hi, -0.7411845984568006693222);
    check_boundary(f3.pieces[1].z_hi, 5.274076119100772730208);
    const auto& f5s = st.at(0, 5);
    REQUIRE(f5s.pieces.size() == 5);
    check_boundary(f5s.pieces[0].z_hi, -3.182625877856416521217);
    check_boundary(f5s.pieces[1].z_hi, -0.9220834511082927744466);
    CHECK(f5s.pieces[0].c_minus ==
          doctest::Approx(2.44875531796059736704).epsilon(1e-9));
    CHECK(f5s.pieces[2].c_plus ==
          doctest::Approx(0.6678451881853175286741).epsilon(1e-9));
    const auto& f5 = st.at(-1, 5);
    check_boundary(f5.pieces[0].z_hi, -0.6682674922237088846489);
    check_boundary(f5.pieces[1].z_hi, 4.952232978755673806849);
    CHECK(f5.pieces[1].c_plus ==
          doctest::Approx(2.911137449248398966747).epsilon(1e-10));
}

TEST_CASE("structure instance: frozen sample values") {
    const auto& st = store_structure();
    CHECK(evaluate(st, 0.0, 0, 1) ==
          doctest::Approx(1.364207313507124312774e-5).epsilon(1e-8));
    CHECK(evaluate(st, 0.0, 1, 1) ==
          doctest::Approx(0.359354914649439884756).epsilon(1e-11));
    CHECK(evaluate(st, -1.0, 1, 1) ==
          doctest::Approx(0.9390723640008349562914).epsilon(1e-11));
    CHECK(evaluate(st, 2.0, -1, 1) ==
          doctest::Approx(1.330330514021884925563).epsilon(1e-11));
    CHECK(evaluate(st, 0.5, 0, 2) ==
          doctest::Approx(0.841779318723725478705).epsilon(1e-11));
    CHECK(evaluate(st, -3.2, 0, 2) ==
          doctest::Approx(1.45529953610541700058).epsilon(1e-11));
    CHECK(evaluate(st, 1.5, 1, 2) ==
          doctest::Approx(-0.009978218404115324114844).epsilon(1e-10));
    CHECK(evaluate(st, 0.0, 0, 3) ==
          doctest::Approx(0.8193816939303601870685).epsilon(1e-11));
    CHECK(evaluate(st, -2.0, -1, 3) ==
          doctest::Approx(1.310330514021884925563).epsilon(1e-11));
    CHECK(evaluate(st, 3.1, 0, 5) ==
          doctest::Approx(2.033966406165101170735).epsilon(1e-11));
}

TEST_CASE("mirror symmetry v(z, xi, n) = v(-z, -xi, n)") {
    const auto& st = store_default();
    for (int n = 0; n <= 5; ++n)
        for (Regime xi : {-1, 0, 1})
            for (double z : {-4.0, -1.3, 0.0, 0.6, 2.9, 5.5}) {
                CHECK(evaluate(st, z, xi, n) ==
                      doctest::Approx(evaluate(st, -z, -xi, n)).epsilon(1e-11));
            }
}

TEST_CASE("solve_all is deterministic (bitwise)") {
    const SolutionStore a = solve_all(kDefault, 2);
    const SolutionStore b = solve_all(kDefault, 2);
    REQUIRE(a.levels.size() == b.levels.size());
    for (size_t i = 0; i < a.levels.size(); ++i) {
        REQUIRE(a.levels[i].pieces.size() == b.levels[i].pieces.size());
        for (size_t j = 0; j < a.levels[i].pieces.size(); ++j) {
            CHECK(a.levels[i].pieces[j].z_hi == b.levels[i].pieces[j].z_hi);
            CHECK(a.levels[i].pieces[j].c_plus == b.levels[i].pieces[j].c_plus);
            CHECK(a.levels[i].pieces[j].c_minus == b.levels[i].pieces[j].c_minus);
        }
    }
}

TEST_CASE("pasting residual vanishes at the solved boundaries") {
    const auto& st = store_default();
    const auto sps = enumerate_subproblems(st, -1, 1);
    // the bounded subproblem between the two components
    bool found_bounded = false;
    for (const auto& sp : sps)
        if (sp.kind == Subproblem::Kind::bounded) {
            found_bounded = true;
            const auto pr = pasting_residual(st, sp, -0.8550091377606224074597,
                                             6.391400027696992874621);
            CHECK(std::abs(pr.r_left) <= 1e-8);
            CHECK(std::abs(pr.r_right) <= 1e-8);
        }
    CHECK(found_bounded);
}
