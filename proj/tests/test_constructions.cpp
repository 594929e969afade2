#include "circlelab/constructions.hpp"

#include "circlelab/errors.hpp"
#include "doctest.h"

#include <algorithm>

using namespace circlelab;

namespace {

CirclePoint ppoint(long p, long q = 1) {
    return CirclePoint::projective(Quad(Rat(p, q)));
}

Quad sqrt2() { return Quad(Rat(0), Rat(1), Int(2)); }

}  // namespace

TEST_CASE("two-scalings group: construction and exact presentation") {
    TwoScalingsGroup G = build_two_scalings_group(Rat(2), Rat(3));

    SUBCASE("generator values") {
        CHECK(pw_evaluate(G.f, ppoint(1)) == ppoint(2));
        CHECK(pw_evaluate(G.f, ppoint(0)) == ppoint(0));
        CHECK(pw_evaluate(G.f, CirclePoint::infinity()).is_infinity());
        CHECK(pw_evaluate(G.f, ppoint(-1)) == ppoint(-3));
        // g = R f R scales by 1/mu above 0 and 1/lambda below.
        CHECK(pw_evaluate(G.g, ppoint(1)) == ppoint(1, 3));
        CHECK(pw_evaluate(G.g, ppoint(-2)) == ppoint(-1));
    }

    SUBCASE("relations hold as exact map identities") {
        CHECK(pw_equal(pw_compose(G.half_turn, G.half_turn),
                       PiecewiseMap::identity(Universe::PwMoebius)));
        CHECK(pw_equal(pw_compose(pw_compose(G.half_turn, G.f), G.half_turn), G.g));
        CHECK(pw_equal(pw_compose(G.f, G.g), pw_compose(G.g, G.f)));
        CHECK(G.relations.size() == 3);
    }

    SUBCASE("f^a g^b is nontrivial with fixed points exactly {0, infinity}") {
        for (auto [a, b] : {std::pair<long, long>{1, 0}, {0, 1}, {2, -1}, {1, 1}, {-3, 2}}) {
            PiecewiseMap w = pw_compose(pw_power(G.f, a), pw_power(G.g, b));
            FixedPointReport rep = fixed_points_report(w);
            REQUIRE(rep.count() == 2);
            CHECK(rep.points[0].point == CirclePoint::infinity());
            CHECK(rep.points[1].point == ppoint(0));
        }
    }

    SUBCASE("(f^a g^b R)^2 = f^(a+b) g^(a+b)") {
        for (auto [a, b] : {std::pair<long, long>{1, 0}, {2, -1}, {1, 1}}) {
            PiecewiseMap h = pw_compose(pw_compose(pw_power(G.f, a), pw_power(G.g, b)),
                                        G.half_turn);
            PiecewiseMap expect =
                pw_compose(pw_power(G.f, a + b), pw_power(G.g, a + b));
            CHECK(pw_equal(pw_compose(h, h), expect));
        }
        // a + b = 0 makes f^a g^(-a) R an exact involution.
        PiecewiseMap inv =
            pw_compose(pw_compose(G.f, pw_inverse(G.g)), G.half_turn);
        CHECK(pw_equal(pw_compose(inv, inv),
                       PiecewiseMap::identity(Universe::PwMoebius)));
        CHECK_FALSE(inv.is_identity());
    }

    SUBCASE("element types: f hyperbolic-like, f g beyond the Moebius menagerie") {
        CHECK(classify_element(G.f).kind == ElementKind::HyperbolicLike);
        CHECK(classify_element(pw_compose(G.f, G.g)).kind == ElementKind::NotMoebiusLike);
    }

    SUBCASE("word ball: at most two fixed points, attained") {
        WordBallReport rep = word_ball_max_fixed(G.generators(), 4, 2);
        CHECK(rep.max_fixed_points == 2);
        CHECK_FALSE(rep.counterexample.has_value());
        CHECK(rep.distinct_nontrivial > 0);
        CHECK_FALSE(word_to_map(G.generators(), rep.witness).is_identity());
    }
}

TEST_CASE("two-scalings group: parameter validation") {
    CHECK_THROWS_AS(build_two_scalings_group(Rat(2), Rat(2)), DependentParameters);
    CHECK_THROWS_AS(build_two_scalings_group(Rat(4), Rat(2)), DependentParameters);
    CHECK_THROWS_AS(build_two_scalings_group(Rat(9, 4), Rat(3, 2)), DependentParameters);
    CHECK_THROWS_AS(build_two_scalings_group(Rat(8), Rat(32)), DependentParameters);
    CHECK_THROWS_AS(build_two_scalings_group(Rat(1), Rat(3)), WrongInput);
    CHECK_THROWS_AS(build_two_scalings_group(Rat(2), Rat(1, 2)), WrongInput);
    CHECK_NOTHROW(build_two_scalings_group(Rat(3, 2), Rat(2)));
    CHECK_NOTHROW(build_two_scalings_group(Rat(6), Rat(10)));
}

TEST_CASE("involution action matrix") {
    SUBCASE("two-scalings group: the swap") {
        TwoScalingsGroup G = build_two_scalings_group(Rat(2), Rat(3));
        auto m = involution_action_matrix(G);
        CHECK(m[0][0] == 0);
        CHECK(m[1][0] == 1);
        CHECK(m[0][1] == 1);
        CHECK(m[1][1] == 0);
    }

    SUBCASE("global scalings against the half-turn: minus the identity") {
        PiecewiseMap f = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(2))));
        PiecewiseMap g = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(3))));
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        auto m = involution_action_matrix(f, g, R);
        CHECK(m[0][0] == -1);
        CHECK(m[1][0] == 0);
        CHECK(m[0][1] == 0);
        CHECK(m[1][1] == -1);
    }

    SUBCASE("commuting involution: the identity matrix") {
        // Irrational rotation angles so that small powers of f and g are
        // pairwise distinct; the half-rotation commutes with both.
        PiecewiseMap f = PiecewiseMap::rigid_rotation(Quad(Rat(0), Rat(1, 4), Int(2)));
        PiecewiseMap g = PiecewiseMap::rigid_rotation(Quad(Rat(0), Rat(1, 9), Int(2)));
        PiecewiseMap R = PiecewiseMap::rigid_rotation(Quad(Rat(1, 2)));
        auto m = involution_action_matrix(f, g, R);
        CHECK(m[0][0] == 1);
        CHECK(m[1][0] == 0);
        CHECK(m[0][1] == 0);
        CHECK(m[1][1] == 1);
    }

    SUBCASE("conjugate not in the basis lattice") {
        PiecewiseMap f = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(2))));
        PiecewiseMap g = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(3))));
        // A conjugated half-turn: still order 2, but it carries scalings to
        // Moebius maps that are not scalings.
        PiecewiseMap T =
            PiecewiseMap::single_moebius(MoebiusMap::translation(Quad(Rat(1))));
        PiecewiseMap R = pw_compose(
            pw_compose(T, PiecewiseMap::single_moebius(MoebiusMap::half_turn())),
            pw_inverse(T));
        REQUIRE(pw_compose(R, R).is_identity());
        CHECK_THROWS_AS(involution_action_matrix(f, g, R), BasisFailure);
    }

    SUBCASE("bound validation") {
        TwoScalingsGroup G = build_two_scalings_group(Rat(2), Rat(3));
        CHECK_THROWS_AS(involution_action_matrix(G.f, G.g, G.half_turn, 0), WrongInput);
    }
}

TEST_CASE("parabolic translations with a rigid rotation") {
    SUBCASE("t = sqrt(2), rho = 1/7: free-product evidence and the blown stabilizer") {
        ParabolicRotationGroup G =
            build_parabolic_rotation_group(sqrt2(), Rat(1, 7), 4);

        CHECK(pw_evaluate(G.t_alpha, ppoint(3)) == ppoint(4));
        CHECK(pw_evaluate(G.t_alpha, CirclePoint::infinity()).is_infinity());
        CHECK(pw_evaluate(G.t_beta, CirclePoint::infinity()).is_infinity());
        CHECK(G.rotation.rigid_angle().has_value());

        CHECK(G.words_checked > 100);
        CHECK(G.stabilizer_is_translations);
        // The ball words certified to fix infinity are exactly the pure
        // translation words: nontrivial (a, b) with |a| + |b| <= 4.
        CHECK(G.stabilizer_words.size() == 40);
        for (const GroupWord& w : G.stabilizer_words) {
            CHECK_FALSE(w.empty());
            for (const Letter& l : w.letters()) CHECK(l.gen != 2);
        }

        REQUIRE(G.blown_alpha_fixed.count() == 2);
        CHECK(G.blown_alpha_fixed.points[0].nature == LocalNature::ParabolicAboveBoth);
        CHECK(G.blown_alpha_fixed.points[1].nature == LocalNature::ParabolicAboveBoth);

        SUBCASE("the blown map still semi-conjugates onto the base parabolic") {
            SemiConjugacyReport rep =
                semiconjugacy_check(G.blown_alpha, 40, Rat(1, 10000));
            CHECK(rep.ok);
        }
    }

    SUBCASE("rational translation length degenerates the lattice") {
        CHECK_THROWS_AS(build_parabolic_rotation_group(Quad(Rat(1)), Rat(1, 7), 4),
                        WrongInput);
        CHECK_THROWS_AS(build_parabolic_rotation_group(Quad(Rat(3, 2)), Rat(1, 7), 4),
                        WrongInput);
    }

    SUBCASE("integer rotation angle and empty ball are rejected") {
        CHECK_THROWS_AS(build_parabolic_rotation_group(sqrt2(), Rat(2), 4), WrongInput);
        CHECK_THROWS_AS(build_parabolic_rotation_group(sqrt2(), Rat(1, 7), 0), WrongInput);
    }

    SUBCASE("rho = 1/2 carries a genuine relation in the depth-6 ball") {
        // Projectively the half-turn H satisfies (T H)^3 = -I, the identity
        // of the projective circle, so a nontrivial normal-form word of
        // weight 6 acts trivially.
        CHECK_THROWS_AS(build_parabolic_rotation_group(sqrt2(), Rat(1, 2), 6), BadRho);
    }
}
