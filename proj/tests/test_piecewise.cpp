#include "circlelab/errors.hpp"
#include "circlelab/piecewise.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace circlelab;
using testutil::random_pw_affine;

namespace {

PiecewiseMap rigid(long p, long q) { return PiecewiseMap::rigid_rotation(Quad(Rat(p, q))); }

/// Two-piece scaling map: l*x on [0,inf), m*x on [inf,0) — continuous at 0
/// and inf, hyperbolic-like for l>1>1/m style choices.
PiecewiseMap two_scalings(long l_num, long l_den, long m_num, long m_den) {
    MoebiusMap up = MoebiusMap::scaling(Quad(Rat(l_num, l_den)));
    MoebiusMap down = MoebiusMap::scaling(Quad(Rat(m_num, m_den)));
    return PiecewiseMap::moebius(
        {CirclePoint::infinity(), CirclePoint::projective(Quad(Rat(0)))}, {down, up});
}

CirclePoint ppoint(long p, long q = 1) {
    return CirclePoint::projective(Quad(Rat(p, q)));
}

}  // namespace

TEST_CASE("rigid rotations and exact lifts") {
    PiecewiseMap r = rigid(1, 3);
    CHECK(r.is_rigid_rotation());
    CHECK(*r.rigid_angle() == Quad(Rat(1, 3)));

    CHECK(lift_iterate(r, Quad(Rat(0)), 3) == Quad(Rat(1)));
    CHECK(r.lift_value(Quad(Rat(5, 6))) == Quad(Rat(7, 6)));
    CHECK(lift_iterate(r, Quad(Rat(1, 7)), -3) == Quad(Rat(1, 7)) - Quad(Rat(1)));

    CHECK(pw_equal(pw_inverse(r), rigid(2, 3)));
    CHECK(pw_equal(pw_compose(rigid(1, 54), rigid(1, 3)), rigid(19, 54)));
    CHECK(pw_compose(r, pw_inverse(r)).is_identity());

    PiecewiseMap rot_irr = PiecewiseMap::rigid_rotation(
        (Quad::sqrt_of(Rat(5)) - Quad(Rat(1))) / Quad(Rat(2)));
    CHECK(rot_irr.is_rigid_rotation());
    // F(x+1) = F(x)+1 for the golden rotation too.
    Quad x(Rat(3, 7));
    CHECK(rot_irr.lift_value(x + Quad(Rat(1))) == rot_irr.lift_value(x) + Quad(Rat(1)));
}

TEST_CASE("piecewise-affine algebra") {
    std::mt19937 rng(7101);

    SUBCASE("group laws on random maps") {
        for (int i = 0; i < 25; ++i) {
            PiecewiseMap f = random_pw_affine(rng);
            PiecewiseMap g = random_pw_affine(rng);
            PiecewiseMap h = random_pw_affine(rng);
            CHECK(pw_compose(f, pw_inverse(f)).is_identity());
            CHECK(pw_compose(pw_inverse(f), f).is_identity());
            CHECK(pw_equal(pw_compose(pw_compose(f, g), h), pw_compose(f, pw_compose(g, h))));
            CHECK(pw_compose(f, g).piece_count() <= f.piece_count() + g.piece_count());
            // lift commutes with integer translation after composition
            PiecewiseMap fg = pw_compose(f, g);
            Quad t(Rat(5, 11));
            CHECK(lift_iterate(fg, t + Quad(Rat(1)), 10) ==
                  lift_iterate(fg, t, 10) + Quad(Rat(1)));
        }
    }

    SUBCASE("evaluation matches composition") {
        for (int i = 0; i < 25; ++i) {
            PiecewiseMap f = random_pw_affine(rng);
            PiecewiseMap g = random_pw_affine(rng);
            PiecewiseMap fg = pw_compose(f, g);
            // The canonical lift of fg is the composed lift up to a fixed
            // integer shift (it gets renormalized to F(0) in [0,1)).
            Quad x(Rat(i, 26));
            Quad shift = f.lift_value(g.lift_value(Quad(Rat(0)))) -
                         fg.lift_value(Quad(Rat(0)));
            CHECK(shift == Quad(Rat(quad_floor(shift))));
            CHECK(fg.lift_value(x) + shift == f.lift_value(g.lift_value(x)));
            CHECK(f.lift_inverse_value(f.lift_value(x)) == x);
        }
    }

    SUBCASE("normal form ignores redundant breakpoints") {
        // Same rotation described with a spurious cut at 1/2.
        PiecewiseMap redundant = PiecewiseMap::affine(
            {Quad(Rat(0)), Quad(Rat(1, 2)), Quad(Rat(1))},
            {{Quad(Rat(1)), Quad(Rat(1, 3))}, {Quad(Rat(1)), Quad(Rat(1, 3))}});
        CHECK(pw_equal(redundant, rigid(1, 3)));
        CHECK(redundant.piece_count() == 1);
        CHECK_FALSE(pw_equal(rigid(1, 3), rigid(2, 3)));
    }

    SUBCASE("orientation preserved on random triples") {
        for (int i = 0; i < 50; ++i) {
            PiecewiseMap f = random_pw_affine(rng);
            std::uniform_int_distribution<int> tick(0, 62);
            int a = tick(rng), b = tick(rng), c = tick(rng);
            if (a == b || b == c || a == c) continue;
            auto pt = [](int t) { return CirclePoint::angle(Rat(t, 63)); };
            bool before = circular_order(pt(a), pt(b), pt(c));
            bool after = circular_order(pw_evaluate(f, pt(a)), pw_evaluate(f, pt(b)),
                                        pw_evaluate(f, pt(c)));
            CHECK(before == after);
        }
    }

    SUBCASE("invalid data is rejected") {
        CHECK_THROWS_AS(PiecewiseMap::affine({Quad(Rat(0)), Quad(Rat(1))},
                                             {{Quad(Rat(-1)), Quad(Rat(0))}}),
                        WrongInput);
        // Lift gaining 2 over a period is not a circle map.
        CHECK_THROWS_AS(PiecewiseMap::affine({Quad(Rat(0)), Quad(Rat(1))},
                                             {{Quad(Rat(2)), Quad(Rat(0))}}),
                        WrongInput);
    }
}

TEST_CASE("two-piece scaling group in the projective chart") {
    PiecewiseMap f = two_scalings(2, 1, 3, 1);  // 2x above, 3x below
    PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
    PiecewiseMap g = pw_compose(pw_compose(R, f), R);

    CHECK(pw_evaluate(f, ppoint(1)) == ppoint(2));
    CHECK(pw_evaluate(f, ppoint(0)) == ppoint(0));
    CHECK(pw_evaluate(f, CirclePoint::infinity()) == CirclePoint::infinity());
    CHECK(pw_evaluate(f, ppoint(-1)) == ppoint(-3));

    // Conjugation by the half-turn swaps the scaling factors into inverses.
    CHECK(pw_evaluate(g, ppoint(1)) == ppoint(1, 3));
    CHECK(pw_evaluate(g, ppoint(-1)) == ppoint(-1, 2));
    CHECK(pw_equal(g, two_scalings(1, 3, 1, 2)));

    SUBCASE("presentation relations hold exactly") {
        CHECK(pw_compose(R, R).is_identity());
        CHECK(pw_equal(pw_compose(f, g), pw_compose(g, f)));
        PiecewiseMap comm = pw_compose(pw_compose(f, g), pw_inverse(pw_compose(g, f)));
        CHECK(comm.is_identity());
    }

    SUBCASE("word evaluation") {
        std::vector<PiecewiseMap> gens = {f, R};
        CHECK(pw_equal(word_to_map(gens, GroupWord({{0, 1}})), f));
        CHECK(word_to_map(gens, GroupWord()).is_identity());
        // f R f R = f (R f R) = f g.
        GroupWord fr2({{0, 1}, {1, 1}, {0, 1}, {1, 1}});
        CHECK(pw_equal(word_to_map(gens, fr2), pw_compose(f, g)));
        // Commutator through the word interface.
        GroupWord comm({{0, 1}, {1, 1}, {0, 1}, {1, 1}, {0, -1}, {1, 1}, {0, -1}, {1, 1}});
        CHECK(word_to_map(gens, comm).is_identity());
        CHECK_THROWS_AS(word_to_map(gens, GroupWord({{5, 1}})), BadWord);
    }

    SUBCASE("free reduction") {
        GroupWord w({{0, 1}, {0, -1}, {1, 1}});
        CHECK(w.length() == 1);
        CHECK(w.inverse().letters()[0].exp == -1);
        CHECK(GroupWord({{0, 1}}).append({0, -1}).empty());
    }

    SUBCASE("moebius group laws on random pieces") {
        std::mt19937 rng(5150);
        for (int i = 0; i < 20; ++i) {
            MoebiusMap m = testutil::random_moebius(rng);
            PiecewiseMap s = PiecewiseMap::single_moebius(m);
            PiecewiseMap comp = pw_compose(pw_compose(f, s), pw_inverse(pw_compose(f, s)));
            CHECK(comp.is_identity());
        }
    }
}

TEST_CASE("numeric embedding and composition") {
    Rat w(1, 1000000);

    SUBCASE("affine maps embed exactly") {
        PiecewiseMap r = embed_numeric(rigid(1, 3));
        QInterval v = r.lift_enclosure(Rat(1, 2), w);
        CHECK(v.contains(Rat(5, 6)));
        CHECK(v.width() <= w);
        QInterval iv = r.inverse_lift_enclosure(Rat(5, 6), w);
        CHECK(iv.contains(Rat(1, 2)));
    }

    SUBCASE("half-turn embeds as rotation by one half") {
        PiecewiseMap R = embed_numeric(PiecewiseMap::single_moebius(MoebiusMap::half_turn()));
        for (Rat x : {Rat(0), Rat(1, 4), Rat(2, 5), Rat(7, 10)}) {
            QInterval v = R.lift_enclosure(x, w);
            CHECK(v.width() <= w);
            CHECK(v.contains(x + Rat(1, 2)));
        }
        // Functional inverse really inverts the same lift.
        QInterval y = R.lift_enclosure(Rat(1, 5), w / 2);
        QInterval back = R.inverse_lift_enclosure(y.mid(), w / 2);
        CHECK(back.lo <= Rat(1, 5));
        CHECK(Rat(1, 5) <= back.hi + w);
    }

    SUBCASE("hyperbolic scaling lift fixes the cut and the half point") {
        PiecewiseMap h = embed_numeric(PiecewiseMap::single_moebius(
            MoebiusMap::scaling(Quad(Rat(4)))));
        CHECK(h.lift_enclosure(Rat(0), w).contains(Rat(0)));
        CHECK(h.lift_enclosure(Rat(1, 2), w).contains(Rat(1, 2)));
        QInterval q = h.lift_enclosure(Rat(3, 4), w);  // tan(pi/4)=1 -> 4
        // angle of projective 4 is strictly between 3/4 and 1
        CHECK(q.lo > Rat(3, 4));
        CHECK(q.hi < Rat(1));
        // Lift periodicity.
        QInterval q1 = h.lift_enclosure(Rat(7, 4), w);
        CHECK(q1.intersects(q + Rat(1)));
    }

    SUBCASE("numeric composition tracks exact composition") {
        PiecewiseMap a = embed_numeric(rigid(1, 3));
        PiecewiseMap b = embed_numeric(rigid(1, 4));
        PiecewiseMap c = pw_compose(a, b);
        QInterval v = c.lift_enclosure(Rat(0), w);
        CHECK(v.contains(Rat(7, 12)));
        QInterval iv = c.inverse_lift_enclosure(Rat(7, 12), w);
        CHECK(iv.contains(Rat(0)));
        QInterval it = lift_iterate_enclosure(c, Rat(0), 12, Rat(1, 1000));
        CHECK(it.contains(Rat(7)));
    }

    SUBCASE("mixed composition embeds the exact side") {
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        PiecewiseMap mix = pw_compose(embed_numeric(R), rigid(1, 4));
        CHECK(mix.universe() == Universe::Numeric);
        QInterval v = mix.lift_enclosure(Rat(0), w);
        CHECK(v.contains(Rat(3, 4)));
        CHECK_THROWS_AS(pw_compose(R, rigid(1, 4)), UniverseMismatch);
        CHECK_THROWS_AS(pw_equal(mix, mix), Undecidable);
    }
}

TEST_CASE("metrics") {
    SUBCASE("exact distances for affine pairs") {
        PiecewiseMap id = PiecewiseMap::identity(Universe::PwAffine);
        CHECK(distance_inf(rigid(1, 3), id, Rat(1, 100)) == QInterval(Rat(1, 3)));
        CHECK(distance_inf(rigid(1, 3), rigid(1, 4), Rat(1, 100)) == QInterval(Rat(1, 12)));
        CHECK(distance_inf(rigid(1, 2), id, Rat(1, 100)) == QInterval(Rat(1, 2)));
        CHECK(distance_c0(rigid(1, 3), id, Rat(1, 100)) == QInterval(Rat(2, 3)));
        CHECK(distance_c0(rigid(1, 3), rigid(1, 3), Rat(1, 100)) == QInterval(Rat(0)));

        std::mt19937 rng(99);
        for (int i = 0; i < 10; ++i) {
            PiecewiseMap f = random_pw_affine(rng);
            PiecewiseMap g = random_pw_affine(rng);
            QInterval d = distance_inf(f, g, Rat(1, 1000));
            // symmetry and a sampled lower bound
            CHECK(distance_inf(g, f, Rat(1, 1000)) == d);
            for (int t = 0; t < 16; ++t) {
                Quad x(Rat(t, 16));
                Quad gap = f.lift_value(x) - g.lift_value(x);
                Quad fr = quad_frac(gap);
                Quad dist = fr < Quad(Rat(1)) - fr ? fr : Quad(Rat(1)) - fr;
                QuadBracket db = quad_bracket(dist, Rat(1, 100000));
                CHECK(db.lo <= d.hi);
            }
        }
    }

    SUBCASE("numeric distance agrees with exact rotation distance") {
        PiecewiseMap a = embed_numeric(rigid(1, 3));
        PiecewiseMap b = embed_numeric(rigid(1, 4));
        QInterval d = distance_inf(a, b, Rat(1, 1000));
        CHECK(d.contains(Rat(1, 12)));
        CHECK(d.width() <= Rat(1, 1000));
    }

    SUBCASE("projective maps are measured through the chart") {
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        PiecewiseMap id = PiecewiseMap::single_moebius(MoebiusMap::identity());
        QInterval d = distance_inf(R, id, Rat(1, 64));
        CHECK(d.contains(Rat(1, 2)));
    }
}

TEST_CASE("positivity predicate") {
    PiecewiseMap id = PiecewiseMap::identity(Universe::PwAffine);
    CHECK(is_positive(rigid(1, 3)));
    CHECK_FALSE(is_positive(rigid(1, 2)));  // open interval: the antipode is out
    CHECK_FALSE(is_positive(rigid(2, 3)));
    CHECK_FALSE(is_positive(id));

    // The two-piece scaling map has fixed points, so it is not positive.
    CHECK_FALSE(is_positive(two_scalings(2, 1, 3, 1)));
    // An elliptic element of order 4 moving everything forward by about a
    // quarter turn; it never meets the identity or the antipode map.
    CHECK(is_positive(PiecewiseMap::single_moebius(MoebiusMap(
        Quad(Rat(1)), Quad(Rat(1)), Quad(Rat(-1)), Quad(Rat(1))))));
    // Its inverse turns by about three quarters: not positive.
    CHECK_FALSE(is_positive(PiecewiseMap::single_moebius(MoebiusMap(
        Quad(Rat(1)), Quad(Rat(-1)), Quad(Rat(1)), Quad(Rat(1))))));

    SUBCASE("positive maps have positive composition when still below half") {
        PiecewiseMap c = pw_compose(rigid(1, 5), rigid(1, 5));
        CHECK(is_positive(c));
        PiecewiseMap d = pw_compose(rigid(1, 3), rigid(1, 3));
        CHECK_FALSE(is_positive(d));  // 2/3 > 1/2
    }

    SUBCASE("restriction to an arc") {
        // Rotation by 2/3 is never positive, on any arc, because the
        // displacement is -1/3 backwards everywhere.
        CircleInterval arc{CirclePoint::angle(Rat(0)), CirclePoint::angle(Rat(1, 4))};
        CHECK_FALSE(is_positive(rigid(2, 3), arc));
        CHECK(is_positive(rigid(1, 3), arc));
        // A map that moves points forward only on part of the circle.
        PiecewiseMap bump = PiecewiseMap::affine(
            {Quad(Rat(0)), Quad(Rat(1, 2)), Quad(Rat(1))},
            {{Quad(Rat(1, 2)), Quad(Rat(1, 4))}, {Quad(Rat(3, 2)), Quad(Rat(-1, 4))}});
        CHECK_FALSE(is_positive(bump));  // fixed point at x = 1/2
        CircleInterval inside{CirclePoint::angle(Rat(1, 16)), CirclePoint::angle(Rat(3, 8))};
        CHECK(is_positive(bump, inside));
    }

    SUBCASE("numeric positivity certifies strict cases") {
        CHECK(is_positive(embed_numeric(rigid(1, 3))));
        CHECK_FALSE(is_positive(embed_numeric(rigid(2, 3))));
    }
}
