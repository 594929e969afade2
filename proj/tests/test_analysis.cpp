#include "circlelab/analysis.hpp"

#include "circlelab/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

#include <algorithm>
#include <random>

using namespace circlelab;

namespace {

PiecewiseMap rigid(long p, long q) { return PiecewiseMap::rigid_rotation(Quad(Rat(p, q))); }

PiecewiseMap two_scalings(long l_num, long l_den, long m_num, long m_den) {
    MoebiusMap up = MoebiusMap::scaling(Quad(Rat(l_num, l_den)));
    MoebiusMap down = MoebiusMap::scaling(Quad(Rat(m_num, m_den)));
    return PiecewiseMap::moebius(
        {CirclePoint::infinity(), CirclePoint::projective(Quad(Rat(0)))}, {down, up});
}

CirclePoint ppoint(long p, long q = 1) {
    return CirclePoint::projective(Quad(Rat(p, q)));
}

CirclePoint apoint(long p, long q) { return CirclePoint::angle(Quad(Rat(p, q))); }

// Affine map fixing 0 (repelling) and 1/2 (attracting), with no other
// fixed points.
PiecewiseMap hyperbolic_affine() {
    std::vector<Quad> cuts = {Quad(Rat(0)), Quad(Rat(1, 4)), Quad(Rat(1, 2)),
                              Quad(Rat(3, 4)), Quad(Rat(1))};
    auto line = [](const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1) {
        Quad slope{(y1 - y0) / (x1 - x0)};
        return AffinePiece{slope, Quad(y0) - slope * Quad(x0)};
    };
    std::vector<AffinePiece> lines = {
        line(Rat(0), Rat(0), Rat(1, 4), Rat(3, 8)),
        line(Rat(1, 4), Rat(3, 8), Rat(1, 2), Rat(1, 2)),
        line(Rat(1, 2), Rat(1, 2), Rat(3, 4), Rat(5, 8)),
        line(Rat(3, 4), Rat(5, 8), Rat(1), Rat(1)),
    };
    return PiecewiseMap::affine(cuts, lines);
}

// Affine map fixing only 0, with positive displacement everywhere else.
PiecewiseMap parabolic_affine() {
    std::vector<Quad> cuts = {Quad(Rat(0)), Quad(Rat(1, 2)), Quad(Rat(1))};
    std::vector<AffinePiece> lines = {
        {Quad(Rat(3, 2)), Quad(Rat(0))},
        {Quad(Rat(1, 2)), Quad(Rat(1, 2))},
    };
    return PiecewiseMap::affine(cuts, lines);
}

// Identity on [0,1/2], positive displacement on (1/2,1): an arc of fixed
// points.
PiecewiseMap arc_fixing_affine() {
    std::vector<Quad> cuts = {Quad(Rat(0)), Quad(Rat(1, 2)), Quad(Rat(3, 4)),
                              Quad(Rat(1))};
    std::vector<AffinePiece> lines = {
        {Quad(Rat(1)), Quad(Rat(0))},
        {Quad(Rat(3, 2)), Quad(Rat(-1, 4))},
        {Quad(Rat(1, 2)), Quad(Rat(1, 2))},
    };
    return PiecewiseMap::affine(cuts, lines);
}

bool encloses_angle(const CirclePoint& p, const Rat& theta) {
    if (p.is_exact()) return false;
    const QInterval& e = p.enclosure();
    return e.contains(theta) || e.contains(theta + 1) || e.contains(theta - 1);
}

}  // namespace

TEST_CASE("fixed point reports in the exact universes") {
    SUBCASE("rigid rotations have none") {
        FixedPointReport rep = fixed_points_report(rigid(1, 3));
        CHECK(rep.count() == 0);
        CHECK_FALSE(rep.has_fixed_arc());
        CHECK_FALSE(rep.is_identity);
        CHECK_FALSE(rep.approximate);
    }

    SUBCASE("identity flag") {
        CHECK(fixed_points_report(PiecewiseMap::identity(Universe::PwAffine)).is_identity);
        CHECK(fixed_points_report(PiecewiseMap::identity(Universe::PwMoebius)).is_identity);
    }

    SUBCASE("a single scaling: repeller at 0, attractor at infinity") {
        PiecewiseMap f = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
        FixedPointReport rep = fixed_points_report(f);
        REQUIRE(rep.count() == 2);
        CHECK(rep.points[0].point == CirclePoint::infinity());
        CHECK(rep.points[0].nature == LocalNature::Attracting);
        CHECK(rep.points[1].point == ppoint(0));
        CHECK(rep.points[1].nature == LocalNature::Repelling);
    }

    SUBCASE("two scalings with opposite drift: both ends semi-stable") {
        // 2x above and 3x below, composed with its half-turn conjugate:
        // (2/3)x above, (3/2)x below, so the displacement is negative on
        // both sides of both fixed points.
        PiecewiseMap f = two_scalings(2, 1, 3, 1);
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        PiecewiseMap g = pw_compose(pw_compose(R, f), R);
        PiecewiseMap fg = pw_compose(f, g);
        FixedPointReport rep = fixed_points_report(fg);
        REQUIRE(rep.count() == 2);
        CHECK(rep.points[0].point == CirclePoint::infinity());
        CHECK(rep.points[0].nature == LocalNature::ParabolicBelowBoth);
        CHECK(rep.points[1].point == ppoint(0));
        CHECK(rep.points[1].nature == LocalNature::ParabolicBelowBoth);
    }

    SUBCASE("affine attract/repel pair") {
        FixedPointReport rep = fixed_points_report(hyperbolic_affine());
        REQUIRE(rep.count() == 2);
        CHECK(rep.points[0].point == apoint(0, 1));
        CHECK(rep.points[0].nature == LocalNature::Repelling);
        CHECK(rep.points[1].point == apoint(1, 2));
        CHECK(rep.points[1].nature == LocalNature::Attracting);
    }

    SUBCASE("affine one-sided tangency") {
        FixedPointReport rep = fixed_points_report(parabolic_affine());
        REQUIRE(rep.count() == 1);
        CHECK(rep.points[0].point == apoint(0, 1));
        CHECK(rep.points[0].nature == LocalNature::ParabolicAboveBoth);
    }

    SUBCASE("arc of fixed points") {
        FixedPointReport rep = fixed_points_report(arc_fixing_affine());
        CHECK(rep.count() == 0);
        REQUIRE(rep.has_fixed_arc());
        CHECK(rep.fixed_arc->left == apoint(0, 1));
        CHECK(rep.fixed_arc->right == apoint(1, 2));
    }

    SUBCASE("agrees with the matrix fixed points on random single pieces") {
        std::mt19937 rng(71);
        for (int t = 0; t < 50; ++t) {
            MoebiusMap m = testutil::random_moebius(rng);
            if (m.is_identity()) continue;
            FixedPointReport rep = fixed_points_report(PiecewiseMap::single_moebius(m));
            auto expect = moebius_fixed_points(m);
            REQUIRE(rep.count() == expect.size());
            for (const auto& e : expect) {
                bool found = false;
                for (const auto& p : rep.points)
                    if (p.point == e.point && p.nature == e.nature) found = true;
                CHECK(found);
            }
        }
    }
}

TEST_CASE("fixed point reports in the numeric universe") {
    SUBCASE("embedded affine pair") {
        PiecewiseMap f = embed_numeric(hyperbolic_affine());
        FixedPointReport rep = fixed_points_report(f, Rat(1, 256));
        CHECK(rep.approximate);
        REQUIRE(rep.count() == 2);
        bool saw_rep = false;
        bool saw_att = false;
        for (const auto& e : rep.points) {
            CHECK(e.point.enclosure().width() <= Rat(1, 32));
            if (encloses_angle(e.point, Rat(0))) {
                saw_rep = e.nature == LocalNature::Repelling;
            }
            if (encloses_angle(e.point, Rat(1, 2))) {
                saw_att = e.nature == LocalNature::Attracting;
            }
        }
        CHECK(saw_rep);
        CHECK(saw_att);
    }

    SUBCASE("embedded scaling: the attractor sits on the chart seam") {
        PiecewiseMap f =
            embed_numeric(PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4)))));
        FixedPointReport rep = fixed_points_report(f, Rat(1, 256));
        CHECK(rep.approximate);
        REQUIRE(rep.count() == 2);
        bool saw_seam = false;
        bool saw_half = false;
        for (const auto& e : rep.points) {
            if (encloses_angle(e.point, Rat(0))) {
                saw_seam = e.nature == LocalNature::Attracting;
            }
            if (encloses_angle(e.point, Rat(1, 2))) {
                saw_half = e.nature == LocalNature::Repelling;
            }
        }
        CHECK(saw_seam);
        CHECK(saw_half);
    }

    SUBCASE("a fixed-point-free numeric map reports nothing") {
        PiecewiseMap f = embed_numeric(rigid(1, 3));
        FixedPointReport rep = fixed_points_report(f, Rat(1, 128));
        CHECK(rep.count() == 0);
    }
}

TEST_CASE("crossing reports") {
    SUBCASE("disjoint rotations never cross") {
        CHECK(crossing_report(rigid(1, 3), rigid(2, 3)).count() == 0);
    }

    SUBCASE("scaling against the half-turn") {
        PiecewiseMap f = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
        PiecewiseMap r = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        CHECK(crossing_report(f, r).count() == 0);
    }

    SUBCASE("self-crossing is degenerate") {
        PiecewiseMap f = hyperbolic_affine();
        CHECK_THROWS_AS((void)crossing_report(f, f), DegenerateCoincidence);
    }

    SUBCASE("transversal and tangential crossings with the identity") {
        CrossingReport hyp =
            crossing_report(hyperbolic_affine(), PiecewiseMap::identity(Universe::PwAffine));
        REQUIRE(hyp.count() == 2);
        CHECK(hyp.crossings[0].kind == CrossingKind::Hyperbolic);
        CHECK(hyp.crossings[1].kind == CrossingKind::Hyperbolic);
        CHECK_FALSE(hyp.degenerate);

        CrossingReport par =
            crossing_report(parabolic_affine(), PiecewiseMap::identity(Universe::PwAffine));
        REQUIRE(par.count() == 1);
        CHECK(par.crossings[0].kind == CrossingKind::Parabolic);
    }

    SUBCASE("agreement on an arc sets the degenerate flag") {
        CrossingReport rep =
            crossing_report(arc_fixing_affine(), PiecewiseMap::identity(Universe::PwAffine));
        CHECK(rep.degenerate);
        CHECK(rep.count() == 0);
    }

    SUBCASE("random pairs match a dense sign-change oracle") {
        std::mt19937 rng(1203);
        for (int t = 0; t < 10; ++t) {
            PiecewiseMap f = testutil::random_pw_affine(rng);
            PiecewiseMap g = testutil::random_pw_affine(rng);
            if (pw_equal(f, g)) continue;
            CrossingReport rep = crossing_report(f, g);

            PiecewiseMap h = pw_compose(pw_inverse(g), f);
            std::vector<Quad> xs;
            const long grid = 1024;
            for (long i = 0; i < grid; ++i) xs.emplace_back(Rat(2 * i + 1, 2 * grid));
            for (const Quad& b : h.affine_breaks()) {
                xs.push_back(quad_frac(b + Quad(Rat(1, 1 << 20))));
                xs.push_back(quad_frac(b - Quad(Rat(1, 1 << 20))));
            }
            std::sort(xs.begin(), xs.end());
            Quad dmin{Rat(10)};
            Quad dmax{Rat(-10)};
            std::vector<Quad> disp;
            for (const Quad& x : xs) {
                Quad d = h.lift_value(x) - x;
                dmin = d < dmin ? d : dmin;
                dmax = d > dmax ? d : dmax;
                disp.push_back(d);
            }
            size_t oracle = 0;
            for (Int k = quad_floor(dmin); Quad(Rat(k)) <= dmax; ++k) {
                std::vector<int> signs;
                for (const Quad& d : disp) {
                    int s = compare(d, Quad(Rat(k)));
                    if (s != 0) signs.push_back(s);
                }
                for (size_t i = 0; i < signs.size(); ++i)
                    if (signs[i] != signs[(i + 1) % signs.size()]) ++oracle;
            }
            size_t hyperbolic = 0;
            for (const auto& c : rep.crossings)
                if (c.kind == CrossingKind::Hyperbolic) ++hyperbolic;
            CHECK(hyperbolic == oracle);
        }
    }
}

TEST_CASE("element classification") {
    SUBCASE("canonical kinds") {
        CHECK(classify_element(PiecewiseMap::identity(Universe::PwAffine)).kind ==
              ElementKind::Trivial);

        Classification rot = classify_element(rigid(1, 3));
        CHECK(rot.kind == ElementKind::EllipticLike);
        REQUIRE(rot.rot.has_value());
        CHECK(rot.rot->is_exact());
        CHECK(rot.rot->value == Rat(1, 3));

        Classification hyp = classify_element(hyperbolic_affine());
        CHECK(hyp.kind == ElementKind::HyperbolicLike);
        CHECK(hyp.fixed.size() == 2);

        Classification par = classify_element(parabolic_affine());
        CHECK(par.kind == ElementKind::ParabolicLike);
        REQUIRE(par.fixed.size() == 1);
        CHECK(par.fixed[0] == apoint(0, 1));

        CHECK(classify_element(arc_fixing_affine()).kind == ElementKind::NotMoebiusLike);
    }

    SUBCASE("semi-stable pairs are not Moebius-like") {
        PiecewiseMap f = two_scalings(2, 1, 3, 1);
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        PiecewiseMap g = pw_compose(pw_compose(R, f), R);
        Classification c = classify_element(pw_compose(f, g));
        CHECK(c.kind == ElementKind::NotMoebiusLike);
        CHECK(c.fixed.size() == 2);
    }

    SUBCASE("irrational rotation: unknown, with a wandering-interval probe") {
        PiecewiseMap golden =
            PiecewiseMap::rigid_rotation(Quad(Rat(-1, 2), Rat(1, 2), Int(5)));
        Classification c = classify_element(golden, 500);
        CHECK(c.kind == ElementKind::Unknown);
        REQUIRE(c.rot.has_value());
        CHECK_FALSE(c.rot->is_exact());
        CHECK(c.evidence.find("wandering") != std::string::npos);
    }

    SUBCASE("conjugated finite order stays elliptic-like") {
        PiecewiseMap h = hyperbolic_affine();
        PiecewiseMap f = pw_compose(pw_compose(h, rigid(1, 2)), pw_inverse(h));
        Classification c = classify_element(f);
        CHECK(c.kind == ElementKind::EllipticLike);
        CHECK(c.rot->value == Rat(1, 2));
    }

    SUBCASE("agreement with the matrix classification on random matrices") {
        std::mt19937 rng(2024);
        for (int t = 0; t < 200; ++t) {
            MoebiusMap m = testutil::random_moebius(rng);
            Classification c = classify_element(PiecewiseMap::single_moebius(m));
            switch (moebius_classify(m)) {
                case MoebiusClass::Identity:
                    CHECK(c.kind == ElementKind::Trivial);
                    break;
                case MoebiusClass::Parabolic:
                    CHECK(c.kind == ElementKind::ParabolicLike);
                    CHECK(c.fixed.size() == 1);
                    break;
                case MoebiusClass::Hyperbolic:
                    CHECK(c.kind == ElementKind::HyperbolicLike);
                    CHECK(c.fixed.size() == 2);
                    break;
                case MoebiusClass::Elliptic:
                    CHECK(c.kind == ElementKind::EllipticLike);
                    CHECK(c.rot.has_value());
                    break;
            }
        }
    }
}

TEST_CASE("word-ball fixed point survey") {
    PiecewiseMap f = two_scalings(2, 1, 3, 1);
    PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
    std::vector<PiecewiseMap> gens = {f, R};

    SUBCASE("two generators, radius six: never more than two fixed points") {
        WordBallReport rep = word_ball_max_fixed(gens, 6, 2);
        CHECK(rep.radius == 6);
        CHECK(rep.words_examined >= 1457);  // all freely reduced words + empty
        CHECK(rep.distinct_nontrivial >= 20);
        CHECK(rep.max_fixed_points == 2);
        CHECK_FALSE(rep.counterexample.has_value());
        CHECK_FALSE(rep.witness.empty());
        // Re-verify the witness by evaluating its word.
        PiecewiseMap w = word_to_map(gens, rep.witness);
        CHECK(fixed_points_report(w).count() == 2);
        // Histogram only holds counts 0, 1, 2.
        for (const auto& [count, elements] : rep.histogram) {
            CHECK(count <= 2);
            CHECK(elements > 0);
        }
    }

    SUBCASE("the maximum is monotone in the radius") {
        WordBallReport small = word_ball_max_fixed(gens, 2);
        WordBallReport large = word_ball_max_fixed(gens, 4);
        CHECK(small.max_fixed_points <= large.max_fixed_points);
        CHECK(small.distinct_nontrivial <= large.distinct_nontrivial);
    }

    SUBCASE("single scaling generator") {
        PiecewiseMap s = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
        WordBallReport rep = word_ball_max_fixed({s}, 3);
        CHECK(rep.distinct_nontrivial == 6);  // powers -3..3 except 0
        CHECK(rep.max_fixed_points == 2);
    }

    SUBCASE("an involution generator collapses the ball") {
        WordBallReport rep = word_ball_max_fixed({rigid(1, 2)}, 2);
        CHECK(rep.distinct_nontrivial == 1);
        CHECK(rep.max_fixed_points == 0);
        CHECK(rep.witness.empty());
    }

    SUBCASE("exceeding the expectation produces a counterexample word") {
        WordBallReport rep = word_ball_max_fixed(gens, 2, 1);
        REQUIRE(rep.counterexample.has_value());
        PiecewiseMap w = word_to_map(gens, *rep.counterexample);
        CHECK(fixed_points_report(w).count() > 1);
    }

    SUBCASE("an arc of fixed points always counts as a counterexample") {
        WordBallReport rep = word_ball_max_fixed({arc_fixing_affine()}, 1);
        CHECK(rep.counterexample.has_value());
    }
}

TEST_CASE("finite orbit search") {
    SUBCASE("scalings plus the half-turn preserve {0, infinity}") {
        PiecewiseMap f = two_scalings(2, 1, 3, 1);
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        ElementaryCertificate cert = finite_orbit_search({f, R}, 4);
        CHECK(cert.kind == ElementaryCertificate::Kind::FiniteOrbit);
        REQUIRE(cert.order() == 2);
        CHECK(cert.orbit[0] == CirclePoint::infinity());
        CHECK(cert.orbit[1] == ppoint(0));
    }

    SUBCASE("a translation fixes infinity globally") {
        PiecewiseMap t =
            PiecewiseMap::single_moebius(MoebiusMap::translation(Quad(Rat(1))));
        ElementaryCertificate cert = finite_orbit_search({t}, 3);
        CHECK(cert.kind == ElementaryCertificate::Kind::GlobalFixedPoint);
        REQUIRE(cert.order() == 1);
        CHECK(cert.orbit[0] == CirclePoint::infinity());
    }

    SUBCASE("a rational rotation has its periodic orbit") {
        ElementaryCertificate cert = finite_orbit_search({rigid(1, 3)}, 3);
        CHECK(cert.kind == ElementaryCertificate::Kind::FiniteOrbit);
        REQUIRE(cert.order() == 3);
        CHECK(cert.orbit[0] == apoint(0, 1));
        CHECK(cert.orbit[1] == apoint(1, 3));
        CHECK(cert.orbit[2] == apoint(2, 3));
    }

    SUBCASE("two rotations past the period cap still act by rotations") {
        ElementaryCertificate cert = finite_orbit_search({rigid(1, 3), rigid(1, 5)}, 4);
        CHECK(cert.kind == ElementaryCertificate::Kind::RotationSemiConjugacy);
    }

    SUBCASE("an irrational rotation acts by rotations") {
        PiecewiseMap golden =
            PiecewiseMap::rigid_rotation(Quad(Rat(-1, 2), Rat(1, 2), Int(5)));
        ElementaryCertificate cert = finite_orbit_search({golden}, 4);
        CHECK(cert.kind == ElementaryCertificate::Kind::RotationSemiConjugacy);
    }

    SUBCASE("mixed universes produce no certificate") {
        PiecewiseMap s = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
        ElementaryCertificate cert = finite_orbit_search({s, rigid(1, 3)}, 4);
        CHECK(cert.kind == ElementaryCertificate::Kind::None);
    }
}

TEST_CASE("rotation number additivity on elementary groups") {
    SUBCASE("scalings plus the half-turn") {
        PiecewiseMap f = two_scalings(2, 1, 3, 1);
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        RotAdditivityReport rep = rot_homomorphism_check({f, R}, 3);
        CHECK(rep.ok);
        CHECK(rep.pairs_checked > 0);
        CHECK_FALSE(rep.violation.has_value());
        CHECK(rep.certificate.kind == ElementaryCertificate::Kind::FiniteOrbit);
        // Spot values feeding the additivity law.
        CHECK(rotation_number(f).value == Rat(0));
        CHECK(rotation_number(R).value == Rat(1, 2));
        CHECK(rotation_number(pw_compose(f, R)).value == Rat(1, 2));
    }

    SUBCASE("two rigid rotations") {
        RotAdditivityReport rep = rot_homomorphism_check({rigid(1, 3), rigid(1, 5)}, 4);
        CHECK(rep.ok);
        // With its larger period cap the check closes the joint orbit of 0.
        CHECK(rep.certificate.kind == ElementaryCertificate::Kind::FiniteOrbit);
        CHECK(rep.certificate.order() == 15);
    }

    SUBCASE("non-elementary generators are rejected") {
        PiecewiseMap s = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
        CHECK_THROWS_AS((void)rot_homomorphism_check({s, rigid(1, 3)}, 3), NotElementary);
    }
}

TEST_CASE("conjugation amplifies local closeness") {
    PiecewiseMap f = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
    CircleInterval I{ppoint(-1), ppoint(1)};  // holds the repeller at 0

    // Identity near the repeller, a hyperbolic stretch on the far arc.
    MoebiusMap stretch(Quad(Rat(2)), Quad(Rat(1)), Quad(Rat(1)), Quad(Rat(2)));
    PiecewiseMap g = PiecewiseMap::moebius({ppoint(-1), ppoint(1)},
                                           {MoebiusMap::identity(), stretch});

    SUBCASE("a few conjugations suffice") {
        auto [m, h] = amplify_local_closeness(f, g, I, Rat(1, 10));
        CHECK(m >= 1);
        CHECK(m <= 6);
        QInterval d =
            distance_inf(h, PiecewiseMap::identity(Universe::PwMoebius), Rat(1, 64));
        CHECK(d.hi < Rat(1, 10));
        // h really is the advertised conjugate.
        PiecewiseMap check = g;
        for (long i = 0; i < m; ++i) check = pw_compose(f, pw_compose(check, pw_inverse(f)));
        CHECK(pw_equal(h, check));
    }

    SUBCASE("a loose budget is already met by g itself") {
        auto [m, h] = amplify_local_closeness(f, g, I, Rat(1, 4));
        CHECK(m == 0);
        CHECK(pw_equal(h, g));
    }

    SUBCASE("the identity needs no conjugation") {
        auto [m, h] = amplify_local_closeness(f, PiecewiseMap::identity(Universe::PwMoebius),
                                              I, Rat(1, 100));
        CHECK(m == 0);
        CHECK(h.is_identity());
    }

    SUBCASE("an involution can never become close to the identity") {
        PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
        CHECK_THROWS_AS((void)amplify_local_closeness(f, R, I, Rat(1, 10), 3),
                        CannotAmplify);
    }

    SUBCASE("the arc must hold a repelling fixed point") {
        CircleInterval far{ppoint(1), ppoint(2)};
        CHECK_THROWS_AS((void)amplify_local_closeness(f, g, far, Rat(1, 10)), WrongInput);
    }
}

TEST_CASE("power distance calibration") {
    SUBCASE("rigid rotations enter the window at the predicted power") {
        CHECK(power_distance_calibrate(rigid(1, 100), Rat(1, 5)) == 6);
        CHECK(power_distance_calibrate(rigid(1, 40), Rat(1, 5)) == 3);
        CHECK(power_distance_calibrate(rigid(1, 8), Rat(1, 2)) == 2);
    }

    SUBCASE("bad inputs") {
        CHECK_THROWS_AS(
            (void)power_distance_calibrate(PiecewiseMap::identity(Universe::PwAffine),
                                           Rat(1, 5)),
            WrongInput);
        // Starts outside eps/2 of the identity.
        CHECK_THROWS_AS((void)power_distance_calibrate(rigid(1, 3), Rat(1, 5)), WrongInput);
    }

    SUBCASE("a bump pinned to a short arc never reaches the window") {
        std::vector<Quad> cuts = {Quad(Rat(0)), Quad(Rat(1, 50)), Quad(Rat(1, 25)),
                                  Quad(Rat(1))};
        std::vector<AffinePiece> lines = {
            {Quad(Rat(3, 2)), Quad(Rat(0))},
            {Quad(Rat(1, 2)), Quad(Rat(1, 50))},
            {Quad(Rat(1)), Quad(Rat(0))},
        };
        PiecewiseMap g = PiecewiseMap::affine(cuts, lines);
        CHECK_THROWS_AS((void)power_distance_calibrate(g, Rat(1, 5), 60), CannotAmplify);
    }
}
