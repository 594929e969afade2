#include "circlelab/blowup.hpp"

#include "circlelab/analysis.hpp"
#include "circlelab/errors.hpp"
#include "circlelab/rotation.hpp"
#include "doctest.h"
#include "test_util.hpp"

#include <algorithm>

using namespace circlelab;

namespace {

PiecewiseMap rigid(long p, long q) { return PiecewiseMap::rigid_rotation(Quad(Rat(p, q))); }

Quad golden_frac() { return Quad(Rat(-1, 2), Rat(1, 2), Int(5)); }  // (sqrt(5)-1)/2

CirclePoint azero() { return CirclePoint::angle(Quad(Rat(0))); }

BlowUpSpec uniform_spec(const Rat& len) {
    BlowUpSpec spec;
    spec.uniform_length = len;
    return spec;
}

}  // namespace

TEST_CASE("blowing up a finite rigid orbit with equal lengths is rigid again") {
    BlowUpMap b = denjoy_blowup(rigid(1, 3), azero(), uniform_spec(Rat(1, 6)));
    CHECK(b.exact);
    CHECK(b.blown.universe() == Universe::PwAffine);
    CHECK(pw_equal(b.blown, rigid(1, 3)));

    RotResult rr = rotation_number(b.blown);
    REQUIRE(rr.is_exact());
    CHECK(rr.value == Rat(1, 3));

    // T = 3/2; the inserted interval at 0 occupies [0, 1/9] after rescaling.
    QInterval c = b.collapse(Rat(1, 18), Rat(1, 1000));
    CHECK(c.contains(Rat(0)));
    // Old 1/6 sits right after the first inserted interval: U(1/6) = 1/3.
    c = b.collapse(Rat(2, 9), Rat(1, 1000));
    CHECK(c.contains(Rat(1, 6)));

    std::vector<GapInfo> gaps = b.gaps(5);
    REQUIRE(gaps.size() == 3);
    for (const GapInfo& g : gaps) CHECK(g.length == Rat(1, 9));
    CHECK(gaps[0].where.contains(Rat(0)));

    SemiConjugacyReport rep = semiconjugacy_check(b, 120, Rat(1, 1 << 20));
    CHECK(rep.ok);
    CHECK(!rep.witness);
}

TEST_CASE("finite orbits with geometric lengths stay exact and keep the rotation number") {
    BlowUpSpec spec;  // scale 1/4, ratio 1/2: lengths 1/4, 1/8, 1/16; T = 23/16
    BlowUpMap b = denjoy_blowup(rigid(1, 3), azero(), spec);
    CHECK(b.exact);
    CHECK(!b.blown.is_rigid_rotation());

    RotResult rr = rotation_number(b.blown);
    REQUIRE(rr.is_exact());
    CHECK(rr.value == Rat(1, 3));

    // Plateau of 0 is [0, 4/23] after rescaling.
    CHECK(b.collapse(Rat(2, 23), Rat(1, 1000)).contains(Rat(0)));
    // U(1/2) = 1/2 + 1/4 + 1/8 = 7/8, so old 1/2 lands at 14/23.
    CHECK(b.collapse(Rat(14, 23), Rat(1, 1000)).contains(Rat(1, 2)));

    std::vector<GapInfo> gaps = b.gaps(3);
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0].length == Rat(4, 23));   // (1/4) / (23/16)
    CHECK(gaps[1].length == Rat(2, 23));
    CHECK(gaps[2].length == Rat(1, 23));
    Rat sum(0);
    for (const GapInfo& g : gaps) sum = Rat(sum + g.length);
    CHECK(sum == Rat(7, 23));

    SemiConjugacyReport rep = semiconjugacy_check(b, 100, Rat(1, 1 << 20));
    CHECK(rep.ok);
}

TEST_CASE("the golden rotation blows up to a certified map over a wandering set") {
    BlowUpMap b = denjoy_blowup(PiecewiseMap::rigid_rotation(golden_frac()), azero(), {});
    CHECK(!b.exact);
    CHECK(b.blown.universe() == Universe::Numeric);

    // Total inserted length 3/4, so T = 7/4 and the largest gap has length 1/7.
    std::vector<GapInfo> gaps = b.gaps(5);
    REQUIRE(gaps.size() == 5);
    CHECK(gaps[0].index == 0);
    CHECK(gaps[0].length == Rat(1, 7));
    CHECK(gaps[1].length == Rat(1, 14));
    CHECK(gaps[2].length == Rat(1, 14));
    CHECK(gaps[3].length == Rat(1, 28));
    CHECK(gaps[0].where.contains(Rat(0)));

    SUBCASE("the collapse semi-conjugates the blown map to the rotation") {
        SemiConjugacyReport rep = semiconjugacy_check(b, 200, Rat(1, 1000000));
        CHECK(rep.ok);
        CHECK(!rep.witness);
        CHECK(rep.worst <= Rat(1, 1000000));
    }

    SUBCASE("the rotation number survives the blow-up") {
        RotResult rr = rotation_number(b.blown, Int(80));
        QInterval box = rr.interval();
        CHECK(Quad(box.lo) <= golden_frac());
        CHECK(golden_frac() <= Quad(box.hi));
        CHECK(box.width() <= Rat(1, 1000));
    }

    SUBCASE("the blown lift is monotone and inverts correctly") {
        Rat w(1, 100000);
        QInterval prev = b.blown.lift_enclosure(Rat(0), w);
        for (long i = 1; i <= 32; ++i) {
            QInterval cur = b.blown.lift_enclosure(Rat(i, 32), w);
            CHECK(prev.mid() < cur.mid());
            prev = cur;
        }
        QInterval back = b.blown.inverse_lift_enclosure(Rat(1, 3), Rat(1, 100000));
        QInterval fwd(b.blown.lift_enclosure(back.lo, w).lo,
                      b.blown.lift_enclosure(back.hi, w).hi);
        CHECK(fwd.contains(Rat(1, 3)));
        CHECK(fwd.width() <= Rat(1, 1000));
    }

    SUBCASE("a corrupted collapse is caught with a witness") {
        BlowUpMap bad = b;
        bad.collapse = [](const Rat& y, const Rat&) { return QInterval(y); };
        SemiConjugacyReport rep = semiconjugacy_check(bad, 50, Rat(1, 1000));
        CHECK(!rep.ok);
        REQUIRE(rep.witness.has_value());
    }

    SUBCASE("the return-time probe certifies two crossings per gap") {
        // Over each of the two largest gaps, F^13 - x dips from above to
        // below 1/20 and back: the displacement floor off the gaps is about
        // 0.0197 and the in-gap peaks are about 0.16 and 0.09.
        CrossingReport rep = gap_crossing_probe(b, rigid(1, 20), 2, 13);
        CHECK(rep.approximate);
        CHECK(rep.count() >= 4);
    }
}

TEST_CASE("blowing up the fixed point of a parabolic gives two parabolic-like points") {
    // x -> x+1 fixes infinity; crossing the inserted interval by the
    // conjugated unit translation keeps only its endpoints fixed.
    PiecewiseMap t_alpha = PiecewiseMap::single_moebius(
        MoebiusMap(Quad(Rat(1)), Quad(Rat(1)), Quad(Rat(0)), Quad(Rat(1))));
    BlowUpSpec spec;
    spec.interior = BlowUpSpec::Interior::Translation;
    spec.translation = Quad(Rat(1));
    BlowUpMap b = denjoy_blowup(t_alpha, CirclePoint::infinity(), spec);
    CHECK(!b.exact);

    SemiConjugacyReport rep = semiconjugacy_check(b, 60, Rat(1, 10000));
    CHECK(rep.ok);

    // T = 5/4: the inserted interval is [0, 1/5]; both endpoints are fixed
    // and the displacement is nonnegative everywhere.
    FixedPointReport fp = fixed_points_report(b.blown, Rat(1, 1024));
    CHECK(fp.approximate);
    REQUIRE(fp.count() == 2);
    for (const FixedPointEntry& e : fp.points) {
        CHECK(e.nature == LocalNature::ParabolicAboveBoth);
    }
    bool near_zero = false;
    bool near_fifth = false;
    for (const FixedPointEntry& e : fp.points) {
        QInterval box = e.point.enclosure();
        if (box.contains(Rat(0)) || box.contains(Rat(1))) near_zero = true;
        if (box.contains(Rat(1, 5))) near_fifth = true;
    }
    CHECK(near_zero);
    CHECK(near_fifth);
}

TEST_CASE("translation interiors accept quadratic amounts") {
    PiecewiseMap t_beta = PiecewiseMap::single_moebius(MoebiusMap(
        Quad(Rat(1)), Quad(Rat(0), Rat(1), Int(2)), Quad(Rat(0)), Quad(Rat(1))));
    BlowUpSpec spec;
    spec.interior = BlowUpSpec::Interior::Translation;
    spec.translation = Quad(Rat(0), Rat(1), Int(2));
    BlowUpMap b = denjoy_blowup(t_beta, CirclePoint::infinity(), spec);
    SemiConjugacyReport rep = semiconjugacy_check(b, 40, Rat(1, 10000));
    CHECK(rep.ok);
}

TEST_CASE("zero inserted length returns the original map with the identity collapse") {
    BlowUpMap b = denjoy_blowup(rigid(2, 5), azero(), uniform_spec(Rat(0)));
    CHECK(b.exact);
    CHECK(pw_equal(b.blown, rigid(2, 5)));
    CHECK(b.gaps(3).empty());
    QInterval c = b.collapse(Rat(3, 7), Rat(1, 1000));
    CHECK(c.is_point());
    CHECK(c.lo == Rat(3, 7));
    SemiConjugacyReport rep = semiconjugacy_check(b, 50, Rat(1, 1 << 20));
    CHECK(rep.ok);
}

TEST_CASE("blow-up input validation") {
    BlowUpSpec bad_ratio;
    bad_ratio.ratio = Rat(1);
    CHECK_THROWS_AS(denjoy_blowup(rigid(1, 3), azero(), bad_ratio), WrongInput);

    BlowUpSpec neg;
    neg.scale = Rat(-1, 4);
    CHECK_THROWS_AS(denjoy_blowup(rigid(1, 3), azero(), neg), WrongInput);

    // Numeric maps only support the fixed-point (Translation) blow-up.
    PiecewiseMap scaling = PiecewiseMap::single_moebius(MoebiusMap::scaling(Quad(Rat(4))));
    CHECK_THROWS_AS(denjoy_blowup(scaling, CirclePoint::infinity(), {}), WrongInput);

    // Uniform lengths over an infinite orbit would not be summable.
    CHECK_THROWS_AS(denjoy_blowup(PiecewiseMap::rigid_rotation(golden_frac()), azero(),
                                  uniform_spec(Rat(1, 6))),
                    WrongInput);

    // Finite projective points have no exact angle to blow up at.
    CHECK_THROWS_AS(
        denjoy_blowup(scaling, CirclePoint::projective(Quad(Rat(1))), {}), WrongInput);

    CHECK_THROWS_AS(
        denjoy_blowup(rigid(1, 3), CirclePoint::approx(Chart::Angle, QInterval(Rat(0))), {}),
        WrongInput);
}
