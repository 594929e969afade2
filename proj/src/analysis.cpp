#include "circlelab/analysis.hpp"

#include "circlelab/errors.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace circlelab {

namespace {

const Quad kOne{Rat(1)};

// Exact value strictly between a and b (a < b), kept in a single radical
// field by falling back to a rational squeezed between brackets.
Quad mid_between(const Quad& a, const Quad& b) {
    if (a.is_rational() || b.is_rational() || a.radicand() == b.radicand())
        return (a + b) / Quad(Rat(2));
    Rat w(1, 4);
    while (true) {
        QuadBracket ba = quad_bracket(a, w);
        QuadBracket bb = quad_bracket(b, w);
        if (ba.hi < bb.lo) return Quad((ba.hi + bb.lo) / 2);
        w /= 4;
    }
}

// Exact point strictly inside the open arc (a, b); for a == b any point
// other than a works and the antipode is returned.
CirclePoint point_between(const CirclePoint& a, const CirclePoint& b) {
    if (a == b) return half_turn(a);
    if (a.chart() == Chart::Projective) {
        if (a.is_infinity()) return CirclePoint::projective(b.exact() - kOne);
        if (b.is_infinity()) return CirclePoint::projective(a.exact() + kOne);
        if (compare(a.exact(), b.exact()) < 0)
            return CirclePoint::projective(mid_between(a.exact(), b.exact()));
        return CirclePoint::infinity();  // the arc wraps through the cut
    }
    Quad alpha = a.exact();
    Quad beta = b.exact();
    if (!(alpha < beta)) beta = beta + kOne;
    return CirclePoint::angle(mid_between(alpha, beta));
}

// Sign of the displacement of f at the probe, relative to the adjacent
// fixed point x0: +1 when f moves the probe forward, -1 backward. The probe
// must lie strictly between x0 and the next fixed point on that side.
int displacement_sign_right(const PiecewiseMap& f, const CirclePoint& x0,
                            const CirclePoint& probe) {
    CirclePoint fy = pw_evaluate(f, probe);
    return circular_order(x0, probe, fy) ? 1 : -1;
}

int displacement_sign_left(const PiecewiseMap& f, const CirclePoint& x0,
                           const CirclePoint& probe) {
    CirclePoint fy = pw_evaluate(f, probe);
    return circular_order(probe, fy, x0) ? 1 : -1;
}

LocalNature nature_from_signs(int left, int right) {
    if (left > 0 && right < 0) return LocalNature::Attracting;
    if (left < 0 && right > 0) return LocalNature::Repelling;
    if (left > 0 && right > 0) return LocalNature::ParabolicAboveBoth;
    return LocalNature::ParabolicBelowBoth;
}

struct ExactFixedSet {
    std::vector<CirclePoint> points;
    // Closed arcs of fixed points, as (left, right) endpoint pairs.
    std::vector<std::pair<CirclePoint, CirclePoint>> arcs;
};

ExactFixedSet collect_affine_fixed(const PiecewiseMap& f) {
    ExactFixedSet out;
    const auto& breaks = f.affine_breaks();
    const auto& pieces = f.affine_pieces();
    const size_t k = pieces.size();
    for (size_t i = 0; i < k; ++i) {
        const Quad& l = breaks[i];
        const Quad r = (i + 1 < k) ? breaks[i + 1] : kOne;
        const AffinePiece& p = pieces[i];
        if (p.slope == kOne) {
            // The whole piece is fixed iff the lift translates by an integer.
            if (p.offset == Quad(Rat(quad_floor(p.offset))))
                out.arcs.emplace_back(CirclePoint::angle(l), CirclePoint::angle(r));
            continue;
        }
        // Solve (slope - 1) x + offset = k over the integers k in range.
        const Quad s1 = p.slope - kOne;
        Quad dl = s1 * l + p.offset;
        Quad dr = s1 * r + p.offset;
        Quad lo = dl < dr ? dl : dr;
        Quad hi = dl < dr ? dr : dl;
        for (Int n = quad_floor(lo); Quad(Rat(n)) <= hi; ++n) {
            Quad target{Rat(n)};
            if (target < lo) continue;
            Quad x = (target - p.offset) / s1;
            if (l <= x && x <= r) out.points.push_back(CirclePoint::angle(x));
        }
    }
    return out;
}

ExactFixedSet collect_moebius_fixed(const PiecewiseMap& f) {
    ExactFixedSet out;
    const auto& breaks = f.moebius_breaks();
    const auto& pieces = f.moebius_pieces();
    const size_t k = pieces.size();
    for (size_t i = 0; i < k; ++i) {
        const CirclePoint& l = breaks[i];
        const CirclePoint& r = breaks[(i + 1) % k];
        if (pw_evaluate(f, l) == l) out.points.push_back(l);
        const MoebiusMap& m = pieces[i];
        if (m.is_identity()) {
            out.arcs.emplace_back(l, r);
            continue;
        }
        for (const auto& fp : moebius_fixed_points(m)) {
            bool inside;
            if (k == 1) {
                inside = !(fp.point == l);
            } else if (fp.point == l || fp.point == r) {
                inside = false;
            } else {
                inside = circular_order(l, fp.point, r);
            }
            if (inside) out.points.push_back(fp.point);
        }
    }
    return out;
}

void sort_circular(std::vector<CirclePoint>& pts) {
    std::sort(pts.begin(), pts.end(), [](const CirclePoint& a, const CirclePoint& b) {
        return cut_compare(a, b) < 0;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// True when p lies on the closed arc [l, r].
bool on_closed_arc(const CirclePoint& p, const CirclePoint& l, const CirclePoint& r) {
    if (p == l || p == r) return true;
    if (l == r) return false;
    return circular_order(l, p, r);
}

FixedPointReport numeric_fixed_report(const PiecewiseMap& f, const Rat& resolution) {
    FixedPointReport rep;
    rep.approximate = true;

    struct Seg {
        Rat l, r;
        QInterval d;  // encloses F(x) - x over [l, r]
        bool hot;     // may contain a fixed point
    };
    const Rat eval_width = resolution / 8;
    auto displacement = [&](const Rat& l, const Rat& r) {
        QInterval fl = f.lift_enclosure(l, eval_width);
        QInterval fr = f.lift_enclosure(r, eval_width);
        return QInterval(fl.lo - r, fr.hi - l);
    };
    auto has_integer = [](const QInterval& j) { return rat_floor(j.hi) >= rat_ceil(j.lo); };

    std::vector<Seg> segs;
    std::deque<Seg> work;
    const long init = 16;
    for (long i = 0; i < init; ++i) {
        Rat l(i, init), r(i + 1, init);
        work.push_back({l, r, displacement(l, r), false});
    }
    size_t processed = 0;
    while (!work.empty()) {
        Seg s = work.front();
        work.pop_front();
        if (++processed > 20000)
            throw Indeterminate("fixed-point search exhausted its subdivision budget");
        if (!has_integer(s.d)) {
            segs.push_back(s);
            continue;
        }
        if (s.r - s.l <= resolution) {
            s.hot = true;
            segs.push_back(s);
            continue;
        }
        Rat m = (s.l + s.r) / 2;
        work.push_back({s.l, m, displacement(s.l, m), false});
        work.push_back({m, s.r, displacement(m, s.r), false});
    }
    std::sort(segs.begin(), segs.end(),
              [](const Seg& a, const Seg& b) { return a.l < b.l; });

    size_t first_cold = segs.size();
    for (size_t i = 0; i < segs.size(); ++i)
        if (!segs[i].hot) {
            first_cold = i;
            break;
        }
    if (first_cold == segs.size())
        throw Indeterminate("displacement is too close to constant-integer to resolve");

    // Walk cyclically starting from a certified segment so clusters of hot
    // segments never wrap the seam.
    const size_t n = segs.size();
    size_t i = first_cold;
    size_t steps = 0;
    while (steps < n) {
        // Advance to the next hot run.
        while (steps < n && !segs[i % n].hot) {
            ++i;
            ++steps;
        }
        if (steps >= n) break;
        const QInterval& left_flank = segs[(i + n - 1) % n].d;
        // Clusters may span the seam at angle 0; shift wrapped segments by a
        // full turn so the enclosure endpoints stay ordered.
        auto wrap = [&](size_t abs_i) { return abs_i >= n ? Rat(1) : Rat(0); };
        Rat lo = segs[i % n].l + wrap(i);
        QInterval hull_d = segs[i % n].d;
        Rat hi_end = segs[i % n].r + wrap(i);
        while (steps < n && segs[i % n].hot) {
            hull_d = hull(hull_d, segs[i % n].d);
            hi_end = segs[i % n].r + wrap(i);
            ++i;
            ++steps;
        }
        const QInterval& right_flank = segs[i % n].d;
        Int k_lo = rat_ceil(hull_d.lo);
        Int k_hi = rat_floor(hull_d.hi);
        if (k_lo != k_hi)
            throw Indeterminate("fixed-point cluster straddles two lift integers");
        Rat k(k_lo);
        int sl = left_flank.lo > k ? 1 : -1;
        int sr = right_flank.lo > k ? 1 : -1;
        rep.points.push_back({CirclePoint::approx(Chart::Angle, QInterval(lo, hi_end)),
                              nature_from_signs(sl, sr)});
    }
    return rep;
}

}  // namespace

FixedPointReport fixed_points_report(const PiecewiseMap& f, const Rat& resolution) {
    if (resolution <= 0) throw WrongInput("resolution must be positive");
    if (f.universe() == Universe::Numeric) return numeric_fixed_report(f, resolution);

    FixedPointReport rep;
    if (f.is_identity()) {
        rep.is_identity = true;
        return rep;
    }
    try {
        ExactFixedSet set = f.universe() == Universe::PwAffine ? collect_affine_fixed(f)
                                                               : collect_moebius_fixed(f);
        sort_circular(set.points);

        // Merge arcs that share endpoints (the shared endpoint is fixed by
        // continuity), including across the seam.
        auto& arcs = set.arcs;
        std::sort(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) {
            return cut_compare(a.first, b.first) < 0;
        });
        for (size_t i = 0; i + 1 < arcs.size();) {
            if (arcs[i].second == arcs[i + 1].first) {
                arcs[i].second = arcs[i + 1].second;
                arcs.erase(arcs.begin() + static_cast<long>(i) + 1);
            } else {
                ++i;
            }
        }
        if (arcs.size() >= 2 && arcs.back().second == arcs.front().first) {
            arcs.back().second = arcs.front().second;
            arcs.erase(arcs.begin());
        }

        // Points lying on a fixed arc belong to the arc, not the point list.
        std::vector<CirclePoint> isolated;
        for (const auto& p : set.points) {
            bool on_arc = false;
            for (const auto& a : arcs)
                if (on_closed_arc(p, a.first, a.second)) {
                    on_arc = true;
                    break;
                }
            if (!on_arc) isolated.push_back(p);
        }

        if (!arcs.empty())
            rep.fixed_arc = CircleInterval{arcs.front().first, arcs.front().second};

        // Neighbors (other fixed points and arc endpoints) bound the probe
        // arcs on which the displacement keeps a constant sign.
        std::vector<CirclePoint> neighbors = isolated;
        for (const auto& a : arcs) {
            neighbors.push_back(a.first);
            neighbors.push_back(a.second);
        }
        sort_circular(neighbors);

        for (const auto& x0 : isolated) {
            size_t idx = 0;
            while (!(neighbors[idx] == x0)) ++idx;
            const CirclePoint& prev = neighbors[(idx + neighbors.size() - 1) % neighbors.size()];
            const CirclePoint& next = neighbors[(idx + 1) % neighbors.size()];
            int sl = displacement_sign_left(f, x0, point_between(prev, x0));
            int sr = displacement_sign_right(f, x0, point_between(x0, next));
            rep.points.push_back({x0, nature_from_signs(sl, sr)});
        }
        return rep;
    } catch (const FieldMismatch&) {
        // Fixed points left the coefficient field; certify numerically.
        return numeric_fixed_report(embed_numeric(f), resolution);
    }
}

CrossingReport crossing_report(const PiecewiseMap& f, const PiecewiseMap& g,
                               const Rat& resolution) {
    bool coincide = false;
    try {
        coincide = pw_equal(f, g);
    } catch (const Undecidable&) {
        coincide = false;
    }
    PiecewiseMap h = pw_compose(pw_inverse(g), f);
    if (coincide || h.is_identity())
        throw DegenerateCoincidence("crossing report of two equal maps");

    FixedPointReport rep = fixed_points_report(h, resolution);
    CrossingReport out;
    out.approximate = rep.approximate;
    out.degenerate = rep.has_fixed_arc();
    for (const auto& e : rep.points) {
        CrossingKind kind = (e.nature == LocalNature::Attracting ||
                             e.nature == LocalNature::Repelling)
                                ? CrossingKind::Hyperbolic
                                : CrossingKind::Parabolic;
        out.crossings.push_back({e.point, kind});
    }
    return out;
}

namespace {

std::string wandering_evidence(const PiecewiseMap& f) {
    PiecewiseMap probe = f.universe() == Universe::PwMoebius ? embed_numeric(f) : f;
    const Rat x0(0);
    const Rat x1(1, 64);
    const Rat w(1, 1 << 24);
    Rat best(1);
    long best_n = 0;
    for (long n = 1; n <= 30; ++n) {
        QInterval a = lift_iterate_enclosure(probe, x0, n, w);
        QInterval b = lift_iterate_enclosure(probe, x1, n, w);
        Rat len = b.hi - a.lo;
        if (len < best) {
            best = len;
            best_n = n;
        }
    }
    std::ostringstream os;
    os << "wandering probe: the arc [0, 1/64] has an iterate of length <= "
       << format_rational(best) << " (at n = " << best_n << ")";
    return os.str();
}

}  // namespace

Classification classify_element(const PiecewiseMap& f, long q_cap) {
    Classification c;
    if (f.is_identity()) {
        c.kind = ElementKind::Trivial;
        c.evidence = "identity map";
        return c;
    }
    if (f.universe() == Universe::Numeric) {
        c.kind = ElementKind::Unknown;
        c.evidence = "numeric universe: the fixed-point set is not decidable";
        return c;
    }
    if (f.universe() == Universe::PwMoebius && f.piece_count() == 1) {
        const MoebiusMap& m = f.moebius_pieces()[0];
        switch (moebius_classify(m)) {
            case MoebiusClass::Identity:
                c.kind = ElementKind::Trivial;
                return c;
            case MoebiusClass::Parabolic:
                c.kind = ElementKind::ParabolicLike;
                for (const auto& fp : moebius_fixed_points(m)) c.fixed.push_back(fp.point);
                c.evidence = "parabolic trace";
                return c;
            case MoebiusClass::Hyperbolic:
                c.kind = ElementKind::HyperbolicLike;
                for (const auto& fp : moebius_fixed_points(m)) c.fixed.push_back(fp.point);
                c.evidence = "hyperbolic trace";
                return c;
            case MoebiusClass::Elliptic:
                c.kind = ElementKind::EllipticLike;
                c.rot = elliptic_rotation_number(m, Rat(1, 1 << 16));
                c.evidence = "elliptic trace";
                return c;
        }
    }

    FixedPointReport rep = fixed_points_report(f);
    if (rep.approximate) {
        c.kind = ElementKind::Unknown;
        c.evidence = "fixed points leave the coefficient field";
        return c;
    }
    if (rep.has_fixed_arc()) {
        c.kind = ElementKind::NotMoebiusLike;
        c.evidence = "an arc of fixed points";
        return c;
    }
    switch (rep.count()) {
        case 0:
            break;
        case 1:
            c.kind = ElementKind::ParabolicLike;
            c.fixed.push_back(rep.points[0].point);
            c.evidence = "exactly one fixed point";
            return c;
        case 2: {
            LocalNature n0 = rep.points[0].nature;
            LocalNature n1 = rep.points[1].nature;
            bool pair = (n0 == LocalNature::Attracting && n1 == LocalNature::Repelling) ||
                        (n0 == LocalNature::Repelling && n1 == LocalNature::Attracting);
            c.fixed.push_back(rep.points[0].point);
            c.fixed.push_back(rep.points[1].point);
            if (pair) {
                c.kind = ElementKind::HyperbolicLike;
                c.evidence = "an attracting/repelling pair";
            } else {
                c.kind = ElementKind::NotMoebiusLike;
                c.evidence = "two fixed points that are not an attracting/repelling pair";
            }
            return c;
        }
        default:
            c.kind = ElementKind::NotMoebiusLike;
            for (const auto& e : rep.points) c.fixed.push_back(e.point);
            c.evidence = "more than two fixed points";
            return c;
    }

    RotResult rr = rotation_number(f, Int(q_cap));
    c.rot = rr;
    if (rr.is_exact()) {
        long q = static_cast<long>(den(rr.value));
        if (pw_power(f, q).is_identity()) {
            c.kind = ElementKind::EllipticLike;
            c.evidence = "finite order matching the rotation number";
        } else {
            c.kind = ElementKind::NotMoebiusLike;
            c.evidence = "rational rotation number with a nontrivial power";
        }
        return c;
    }
    c.kind = ElementKind::Unknown;
    c.evidence = wandering_evidence(f);
    return c;
}

namespace {

struct BallEntry {
    GroupWord word;
    PiecewiseMap map;
};

// All freely reduced words of length <= radius, in breadth-first order
// (the empty word first), with their maps.
std::vector<BallEntry> enumerate_ball(const std::vector<PiecewiseMap>& gens, long radius) {
    if (gens.empty()) throw WrongInput("at least one generator required");
    for (const auto& g : gens)
        if (g.universe() == Universe::Numeric)
            throw WrongInput("word-ball surveys need exact generators");

    std::vector<PiecewiseMap> inv;
    inv.reserve(gens.size());
    for (const auto& g : gens) inv.push_back(pw_inverse(g));

    std::vector<BallEntry> all;
    all.push_back({GroupWord{}, PiecewiseMap::identity(gens[0].universe())});
    size_t level_begin = 0;
    for (long d = 0; d < radius; ++d) {
        size_t level_end = all.size();
        for (size_t i = level_begin; i < level_end; ++i) {
            for (int gi = 0; gi < static_cast<int>(gens.size()); ++gi) {
                for (int e : {1, -1}) {
                    const auto& ls = all[i].word.letters();
                    if (!ls.empty() && ls.back().gen == gi && ls.back().exp == -e)
                        continue;  // would freely reduce
                    GroupWord w = all[i].word.append({gi, e});
                    PiecewiseMap m = pw_compose(all[i].map, e > 0 ? gens[gi] : inv[gi]);
                    all.push_back({std::move(w), std::move(m)});
                }
            }
        }
        level_begin = level_end;
    }
    return all;
}

// Indices of the first representative of each distinct map, in ball order.
std::vector<size_t> dedupe_ball(const std::vector<BallEntry>& ball) {
    std::vector<size_t> reps;
    for (size_t i = 0; i < ball.size(); ++i) {
        bool fresh = true;
        for (size_t r : reps)
            if (pw_equal(ball[i].map, ball[r].map)) {
                fresh = false;
                break;
            }
        if (fresh) reps.push_back(i);
    }
    return reps;
}

}  // namespace

WordBallReport word_ball_max_fixed(const std::vector<PiecewiseMap>& gens, long radius,
                                   std::optional<size_t> expected_max) {
    if (radius < 0) throw WrongInput("radius must be nonnegative");
    auto ball = enumerate_ball(gens, radius);
    auto reps = dedupe_ball(ball);

    WordBallReport rep;
    rep.radius = radius;
    rep.words_examined = ball.size();
    for (size_t r : reps) {
        if (ball[r].map.is_identity()) continue;
        ++rep.distinct_nontrivial;
        FixedPointReport fpr = fixed_points_report(ball[r].map);
        size_t count = fpr.count();
        if (fpr.has_fixed_arc()) {
            // An arc of fixed points exceeds any finite expectation.
            if (!rep.counterexample) rep.counterexample = ball[r].word;
            continue;
        }
        ++rep.histogram[count];
        if (count > rep.max_fixed_points ||
            (count == rep.max_fixed_points && rep.witness.empty() && count > 0)) {
            rep.max_fixed_points = count;
            rep.witness = ball[r].word;
        }
        if (expected_max && count > *expected_max && !rep.counterexample)
            rep.counterexample = ball[r].word;
    }
    return rep;
}

ElementaryCertificate finite_orbit_search(const std::vector<PiecewiseMap>& gens,
                                          long depth, long period_cap) {
    if (gens.empty()) throw WrongInput("at least one generator required");
    ElementaryCertificate cert;
    cert.checked_depth = depth;

    bool exact = true;
    for (const auto& g : gens)
        if (g.universe() == Universe::Numeric) exact = false;
    bool same_universe = true;
    for (const auto& g : gens)
        if (g.universe() != gens[0].universe()) same_universe = false;

    if (exact && same_universe) {
        auto ball = enumerate_ball(gens, std::min(depth, 4L));
        auto reps = dedupe_ball(ball);
        std::vector<CirclePoint> seeds;
        for (size_t r : reps) {
            if (ball[r].map.is_identity()) continue;
            FixedPointReport fpr = fixed_points_report(ball[r].map);
            if (!fpr.approximate)
                for (const auto& e : fpr.points) seeds.push_back(e.point);
            RotResult rr = rotation_number(ball[r].map, Int(48));
            if (rr.is_exact() && rr.certificate && rr.certificate->is_exact())
                seeds.push_back(*rr.certificate);
        }
        sort_circular(seeds);

        std::optional<std::vector<CirclePoint>> best;
        for (const auto& seed : seeds) {
            std::vector<CirclePoint> orbit{seed};
            bool closed = true;
            for (size_t i = 0; i < orbit.size() && closed; ++i) {
                for (const auto& g : gens) {
                    CirclePoint y = pw_evaluate(g, orbit[i]);
                    bool known = false;
                    for (const auto& z : orbit)
                        if (z == y) {
                            known = true;
                            break;
                        }
                    if (known) continue;
                    if (static_cast<long>(orbit.size()) >= period_cap) {
                        closed = false;
                        break;
                    }
                    orbit.push_back(y);
                }
            }
            if (closed && (!best || orbit.size() < best->size())) best = orbit;
        }
        if (best) {
            sort_circular(*best);
            cert.orbit = *best;
            cert.kind = best->size() == 1 ? ElementaryCertificate::Kind::GlobalFixedPoint
                                          : ElementaryCertificate::Kind::FiniteOrbit;
            std::ostringstream os;
            os << "invariant set of " << best->size() << " point(s)";
            cert.evidence = os.str();
            return cert;
        }
    }

    bool all_rigid = true;
    for (const auto& g : gens)
        if (g.universe() != Universe::PwAffine || !g.is_rigid_rotation()) all_rigid = false;
    if (all_rigid) {
        cert.kind = ElementaryCertificate::Kind::RotationSemiConjugacy;
        cert.evidence = "every generator is a rigid rotation";
        return cert;
    }
    cert.evidence = "no invariant set found to the depth";
    return cert;
}

RotAdditivityReport rot_homomorphism_check(const std::vector<PiecewiseMap>& gens,
                                           long radius) {
    RotAdditivityReport rep;
    rep.certificate = finite_orbit_search(gens, std::min(radius, 4L), 24);
    if (rep.certificate.kind == ElementaryCertificate::Kind::None)
        throw NotElementary("no elementary certificate for the generators");

    auto ball = enumerate_ball(gens, radius);
    auto reps = dedupe_ball(ball);
    if (reps.size() > 128) reps.resize(128);

    auto rot_of = [](const PiecewiseMap& m) -> Quad {
        if (m.universe() == Universe::PwAffine && m.is_rigid_rotation())
            return *m.rigid_angle();
        RotResult rr = rotation_number(m, Int(256));
        if (!rr.is_exact())
            throw Indeterminate("rotation number of a ball element not exactly resolved");
        return Quad(rr.value);
    };

    std::vector<Quad> rots;
    rots.reserve(reps.size());
    for (size_t r : reps) rots.push_back(rot_of(ball[r].map));

    for (size_t i = 0; i < reps.size(); ++i) {
        for (size_t j = 0; j < reps.size(); ++j) {
            PiecewiseMap composed = pw_compose(ball[reps[i]].map, ball[reps[j]].map);
            Quad expected = quad_frac(rots[i] + rots[j]);
            Quad got = quad_frac(rot_of(composed));
            ++rep.pairs_checked;
            if (!(got == expected)) {
                rep.ok = false;
                rep.violation = {ball[reps[i]].word, ball[reps[j]].word};
                return rep;
            }
        }
    }
    rep.ok = true;
    return rep;
}

std::pair<long, PiecewiseMap> amplify_local_closeness(const PiecewiseMap& f,
                                                      const PiecewiseMap& g,
                                                      const CircleInterval& I,
                                                      const Rat& eta, long m_cap) {
    if (eta <= 0) throw WrongInput("eta must be positive");
    if (f.universe() != Universe::Numeric) {
        FixedPointReport rep = fixed_points_report(f);
        bool found = false;
        for (const auto& e : rep.points)
            if (e.nature == LocalNature::Repelling && I.contains(e.point)) found = true;
        if (!found) throw WrongInput("f needs a repelling fixed point inside the arc");
    }
    PiecewiseMap finv = pw_inverse(f);
    PiecewiseMap h = g;
    for (long m = 0; m <= m_cap; ++m) {
        QInterval d = distance_inf(h, PiecewiseMap::identity(h.universe()), eta / 4);
        if (d.hi < eta) return {m, h};
        h = pw_compose(f, pw_compose(h, finv));
    }
    throw CannotAmplify("conjugation never became eta-close within the iteration cap");
}

long power_distance_calibrate(const PiecewiseMap& g, const Rat& eps, long m_cap) {
    if (eps <= 0) throw WrongInput("eps must be positive");
    if (g.universe() != Universe::Numeric && g.is_identity())
        throw WrongInput("the identity never reaches the distance window");

    PiecewiseMap id = PiecewiseMap::identity(g.universe());
    const Rat tol = eps / 32;
    QInterval d = distance_inf(g, id, tol);
    if (!(d.hi <= eps / 2))
        throw WrongInput("g must start within eps/2 of the identity");
    if (d.lo > eps / 4) return 1;
    PiecewiseMap h = g;
    for (long m = 2; m <= m_cap; ++m) {
        h = pw_compose(h, g);
        d = distance_inf(h, id, tol);
        if (d.lo > eps / 4) {
            if (d.hi <= eps / 2) return m;
            throw CannotAmplify("power distance jumped over the target window");
        }
    }
    throw CannotAmplify("power distances stayed below eps/4 within the cap");
}

}  // namespace circlelab
