#include "circlelab/circle.hpp"

#include <sstream>

namespace circlelab {

namespace {

Quad reduce_mod_1(const Quad& q) {
    if (q.is_rational()) return Quad(rat_frac(q.as_rational()));
    // Irrational: bracket, then fix the floor with exact comparisons.
    auto b = quad_bracket(q, Rat(1, 2));
    Int k = rat_floor(b.lo);
    while (compare(q, Quad(Rat(k + 1))) >= 0) ++k;
    while (compare(q, Quad(Rat(k))) < 0) --k;
    return q - Quad(Rat(k));
}

}  // namespace

CirclePoint CirclePoint::angle(const Quad& theta) {
    return CirclePoint(Chart::Angle, reduce_mod_1(theta));
}

CirclePoint CirclePoint::projective(const Quad& x) { return CirclePoint(Chart::Projective, x); }

CirclePoint CirclePoint::infinity() { return CirclePoint(Chart::Projective, InfinityTag{}); }

CirclePoint CirclePoint::approx(Chart chart, QInterval enclosure) {
    return CirclePoint(chart, std::move(enclosure));
}

const Quad& CirclePoint::exact() const {
    if (auto* q = std::get_if<Quad>(&coord_)) return *q;
    throw DomainError("point has no finite exact coordinate");
}

const QInterval& CirclePoint::enclosure() const {
    if (auto* e = std::get_if<QInterval>(&coord_)) return *e;
    throw DomainError("point is exact, not an enclosure");
}

std::string CirclePoint::str() const {
    if (is_infinity()) return "inf";
    std::ostringstream os;
    if (is_exact())
        os << exact().str();
    else
        os << enclosure().str();
    os << (chart_ == Chart::Angle ? "@angle" : "@proj");
    return os.str();
}

bool operator==(const CirclePoint& a, const CirclePoint& b) {
    if (a.chart_ != b.chart_) return false;
    if (a.is_infinity() || b.is_infinity()) return a.is_infinity() && b.is_infinity();
    if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
    if (a.is_enclosure() && b.is_enclosure()) return a.enclosure() == b.enclosure();
    return false;
}

int cut_compare(const CirclePoint& a, const CirclePoint& b) {
    if (a.chart() != b.chart()) throw DomainError("cut_compare across charts");
    if (a.chart() == Chart::Projective) {
        if (a.is_infinity() && b.is_infinity()) return 0;
        if (a.is_infinity()) return -1;
        if (b.is_infinity()) return 1;
    } else if (a.is_infinity() || b.is_infinity()) {
        throw DomainError("infinity in Angle chart");
    }
    if (a.is_exact() && b.is_exact()) return compare(a.exact(), b.exact());
    // Enclosures: decide only when certified disjoint.
    auto range = [](const CirclePoint& p) -> QInterval {
        if (p.is_enclosure()) return p.enclosure();
        auto br = quad_bracket(p.exact(), Rat(1, 1024));
        return {br.lo, br.hi};
    };
    QInterval ia = range(a), ib = range(b);
    if (ia.hi < ib.lo) return -1;
    if (ib.hi < ia.lo) return 1;
    throw Indeterminate("overlapping enclosures: order undecided");
}

bool circular_order(const CirclePoint& x, const CirclePoint& y, const CirclePoint& z) {
    int xy = cut_compare(x, y);
    int yz = cut_compare(y, z);
    int zx = cut_compare(z, x);
    if (xy == 0 || yz == 0 || zx == 0) throw DegenerateTriple("coincident points");
    return (xy < 0 && yz < 0) || (yz < 0 && zx < 0) || (zx < 0 && xy < 0);
}

bool CircleInterval::contains(const CirclePoint& z) const {
    if (is_empty()) return false;
    try {
        return circular_order(left, z, right);
    } catch (const DegenerateTriple&) {
        return false;  // z coincides with an endpoint; the arc is open
    }
}

CirclePoint half_turn(const CirclePoint& p) {
    if (p.chart() == Chart::Angle) {
        if (!p.is_exact()) {
            auto e = p.enclosure();
            Rat lo = e.lo + Rat(1, 2), hi = e.hi + Rat(1, 2);
            if (lo >= 1) {
                lo -= 1;
                hi -= 1;
            }
            return CirclePoint::approx(Chart::Angle, {lo, hi});
        }
        return CirclePoint::angle(p.exact() + Quad(Rat(1, 2)));
    }
    if (p.is_infinity()) return CirclePoint::projective(Quad(Rat(0)));
    if (p.is_exact()) {
        if (p.exact().sign() == 0) return CirclePoint::infinity();
        return CirclePoint::projective(-p.exact().inverse());
    }
    throw Indeterminate("half-turn of projective enclosure");
}

std::optional<Quad> exact_angle_to_projective(const Rat& theta) {
    Rat t = rat_frac(theta);
    const Int d = den(t);
    if (d != 1 && d != 2 && d != 3 && d != 4 && d != 6 && d != 8 && d != 12)
        return std::nullopt;
    if (t == 0) return std::nullopt;  // maps to inf
    Quad r2 = Quad(Rat(0), Rat(1), Int(2));
    Quad r3 = Quad(Rat(0), Rat(1), Int(3));
    // tan(pi*(t - 1/2)) at the quadratic tangent angles.
    if (t == Rat(1, 2)) return Quad(Rat(0));
    if (t == Rat(1, 4)) return Quad(Rat(-1));
    if (t == Rat(3, 4)) return Quad(Rat(1));
    if (t == Rat(1, 8)) return -(Quad(Rat(1)) + r2);
    if (t == Rat(3, 8)) return Quad(Rat(1)) - r2;
    if (t == Rat(5, 8)) return r2 - Quad(Rat(1));
    if (t == Rat(7, 8)) return Quad(Rat(1)) + r2;
    if (t == Rat(1, 12)) return -(Quad(Rat(2)) + r3);
    if (t == Rat(5, 12)) return r3 - Quad(Rat(2));
    if (t == Rat(7, 12)) return Quad(Rat(2)) - r3;
    if (t == Rat(11, 12)) return Quad(Rat(2)) + r3;
    if (t == Rat(1, 6)) return -r3;
    if (t == Rat(1, 3)) return -(r3 / Quad(Rat(3)));
    if (t == Rat(2, 3)) return r3 / Quad(Rat(3));
    if (t == Rat(5, 6)) return r3;
    return std::nullopt;
}

namespace {

// Enclosure of tan(pi*(t-1/2)) for exact angle t in (0,1), refined until
// width <= precision (Quad arguments go through rational brackets).
QInterval proj_value_enclosure(const Quad& t, const Rat& precision) {
    if (t.is_rational()) return tan_pi(t.as_rational() - Rat(1, 2), precision);
    Rat w = precision / 4;
    for (int i = 0; i < 64; ++i, w /= 16) {
        auto b = quad_bracket(t, w);
        if (b.lo <= 0 || b.hi >= 1) throw DomainError("angle not reduced");
        QInterval lo = tan_pi(b.lo - Rat(1, 2), w);
        QInterval hi = tan_pi(b.hi - Rat(1, 2), w);
        QInterval out(lo.lo, hi.hi);
        if (out.width() <= precision) return out;
    }
    throw PrecisionUnreachable("chart conversion did not converge");
}

QInterval angle_value_enclosure(const Quad& x, const Rat& precision) {
    if (x.is_rational()) {
        QInterval a = atan_over_pi(x.as_rational(), precision);
        return {a.lo + Rat(1, 2), a.hi + Rat(1, 2)};
    }
    Rat w = precision / 4;
    for (int i = 0; i < 64; ++i, w /= 16) {
        auto b = quad_bracket(x, w);
        QInterval lo = atan_over_pi(b.lo, w);
        QInterval hi = atan_over_pi(b.hi, w);
        QInterval out(lo.lo + Rat(1, 2), hi.hi + Rat(1, 2));
        if (out.width() <= precision) return out;
    }
    throw PrecisionUnreachable("chart conversion did not converge");
}

std::optional<Rat> exact_projective_to_angle(const Quad& x) {
    // Inverse lookup of the quadratic tangent table.
    static const std::pair<Rat, Quad> table[] = {
        {Rat(1, 2), Quad(Rat(0))},
        {Rat(1, 4), Quad(Rat(-1))},
        {Rat(3, 4), Quad(Rat(1))},
        {Rat(1, 8), -(Quad(Rat(1)) + Quad(Rat(0), Rat(1), Int(2)))},
        {Rat(3, 8), Quad(Rat(1)) - Quad(Rat(0), Rat(1), Int(2))},
        {Rat(5, 8), Quad(Rat(0), Rat(1), Int(2)) - Quad(Rat(1))},
        {Rat(7, 8), Quad(Rat(1)) + Quad(Rat(0), Rat(1), Int(2))},
        {Rat(1, 12), -(Quad(Rat(2)) + Quad(Rat(0), Rat(1), Int(3)))},
        {Rat(5, 12), Quad(Rat(0), Rat(1), Int(3)) - Quad(Rat(2))},
        {Rat(7, 12), Quad(Rat(2)) - Quad(Rat(0), Rat(1), Int(3))},
        {Rat(11, 12), Quad(Rat(2)) + Quad(Rat(0), Rat(1), Int(3))},
        {Rat(1, 6), -Quad(Rat(0), Rat(1), Int(3))},
        {Rat(1, 3), Quad(Rat(0), Rat(-1, 3), Int(3))},
        {Rat(2, 3), Quad(Rat(0), Rat(1, 3), Int(3))},
        {Rat(5, 6), Quad(Rat(0), Rat(1), Int(3))},
    };
    for (const auto& [theta, v] : table)
        if (v == x) return theta;
    return std::nullopt;
}

}  // namespace

CirclePoint chart_convert(const CirclePoint& p, Chart target, const Rat& precision) {
    if (precision <= 0) throw std::invalid_argument("precision must be positive");
    if (p.chart() == target) return p;
    if (target == Chart::Projective) {
        if (p.is_enclosure()) {
            const auto& e = p.enclosure();
            if (e.lo <= 0 || e.hi >= 1)
                throw Indeterminate("angle enclosure touches the chart origin");
            QInterval lo = tan_pi(e.lo - Rat(1, 2), precision);
            QInterval hi = tan_pi(e.hi - Rat(1, 2), precision);
            return CirclePoint::approx(Chart::Projective, {lo.lo, hi.hi});
        }
        const Quad& t = p.exact();
        if (t.sign() == 0) return CirclePoint::infinity();
        if (t.is_rational())
            if (auto v = exact_angle_to_projective(t.as_rational()))
                return CirclePoint::projective(*v);
        return CirclePoint::approx(Chart::Projective, proj_value_enclosure(t, precision));
    }
    // Projective -> Angle.
    if (p.is_infinity()) return CirclePoint::angle(Rat(0));
    if (p.is_enclosure()) {
        const auto& e = p.enclosure();
        QInterval lo = atan_over_pi(e.lo, precision);
        QInterval hi = atan_over_pi(e.hi, precision);
        return CirclePoint::approx(Chart::Angle, {lo.lo + Rat(1, 2), hi.hi + Rat(1, 2)});
    }
    if (auto theta = exact_projective_to_angle(p.exact())) return CirclePoint::angle(*theta);
    return CirclePoint::approx(Chart::Angle, angle_value_enclosure(p.exact(), precision));
}

QInterval angle_coordinate(const CirclePoint& proj_point, const Rat& width) {
    if (proj_point.chart() != Chart::Projective) throw DomainError("expected projective point");
    if (proj_point.is_infinity()) return QInterval(Rat(0));
    CirclePoint a = chart_convert(proj_point, Chart::Angle, width);
    if (a.is_exact()) return QInterval(a.exact().as_rational());
    return a.enclosure();
}

int compare_angle_to_projective(const Rat& theta, const CirclePoint& proj_point) {
    if (!proj_point.is_exact()) throw Indeterminate("projective point not exact");
    Rat t = rat_frac(theta);
    if (proj_point.is_infinity()) return t == 0 ? 0 : 1;
    if (t == 0) return -1;  // origin is below every finite projective point
    if (auto v = exact_angle_to_projective(t)) return compare(*v, proj_point.exact());
    // theta's tangent is non-quadratic here, so equality is impossible and
    // enclosure refinement terminates.
    Rat w(1, 1024);
    for (int i = 0; i < 256; ++i, w /= 16) {
        QInterval u = angle_coordinate(proj_point, w);
        if (t < u.lo) return -1;
        if (t > u.hi) return 1;
    }
    throw PrecisionUnreachable("compare_angle_to_projective did not separate");
}

}  // namespace circlelab
