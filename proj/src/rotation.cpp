#include "circlelab/rotation.hpp"

#include "circlelab/errors.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

namespace circlelab {

namespace {

constexpr long kNumericSegmentBudget = 20000;

long to_long(const Int& v, const char* what) {
    if (v > Int(std::numeric_limits<long>::max()) ||
        v < Int(std::numeric_limits<long>::min())) {
        throw WrongInput(std::string(what) + ": value exceeds machine range");
    }
    return v.convert_to<long>();
}

RotCompare order_only(int sign) {
    return {sign > 0 ? RotOrder::Greater : RotOrder::Less, std::nullopt};
}

RotCompare equal_at(CirclePoint x) { return {RotOrder::Equal, std::move(x)}; }

// --- rigid rotations -------------------------------------------------------

RotCompare compare_rigid(const Quad& angle, const Rat& pq) {
    int s = compare(angle, Quad(pq));
    if (s == 0) return equal_at(CirclePoint::angle(Rat(0)));
    return order_only(s);
}

// --- piecewise-affine maps --------------------------------------------------

// Exact trichotomy via the displacement h(x) = F^q(x) - x - p, a continuous
// piecewise-affine periodic function whose extremes sit at breakpoints of
// the q-th power.
RotCompare compare_affine(const PiecewiseMap& f, const Int& p, const Int& q) {
    long ql = to_long(q, "denominator");
    PiecewiseMap g = pw_power(f, ql);
    Quad target{Rat(p)};
    // pw_power renormalizes its canonical lift; restore the q-fold iterate
    // of f's lift with the exact integer shift between the two.
    Quad shift = lift_iterate(f, Quad(Rat(0)), ql) - g.lift_value(Quad(Rat(0)));

    const auto& breaks = g.affine_breaks();
    std::vector<Quad> h;
    h.reserve(breaks.size());
    bool any_pos = false, any_neg = false;
    for (const Quad& b : breaks) {
        Quad v = g.lift_value(b) + shift - b - target;
        if (v == Quad(Rat(0))) return equal_at(CirclePoint::angle(b));
        (v > Quad(Rat(0)) ? any_pos : any_neg) = true;
        h.push_back(std::move(v));
    }
    if (!any_neg) return order_only(+1);
    if (!any_pos) return order_only(-1);
    // Mixed strict signs: a zero lies inside some piece; solve it exactly.
    size_t k = breaks.size();
    for (size_t i = 0; i < k; ++i) {
        size_t j = (i + 1) % k;
        if ((h[i] > Quad(Rat(0))) == (h[j] > Quad(Rat(0)))) continue;
        const AffinePiece& piece = g.affine_pieces()[i];
        // h restricted to the piece: (slope-1)*x + offset + shift - p.
        Quad root = (target - shift - piece.offset) / (piece.slope - Quad(Rat(1)));
        return equal_at(CirclePoint::angle(quad_frac(root)));
    }
    throw DomainError("sign change without a bracketing piece");
}

// --- piecewise-Moebius maps --------------------------------------------------

// Winding bookkeeping matching the canonical lift through the cut at
// projective infinity: the lift gains +1 exactly at and past the cut's
// preimage. Tracks the exact orbit y, f(y), ..., f^{q-1}(y).
struct Winding {
    const PiecewiseMap& f;
    CirclePoint cut_pre;
    bool fixes_cut;

    explicit Winding(const PiecewiseMap& map)
        : f(map),
          cut_pre(pw_evaluate(pw_inverse(map), CirclePoint::infinity())),
          fixes_cut(cut_pre.is_infinity()) {}

    int step_gain(const CirclePoint& y) const {
        return (!fixes_cut && cut_compare(y, cut_pre) >= 0) ? 1 : 0;
    }

    /// Total lift gain over q steps starting at y; sets end to f^q(y).
    Int total(const CirclePoint& start, long q, CirclePoint& end) const {
        Int w = 0;
        CirclePoint y = start;
        for (long j = 0; j < q; ++j) {
            w += step_gain(y);
            y = pw_evaluate(f, y);
        }
        end = std::move(y);
        return w;
    }
};

bool arc_contains(const std::vector<CirclePoint>& breaks, size_t i,
                  const CirclePoint& x) {
    if (breaks.size() == 1) return true;  // single piece covers the circle
    const CirclePoint& left = breaks[i];
    const CirclePoint& right = breaks[(i + 1) % breaks.size()];
    if (x == left) return true;
    if (x == right) return false;
    return circular_order(left, x, right);
}

/// Any exact fixed point of g on the circle, or nullopt when g has none.
/// Sets field_trouble when a piece's fixed points exist but cannot be
/// represented in its coefficient field.
std::optional<CirclePoint> moebius_map_fixed_point(const PiecewiseMap& g,
                                                   bool& field_trouble) {
    CirclePoint inf = CirclePoint::infinity();
    if (pw_evaluate(g, inf) == inf) return inf;
    for (const CirclePoint& b : g.moebius_breaks()) {
        if (pw_evaluate(g, b) == b) return b;
    }
    const auto& breaks = g.moebius_breaks();
    const auto& pieces = g.moebius_pieces();
    for (size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].is_identity()) return breaks[i];
        std::vector<MoebiusFixedPoint> fps;
        try {
            fps = moebius_fixed_points(pieces[i]);
        } catch (const FieldMismatch&) {
            field_trouble = true;
            continue;
        }
        for (const auto& fp : fps) {
            if (arc_contains(breaks, i, fp.point)) return fp.point;
        }
    }
    return std::nullopt;
}

RotCompare compare_moebius(const PiecewiseMap& f, const Int& p, const Int& q);

// --- numeric maps ------------------------------------------------------------

// Certified global sign of h(x) = F^q(x) - x - p by dyadic subdivision of
// one period; monotonicity of F^q gives the per-segment range
// [F^q(lo) - hi - p, F^q(hi) - lo - p].
RotCompare compare_numeric(const PiecewiseMap& f, const Int& p, const Int& q) {
    long ql = to_long(q, "denominator");
    Rat target(p);
    struct Seg {
        Rat lo, hi;
    };
    std::vector<Seg> stack{{Rat(0), Rat(1)}};
    long budget = kNumericSegmentBudget;
    bool any_pos = false, any_neg = false;
    while (!stack.empty()) {
        if (--budget < 0) {
            throw Indeterminate("global displacement sign not resolved in budget");
        }
        Seg s = stack.back();
        stack.pop_back();
        Rat w = (s.hi - s.lo) / 8;
        QInterval a = lift_iterate_enclosure(f, s.lo, ql, w);
        QInterval b = lift_iterate_enclosure(f, s.hi, ql, w);
        Rat low = a.lo - s.hi - target;
        Rat high = b.hi - s.lo - target;
        if (low > 0) {
            any_pos = true;
            continue;
        }
        if (high < 0) {
            any_neg = true;
            continue;
        }
        Rat mid = (s.lo + s.hi) / 2;
        stack.push_back({s.lo, mid});
        stack.push_back({mid, s.hi});
    }
    if (any_pos && any_neg) {
        throw DomainError("certified opposite displacement signs on a circle map");
    }
    return order_only(any_pos ? +1 : -1);
}

RotCompare compare_moebius(const PiecewiseMap& f, const Int& p, const Int& q) {
    long ql = to_long(q, "denominator");
    PiecewiseMap g = pw_power(f, ql);
    Winding winding(f);
    CirclePoint inf = CirclePoint::infinity();

    if (g.is_identity()) {
        CirclePoint end = inf;
        Int w = winding.total(inf, ql, end);
        if (w == p) return equal_at(inf);
        return order_only(w > p ? +1 : -1);
    }

    bool field_trouble = false;
    std::optional<CirclePoint> fixed;
    try {
        fixed = moebius_map_fixed_point(g, field_trouble);
        if (fixed) {
            CirclePoint end = inf;
            Int w = winding.total(*fixed, ql, end);
            if (!(end == *fixed)) {
                throw DomainError("periodic point did not close up");
            }
            if (w == p) return equal_at(*fixed);
            return order_only(w > p ? +1 : -1);
        }
    } catch (const FieldMismatch&) {
        field_trouble = true;
    }
    if (field_trouble) {
        // A fixed point may exist outside the coefficient field; decide the
        // sign with certified numerics instead (Indeterminate near Equal).
        return compare_numeric(embed_numeric(f), p, q);
    }
    // No fixed point: the displacement has one global sign; read it off the
    // exact orbit of the cut. h(0) = u(f^q(inf)) + W - p with u in (0, 1).
    CirclePoint end = inf;
    Int w = winding.total(inf, ql, end);
    return order_only(w >= p ? +1 : -1);
}

bool certificate_ok(const PiecewiseMap& f, const CirclePoint& x, const Int& p,
                    const Int& q) {
    if (f.universe() == Universe::PwAffine && x.is_exact()) {
        Quad t = x.exact();
        return lift_iterate(f, t, to_long(q, "denominator")) == t + Quad(Rat(p));
    }
    if (f.universe() == Universe::PwMoebius && x.is_exact()) {
        Winding winding(f);
        CirclePoint end = CirclePoint::infinity();
        Int w = winding.total(x, to_long(q, "denominator"), end);
        return end == x && w == p;
    }
    return true;  // Numeric equality certificates are never issued
}

PiecewiseMap chart_identity(const PiecewiseMap& like) {
    return PiecewiseMap::identity(like.universe());
}

}  // namespace

QInterval RotResult::interval() const {
    if (kind == Kind::ExactRational) return QInterval(value);
    return QInterval(lo, hi);
}

std::string RotResult::str() const {
    if (kind == Kind::ExactRational) return format_rational(value);
    return "(" + format_rational(lo) + ", " + format_rational(hi) + ")";
}

RotCompare compare_rot(const PiecewiseMap& f, const Int& p, const Int& q) {
    if (q <= 0) throw WrongInput("denominator must be positive");
    if (gcd(p, q) != 1) throw WrongInput("p/q must be in lowest terms");
    if (f.universe() != Universe::Numeric && f.is_rigid_rotation()) {
        return compare_rigid(*f.rigid_angle(), Rat(p) / Rat(q));
    }
    switch (f.universe()) {
        case Universe::PwAffine:
            return compare_affine(f, p, q);
        case Universe::PwMoebius:
            return compare_moebius(f, p, q);
        case Universe::Numeric:
            return compare_numeric(f, p, q);
    }
    throw UniverseMismatch("unknown universe");
}

RotResult rotation_number(const PiecewiseMap& f, const Int& q_cap) {
    if (q_cap < 1) throw WrongInput("q_cap must be positive");
    if (f.universe() != Universe::Numeric && f.is_rigid_rotation()) {
        Quad angle = *f.rigid_angle();
        if (angle.is_rational()) {
            return {RotResult::Kind::ExactRational, rat_frac(angle.as_rational()),
                    CirclePoint::angle(Rat(0)), Rat(0), Rat(0)};
        }
    }
    RotCompare at_zero = compare_rot(f, 0, 1);
    if (at_zero.order == RotOrder::Equal) {
        return {RotResult::Kind::ExactRational, Rat(0), at_zero.certificate, Rat(0),
                Rat(0)};
    }
    // The canonical lift (F(0) in [0,1)) can still have rotation number
    // exactly 1: every fixed point of the circle map then lifts with a full
    // twist, F(x) = x + 1. Catch that before walking, or the walk would
    // narrow forever onto 1 and report an open interval missing the value.
    RotCompare at_one = compare_rot(f, 1, 1);
    if (at_one.order == RotOrder::Equal) {
        return {RotResult::Kind::ExactRational, Rat(1), at_one.certificate, Rat(0),
                Rat(0)};
    }
    // rot(f) lies in (0, 1); walk the Stern-Brocot tree on Farey neighbors.
    Int a = 0, b = 1, c = 1, d = 1;
    while (true) {
        Int pm = a + c, qm = b + d;
        if (qm > q_cap) {
            return {RotResult::Kind::Enclosure, Rat(0), std::nullopt, Rat(a) / Rat(b),
                    Rat(c) / Rat(d)};
        }
        RotCompare cmp = compare_rot(f, pm, qm);
        if (cmp.order == RotOrder::Equal) {
            return {RotResult::Kind::ExactRational, Rat(pm) / Rat(qm),
                    cmp.certificate, Rat(0), Rat(0)};
        }
        if (cmp.order == RotOrder::Greater) {
            a = pm;
            b = qm;
        } else {
            c = pm;
            d = qm;
        }
    }
}

RotResult elliptic_rotation_number(const MoebiusMap& m, const Rat& tol) {
    if (tol <= 0) throw WrongInput("tolerance must be positive");
    if (m.is_identity()) throw IdentityMap("rotation number of identity is 0");
    if (moebius_classify(m) != MoebiusClass::Elliptic) {
        throw WrongClass("rotation number shortcut needs an elliptic element");
    }
    if (auto order = moebius_finite_order(m, 24)) {
        auto [p, n] = *order;
        return {RotResult::Kind::ExactRational, Rat(p, n), CirclePoint::infinity(),
                Rat(0), Rat(0)};
    }
    PiecewiseMap f = PiecewiseMap::single_moebius(m);
    // Grow the denominator cap until the Farey interval is narrow enough;
    // powers of a single Moebius piece stay a single piece, so each walk
    // step is cheap.
    for (Int cap = 64; cap <= Int(1) << 40; cap *= 8) {
        RotResult r = rotation_number(f, cap);
        if (r.is_exact() || r.hi - r.lo <= tol) return r;
    }
    throw PrecisionUnreachable("Farey walk did not reach the requested width");
}

namespace {

// Finite order data (p, q) with f^q = id and rot(f) = p/q; throws WrongInput
// when f is not certifiably of finite order.
std::pair<Int, Int> finite_order_data(const PiecewiseMap& f) {
    if (f.universe() == Universe::Numeric) {
        throw WrongInput("finite order cannot be certified numerically");
    }
    if (f.is_rigid_rotation()) {
        Quad angle = *f.rigid_angle();
        if (!angle.is_rational()) {
            throw WrongInput("irrational rotation has infinite order");
        }
        Rat r = rat_frac(angle.as_rational());
        return {num(r), den(r)};
    }
    RotResult rr = rotation_number(f);
    if (!rr.is_exact()) throw WrongInput("rotation number is not certified rational");
    Int q = den(rr.value);
    if (!pw_power(f, to_long(q, "order")).is_identity()) {
        throw WrongInput("map does not have finite order");
    }
    return {num(rr.value), q};
}

// Exact check that the q-fold displacement of gf stays in (p, p + 1/q^2)
// along the whole circle.
bool hypothesis_holds(const PiecewiseMap& gf, const Int& p, const Int& q) {
    Rat bound = Rat(1) / Rat(q * q);
    if (gf.universe() != Universe::Numeric && gf.is_rigid_rotation()) {
        Quad gain = Quad(Rat(q)) * *gf.rigid_angle() - Quad(Rat(p));
        return gain > Quad(Rat(0)) && gain < Quad(bound);
    }
    if (gf.universe() == Universe::PwAffine) {
        long ql = to_long(q, "order");
        PiecewiseMap h = pw_power(gf, ql);
        Quad shift = lift_iterate(gf, Quad(Rat(0)), ql) - h.lift_value(Quad(Rat(0)));
        for (const Quad& b : h.affine_breaks()) {
            Quad v = h.lift_value(b) + shift - b - Quad(Rat(p));
            if (!(v > Quad(Rat(0)) && v < Quad(bound))) return false;
        }
        return true;
    }
    // Certified numeric subdivision for the non-affine universes.
    long ql = to_long(q, "order");
    PiecewiseMap nf = embed_numeric(gf);
    Rat target(p);
    struct Seg {
        Rat lo, hi;
    };
    std::vector<Seg> stack{{Rat(0), Rat(1)}};
    long budget = kNumericSegmentBudget;
    while (!stack.empty()) {
        if (--budget < 0) throw Indeterminate("displacement bound not resolved");
        Seg s = stack.back();
        stack.pop_back();
        Rat w = std::min(Rat(bound / 8), Rat((s.hi - s.lo) / 8));
        QInterval a = lift_iterate_enclosure(nf, s.lo, ql, w);
        QInterval b = lift_iterate_enclosure(nf, s.hi, ql, w);
        Rat low = a.lo - s.hi - target;
        Rat high = b.hi - s.lo - target;
        if (low > 0 && high < bound) continue;
        if (high <= 0 || low >= bound) return false;
        Rat mid = (s.lo + s.hi) / 2;
        stack.push_back({s.lo, mid});
        stack.push_back({mid, s.hi});
    }
    return true;
}

}  // namespace

PerturbationResult perturbation_step(const PiecewiseMap& f, const PiecewiseMap& g,
                                     const Rat& eps) {
    if (eps <= 0) throw WrongInput("eps must be positive");
    if (!is_positive(g)) throw WrongInput("perturbation must be a positive map");
    auto [p, q] = finite_order_data(f);
    PiecewiseMap gf = pw_compose(g, f);
    // Exact powers get expensive past a few hundred pieces; the reported
    // enclosure only needs to resolve an interval of width 1/q^3.
    Int cap = std::clamp(Int(q * q * q + 1), Int(64), Int(10000));
    PerturbationResult out{rotation_number(gf, cap), false, false};
    QInterval d = distance_c0(f, gf, eps / 8);
    out.dc0_ok = d.hi < eps;
    out.hypothesis_ok = hypothesis_holds(gf, p, q);
    return out;
}

namespace {

bool perturbation_ok(const PiecewiseMap& f, const PiecewiseMap& g, const Rat& eps,
                     const Rat& plo, const Int& q) {
    PerturbationResult r = perturbation_step(f, g, eps);
    if (!r.dc0_ok || !r.hypothesis_ok) return false;
    // Containment in (p/q, p/q + 1/q^3] decided exactly by two comparisons
    // rather than by a possibly coarse Farey enclosure.
    PiecewiseMap gf = pw_compose(g, f);
    if (compare_rot(gf, num(plo), den(plo)).order != RotOrder::Greater) return false;
    Rat phi = plo + Rat(1) / Rat(q * q * q);
    return compare_rot(gf, num(phi), den(phi)).order != RotOrder::Greater;
}

}  // namespace

Rat delta_search(const PiecewiseMap& f, const Rat& eps, const MapBattery& battery) {
    if (eps <= 0) throw WrongInput("eps must be positive");
    auto [p, q] = finite_order_data(f);
    if (q < 2) throw WrongInput("perturbation target needs order at least 2");
    Rat plo = Rat(p) / Rat(q);
    Rat delta = eps;
    for (int i = 0; i < 100000; ++i) {
        bool ok = perturbation_ok(f, PiecewiseMap::rigid_rotation(Quad(delta / 2)),
                                  eps, plo, q);
        for (size_t j = 0; ok && j < battery.size(); ++j) {
            ok = perturbation_ok(f, battery[j](delta), eps, plo, q);
        }
        if (ok) return delta;
        delta /= 2;
    }
    throw PrecisionUnreachable("no admissible delta found by halving");
}

IterationTrace irrational_scheme(const PiecewiseMap& h0, const MapSupply& supply,
                                 long steps, long threshold) {
    if (steps < 0) throw WrongInput("step count must be nonnegative");
    if (!is_positive(h0)) throw WrongInput("starting map must be positive");
    RotResult rr = rotation_number(h0);
    if (!rr.is_exact()) throw WrongInput("starting rotation number must be exact");

    IterationTrace trace;
    trace.threshold = threshold;
    PiecewiseMap h = h0;
    Int p = num(rr.value), q = den(rr.value);

    for (long n = 0; n < steps; ++n) {
        // Budget eps_n = 1/2^{n+3}; the total sum 1/4 stays below 1/2, so
        // the composites remain positive with room to spare.
        Rat eps = Rat(1) / Rat(Int(1) << static_cast<unsigned>(n + 3));
        Rat delta = delta_search(h, eps);
        trace.steps.push_back({n, h.str(), p, q, delta, DirichletInterval{p, q}});

        PiecewiseMap g = supply(delta, n);
        if (!is_positive(g) ||
            !(distance_c0(g, chart_identity(g), delta / 8).hi < delta)) {
            throw SupplyError("supply produced a map outside the requested budget");
        }
        h = pw_compose(g, h);

        RotResult next = rotation_number(h);
        if (!next.is_exact()) {
            throw TraceInvalid("step rotation number is not certified rational");
        }
        Rat plo = Rat(p) / Rat(q);
        if (!(next.value > plo && next.value <= plo + Rat(1) / Rat(q * q * q))) {
            throw TraceInvalid("rot(h_{n+1}) left (p/q, p/q + 1/q^3]");
        }
        Int p2 = num(next.value), q2 = den(next.value);
        if (q2 <= q) throw TraceInvalid("denominator failed to grow");
        if (!DirichletInterval{p, q}.contains(DirichletInterval{p2, q2})) {
            throw TraceInvalid("Dirichlet intervals failed to nest");
        }
        if (!is_positive(h)) throw TraceInvalid("composite stopped being positive");
        p = p2;
        q = q2;
    }
    trace.steps.push_back({steps, h.str(), p, q, Rat(0), DirichletInterval{p, q}});
    return trace;
}

bool dirichlet_nesting_check(const IterationTrace& trace) {
    for (size_t i = 0; i + 1 < trace.steps.size(); ++i) {
        const TraceStep& cur = trace.steps[i];
        const TraceStep& nxt = trace.steps[i + 1];
        if (cur.q < 1 || nxt.q < 1) return false;
        Rat plo = Rat(cur.p) / Rat(cur.q);
        Rat rot = Rat(nxt.p) / Rat(nxt.q);
        if (!(rot > plo && rot <= plo + Rat(1) / Rat(cur.q * cur.q * cur.q))) {
            return false;
        }
        if (cur.q > trace.threshold && nxt.q <= cur.q) return false;
        if (!cur.interval.contains(nxt.interval)) return false;
    }
    return true;
}

}  // namespace circlelab
