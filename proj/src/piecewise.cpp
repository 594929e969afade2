#include "circlelab/piecewise.hpp"

#include "circlelab/errors.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace circlelab {

namespace {

constexpr int kMaxRefine = 80;

Quad line_at(const AffinePiece& p, const Quad& x) { return p.slope * x + p.offset; }

/// Shift an affine lift line across m periods of the domain: the line that
/// the lift follows on [lo-m, hi-m] when p holds on [lo, hi].
AffinePiece shift_line(const AffinePiece& p, const Int& m) {
    return {p.slope, p.offset + Quad(Rat(m)) * (p.slope - Quad(Rat(1)))};
}

/// Interior sample of the cyclic arc from a to b in the projective chart.
CirclePoint arc_sample(const CirclePoint& a, const CirclePoint& b) {
    if (a == b) {  // full circle minus one point
        if (a.is_infinity()) return CirclePoint::projective(Quad(Rat(0)));
        return CirclePoint::projective(a.exact() + Quad(Rat(1)));
    }
    if (a.is_infinity()) return CirclePoint::projective(b.exact() - Quad(Rat(1)));
    if (b.is_infinity()) return CirclePoint::projective(a.exact() + Quad(Rat(1)));
    if (a.exact() < b.exact()) {
        return CirclePoint::projective((a.exact() + b.exact()) / Quad(Rat(2)));
    }
    return CirclePoint::projective(a.exact() + Quad(Rat(1)));  // arc through inf
}

QInterval oracle_on(const LiftOracle& f, const QInterval& xs, const Rat& w) {
    if (xs.is_point()) return f(xs.lo, w);
    QInterval lo = f(xs.lo, w);
    QInterval hi = f(xs.hi, w);
    return QInterval(lo.lo, hi.hi);  // monotone lift
}

/// Integer pinned by a shrinking enclosure computed by eval(width).
Int pin_integer(const std::function<QInterval(const Rat&)>& eval) {
    Rat w(1, 4);
    for (int i = 0; i < kMaxRefine; ++i, w /= 16) {
        QInterval e = eval(w);
        Int c = rat_ceil(e.lo);
        if (c == rat_floor(e.hi)) return c;
    }
    throw PrecisionUnreachable("could not pin an integer lift offset");
}

LiftOracle shifted_oracle(LiftOracle f, Int dy, Rat dx = Rat(0)) {
    return [f = std::move(f), dy, dx](const Rat& x, const Rat& w) {
        return f(x + dx, w) + Rat(dy);
    };
}

LiftOracle composed_oracle(LiftOracle outer, LiftOracle inner) {
    return [outer = std::move(outer), inner = std::move(inner)](const Rat& x, const Rat& w) {
        Rat wi = w / 4;
        for (int i = 0; i < kMaxRefine; ++i, wi /= 16) {
            QInterval mid = inner(x, wi);
            QInterval out = oracle_on(outer, mid, w / 4);
            if (out.width() <= w) return out;
        }
        throw PrecisionUnreachable("composition enclosure did not converge");
    };
}

/// Exact distance from a quadratic value to the nearest integer.
Quad dist_to_integers(const Quad& v) {
    Quad t = quad_frac(v);
    Quad one_minus = Quad(Rat(1)) - t;
    return t < one_minus ? t : one_minus;
}

bool range_contains_half_integer(const Quad& lo, const Quad& hi) {
    // odd integer inside [2lo, 2hi]?
    Quad a = lo + lo, b = hi + hi;
    if (b - a >= Quad(Rat(2))) return true;
    Int j = quad_floor(a);
    for (Int c = j; c <= j + 2; ++c) {
        if (c % 2 != 0 && Quad(Rat(c)) >= a && Quad(Rat(c)) <= b) return true;
    }
    return false;
}

}  // namespace

// --- construction -------------------------------------------------------

PiecewiseMap PiecewiseMap::identity(Universe u) {
    switch (u) {
        case Universe::PwAffine:
            return rigid_rotation(Quad(Rat(0)));
        case Universe::PwMoebius:
            return single_moebius(MoebiusMap::identity());
        case Universe::Numeric: {
            LiftOracle id = [](const Rat& x, const Rat&) { return QInterval(x); };
            return numeric(id, id);
        }
    }
    throw WrongInput("unknown universe");
}

PiecewiseMap PiecewiseMap::rigid_rotation(const Quad& angle) {
    PiecewiseMap f;
    f.universe_ = Universe::PwAffine;
    f.abreaks_ = {Quad(Rat(0))};
    f.apieces_ = {{Quad(Rat(1)), quad_frac(angle)}};
    return f;
}

PiecewiseMap PiecewiseMap::affine(const std::vector<Quad>& cuts,
                                  const std::vector<AffinePiece>& lines) {
    size_t k = lines.size();
    if (k == 0 || cuts.size() != k + 1) throw WrongInput("cuts must bound the lines");
    if (!(cuts.back() == cuts.front() + Quad(Rat(1)))) {
        throw WrongInput("cuts must span exactly one period");
    }
    for (size_t i = 0; i < k; ++i) {
        if (!(cuts[i] < cuts[i + 1])) throw WrongInput("cuts must be strictly increasing");
        if (lines[i].slope.sign() <= 0) throw WrongInput("slopes must be positive");
    }
    for (size_t i = 0; i + 1 < k; ++i) {
        if (!(line_at(lines[i], cuts[i + 1]) == line_at(lines[i + 1], cuts[i + 1]))) {
            throw WrongInput("pieces must agree at interior cuts");
        }
    }
    if (!(line_at(lines[k - 1], cuts[k]) == line_at(lines[0], cuts[0]) + Quad(Rat(1)))) {
        throw WrongInput("lift must gain exactly 1 over one period");
    }

    // Shift every arc into [0,1): an arc [lo,hi] in [m,m+1] becomes
    // [lo-m, hi-m] carrying the line x -> F(x+m)-m. Arcs straddling an
    // integer are split there first; the split guarantees an arc starting
    // at 0.
    struct Seg {
        Quad start;
        AffinePiece line;
    };
    std::vector<Seg> segs;
    for (size_t i = 0; i < k; ++i) {
        Quad lo = cuts[i], hi = cuts[i + 1];
        Int m = quad_floor(lo);
        Quad z = Quad(Rat(m + 1));
        if (lo > Quad(Rat(m)) && z < hi) {
            segs.push_back({lo - Quad(Rat(m)), shift_line(lines[i], m)});
            segs.push_back({Quad(Rat(0)), shift_line(lines[i], m + 1)});
        } else {
            segs.push_back({quad_frac(lo), shift_line(lines[i], m)});
        }
    }
    std::sort(segs.begin(), segs.end(),
              [](const Seg& a, const Seg& b) { return a.start < b.start; });
    if (segs.front().start.sign() != 0) {
        throw WrongInput("period rearrangement lost the origin");  // unreachable
    }

    PiecewiseMap f;
    f.universe_ = Universe::PwAffine;
    // Canonical lift: value at 0 in [0,1).
    Int shift = quad_floor(segs.front().line.offset);
    for (const Seg& s : segs) {
        AffinePiece p{s.line.slope, s.line.offset - Quad(Rat(shift))};
        if (!f.apieces_.empty() && f.apieces_.back() == p) continue;  // merge
        f.abreaks_.push_back(s.start);
        f.apieces_.push_back(p);
    }
    return f;
}

PiecewiseMap PiecewiseMap::single_moebius(const MoebiusMap& m) {
    PiecewiseMap f;
    f.universe_ = Universe::PwMoebius;
    f.mbreaks_ = {CirclePoint::infinity()};
    f.mpieces_ = {m};
    return f;
}

PiecewiseMap PiecewiseMap::moebius(const std::vector<CirclePoint>& breaks,
                                   const std::vector<MoebiusMap>& pieces) {
    size_t k = breaks.size();
    if (k == 0 || pieces.size() != k) throw WrongInput("one matrix per breakpoint required");
    for (const CirclePoint& b : breaks) {
        if (b.chart() != Chart::Projective || b.is_enclosure()) {
            throw WrongInput("breakpoints must be exact projective points");
        }
    }
    std::vector<size_t> order(k);
    for (size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        return cut_compare(breaks[i], breaks[j]) < 0;
    });
    std::vector<CirclePoint> sb;
    std::vector<MoebiusMap> sp;
    for (size_t i : order) {
        if (!sb.empty() && sb.back() == breaks[i]) throw WrongInput("duplicate breakpoint");
        sb.push_back(breaks[i]);
        sp.push_back(pieces[i]);
    }
    // Continuity at every breakpoint (cyclically).
    for (size_t i = 0; i < k; ++i) {
        const CirclePoint& b = sb[(i + 1) % k];
        if (!(sp[i].apply(b) == sp[(i + 1) % k].apply(b))) {
            throw WrongInput("pieces must agree at breakpoints");
        }
    }
    // Merge cyclically equal neighbors; a fully merged map is one matrix.
    std::vector<CirclePoint> kb;
    std::vector<MoebiusMap> kp;
    for (size_t i = 0; i < k; ++i) {
        if (sp[i] == sp[(i + k - 1) % k]) continue;
        kb.push_back(sb[i]);
        kp.push_back(sp[i]);
    }
    if (kb.empty()) return single_moebius(sp[0]);
    if (kb.size() == 1) return single_moebius(kp[0]);
    // Degree check: breakpoint images must wind around exactly once.
    int descents = 0;
    size_t n = kb.size();
    for (size_t i = 0; i < n; ++i) {
        CirclePoint v = kp[i].apply(kb[i]);
        CirclePoint w = kp[(i + 1) % n].apply(kb[(i + 1) % n]);
        if (cut_compare(w, v) < 0) ++descents;
    }
    if (descents != 1) throw WrongInput("pieces do not assemble to a degree-one map");

    PiecewiseMap f;
    f.universe_ = Universe::PwMoebius;
    f.mbreaks_ = std::move(kb);
    f.mpieces_ = std::move(kp);
    return f;
}

PiecewiseMap PiecewiseMap::numeric(LiftOracle lift, LiftOracle inverse_lift) {
    if (!lift || !inverse_lift) throw WrongInput("numeric map needs both oracles");
    PiecewiseMap f;
    f.universe_ = Universe::Numeric;
    f.lift_ = std::move(lift);
    f.inv_lift_ = std::move(inverse_lift);
    return f;
}

// --- accessors ----------------------------------------------------------

const std::vector<Quad>& PiecewiseMap::affine_breaks() const {
    if (universe_ != Universe::PwAffine) throw UniverseMismatch("not a PwAffine map");
    return abreaks_;
}
const std::vector<AffinePiece>& PiecewiseMap::affine_pieces() const {
    if (universe_ != Universe::PwAffine) throw UniverseMismatch("not a PwAffine map");
    return apieces_;
}
const std::vector<CirclePoint>& PiecewiseMap::moebius_breaks() const {
    if (universe_ != Universe::PwMoebius) throw UniverseMismatch("not a PwMoebius map");
    return mbreaks_;
}
const std::vector<MoebiusMap>& PiecewiseMap::moebius_pieces() const {
    if (universe_ != Universe::PwMoebius) throw UniverseMismatch("not a PwMoebius map");
    return mpieces_;
}

size_t PiecewiseMap::piece_count() const {
    switch (universe_) {
        case Universe::PwAffine:
            return apieces_.size();
        case Universe::PwMoebius:
            return mpieces_.size();
        case Universe::Numeric:
            throw UniverseMismatch("numeric maps have no piece structure");
    }
    return 0;
}

bool PiecewiseMap::is_identity() const {
    switch (universe_) {
        case Universe::PwAffine:
            return apieces_.size() == 1 && apieces_[0].slope == Quad(Rat(1)) &&
                   apieces_[0].offset.sign() == 0;
        case Universe::PwMoebius:
            return mpieces_.size() == 1 && mpieces_[0].is_identity();
        case Universe::Numeric:
            throw Undecidable("identity is undecidable for numeric maps");
    }
    return false;
}

bool PiecewiseMap::is_rigid_rotation() const {
    return universe_ == Universe::PwAffine && apieces_.size() == 1 &&
           apieces_[0].slope == Quad(Rat(1));
}

std::optional<Quad> PiecewiseMap::rigid_angle() const {
    if (!is_rigid_rotation()) return std::nullopt;
    return apieces_[0].offset;
}

const AffinePiece& PiecewiseMap::affine_piece_at(const Quad& t) const {
    const auto& b = affine_breaks();
    if (t.sign() < 0 || t >= Quad(Rat(1))) throw WrongInput("angle not reduced to [0,1)");
    size_t lo = 0, hi = b.size();
    while (hi - lo > 1) {
        size_t m = (lo + hi) / 2;
        if (b[m] <= t) {
            lo = m;
        } else {
            hi = m;
        }
    }
    return apieces_[lo];
}

const MoebiusMap& PiecewiseMap::moebius_piece_at(const CirclePoint& x) const {
    const auto& b = moebius_breaks();
    if (b.size() == 1) return mpieces_[0];
    if (cut_compare(x, b[0]) < 0) return mpieces_.back();  // wrap arc
    size_t lo = 0, hi = b.size();
    while (hi - lo > 1) {
        size_t m = (lo + hi) / 2;
        if (cut_compare(b[m], x) <= 0) {
            lo = m;
        } else {
            hi = m;
        }
    }
    return mpieces_[lo];
}

// --- lift evaluation ----------------------------------------------------

Quad PiecewiseMap::lift_value(const Quad& x) const {
    Int m = quad_floor(x);
    Quad t = x - Quad(Rat(m));
    const AffinePiece& p = affine_piece_at(t);
    return line_at(p, t) + Quad(Rat(m));
}

Quad PiecewiseMap::lift_inverse_value(const Quad& y) const {
    const auto& b = affine_breaks();
    // Bring y into the image of one period: F maps [0,1) onto [F(0), F(0)+1).
    Int m = quad_floor(y - apieces_[0].offset);
    Quad z = y - Quad(Rat(m));
    // Piece images are increasing; find the one whose image contains z.
    size_t i = b.size() - 1;
    for (size_t j = 1; j < b.size(); ++j) {
        if (z < line_at(apieces_[j], b[j])) {
            i = j - 1;
            break;
        }
    }
    return (z - apieces_[i].offset) / apieces_[i].slope + Quad(Rat(m));
}

QInterval PiecewiseMap::lift_enclosure(const Rat& x, const Rat& width) const {
    switch (universe_) {
        case Universe::PwAffine:
            return bracket(lift_value(Quad(x)), width);
        case Universe::Numeric:
            return lift_(x, width);
        case Universe::PwMoebius:
            throw UniverseMismatch("projective maps have no angle lift; embed first");
    }
    throw UniverseMismatch("unknown universe");
}

QInterval PiecewiseMap::inverse_lift_enclosure(const Rat& y, const Rat& width) const {
    switch (universe_) {
        case Universe::PwAffine:
            return bracket(lift_inverse_value(Quad(y)), width);
        case Universe::Numeric:
            return inv_lift_(y, width);
        case Universe::PwMoebius:
            throw UniverseMismatch("projective maps have no angle lift; embed first");
    }
    throw UniverseMismatch("unknown universe");
}

// --- evaluation on the circle -------------------------------------------

CirclePoint pw_evaluate(const PiecewiseMap& f, const CirclePoint& x, const Rat& precision) {
    switch (f.universe()) {
        case Universe::PwAffine: {
            if (x.chart() != Chart::Angle) throw UniverseMismatch("expected an angle point");
            if (x.is_exact()) return CirclePoint::angle(f.lift_value(x.exact()));
            const QInterval& e = x.enclosure();
            QInterval lo = f.lift_enclosure(e.lo, precision);
            QInterval hi = f.lift_enclosure(e.hi, precision);
            Int m = rat_floor(lo.lo);
            return CirclePoint::approx(Chart::Angle,
                                       QInterval(lo.lo - Rat(m), hi.hi - Rat(m)));
        }
        case Universe::PwMoebius: {
            if (x.chart() != Chart::Projective) {
                throw UniverseMismatch("expected a projective point");
            }
            return f.moebius_piece_at(x).apply(x);
        }
        case Universe::Numeric: {
            if (x.chart() != Chart::Angle) throw UniverseMismatch("expected an angle point");
            QInterval e = x.is_exact() ? bracket(x.exact(), precision / 4) : x.enclosure();
            QInterval lo = f.lift_enclosure(e.lo, precision / 4);
            QInterval hi = f.lift_enclosure(e.hi, precision / 4);
            Int m = rat_floor(lo.lo);
            return CirclePoint::approx(Chart::Angle,
                                       QInterval(lo.lo - Rat(m), hi.hi - Rat(m)));
        }
    }
    throw UniverseMismatch("unknown universe");
}

// --- inverse ------------------------------------------------------------

PiecewiseMap pw_inverse(const PiecewiseMap& f) {
    switch (f.universe()) {
        case Universe::PwAffine: {
            const auto& b = f.affine_breaks();
            const auto& p = f.affine_pieces();
            std::vector<Quad> cuts;
            std::vector<AffinePiece> lines;
            for (size_t i = 0; i < b.size(); ++i) {
                cuts.push_back(line_at(p[i], b[i]));
                lines.push_back(
                    {p[i].slope.inverse(), -(p[i].offset / p[i].slope)});
            }
            cuts.push_back(line_at(p[0], b[0]) + Quad(Rat(1)));
            return PiecewiseMap::affine(cuts, lines);
        }
        case Universe::PwMoebius: {
            const auto& b = f.moebius_breaks();
            const auto& p = f.moebius_pieces();
            std::vector<CirclePoint> breaks;
            std::vector<MoebiusMap> pieces;
            for (size_t i = 0; i < b.size(); ++i) {
                breaks.push_back(p[i].apply(b[i]));
                pieces.push_back(p[i].inverse());
            }
            return PiecewiseMap::moebius(breaks, pieces);
        }
        case Universe::Numeric:
            return PiecewiseMap::numeric(f.inv_lift_, f.lift_);
    }
    throw UniverseMismatch("unknown universe");
}

// --- composition --------------------------------------------------------

namespace {

PiecewiseMap compose_affine(const PiecewiseMap& f, const PiecewiseMap& g) {
    const auto& gb = g.affine_breaks();
    const auto& fb = f.affine_breaks();
    std::vector<Quad> cuts = gb;
    PiecewiseMap ginv = pw_inverse(g);
    for (const Quad& beta : fb) {
        cuts.push_back(quad_frac(ginv.lift_value(beta)));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](const Quad& a, const Quad& b) { return a == b; }),
               cuts.end());
    cuts.push_back(cuts.front() + Quad(Rat(1)));

    std::vector<AffinePiece> lines;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Quad mid = (cuts[i] + cuts[i + 1]) / Quad(Rat(2));
        const AffinePiece& pg = g.affine_piece_at(mid);
        Quad y = line_at(pg, mid);
        Int m = quad_floor(y);
        const AffinePiece& pf = f.affine_piece_at(y - Quad(Rat(m)));
        AffinePiece ef = shift_line(pf, -m);  // f's lift line at height y
        lines.push_back({ef.slope * pg.slope, ef.slope * pg.offset + ef.offset});
    }
    return PiecewiseMap::affine(cuts, lines);
}

PiecewiseMap compose_moebius(const PiecewiseMap& f, const PiecewiseMap& g) {
    std::vector<CirclePoint> breaks = g.moebius_breaks();
    PiecewiseMap ginv = pw_inverse(g);
    for (const CirclePoint& beta : f.moebius_breaks()) {
        CirclePoint pre = pw_evaluate(ginv, beta);
        bool dup = false;
        for (const CirclePoint& b : breaks) dup = dup || b == pre;
        if (!dup) breaks.push_back(pre);
    }
    std::sort(breaks.begin(), breaks.end(), [](const CirclePoint& a, const CirclePoint& b) {
        return cut_compare(a, b) < 0;
    });
    std::vector<MoebiusMap> pieces;
    size_t k = breaks.size();
    for (size_t i = 0; i < k; ++i) {
        CirclePoint s = arc_sample(breaks[i], breaks[(i + 1) % k]);
        const MoebiusMap& mg = g.moebius_piece_at(s);
        const MoebiusMap& mf = f.moebius_piece_at(mg.apply(s));
        pieces.push_back(mf * mg);
    }
    return PiecewiseMap::moebius(breaks, pieces);
}

PiecewiseMap compose_numeric(const PiecewiseMap& f, const PiecewiseMap& g) {
    PiecewiseMap fn = embed_numeric(f);
    PiecewiseMap gn = embed_numeric(g);
    auto as_lift = [](const PiecewiseMap& m) -> LiftOracle {
        return [m](const Rat& x, const Rat& w) { return m.lift_enclosure(x, w); };
    };
    auto as_inv = [](const PiecewiseMap& m) -> LiftOracle {
        return [m](const Rat& y, const Rat& w) { return m.inverse_lift_enclosure(y, w); };
    };
    LiftOracle raw = composed_oracle(as_lift(fn), as_lift(gn));
    // Quasi-canonical renormalization: shift by the nearest integer to keep
    // the lift value at 0 near [0,1). The mod-1 class of downstream results
    // is unaffected by this choice.
    QInterval at0 = raw(Rat(0), Rat(1, 8));
    Int m = rat_floor(at0.mid());
    LiftOracle lift = shifted_oracle(raw, -m);
    LiftOracle raw_inv = composed_oracle(as_inv(gn), as_inv(fn));
    LiftOracle inv = shifted_oracle(std::move(raw_inv), 0, Rat(m));
    return PiecewiseMap::numeric(std::move(lift), std::move(inv));
}

}  // namespace

PiecewiseMap pw_compose(const PiecewiseMap& f, const PiecewiseMap& g) {
    if (f.universe() == g.universe()) {
        switch (f.universe()) {
            case Universe::PwAffine:
                return compose_affine(f, g);
            case Universe::PwMoebius:
                return compose_moebius(f, g);
            case Universe::Numeric:
                return compose_numeric(f, g);
        }
    }
    if (f.universe() == Universe::Numeric || g.universe() == Universe::Numeric) {
        return compose_numeric(f, g);
    }
    throw UniverseMismatch("cannot compose exact maps across charts; embed explicitly");
}

PiecewiseMap pw_power(const PiecewiseMap& f, long n) {
    PiecewiseMap base = n >= 0 ? f : pw_inverse(f);
    unsigned long e = n >= 0 ? static_cast<unsigned long>(n) : -static_cast<unsigned long>(n);
    PiecewiseMap acc = PiecewiseMap::identity(f.universe());
    while (e > 0) {
        if (e & 1) acc = pw_compose(acc, base);
        base = pw_compose(base, base);
        e >>= 1;
    }
    return acc;
}

bool pw_equal(const PiecewiseMap& f, const PiecewiseMap& g) {
    if (f.universe() != g.universe()) {
        throw UniverseMismatch("map equality needs a common exact universe");
    }
    switch (f.universe()) {
        case Universe::PwAffine: {
            if (f.affine_breaks().size() != g.affine_breaks().size()) return false;
            for (size_t i = 0; i < f.affine_breaks().size(); ++i) {
                if (!(f.affine_breaks()[i] == g.affine_breaks()[i])) return false;
                if (!(f.affine_pieces()[i] == g.affine_pieces()[i])) return false;
            }
            return true;
        }
        case Universe::PwMoebius: {
            if (f.moebius_breaks().size() != g.moebius_breaks().size()) return false;
            for (size_t i = 0; i < f.moebius_breaks().size(); ++i) {
                if (!(f.moebius_breaks()[i] == g.moebius_breaks()[i])) return false;
                if (!(f.moebius_pieces()[i] == g.moebius_pieces()[i])) return false;
            }
            return true;
        }
        case Universe::Numeric:
            throw Undecidable("numeric map equality is undecidable");
    }
    throw UniverseMismatch("unknown universe");
}

// --- words --------------------------------------------------------------

GroupWord::GroupWord(std::vector<Letter> letters) {
    for (const Letter& l : letters) {
        if (l.exp != 1 && l.exp != -1) throw BadWord("letter exponent must be +-1");
        if (!letters_.empty() && letters_.back().gen == l.gen &&
            letters_.back().exp == -l.exp) {
            letters_.pop_back();
        } else {
            letters_.push_back(l);
        }
    }
}

GroupWord GroupWord::append(const Letter& l) const {
    std::vector<Letter> ls = letters_;
    ls.push_back(l);
    return GroupWord(std::move(ls));
}

GroupWord GroupWord::inverse() const {
    std::vector<Letter> ls;
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
        ls.push_back({it->gen, -it->exp});
    }
    return GroupWord(std::move(ls));
}

std::string GroupWord::str(const std::vector<std::string>& names) const {
    if (letters_.empty()) return "id";
    std::ostringstream out;
    for (size_t i = 0; i < letters_.size(); ++i) {
        if (i > 0) out << ' ';
        const Letter& l = letters_[i];
        if (l.gen < 0 || static_cast<size_t>(l.gen) >= names.size()) {
            throw BadWord("generator index out of range");
        }
        out << names[static_cast<size_t>(l.gen)];
        if (l.exp < 0) out << "^-1";
    }
    return out.str();
}

PiecewiseMap word_to_map(const std::vector<PiecewiseMap>& gens, const GroupWord& w) {
    if (gens.empty()) throw BadWord("no generators supplied");
    Universe u = gens[0].universe();
    for (const PiecewiseMap& g : gens) {
        if (g.universe() != u) throw UniverseMismatch("generators must share a universe");
    }
    PiecewiseMap acc = PiecewiseMap::identity(u);
    for (const Letter& l : w.letters()) {
        if (l.gen < 0 || static_cast<size_t>(l.gen) >= gens.size()) {
            throw BadWord("generator index out of range");
        }
        const PiecewiseMap& g = gens[static_cast<size_t>(l.gen)];
        acc = pw_compose(acc, l.exp > 0 ? g : pw_inverse(g));
    }
    return acc;
}

// --- iteration ----------------------------------------------------------

Quad lift_iterate(const PiecewiseMap& f, const Quad& x, long n) {
    if (f.universe() != Universe::PwAffine) {
        throw UniverseMismatch("exact lift iteration needs a PwAffine map");
    }
    Quad v = x;
    if (n >= 0) {
        for (long i = 0; i < n; ++i) v = f.lift_value(v);
    } else {
        for (long i = 0; i > n; --i) v = f.lift_inverse_value(v);
    }
    return v;
}

QInterval lift_iterate_enclosure(const PiecewiseMap& f, const Rat& x, long n,
                                 const Rat& width) {
    if (f.universe() == Universe::PwAffine) {
        return bracket(lift_iterate(f, Quad(x), n), width);
    }
    if (f.universe() != Universe::Numeric) {
        throw UniverseMismatch("lift iteration needs an angle-chart map");
    }
    if (n == 0) return QInterval(x);
    long steps = n >= 0 ? n : -n;
    LiftOracle step;
    if (n >= 0) {
        step = [&f](const Rat& t, const Rat& w) { return f.lift_enclosure(t, w); };
    } else {
        step = [&f](const Rat& t, const Rat& w) { return f.inverse_lift_enclosure(t, w); };
    }
    Rat step_w = width / (2 * steps);
    for (int attempt = 0; attempt < kMaxRefine; ++attempt, step_w /= 16) {
        QInterval v(x);
        for (long i = 0; i < steps; ++i) v = oracle_on(step, v, step_w);
        if (v.width() <= width) return v;
    }
    throw PrecisionUnreachable("iterated lift enclosure did not converge");
}

// --- numeric embedding ---------------------------------------------------

namespace {

/// Enclosure of the angle coordinate of a projective point or enclosure;
/// valid when the point set does not cross infinity.
QInterval projective_angle_hull(const CirclePoint& y, const Rat& w) {
    if (y.is_exact() || y.is_infinity()) return angle_coordinate(y, w);
    const QInterval& e = y.enclosure();
    QInterval lo = angle_coordinate(CirclePoint::projective(Quad(e.lo)), w / 2);
    QInterval hi = angle_coordinate(CirclePoint::projective(Quad(e.hi)), w / 2);
    return QInterval(lo.lo, hi.hi);
}

CirclePoint angle_as_projective(const Rat& t, const Rat& w) {
    if (t == 0) return CirclePoint::infinity();
    if (auto exact = exact_angle_to_projective(t)) return CirclePoint::projective(*exact);
    return chart_convert(CirclePoint::angle(t), Chart::Projective, w);
}

LiftOracle moebius_angle_lift(const PiecewiseMap& f) {
    // Canonical lift through the cut at angle 0 (projective infinity): the
    // lift gains +1 exactly at and past the angle of the cut's preimage.
    CirclePoint cut_pre = pw_evaluate(pw_inverse(f), CirclePoint::infinity());
    bool pre_is_cut = cut_pre.is_infinity();
    return [f, cut_pre, pre_is_cut](const Rat& x, const Rat& width) {
        Int m = rat_floor(x);
        Rat t = x - Rat(m);
        int winding =
            (!pre_is_cut && compare_angle_to_projective(t, cut_pre) >= 0) ? 1 : 0;
        Rat wp = width / 8;
        for (int i = 0; i < kMaxRefine; ++i, wp /= 16) {
            try {
                CirclePoint p = angle_as_projective(t, wp);
                CirclePoint y = pw_evaluate(f, p, wp);
                QInterval u = projective_angle_hull(y, wp);
                if (u.width() <= width) return u + Rat(winding + m);
            } catch (const Indeterminate&) {
                // enclosure straddled a breakpoint or pole; refine
            }
        }
        throw PrecisionUnreachable("chart-converted lift did not converge");
    };
}

}  // namespace

PiecewiseMap embed_numeric(const PiecewiseMap& f) {
    switch (f.universe()) {
        case Universe::Numeric:
            return f;
        case Universe::PwAffine: {
            LiftOracle lift = [f](const Rat& x, const Rat& w) {
                return f.lift_enclosure(x, w);
            };
            LiftOracle inv = [f](const Rat& y, const Rat& w) {
                return f.inverse_lift_enclosure(y, w);
            };
            return PiecewiseMap::numeric(std::move(lift), std::move(inv));
        }
        case Universe::PwMoebius: {
            LiftOracle lift = moebius_angle_lift(f);
            LiftOracle inv0 = moebius_angle_lift(pw_inverse(f));
            // inv0 is the canonical lift of the inverse map; correct it by
            // the integer making it the functional inverse of `lift`.
            Int c = pin_integer([&lift, &inv0](const Rat& w) {
                QInterval g0 = inv0(Rat(0), w);
                return oracle_on(lift, g0, w);
            });
            LiftOracle inv = shifted_oracle(std::move(inv0), -c);
            return PiecewiseMap::numeric(std::move(lift), std::move(inv));
        }
    }
    throw UniverseMismatch("unknown universe");
}

// --- metrics --------------------------------------------------------------

namespace {

/// Exact sup over the circle of dist(F(x)-G(x), Z) for PwAffine f, g: the
/// difference of lifts is piecewise linear, so the sup is attained at a
/// breakpoint unless a segment's range covers a half-integer (then 1/2).
Quad affine_sup_distance(const PiecewiseMap& f, const PiecewiseMap& g) {
    std::vector<Quad> cuts = f.affine_breaks();
    for (const Quad& b : g.affine_breaks()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](const Quad& a, const Quad& b) { return a == b; }),
               cuts.end());
    std::vector<Quad> values;
    for (const Quad& c : cuts) values.push_back(f.lift_value(c) - g.lift_value(c));
    values.push_back(values.front());  // wrap: D(1) = D(0)
    Quad best(Rat(0));
    for (size_t i = 0; i < values.size(); ++i) {
        Quad d = dist_to_integers(values[i]);
        if (d > best) best = d;
        if (i + 1 < values.size()) {
            Quad lo = values[i] < values[i + 1] ? values[i] : values[i + 1];
            Quad hi = values[i] < values[i + 1] ? values[i + 1] : values[i];
            if (range_contains_half_integer(lo, hi)) return Quad(Rat(1, 2));
        }
    }
    return best;
}

Rat dist_to_z(const Rat& v) {
    Rat t = rat_frac(v);
    return t <= 1 - t ? t : 1 - t;
}

/// Largest possible dist-to-Z over an interval of difference values.
Rat dist_upper(const QInterval& range) {
    if (range.width() >= 1) return Rat(1, 2);
    Int j = rat_floor(2 * range.lo);
    for (Int c = j; c <= j + 2; ++c) {
        if (c % 2 != 0 && Rat(c, 2) >= range.lo && Rat(c, 2) <= range.hi) return Rat(1, 2);
    }
    Rat a = dist_to_z(range.lo), b = dist_to_z(range.hi);
    return a > b ? a : b;
}

/// Certified lower bound of dist-to-Z over an interval (0 if it may touch Z).
Rat dist_lower(const QInterval& range) {
    if (rat_floor(range.lo) != rat_floor(range.hi) || rat_frac(range.lo) == 0) return Rat(0);
    Rat a = dist_to_z(range.lo), b = dist_to_z(range.hi);
    return a < b ? a : b;
}

QInterval numeric_sup_distance(const PiecewiseMap& f, const PiecewiseMap& g,
                               const Rat& tol) {
    auto diff_range = [&](const Rat& a, const Rat& b, const Rat& w) {
        QInterval fa = f.lift_enclosure(a, w), fb = f.lift_enclosure(b, w);
        QInterval ga = g.lift_enclosure(a, w), gb = g.lift_enclosure(b, w);
        return QInterval(fa.lo - gb.hi, fb.hi - ga.lo);
    };
    Rat w = tol / 8;
    Rat lower(0);
    struct Seg {
        Rat a, b;
        Rat ub;
    };
    std::deque<Seg> work;
    {
        QInterval r = diff_range(Rat(0), Rat(1), w);
        work.push_back({Rat(0), Rat(1), dist_upper(r)});
        lower = dist_lower(diff_range(Rat(0), Rat(0), w));
    }
    Rat upper = work.front().ub;
    for (long iter = 0; iter < 200000 && !work.empty(); ++iter) {
        Seg s = work.front();
        work.pop_front();
        if (s.ub <= lower + tol) continue;
        Rat m = (s.a + s.b) / 2;
        Rat point_lb = dist_lower(diff_range(m, m, w));
        if (point_lb > lower) lower = point_lb;
        for (const auto& half : {std::pair(s.a, m), std::pair(m, s.b)}) {
            QInterval r = diff_range(half.first, half.second, w);
            Rat ub = dist_upper(r);
            if (ub > lower + tol) work.push_back({half.first, half.second, ub});
        }
        upper = lower;
        for (const Seg& q : work) {
            if (q.ub > upper) upper = q.ub;
        }
        if (upper - lower <= tol) break;
    }
    if (!work.empty()) {
        upper = lower;
        for (const Seg& q : work) {
            if (q.ub > upper) upper = q.ub;
        }
        if (upper - lower > tol) {
            throw PrecisionUnreachable("sup-distance subdivision did not converge");
        }
    }
    return QInterval(lower, upper);
}

}  // namespace

QInterval distance_inf(const PiecewiseMap& f, const PiecewiseMap& g, const Rat& tol) {
    if (tol <= 0) throw WrongInput("tolerance must be positive");
    if (f.universe() == Universe::PwAffine && g.universe() == Universe::PwAffine) {
        Quad sup = affine_sup_distance(f, g);
        if (sup.is_rational()) return QInterval(sup.as_rational());
        return bracket(sup, tol);
    }
    PiecewiseMap fn = embed_numeric(f);
    PiecewiseMap gn = embed_numeric(g);
    return numeric_sup_distance(fn, gn, tol);
}

QInterval distance_c0(const PiecewiseMap& f, const PiecewiseMap& g, const Rat& tol) {
    return distance_inf(f, g, tol) + distance_inf(pw_inverse(f), pw_inverse(g), tol);
}

// --- positivity -----------------------------------------------------------

namespace {

bool affine_is_positive(const PiecewiseMap& f, const std::optional<CircleInterval>& on) {
    auto disp = [&f](const Quad& x) { return f.lift_value(x) - x; };
    const auto& breaks = f.affine_breaks();
    if (!on) {
        // Connectedness pins one integer branch: all of D(T) must sit in a
        // single interval (k, k + 1/2).
        Int k = quad_floor(disp(Quad(Rat(0))));
        Quad lo{Rat(k)}, hi = Quad(Rat(k)) + Quad(Rat(1, 2));
        for (const Quad& b : breaks) {
            Quad d = disp(b);
            if (!(lo < d && d < hi)) return false;
        }
        return true;
    }
    if (on->is_empty()) return true;
    if (on->chart() != Chart::Angle || !on->left.is_exact() || !on->right.is_exact()) {
        throw WrongInput("positivity on an arc needs exact angle endpoints");
    }
    Quad a = on->left.exact();
    Quad b = on->right.exact();
    if (b <= a) b = b + Quad(Rat(1));
    Quad mid = (a + b) / Quad(Rat(2));
    Int k = quad_floor(disp(mid));
    Quad lo{Rat(k)}, hi = Quad(Rat(k)) + Quad(Rat(1, 2));
    Quad da = disp(a), db = disp(b);
    if (da < lo || da > hi || db < lo || db > hi) return false;  // closure check
    for (const Quad& br : breaks) {
        for (const Int& shift : {Int(0), Int(1)}) {
            Quad x = br + Quad(Rat(shift));
            if (a < x && x < b) {
                Quad d = disp(x);
                if (!(lo < d && d < hi)) return false;
            }
        }
    }
    return true;
}

/// Exact fixed points of one Moebius piece restricted to a cyclic arc;
/// reports whether any exist (endpoints included).
bool piece_meets_identity(const MoebiusMap& m, const CirclePoint& a, const CirclePoint& b) {
    if (m.is_identity()) return true;
    for (const MoebiusFixedPoint& fp : moebius_fixed_points(m)) {
        if (fp.point == a || fp.point == b) return true;
        if (a == b) return true;  // whole circle minus a point; a != fixed checked above
        if (CircleInterval{a, b}.contains(fp.point)) return true;
    }
    return false;
}

bool moebius_is_positive(const PiecewiseMap& f, const std::optional<CircleInterval>& on) {
    if (on && on->is_empty()) return true;
    const auto& breaks = f.moebius_breaks();
    const auto& pieces = f.moebius_pieces();
    MoebiusMap half = MoebiusMap::half_turn();
    size_t k = breaks.size();
    auto arc_relevant = [&](const CirclePoint& a, const CirclePoint& b,
                            const CirclePoint& z) {
        if (!on) return true;
        (void)a;
        (void)b;
        return on->contains(z) || z == on->left || z == on->right;
    };
    for (size_t i = 0; i < k; ++i) {
        const CirclePoint& a = breaks[i];
        const CirclePoint& b = breaks[(i + 1) % k];
        // f meets the identity or the half-turn on this arc -> not positive
        // (touching counts: the defining interval is open).
        MoebiusMap vs_half = half.inverse() * pieces[i];
        for (const MoebiusMap& probe : {pieces[i], vs_half}) {
            if (probe.is_identity()) {
                if (!on) return false;
                // identical on a whole arc; positivity fails anywhere inside
                return false;
            }
            for (const MoebiusFixedPoint& fp : moebius_fixed_points(probe)) {
                bool in_arc = (k == 1) ? true
                                       : (fp.point == a ||
                                          CircleInterval{a, b}.contains(fp.point));
                if (in_arc && arc_relevant(a, b, fp.point)) return false;
            }
        }
    }
    // No collisions with id or the half-turn on the region: the predicate is
    // constant there; decide it at one sample point.
    CirclePoint x0 = on ? arc_sample(on->left, on->right)
                        : arc_sample(breaks[0], breaks[(1) % k]);
    CirclePoint fx = pw_evaluate(f, x0);
    CirclePoint hx = half_turn(x0);
    return circular_order(x0, fx, hx);
}

bool numeric_is_positive(const PiecewiseMap& f, const std::optional<CircleInterval>& on) {
    Rat a(0), b(1);
    if (on) {
        if (on->is_empty()) return true;
        if (on->chart() != Chart::Angle || !on->left.is_exact() || !on->right.is_exact() ||
            !on->left.exact().is_rational() || !on->right.exact().is_rational()) {
            throw WrongInput("numeric positivity on an arc needs rational angle endpoints");
        }
        a = on->left.exact().as_rational();
        b = on->right.exact().as_rational();
        if (b <= a) b += 1;
    }
    Rat w(1, 1024);
    QInterval d0 = f.lift_enclosure((a + b) / 2, w) - (a + b) / 2;
    Int k = rat_floor(d0.mid());
    Rat lo(k), hi = Rat(k) + Rat(1, 2);
    auto disp_range = [&](const Rat& s, const Rat& t, const Rat& ww) {
        QInterval fs = f.lift_enclosure(s, ww), ft = f.lift_enclosure(t, ww);
        return QInterval(fs.lo - t, ft.hi - s);
    };
    struct Seg {
        Rat a, b;
    };
    std::deque<Seg> work{{a, b}};
    long budget = 200000;
    while (!work.empty()) {
        if (--budget < 0) throw Indeterminate("numeric positivity undecided at budget");
        Seg s = work.front();
        work.pop_front();
        Rat ww = (s.b - s.a) / 4 < w ? (s.b - s.a) / 4 : w;
        if (ww <= 0) throw Indeterminate("numeric positivity undecided (degenerate segment)");
        QInterval r = disp_range(s.a, s.b, ww);
        if (lo < r.lo && r.hi < hi) continue;  // certified inside
        // certified violation at a point?
        Rat m = (s.a + s.b) / 2;
        QInterval pm = disp_range(m, m, ww);
        if (pm.hi <= lo || pm.lo >= hi) return false;
        work.push_back({s.a, m});
        work.push_back({m, s.b});
    }
    return true;
}

}  // namespace

bool is_positive(const PiecewiseMap& f, const std::optional<CircleInterval>& on) {
    switch (f.universe()) {
        case Universe::PwAffine:
            return affine_is_positive(f, on);
        case Universe::PwMoebius:
            try {
                return moebius_is_positive(f, on);
            } catch (const FieldMismatch&) {
                // Crossing points fall outside the working field; the
                // certified numeric check still decides strict cases.
                return numeric_is_positive(embed_numeric(f), std::nullopt);
            }
        case Universe::Numeric:
            return numeric_is_positive(f, on);
    }
    throw UniverseMismatch("unknown universe");
}

// --- formatting -----------------------------------------------------------

std::string PiecewiseMap::str() const {
    std::ostringstream out;
    switch (universe_) {
        case Universe::PwAffine:
            if (is_rigid_rotation()) {
                out << "rigid:" << apieces_[0].offset.str();
                break;
            }
            out << "pw-affine{";
            for (size_t i = 0; i < abreaks_.size(); ++i) {
                if (i > 0) out << ", ";
                out << "[" << abreaks_[i].str() << ": " << apieces_[i].slope.str() << "x+"
                    << apieces_[i].offset.str() << "]";
            }
            out << "}";
            break;
        case Universe::PwMoebius:
            out << "pw-moebius{";
            for (size_t i = 0; i < mbreaks_.size(); ++i) {
                if (i > 0) out << ", ";
                out << "[" << mbreaks_[i].str() << ": " << mpieces_[i].str() << "]";
            }
            out << "}";
            break;
        case Universe::Numeric:
            out << "numeric{lift oracle}";
            break;
    }
    return out.str();
}

}  // namespace circlelab
