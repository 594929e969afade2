#include "circlelab/moebius.hpp"

#include "circlelab/errors.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace circlelab {

namespace {

/// Entries scaled so the first nonzero one (in a,b,c,d order) equals 1.
/// Two maps are PSL-equal iff their scaled entries coincide; the ratios stay
/// inside the field of the original matrix, so cross-field comparisons reduce
/// to exact single-radical sign tests.
std::array<Quad, 4> scaled_entries(const MoebiusMap& m) {
    std::array<Quad, 4> e = {m.a(), m.b(), m.c(), m.d()};
    for (int i = 0; i < 4; ++i) {
        if (e[static_cast<size_t>(i)].sign() != 0) {
            Quad lead = e[static_cast<size_t>(i)];
            for (Quad& v : e) v = v / lead;
            return e;
        }
    }
    throw WrongInput("zero matrix is not a Moebius map");
}

/// Exact square root inside the same quadratic field, if one exists.
std::optional<Rat> rational_sqrt(const Rat& r) {
    if (r < 0) return std::nullopt;
    Int p = boost::multiprecision::sqrt(num(r));
    Int q = boost::multiprecision::sqrt(den(r));
    if (p * p != num(r) || q * q != den(r)) return std::nullopt;
    return Rat(p, q);
}

std::optional<Quad> quad_sqrt(const Quad& v) {
    if (v.sign() < 0) return std::nullopt;
    if (v.is_rational()) return Quad::sqrt_of(v.as_rational());
    // (p + q*sqrt(n))^2 = v requires p^2 = (A +- sqrt(A^2 - B^2 n))/2 with
    // A, B the parts of v; both inner and outer roots must be rational.
    const Rat& A = v.rational_part();
    const Rat& B = v.radical_coeff();
    Rat norm = A * A - B * B * Rat(v.radicand());
    auto s = rational_sqrt(norm);
    if (!s) return std::nullopt;
    for (int branch : {1, -1}) {
        Rat p2 = (A + Rat(branch) * *s) / 2;
        auto p = rational_sqrt(p2);
        if (!p || *p == 0) continue;
        Rat q = B / (2 * *p);
        Quad root(*p, q, v.radicand());
        if (root * root == v) return root.sign() >= 0 ? root : -root;
    }
    return std::nullopt;
}

/// Local nature of an exact fixed point x* of m from the exact derivative
/// det/(c x* + d)^2; the point at infinity is handled by conjugating with
/// the half-turn, which moves it to 0.
LocalNature nature_at(const MoebiusMap& m, const CirclePoint& fixed) {
    if (fixed.is_infinity()) {
        MoebiusMap h = MoebiusMap::half_turn();
        return nature_at(h.inverse() * m * h, CirclePoint::projective(Quad(Rat(0))));
    }
    const Quad& x = fixed.exact();
    Quad denom = m.c() * x + m.d();
    Quad deriv_gap = m.det() - denom * denom;  // sign of (derivative - 1)
    if (deriv_gap.sign() < 0) return LocalNature::Attracting;
    if (deriv_gap.sign() > 0) return LocalNature::Repelling;
    // Parabolic: the displacement has one sign on the complement of x*.
    for (const Quad& probe : {Quad(Rat(0)), Quad(Rat(1)), Quad(Rat(-1)), Quad(Rat(2))}) {
        CirclePoint y = CirclePoint::projective(probe);
        if (y == fixed) continue;
        CirclePoint image = m.apply(y);
        return circular_order(fixed, y, image) ? LocalNature::ParabolicAboveBoth
                                               : LocalNature::ParabolicBelowBoth;
    }
    throw DomainError("no probe point available");  // unreachable: 4 probes, 1 fixed point
}

}  // namespace

MoebiusMap::MoebiusMap(Quad a, Quad b, Quad c, Quad d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    if (det().sign() <= 0) {
        throw WrongInput("Moebius map needs positive determinant, got det = " + det().str());
    }
}

MoebiusMap MoebiusMap::identity() {
    return MoebiusMap(Quad(Rat(1)), Quad(Rat(0)), Quad(Rat(0)), Quad(Rat(1)));
}

MoebiusMap MoebiusMap::half_turn() {
    return MoebiusMap(Quad(Rat(0)), Quad(Rat(-1)), Quad(Rat(1)), Quad(Rat(0)));
}

MoebiusMap MoebiusMap::scaling(const Quad& l) {
    if (l.sign() <= 0) throw WrongInput("scaling factor must be positive");
    return MoebiusMap(l, Quad(Rat(0)), Quad(Rat(0)), Quad(Rat(1)));
}

MoebiusMap MoebiusMap::translation(const Quad& t) {
    return MoebiusMap(Quad(Rat(1)), t, Quad(Rat(0)), Quad(Rat(1)));
}

bool MoebiusMap::is_identity() const {
    return b_.sign() == 0 && c_.sign() == 0 && a_ == d_;
}

CirclePoint MoebiusMap::pole() const {
    if (c_.sign() == 0) return CirclePoint::infinity();
    return CirclePoint::projective(-d_ / c_);
}

CirclePoint MoebiusMap::apply(const CirclePoint& x) const {
    if (x.chart() != Chart::Projective) {
        throw UniverseMismatch("Moebius maps act in the projective chart");
    }
    if (x.is_infinity()) {
        if (c_.sign() == 0) return CirclePoint::infinity();
        return CirclePoint::projective(a_ / c_);
    }
    if (x.is_exact()) {
        const Quad& v = x.exact();
        Quad denom = c_ * v + d_;
        if (denom.sign() == 0) return CirclePoint::infinity();
        return CirclePoint::projective((a_ * v + b_) / denom);
    }
    // Enclosure: the map is increasing on any real interval avoiding the
    // pole, so the image is the bracket of the endpoint images.
    const QInterval& box = x.enclosure();
    Quad dlo = c_ * Quad(box.lo) + d_;
    Quad dhi = c_ * Quad(box.hi) + d_;
    if (dlo.sign() == 0 || dhi.sign() == 0 || dlo.sign() != dhi.sign()) {
        throw Indeterminate("enclosure straddles the pole of the map");
    }
    Rat w = box.width() > 0 ? box.width() : Rat(1, Int(1) << 30);
    Quad ilo = (a_ * Quad(box.lo) + b_) / dlo;
    Quad ihi = (a_ * Quad(box.hi) + b_) / dhi;
    QuadBracket blo = quad_bracket(ilo, w);
    QuadBracket bhi = quad_bracket(ihi, w);
    return CirclePoint::approx(Chart::Projective, QInterval(blo.lo, bhi.hi));
}

MoebiusMap MoebiusMap::inverse() const { return MoebiusMap(d_, -b_, -c_, a_); }

MoebiusMap operator*(const MoebiusMap& m1, const MoebiusMap& m2) {
    return MoebiusMap(m1.a_ * m2.a_ + m1.b_ * m2.c_, m1.a_ * m2.b_ + m1.b_ * m2.d_,
                      m1.c_ * m2.a_ + m1.d_ * m2.c_, m1.c_ * m2.b_ + m1.d_ * m2.d_);
}

MoebiusMap MoebiusMap::power(long e) const {
    MoebiusMap base = e >= 0 ? *this : inverse();
    unsigned long n = e >= 0 ? static_cast<unsigned long>(e) : -static_cast<unsigned long>(e);
    MoebiusMap acc = identity();
    while (n > 0) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

bool operator==(const MoebiusMap& m1, const MoebiusMap& m2) {
    std::array<Quad, 4> e1 = scaled_entries(m1);
    std::array<Quad, 4> e2 = scaled_entries(m2);
    for (int i = 0; i < 4; ++i) {
        if (!(e1[i] == e2[i])) return false;
    }
    return true;
}

std::string MoebiusMap::str() const {
    std::ostringstream out;
    out << "[[" << a_.str() << ", " << b_.str() << "], [" << c_.str() << ", " << d_.str()
        << "]]";
    return out.str();
}

MoebiusClass moebius_classify(const MoebiusMap& m) {
    if (m.is_identity()) return MoebiusClass::Identity;
    Quad tr = m.a() + m.d();
    Quad gap = tr * tr - Quad(Rat(4)) * m.det();
    int s = gap.sign();
    if (s < 0) return MoebiusClass::Elliptic;
    if (s == 0) return MoebiusClass::Parabolic;
    return MoebiusClass::Hyperbolic;
}

std::vector<MoebiusFixedPoint> moebius_fixed_points(const MoebiusMap& m) {
    if (m.is_identity()) throw IdentityMap("identity fixes every point");
    std::vector<CirclePoint> roots;
    if (m.c().sign() == 0) {
        roots.push_back(CirclePoint::infinity());
        if (!(m.a() == m.d())) {
            roots.push_back(CirclePoint::projective(m.b() / (m.d() - m.a())));
        }
    } else {
        // Finite fixed points solve c x^2 + (d - a) x - b = 0.
        Quad half_gap = (m.a() - m.d()) / Quad(Rat(2));
        Quad disc = half_gap * half_gap + m.b() * m.c();
        int s = disc.sign();
        if (s == 0) {
            roots.push_back(CirclePoint::projective(half_gap / m.c()));
        } else if (s > 0) {
            auto sq = quad_sqrt(disc);
            if (!sq) {
                throw FieldMismatch(
                    "fixed points are not expressible in the field of the entries");
            }
            roots.push_back(CirclePoint::projective((half_gap - *sq) / m.c()));
            roots.push_back(CirclePoint::projective((half_gap + *sq) / m.c()));
        }
    }
    std::vector<MoebiusFixedPoint> result;
    result.reserve(roots.size());
    for (const CirclePoint& r : roots) {
        result.push_back({r, nature_at(m, r)});
    }
    return result;
}

std::optional<std::pair<long, long>> moebius_finite_order(const MoebiusMap& m, long cap) {
    MoebiusMap acc = m;
    long n = 0;
    for (long i = 1; i <= cap; ++i) {
        if (acc.is_identity()) {
            n = i;
            break;
        }
        acc = acc * m;
    }
    if (n == 0) return std::nullopt;
    if (n == 1) return std::make_pair(0L, 1L);
    // The rotation number p/n is the cyclic shift induced on any orbit,
    // which is a genuine n-cycle because no smaller power is the identity.
    std::vector<CirclePoint> orbit;
    orbit.reserve(static_cast<size_t>(n));
    CirclePoint x = CirclePoint::infinity();
    for (long i = 0; i < n; ++i) {
        orbit.push_back(x);
        x = m.apply(x);
    }
    std::vector<long> order(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](long i, long j) {
        return cut_compare(orbit[static_cast<size_t>(i)], orbit[static_cast<size_t>(j)]) < 0;
    });
    std::vector<long> pos(static_cast<size_t>(n));
    for (long r = 0; r < n; ++r) pos[static_cast<size_t>(order[static_cast<size_t>(r)])] = r;
    long p = ((pos[1] - pos[0]) % n + n) % n;
    for (long i = 0; i < n; ++i) {
        long expect = (pos[static_cast<size_t>(i)] + p) % n;
        if (pos[static_cast<size_t>((i + 1) % n)] != expect) {
            throw DomainError("orbit of a finite-order map is not a rigid cycle");
        }
    }
    return std::make_pair(p, n);
}

PSLkElement::PSLkElement(MoebiusMap base, int k, int branch)
    : base_(std::move(base)), k_(k), branch_(((branch % k) + k) % k) {
    if (k < 1) throw WrongInput("cover degree must be >= 1");
}

int PSLkElement::winding(const CirclePoint& x) const {
    // The canonical lift of the base map through the cut at infinity gains
    // +1 exactly on the arc at or past the pole (the preimage of the cut).
    CirclePoint cut_preimage = base_.pole();
    if (cut_preimage.is_infinity()) return 0;
    return cut_compare(x, cut_preimage) >= 0 ? 1 : 0;
}

CoverPoint PSLkElement::evaluate(const CoverPoint& p) const {
    if (p.sector < 0 || p.sector >= k_) throw WrongInput("sector out of range");
    int sector = (p.sector + branch_ + winding(p.base)) % k_;
    return {sector, base_.apply(p.base)};
}

std::vector<CoverPoint> PSLkElement::fixed_points() const {
    if (is_identity()) throw IdentityMap("identity fixes every cover point");
    std::vector<CoverPoint> result;
    if (base_.is_identity()) return result;  // nontrivial deck rotation
    for (const MoebiusFixedPoint& fp : moebius_fixed_points(base_)) {
        if ((branch_ + winding(fp.point)) % k_ != 0) continue;
        for (int j = 0; j < k_; ++j) result.push_back({j, fp.point});
    }
    return result;
}

QInterval PSLkElement::cover_angle(const CoverPoint& p, int k, const Rat& width) {
    QInterval u = angle_coordinate(p.base, width);
    Rat j(p.sector);
    return QInterval((u.lo + j) / Rat(k), (u.hi + j) / Rat(k));
}

}  // namespace circlelab
