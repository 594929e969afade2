#pragma once

#include "circlelab/circle.hpp"
#include "circlelab/quadratic.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace circlelab {

/// Element of PSL(2,R) with exact entries (rational, or p+q*sqrt(n) with a
/// shared radicand). Stored up to positive scaling with det > 0; equality,
/// classification and fixed points are all scale-free and exact.
class MoebiusMap {
public:
    MoebiusMap(Quad a, Quad b, Quad c, Quad d);

    static MoebiusMap identity();
    static MoebiusMap half_turn();               // x -> -1/x
    static MoebiusMap scaling(const Quad& l);    // x -> l*x, l > 0
    static MoebiusMap translation(const Quad& t);  // x -> x + t

    const Quad& a() const { return a_; }
    const Quad& b() const { return b_; }
    const Quad& c() const { return c_; }
    const Quad& d() const { return d_; }
    Quad det() const { return a_ * d_ - b_ * c_; }

    bool is_identity() const;

    /// Exact action on the projective chart; enclosure points pass through
    /// only when the pole is certifiably outside the enclosure.
    CirclePoint apply(const CirclePoint& x) const;
    CirclePoint pole() const;  // preimage of inf

    MoebiusMap inverse() const;
    friend MoebiusMap operator*(const MoebiusMap& m1, const MoebiusMap& m2);
    MoebiusMap power(long e) const;

    /// PSL equality (proportional matrices).
    friend bool operator==(const MoebiusMap& m1, const MoebiusMap& m2);

    std::string str() const;

private:
    Quad a_, b_, c_, d_;
};

enum class MoebiusClass { Identity, Elliptic, Parabolic, Hyperbolic };

/// Identity, else by trace^2 vs 4*det: <4 elliptic, =4 parabolic, >4
/// hyperbolic. Exact and conjugacy-invariant.
MoebiusClass moebius_classify(const MoebiusMap& m);

enum class LocalNature {
    Attracting,
    Repelling,
    ParabolicAboveBoth,  // f(x) > x on both sides (in circular orientation)
    ParabolicBelowBoth,
    SemiStableLeftIn,
    SemiStableRightIn,
};

struct MoebiusFixedPoint {
    CirclePoint point;
    LocalNature nature;
};

/// Exact fixed-point set on the projective line: hyperbolic gives an
/// attracting/repelling pair, parabolic one point, elliptic none.
/// Identity input raises IdentityMap.
std::vector<MoebiusFixedPoint> moebius_fixed_points(const MoebiusMap& m);

/// Smallest n <= cap with m^n = id in PSL, together with the exact rotation
/// number p/n read off a periodic orbit; nullopt if none.
std::optional<std::pair<long, long>> moebius_finite_order(const MoebiusMap& m, long cap);

/// Element of the k-fold central extension acting on the k-fold cover,
/// represented as sector/base-point pairs: the cover point with sector j and
/// base point x sits at angle (j + u(x))/k, u the angle coordinate.
struct CoverPoint {
    int sector;        // in [0,k)
    CirclePoint base;  // projective chart
};

class PSLkElement {
public:
    PSLkElement(MoebiusMap base, int k, int branch);

    const MoebiusMap& base() const { return base_; }
    int k() const { return k_; }
    int branch() const { return branch_; }

    /// Commutes exactly with the deck rotation (sector + 1).
    CoverPoint evaluate(const CoverPoint& p) const;

    /// Exact fixed points; count is 0, k, or 2k for nontrivial elements.
    std::vector<CoverPoint> fixed_points() const;

    bool is_identity() const { return branch_ == 0 && base_.is_identity(); }

    /// Angle of a cover point on the covering circle, as an enclosure.
    static QInterval cover_angle(const CoverPoint& p, int k, const Rat& width);

private:
    int winding(const CirclePoint& x) const;  // cut-crossing indicator in {0,1}
    MoebiusMap base_;
    int k_;
    int branch_;
};

}  // namespace circlelab
