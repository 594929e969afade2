#pragma once

#include "circlelab/enclose.hpp"
#include "circlelab/errors.hpp"
#include "circlelab/quadratic.hpp"

#include <optional>
#include <string>
#include <variant>

namespace circlelab {

/// The two fixed coordinate systems: Angle is R/Z with canonical
/// representatives in [0,1); Projective is the real projective line
/// R u {inf}. They are glued by theta |-> tan(pi*(theta - 1/2)), 0 |-> inf.
enum class Chart { Angle, Projective };

struct InfinityTag {
    bool operator==(const InfinityTag&) const = default;
};

class CirclePoint {
public:
    using Coord = std::variant<Quad, InfinityTag, QInterval>;

    static CirclePoint angle(const Quad& theta);  // reduced mod 1 into [0,1)
    static CirclePoint angle(const Rat& theta) { return angle(Quad(theta)); }
    static CirclePoint projective(const Quad& x);
    static CirclePoint infinity();
    static CirclePoint approx(Chart chart, QInterval enclosure);

    Chart chart() const { return chart_; }
    bool is_exact() const { return !std::holds_alternative<QInterval>(coord_); }
    bool is_infinity() const { return std::holds_alternative<InfinityTag>(coord_); }
    bool is_enclosure() const { return std::holds_alternative<QInterval>(coord_); }

    /// Finite exact coordinate; throws unless is_exact() && !is_infinity().
    const Quad& exact() const;
    const QInterval& enclosure() const;

    std::string str() const;

    friend bool operator==(const CirclePoint& a, const CirclePoint& b);

private:
    CirclePoint(Chart chart, Coord coord) : chart_(chart), coord_(std::move(coord)) {}
    Chart chart_;
    Coord coord_;
};

/// Exact total order "as seen from the chart origin": Angle compares
/// canonical representatives in [0,1); Projective puts inf first, then the
/// natural order on R. Throws Indeterminate when enclosures overlap.
int cut_compare(const CirclePoint& a, const CirclePoint& b);

/// True iff the triple (x,y,z) is positively oriented on the circle.
/// Invariant under cyclic permutation; antisymmetric under swaps.
/// Coincident points raise DegenerateTriple.
bool circular_order(const CirclePoint& x, const CirclePoint& y, const CirclePoint& z);

/// Open arc (left,right) of points z with (left,z,right) positively ordered;
/// (x,x) is the empty set.
struct CircleInterval {
    CirclePoint left;
    CirclePoint right;

    Chart chart() const { return left.chart(); }
    bool is_empty() const { return left == right; }
    bool contains(const CirclePoint& z) const;
};

/// Image under the half-turn: +1/2 in the Angle chart, x -> -1/x projectively.
CirclePoint half_turn(const CirclePoint& p);

/// Fixed chart homeomorphism theta -> tan(pi*(theta-1/2)), theta=0 -> inf,
/// and its inverse. Irrational images come back as certified enclosures of
/// width <= precision; algebraic special values stay exact.
CirclePoint chart_convert(const CirclePoint& p, Chart target, const Rat& precision);

/// Exact projective value of the angle theta when it is quadratic
/// (theta a multiple of 1/8 or 1/12); nullopt otherwise. theta=0 has no
/// finite value (it maps to inf).
std::optional<Quad> exact_angle_to_projective(const Rat& theta);

/// Enclosure of the angle coordinate of an exact projective point.
QInterval angle_coordinate(const CirclePoint& proj_point, const Rat& width);

/// Exact sign of theta - u(P), where u(P) is the angle coordinate of the
/// exact projective point P. Decidable: equal only at quadratic tangent
/// values, which are recognized via the exact table.
int compare_angle_to_projective(const Rat& theta, const CirclePoint& proj_point);

}  // namespace circlelab
