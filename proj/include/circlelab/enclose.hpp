#pragma once

#include "circlelab/quadratic.hpp"
#include "circlelab/rational.hpp"

#include <string>

namespace circlelab {

/// Closed interval with exact rational endpoints; the certified container
/// for values the exact universes cannot represent.
struct QInterval {
    Rat lo, hi;

    QInterval() : lo(0), hi(0) {}
    QInterval(Rat v) : lo(v), hi(std::move(v)) {}  // NOLINT: point interval
    QInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::invalid_argument("interval endpoints out of order");
    }

    Rat width() const { return hi - lo; }
    Rat mid() const { return (lo + hi) / 2; }
    bool is_point() const { return lo == hi; }
    bool contains(const Rat& v) const { return lo <= v && v <= hi; }
    bool contains(const QInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const QInterval& o) const { return !(hi < o.lo || o.hi < lo); }

    QInterval operator+(const QInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    QInterval operator-(const QInterval& o) const { return {lo - o.hi, hi - o.lo}; }
    QInterval operator+(const Rat& r) const { return {lo + r, hi + r}; }
    QInterval operator-(const Rat& r) const { return {lo - r, hi - r}; }

    bool operator==(const QInterval&) const = default;

    std::string str() const;
};

inline QInterval hull(const QInterval& a, const QInterval& b) {
    return {a.lo < b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
}

inline QInterval bracket(const Quad& q, const Rat& width) {
    auto b = quad_bracket(q, width);
    return {b.lo, b.hi};
}

/// Certified enclosure of tan(pi*t), for rational t in (-1/2, 1/2).
/// Width at most `width` (the value itself is transcendental for generic t).
QInterval tan_pi(const Rat& t, const Rat& width);

/// Certified enclosure of atan(x)/pi, in (-1/2, 1/2), width at most `width`.
QInterval atan_over_pi(const Rat& x, const Rat& width);

}  // namespace circlelab
