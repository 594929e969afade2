#pragma once

#include "circlelab/piecewise.hpp"
#include "circlelab/random_maps.hpp"

#include <random>

namespace circlelab::testutil {

using circlelab::random_moebius;
using circlelab::random_pw_affine;

/// Birkhoff-style rotation number estimate from a long exact lift orbit:
/// (F^n(0) - 0)/n is within 1/n of rot(f).
inline QInterval birkhoff_estimate(const PiecewiseMap& f, long n) {
    Quad v = lift_iterate(f, Quad(Rat(0)), n);
    QuadBracket b = quad_bracket(v, Rat(1, 1000000));
    return QInterval((b.lo - 1) / n, (b.hi + 1) / n);
}

}  // namespace circlelab::testutil
