#pragma once

#include "circlelab/piecewise.hpp"

#include <random>

namespace circlelab {

/// Random exact piecewise-affine circle homeomorphism: a piecewise-linear
/// interpolation of random rational graph points (b_i, v_i) with both
/// coordinate families strictly increasing and the values spanning exactly
/// one period. Deterministic for a fixed engine state.
PiecewiseMap random_pw_affine(std::mt19937& rng, int max_pieces = 4, int denom = 64);

/// Random Moebius map with integer entries in [-range, range] and det > 0.
MoebiusMap random_moebius(std::mt19937& rng, int range = 5);

/// Random positive map: a rigid rotation by a rational in (0, delta),
/// optionally composed with a small positive piecewise wiggle, certified
/// d_C0 to the identity < delta. Used as a perturbation supply.
PiecewiseMap random_positive_below(std::mt19937& rng, const Rat& delta);

}  // namespace circlelab
