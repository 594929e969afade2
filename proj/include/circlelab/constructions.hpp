#pragma once

#include "circlelab/analysis.hpp"
#include "circlelab/blowup.hpp"

#include <array>
#include <string>
#include <vector>

namespace circlelab {

/// The group generated by a two-scalings map f (x -> lambda*x on the
/// positive half-axis, x -> mu*x on the negative one) together with the
/// half-turn R: x -> -1/x. With g = R f R, the pair (f, g) generates a
/// rank-2 free abelian group on which R acts by swapping the basis, so the
/// whole group is Z^2 semidirect Z/2 with swap action. Freeness of (f, g)
/// needs lambda and mu multiplicatively independent, which is certified by
/// prime factorization.
struct TwoScalingsGroup {
    Rat lambda;
    Rat mu;
    PiecewiseMap f;          // lambda*x above 0, mu*x below (PwMoebius)
    PiecewiseMap g;          // R f R: mu*x above 0, lambda*x below
    PiecewiseMap half_turn;  // x -> -1/x
    std::vector<std::string> relations;  // presentation relations, verified

    std::vector<PiecewiseMap> generators() const { return {f, half_turn}; }
};

/// Builds the group and verifies R^2 = id, R f R = g and f g = g f as
/// exact map identities. Requires lambda, mu rational and > 1; throws
/// DependentParameters when lambda^a = mu^b has a nontrivial integer
/// solution (decided on the prime exponent vectors).
TwoScalingsGroup build_two_scalings_group(const Rat& lambda, const Rat& mu);

/// Conjugation action of an order-2 element on a rank-2 abelian basis
/// (f, g): column j holds the integer pair (a, b) with
/// R * basis_j * R^{-1} = f^a g^b, decided by exact map comparison over
/// exponents up to the bound. Throws BasisFailure when some conjugate is
/// not expressible within the bound.
std::array<std::array<long, 2>, 2> involution_action_matrix(
    const PiecewiseMap& f, const PiecewiseMap& g, const PiecewiseMap& involution,
    long exponent_bound = 3);
std::array<std::array<long, 2>, 2> involution_action_matrix(const TwoScalingsGroup& G);

/// The group generated by two parabolic translations fixing infinity,
/// x -> x + 1 and x -> x + t with t a quadratic irrational, together with a
/// rigid rotation by the rational angle rho. At desk scale the build
/// certifies, over every nontrivial normal-form word of the free product
/// Z^2 * Z up to the given weight, that the word acts nontrivially, and
/// that the only ball words fixing infinity are the pure translation words.
/// It also blows up x -> x + 1 at its fixed point with the stabilizer
/// acting by translation on the inserted interval; the blown map acquires a
/// second parabolic fixed point at the other end of the interval.
struct ParabolicRotationGroup {
    Quad translation;       // translation length of the second parabolic
    Rat rho;                // rotation angle
    PiecewiseMap t_alpha;   // x -> x + 1 (PwMoebius)
    PiecewiseMap t_beta;    // x -> x + translation (PwMoebius)
    PiecewiseMap rotation;  // rigid rotation by rho (Angle chart)
    long depth = 0;         // normal-form weight bound of the evidence ball
    long words_checked = 0;
    std::vector<GroupWord> stabilizer_words;  // ball words fixing infinity
    bool stabilizer_is_translations = false;  // all of them are pure T-words
    BlowUpMap blown_alpha;                    // t_alpha blown up at infinity
    FixedPointReport blown_alpha_fixed;       // two parabolic endpoints

    /// Generator order used by the word letters: 0 = t_alpha, 1 = t_beta,
    /// 2 = rotation (t_alpha and t_beta embedded into the Numeric universe).
    std::vector<PiecewiseMap> generators() const;
};

/// Throws WrongInput when the translation length is rational (the two
/// parabolics then generate rank 1) or rho is not in (0,1); throws BadRho
/// when some nontrivial normal-form word cannot be certified to act
/// nontrivially, or some word containing the rotation cannot be certified
/// to move infinity.
ParabolicRotationGroup build_parabolic_rotation_group(
    const Quad& translation, const Rat& rho, long depth = 4,
    const BlowUpSpec& blow = {});

}  // namespace circlelab
