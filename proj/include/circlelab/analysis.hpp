#pragma once

#include "circlelab/piecewise.hpp"
#include "circlelab/rotation.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace circlelab {

/// One isolated fixed point together with the local dynamics read off the
/// exact displacement sign on both sides.
struct FixedPointEntry {
    CirclePoint point;
    LocalNature nature;
};

/// Fixed-point set of a piecewise map. Exact universes give exact points
/// and natures; Numeric maps give enclosure clusters flagged approximate.
/// Points inside an arc of fixed points are not listed individually: the
/// first maximal such arc is reported as fixed_arc (closed arc).
struct FixedPointReport {
    std::vector<FixedPointEntry> points;
    bool is_identity = false;
    std::optional<CircleInterval> fixed_arc;
    bool approximate = false;

    size_t count() const { return points.size(); }
    bool has_fixed_arc() const { return fixed_arc.has_value(); }
};

FixedPointReport fixed_points_report(const PiecewiseMap& f,
                                     const Rat& resolution = Rat(1, 1024));

/// Transversality type of a solution of f(x) = g(x): Hyperbolic when
/// f - g changes sign, Parabolic when it touches without crossing.
enum class CrossingKind { Hyperbolic, Parabolic };

struct Crossing {
    CirclePoint point;
    CrossingKind kind;
};

/// Solutions of f(x) = g(x), computed as the fixed points of g^{-1} f.
/// f = g raises DegenerateCoincidence; agreement on an arc sets degenerate.
struct CrossingReport {
    std::vector<Crossing> crossings;
    bool degenerate = false;
    bool approximate = false;

    size_t count() const { return crossings.size(); }
};

CrossingReport crossing_report(const PiecewiseMap& f, const PiecewiseMap& g,
                               const Rat& resolution = Rat(1, 1024));

/// Moebius-like conjugacy type of a single element, decided from the exact
/// fixed-point set, and from the rotation number when there is none.
enum class ElementKind {
    Trivial,
    EllipticLike,    // no fixed points, rot = p/q exact, f^q = id
    ParabolicLike,   // exactly one fixed point
    HyperbolicLike,  // an attracting/repelling pair
    NotMoebiusLike,  // fixed-point data no Moebius map can have
    Unknown,         // rotation number only enclosed within the cap
};

struct Classification {
    ElementKind kind = ElementKind::Unknown;
    std::optional<RotResult> rot;      // EllipticLike (and Unknown evidence)
    std::vector<CirclePoint> fixed;    // Parabolic/Hyperbolic witnesses
    std::string evidence;
};

Classification classify_element(const PiecewiseMap& f, long q_cap = 2000);

/// Survey of the word ball of the given radius: freely reduced words over
/// the generators, deduplicated by exact map equality (the generators may
/// satisfy relations), with the fixed-point count of every distinct
/// nontrivial element.
struct WordBallReport {
    long radius = 0;
    size_t words_examined = 0;
    size_t distinct_nontrivial = 0;
    size_t max_fixed_points = 0;
    GroupWord witness;                         // attains max_fixed_points
    std::map<size_t, size_t> histogram;        // fixed count -> elements
    std::optional<GroupWord> counterexample;   // exceeds expected_max
};

/// expected_max, when given, makes the report record the first word whose
/// fixed-point count exceeds it (an arc of fixed points always counts as
/// exceeding). Generators must share an exact universe.
WordBallReport word_ball_max_fixed(const std::vector<PiecewiseMap>& gens, long radius,
                                   std::optional<size_t> expected_max = std::nullopt);

/// Why the group generated by the given maps is elementary: a common fixed
/// point, a finite invariant set, or (for rigid generators) an outright
/// action by rotations. None means no certificate was found to the depth.
struct ElementaryCertificate {
    enum class Kind { GlobalFixedPoint, FiniteOrbit, RotationSemiConjugacy, None };

    Kind kind = Kind::None;
    std::vector<CirclePoint> orbit;  // the invariant set, in circular order
    long checked_depth = 0;
    std::string evidence;

    long order() const { return static_cast<long>(orbit.size()); }
};

/// Searches for a finite invariant set: seeds candidate points from the
/// fixed points and periodic points of short words (length <= min(depth,4)),
/// then closes each seed under the generators up to period_cap points.
ElementaryCertificate finite_orbit_search(const std::vector<PiecewiseMap>& gens,
                                          long depth, long period_cap = 12);

/// Verification that rot is additive mod 1 on the word ball, which holds
/// exactly when the group is elementary.
struct RotAdditivityReport {
    bool ok = false;
    ElementaryCertificate certificate;
    size_t pairs_checked = 0;
    std::optional<std::pair<GroupWord, GroupWord>> violation;
};

/// Requires an elementary certificate (else NotElementary), then checks
/// rot(uv) = rot(u) + rot(v) mod 1 exactly over all pairs of distinct
/// elements of the word ball of the given radius.
RotAdditivityReport rot_homomorphism_check(const std::vector<PiecewiseMap>& gens,
                                           long radius);

/// Smallest m <= m_cap such that h = f^m g f^{-m} satisfies a certified
/// d_inf(h, id) < eta, returned with that conjugate. The expansion of f
/// around a repelling fixed point inside I is what makes m exist when g is
/// close to the identity on I; CannotAmplify when no m within the cap works.
std::pair<long, PiecewiseMap> amplify_local_closeness(const PiecewiseMap& f,
                                                      const PiecewiseMap& g,
                                                      const CircleInterval& I,
                                                      const Rat& eta, long m_cap = 16);

/// First m with certified eps/4 < d_inf(g^m, id) <= eps/2. Requires
/// d_inf(g, id) <= eps/2 and g != id (WrongInput otherwise); CannotAmplify
/// when the distance jumps over the window or never reaches it.
long power_distance_calibrate(const PiecewiseMap& g, const Rat& eps,
                              long m_cap = 100000);

}  // namespace circlelab
