#pragma once

#include "circlelab/circle.hpp"
#include "circlelab/moebius.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace circlelab {

/// The three map universes. The two exact ones live in fixed charts
/// (affine pieces in the Angle chart, Moebius pieces in the Projective
/// chart) and never mix without an explicit numeric embedding, because the
/// chart change is transcendental.
enum class Universe { PwAffine, PwMoebius, Numeric };

/// One affine piece of a circle map, stored as a line of the canonical lift:
/// F(x) = slope*x + offset on its arc, slope > 0.
struct AffinePiece {
    Quad slope;
    Quad offset;

    friend bool operator==(const AffinePiece& p, const AffinePiece& q) {
        return p.slope == q.slope && p.offset == q.offset;
    }
};

/// Certified evaluator of a lift of a circle homeomorphism: for rational x
/// and positive width, returns an enclosure of F(x) of width <= width,
/// consistent across calls (always the same lift).
using LiftOracle = std::function<QInterval(const Rat& x, const Rat& width)>;

/// Orientation-preserving circle homeomorphism in one of the three
/// universes. Exact universes are kept in a canonical normal form
/// (minimal pieces, deterministic breakpoint anchor, canonical lift with
/// F(0) in [0,1) for PwAffine), so structural equality is map equality.
class PiecewiseMap {
public:
    static PiecewiseMap identity(Universe u);

    /// Rigid rotation by angle c (PwAffine universe, lift x + c).
    static PiecewiseMap rigid_rotation(const Quad& angle);

    /// PwAffine from lift lines: lines[i] applies on [cuts[i], cuts[i+1]]
    /// with cuts ascending and spanning exactly one period
    /// (cuts.back() = cuts.front() + 1). Continuity and slope positivity are
    /// validated; the lift is renormalized to F(0) in [0,1).
    static PiecewiseMap affine(const std::vector<Quad>& cuts,
                               const std::vector<AffinePiece>& lines);

    /// PwMoebius from breakpoints (exact projective points, any order) and
    /// one matrix per arc: pieces[i] applies on the arc from breaks[i] to the
    /// cyclically next breakpoint. Continuity and total degree 1 validated.
    static PiecewiseMap moebius(const std::vector<CirclePoint>& breaks,
                                const std::vector<MoebiusMap>& pieces);
    static PiecewiseMap single_moebius(const MoebiusMap& m);

    /// Numeric universe from a certified lift and the functional inverse of
    /// that same lift (lift(inverse_lift(y)) = y as reals).
    static PiecewiseMap numeric(LiftOracle lift, LiftOracle inverse_lift);

    Universe universe() const { return universe_; }
    Chart chart() const {
        return universe_ == Universe::PwMoebius ? Chart::Projective : Chart::Angle;
    }

    // Exact-universe structure (throws UniverseMismatch on wrong universe).
    const std::vector<Quad>& affine_breaks() const;
    const std::vector<AffinePiece>& affine_pieces() const;
    const std::vector<CirclePoint>& moebius_breaks() const;
    const std::vector<MoebiusMap>& moebius_pieces() const;
    size_t piece_count() const;

    bool is_identity() const;
    bool is_rigid_rotation() const;
    std::optional<Quad> rigid_angle() const;

    /// Matrix of the piece acting at x (PwMoebius; x exact).
    const MoebiusMap& moebius_piece_at(const CirclePoint& x) const;
    /// Line of the piece acting at the angle t in [0,1) (PwAffine).
    const AffinePiece& affine_piece_at(const Quad& t) const;

    /// Canonical lift value F(x), exact (PwAffine only).
    Quad lift_value(const Quad& x) const;
    /// Functional inverse of the canonical lift, exact (PwAffine only).
    Quad lift_inverse_value(const Quad& y) const;

    /// Certified lift enclosures (PwAffine or Numeric).
    QInterval lift_enclosure(const Rat& x, const Rat& width) const;
    QInterval inverse_lift_enclosure(const Rat& y, const Rat& width) const;

    std::string str() const;

private:
    PiecewiseMap() = default;
    Universe universe_ = Universe::PwAffine;
    // PwAffine: breaks_[0] = 0 always; piece i on [breaks_[i], breaks_[i+1]].
    std::vector<Quad> abreaks_;
    std::vector<AffinePiece> apieces_;
    // PwMoebius: breaks in cut order (inf first when present); piece i on
    // the cyclic arc [mbreaks_[i], mbreaks_[i+1 mod k]).
    std::vector<CirclePoint> mbreaks_;
    std::vector<MoebiusMap> mpieces_;
    // Numeric.
    LiftOracle lift_;
    LiftOracle inv_lift_;

    friend PiecewiseMap pw_inverse(const PiecewiseMap& f);
    friend PiecewiseMap pw_compose(const PiecewiseMap& f, const PiecewiseMap& g);
};

/// f(x); exact in, exact out for exact universes. Numeric maps and enclosure
/// inputs give enclosures of width about `precision`.
CirclePoint pw_evaluate(const PiecewiseMap& f, const CirclePoint& x,
                        const Rat& precision = Rat(1, 1 << 30));

/// Composition f after g. Exact within a universe; one Numeric operand
/// embeds the other. PwAffine with PwMoebius is rejected (UniverseMismatch).
PiecewiseMap pw_compose(const PiecewiseMap& f, const PiecewiseMap& g);
PiecewiseMap pw_inverse(const PiecewiseMap& f);
PiecewiseMap pw_power(const PiecewiseMap& f, long n);

/// Decidable map equality on exact normal forms; Numeric throws Undecidable.
bool pw_equal(const PiecewiseMap& f, const PiecewiseMap& g);

/// Freely reduced word in abstract generators.
struct Letter {
    int gen;
    int exp;  // +1 or -1
    friend bool operator==(const Letter&, const Letter&) = default;
};

class GroupWord {
public:
    GroupWord() = default;
    explicit GroupWord(std::vector<Letter> letters);  // freely reduces

    const std::vector<Letter>& letters() const { return letters_; }
    size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    GroupWord append(const Letter& l) const;  // reduced product w * l
    GroupWord inverse() const;
    std::string str(const std::vector<std::string>& names) const;

    friend bool operator==(const GroupWord&, const GroupWord&) = default;

private:
    std::vector<Letter> letters_;
};

/// Product of the letters left to right: [l1, l2, ...] gives m1 o m2 o ...
/// (rightmost letter acts first). Empty word gives the identity.
PiecewiseMap word_to_map(const std::vector<PiecewiseMap>& gens, const GroupWord& w);

/// F^n(x) for the canonical lift, exact (PwAffine; n may be negative).
Quad lift_iterate(const PiecewiseMap& f, const Quad& x, long n);

/// Certified enclosure of F^n(x) (PwAffine or Numeric).
QInterval lift_iterate_enclosure(const PiecewiseMap& f, const Rat& x, long n,
                                 const Rat& width);

/// Embed an exact map into the Numeric universe (Angle chart): PwAffine
/// directly, PwMoebius through the fixed chart conversion with certified
/// enclosures and exact cut bookkeeping.
PiecewiseMap embed_numeric(const PiecewiseMap& f);

// Metric layer ---------------------------------------------------------

/// Enclosure of sup_x d(f(x), g(x)) of width <= tol, d the arc distance on
/// the Angle chart. Exact PwAffine pairs are computed exactly (the sup is a
/// breakpoint value or 1/2); anything else goes through certified lifts.
QInterval distance_inf(const PiecewiseMap& f, const PiecewiseMap& g, const Rat& tol);

/// d_inf(f,g) + d_inf(f^-1, g^-1), width <= 2*tol.
QInterval distance_c0(const PiecewiseMap& f, const PiecewiseMap& g, const Rat& tol);

/// True iff f(x) lies strictly between x and its antipode for every x (in
/// the optional arc, else everywhere). Exact for exact universes; Numeric
/// certifies by subdivision and throws Indeterminate on boundary cases.
bool is_positive(const PiecewiseMap& f,
                 const std::optional<CircleInterval>& on = std::nullopt);

}  // namespace circlelab
