#pragma once

#include "circlelab/analysis.hpp"
#include "circlelab/piecewise.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace circlelab {

/// How to blow an orbit up into intervals: the interval inserted at the
/// n-th orbit point gets length scale * ratio^|n| (geometric, summable), or
/// the uniform length when set. The interior of an inserted interval is
/// crossed either affinely or by a translation conjugated into (0,1) via
/// s(t) = (1 + t/(1+|t|))/2 (used when the blown point is fixed).
struct BlowUpSpec {
    Rat scale = Rat(1, 4);
    Rat ratio = Rat(1, 2);
    std::optional<Rat> uniform_length;

    enum class Interior { Affine, Translation };
    Interior interior = Interior::Affine;
    Quad translation{Rat(0)};  // translation amount in Translation mode

    long depth_cap = 48;  // orbit enumeration bound for infinite orbits
};

/// One inserted interval, in the coordinates of the blown-up circle.
struct GapInfo {
    long index;       // orbit index of the blown point
    QInterval where;  // enclosure of the inserted interval
    Rat length;       // exact normalized length
};

struct OrbitTable;  // internal insertion bookkeeping

/// Result of blowing an orbit up: the blown map (exact piecewise-affine for
/// finite periodic orbits of exact maps, certified-numeric otherwise), the
/// original map, and a monotone degree-one collapse lift semi-conjugating
/// blown back to base: collapse(blown(y)) = base(collapse(y)).
class BlowUpMap {
public:
    BlowUpMap(PiecewiseMap blown_map, PiecewiseMap base_map, LiftOracle collapse_lift,
              bool is_exact, std::shared_ptr<OrbitTable> table);

    PiecewiseMap blown;
    PiecewiseMap base;
    LiftOracle collapse;
    bool exact = false;

    /// The largest inserted intervals, longest first.
    std::vector<GapInfo> gaps(long count, const Rat& width = Rat(1, 4096)) const;

private:
    std::shared_ptr<OrbitTable> table_;
};

/// Blows up the orbit of p under f. Finite periodic orbits of exact
/// angle-chart maps give an exact piecewise-affine result; infinite orbits
/// (exact maps only) and fixed points (any map, Translation interior) give
/// certified numeric maps whose precision is limited by depth_cap tail
/// bounds (PrecisionUnreachable beyond them). Zero lengths collapse to the
/// original map with the identity as collapse.
BlowUpMap denjoy_blowup(const PiecewiseMap& f, const CirclePoint& p,
                        const BlowUpSpec& spec = {});

struct SemiConjugacyReport {
    bool ok = true;
    long samples = 0;
    Rat worst = Rat(0);          // largest certified defect bound seen
    std::optional<Rat> witness;  // first sample violating the claim
};

/// Certifies |collapse(blown(y)) - base(collapse(y))| <= eps at the given
/// equispaced samples, together with monotonicity and degree one of the
/// collapse lift along them.
SemiConjugacyReport semiconjugacy_check(const BlowUpMap& b, long samples, const Rat& eps);

/// Counts certified sign changes of blown^q(x) - g(x) near the largest
/// inserted intervals, q a return time read off the rotation number (the
/// closest return within q_cap). Each gap contributes its crossings to the
/// report; Indeterminate when the signs cannot be certified.
CrossingReport gap_crossing_probe(const BlowUpMap& b, const PiecewiseMap& g,
                                  long n_gaps, long q_cap = 40);

}  // namespace circlelab
