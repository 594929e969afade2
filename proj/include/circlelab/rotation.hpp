#pragma once

#include "circlelab/moebius.hpp"
#include "circlelab/piecewise.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace circlelab {

/// Rotation number outcome: an exact rational certified by a periodic point
/// (a point x whose canonical lift satisfies F^q(x) = x + p), or a Farey
/// interval (a/b, c/d) with bc - ad = 1 known to contain the value.
struct RotResult {
    enum class Kind { ExactRational, Enclosure };

    Kind kind = Kind::ExactRational;
    Rat value;                               // reduced p/q (ExactRational)
    std::optional<CirclePoint> certificate;  // periodic point (ExactRational)
    Rat lo, hi;                              // Farey neighbors (Enclosure)

    bool is_exact() const { return kind == Kind::ExactRational; }
    /// Point interval {value} or [lo, hi].
    QInterval interval() const;
    std::string str() const;
};

enum class RotOrder { Less, Equal, Greater };

struct RotCompare {
    RotOrder order;
    std::optional<CirclePoint> certificate;  // periodic point, Equal only
};

/// Exact trichotomy between the rotation number of f and p/q (gcd(p,q)=1):
/// analyzes h(x) = F^q(x) - x - p piece-exactly. Equal comes with a periodic
/// point that re-verifies. Numeric maps get certified enclosure answers and
/// throw Indeterminate when the global sign cannot be resolved in budget.
RotCompare compare_rot(const PiecewiseMap& f, const Int& p, const Int& q);

/// Stern-Brocot walk on Farey intervals: tests mediants with compare_rot
/// until Equal, or until the mediant denominator would exceed q_cap (then
/// returns the current Farey enclosure, width <= 1/(b*d)). Rigid rotations
/// with rational angle short-circuit to the exact answer.
RotResult rotation_number(const PiecewiseMap& f, const Int& q_cap = 10000);

/// Rotation number of the circle action of an elliptic element: exact
/// rational for finite order <= 24 (and whenever the Farey walk certifies a
/// periodic point), else an enclosure of width <= tol.
RotResult elliptic_rotation_number(const MoebiusMap& m, const Rat& tol);

/// Outcome of composing a finite-order map f (rot p/q, f^q = id) with a
/// positive map g close to the identity.
struct PerturbationResult {
    RotResult rot_result;  // rotation number of gf
    bool dc0_ok;           // d_C0(f, gf) < eps, certified
    /// The displacement bound (GF)^q(x) - x - p in (0, 1/q^2) for all x;
    /// false means the perturbation was too large for the target interval
    /// (p/q, p/q + 1/q^3] to be guaranteed.
    bool hypothesis_ok;
};

PerturbationResult perturbation_step(const PiecewiseMap& f, const PiecewiseMap& g,
                                     const Rat& eps);

/// Family of positive test maps: each generator takes the distance budget
/// delta and must return a positive map with d_C0(g, id) < delta.
using MapBattery = std::vector<std::function<PiecewiseMap(const Rat& delta)>>;

/// Halves delta starting from eps until perturbation_step succeeds (close,
/// hypothesis holds, rotation number lands in (p/q, p/q + 1/q^3]) for the
/// witness rotation R_{delta/2} and every battery map. Requires f of finite
/// order q >= 2.
Rat delta_search(const PiecewiseMap& f, const Rat& eps,
                 const MapBattery& battery = {});

/// The interval (p/q, p/q + 1/q^2); width exactly 1/q^2.
struct DirichletInterval {
    Int p;
    Int q;

    Rat lo() const { return Rat(p) / Rat(q); }
    Rat hi() const { return Rat(p) / Rat(q) + Rat(1) / Rat(q * q); }
    Rat width() const { return Rat(1) / Rat(q * q); }
    bool contains(const DirichletInterval& inner) const {
        return inner.lo() >= lo() && inner.hi() <= hi();
    }
};

struct TraceStep {
    long n = 0;
    std::string map;  // descriptor of h_n
    Int p;            // rot(h_n) = p/q, exact
    Int q;
    Rat delta;        // distance budget used to pick g_n (0 on the last row)
    DirichletInterval interval;
};

struct IterationTrace {
    std::vector<TraceStep> steps;
    long threshold = 0;  // growth of q is enforced once q exceeds this
};

/// Source of positive maps: supply(delta, n) must return a positive map
/// with d_C0(g, id) < delta.
using MapSupply = std::function<PiecewiseMap(const Rat& delta, long step)>;

/// Iterates h_{n+1} = g_n h_n with g_n drawn from the supply inside the
/// delta_search budget; verifies at each step that rot(h_{n+1}) lands in
/// (p_n/q_n, p_n/q_n + 1/q_n^3], that the denominators grow, that the
/// Dirichlet intervals nest, and that h_{n+1} stays positive. Violations
/// raise TraceInvalid; a bad supply draw raises SupplyError.
IterationTrace irrational_scheme(const PiecewiseMap& h0, const MapSupply& supply,
                                 long steps, long threshold);

/// Re-verifies the growth and nesting claims of a trace from its raw
/// (p_n, q_n) data alone, exactly.
bool dirichlet_nesting_check(const IterationTrace& trace);

}  // namespace circlelab
