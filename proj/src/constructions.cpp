#include "circlelab/constructions.hpp"

#include "circlelab/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>

namespace circlelab {

namespace {

// Prime exponent vector of a positive rational (denominator primes count
// negatively). Trial division is plenty at desk scale.
std::map<Int, long> prime_exponents(const Rat& r) {
    std::map<Int, long> e;
    auto add = [&e](Int v, long sign) {
        for (Int p = 2; p * p <= v; ++p) {
            while (v % p == 0) {
                e[p] += sign;
                v /= p;
            }
        }
        if (v > 1) e[v] += sign;
    };
    add(num(r), 1);
    add(den(r), -1);
    for (auto it = e.begin(); it != e.end();) {
        it = it->second == 0 ? e.erase(it) : std::next(it);
    }
    return e;
}

// lambda^a = mu^b has a nontrivial integer solution iff the two prime
// exponent vectors are linearly dependent over Q, i.e. all 2x2 minors
// vanish.
bool multiplicatively_dependent(const Rat& lambda, const Rat& mu) {
    const std::map<Int, long> e = prime_exponents(lambda);
    const std::map<Int, long> f = prime_exponents(mu);
    auto at = [](const std::map<Int, long>& v, const Int& p) {
        auto it = v.find(p);
        return it == v.end() ? 0L : it->second;
    };
    std::map<Int, long> all = e;
    all.insert(f.begin(), f.end());
    for (auto p = all.begin(); p != all.end(); ++p) {
        for (auto q = std::next(p); q != all.end(); ++q) {
            if (at(e, p->first) * at(f, q->first) != at(e, q->first) * at(f, p->first)) {
                return false;
            }
        }
    }
    return true;
}

void require_relation(bool holds, const char* relation) {
    if (!holds) {
        throw DomainError(std::string("presentation relation failed: ") + relation);
    }
}

}  // namespace

TwoScalingsGroup build_two_scalings_group(const Rat& lambda, const Rat& mu) {
    if (lambda <= 1 || mu <= 1) {
        throw WrongInput("scaling factors must be rationals > 1");
    }
    if (multiplicatively_dependent(lambda, mu)) {
        throw DependentParameters("lambda^a = mu^b has a nontrivial solution: " +
                                  format_rational(lambda) + ", " + format_rational(mu));
    }

    const MoebiusMap above = MoebiusMap::scaling(Quad(lambda));
    const MoebiusMap below = MoebiusMap::scaling(Quad(mu));
    const CirclePoint zero = CirclePoint::projective(Quad(Rat(0)));
    PiecewiseMap f =
        PiecewiseMap::moebius({CirclePoint::infinity(), zero}, {below, above});
    PiecewiseMap R = PiecewiseMap::single_moebius(MoebiusMap::half_turn());
    PiecewiseMap g = pw_compose(pw_compose(R, f), R);

    require_relation(pw_equal(pw_compose(R, R), PiecewiseMap::identity(Universe::PwMoebius)),
                     "R^2 = 1");
    require_relation(pw_equal(pw_compose(pw_compose(R, f), R), g), "R f R = g");
    require_relation(pw_equal(pw_compose(f, g), pw_compose(g, f)), "f g = g f");

    return TwoScalingsGroup{lambda, mu, std::move(f), std::move(g), std::move(R),
                            {"R^2 = 1", "R f R = g", "f g = g f"}};
}

std::array<std::array<long, 2>, 2> involution_action_matrix(const PiecewiseMap& f,
                                                            const PiecewiseMap& g,
                                                            const PiecewiseMap& involution,
                                                            long exponent_bound) {
    if (exponent_bound < 1) {
        throw WrongInput("exponent bound must be >= 1");
    }
    const PiecewiseMap inv = pw_inverse(involution);
    std::array<std::array<long, 2>, 2> m{};
    const PiecewiseMap* basis[2] = {&f, &g};
    for (int j = 0; j < 2; ++j) {
        const PiecewiseMap conj = pw_compose(pw_compose(involution, *basis[j]), inv);
        bool found = false;
        for (long a = -exponent_bound; a <= exponent_bound && !found; ++a) {
            for (long b = -exponent_bound; b <= exponent_bound && !found; ++b) {
                if (pw_equal(conj, pw_compose(pw_power(f, a), pw_power(g, b)))) {
                    m[0][j] = a;
                    m[1][j] = b;
                    found = true;
                }
            }
        }
        if (!found) {
            throw BasisFailure("conjugate of a basis element is not expressible in the "
                               "basis within the exponent bound");
        }
    }
    return m;
}

std::array<std::array<long, 2>, 2> involution_action_matrix(const TwoScalingsGroup& G) {
    return involution_action_matrix(G.f, G.g, G.half_turn);
}

std::vector<PiecewiseMap> ParabolicRotationGroup::generators() const {
    return {embed_numeric(t_alpha), embed_numeric(t_beta), embed_numeric(rotation)};
}

namespace {

// One syllable of a normal-form word of Z^2 * Z/q: either a nontrivial
// translation part t_alpha^a t_beta^b or a nonzero rotation power k.
struct Syllable {
    bool is_rot;
    long a = 0;
    long b = 0;
    long k = 0;

    long weight() const { return is_rot ? std::abs(k) : std::abs(a) + std::abs(b); }
};

GroupWord syllables_to_word(const std::vector<Syllable>& word) {
    std::vector<Letter> letters;
    auto push = [&letters](int gen, long count) {
        const int sign = count < 0 ? -1 : 1;
        for (long i = 0; i < std::abs(count); ++i) letters.push_back({gen, sign});
    };
    for (const Syllable& s : word) {
        if (s.is_rot) {
            push(2, s.k);
        } else {
            push(0, s.a);
            push(1, s.b);
        }
    }
    return GroupWord(std::move(letters));
}

// All alternating syllable sequences of total weight in [1, budget]; the
// rotation power is confined to the balanced residues mod the rotation's
// order q so that each group element of the free factor appears once.
std::vector<std::vector<Syllable>> normal_form_words(long budget, long q) {
    std::vector<std::vector<Syllable>> out;
    const long k_max = std::min(budget, q / 2);
    std::vector<Syllable> current;
    auto rec = [&](auto&& self, long left, bool allow_t, bool allow_rot) -> void {
        if (!current.empty()) out.push_back(current);
        if (allow_t) {
            for (long a = -left; a <= left; ++a) {
                for (long b = -(left - std::abs(a)); b <= left - std::abs(a); ++b) {
                    if (a == 0 && b == 0) continue;
                    current.push_back({false, a, b, 0});
                    self(self, left - std::abs(a) - std::abs(b), false, true);
                    current.pop_back();
                }
            }
        }
        if (allow_rot) {
            for (long k = -std::min(left, k_max); k <= std::min(left, k_max); ++k) {
                if (k == 0 || 2 * k == -q) continue;  // balanced residues only
                current.push_back({true, 0, 0, k});
                self(self, left - std::abs(k), true, false);
                current.pop_back();
            }
        }
    };
    rec(rec, budget, true, true);
    return out;
}

bool excludes_integers(const QInterval& d) { return Rat(rat_floor(d.hi)) < d.lo; }

// Certifies w(x) != x by finding an enclosure of the lift displacement that
// misses every integer.
bool certified_moves(const PiecewiseMap& w, const Rat& x) {
    Rat width(1, 1 << 12);
    for (int attempt = 0; attempt < 4; ++attempt) {
        const QInterval d = w.lift_enclosure(x, width) - x;
        if (excludes_integers(d)) return true;
        width /= 4096;
    }
    return false;
}

}  // namespace

ParabolicRotationGroup build_parabolic_rotation_group(const Quad& translation,
                                                      const Rat& rho, long depth,
                                                      const BlowUpSpec& blow) {
    if (translation.is_rational()) {
        throw WrongInput("parabolic translation lengths 1 and t generate rank 1 when t "
                         "is rational; need a quadratic irrational");
    }
    const Rat angle = rat_frac(rho);
    if (angle == 0) {
        throw WrongInput("rotation angle must not be an integer");
    }
    if (depth < 1) {
        throw WrongInput("word ball depth must be >= 1");
    }

    ParabolicRotationGroup G{
        translation,
        angle,
        PiecewiseMap::single_moebius(MoebiusMap::translation(Quad(Rat(1)))),
        PiecewiseMap::single_moebius(MoebiusMap::translation(translation)),
        PiecewiseMap::rigid_rotation(Quad(angle)),
        depth,
        0,
        {},
        false,
        [&] {
            BlowUpSpec spec = blow;
            spec.interior = BlowUpSpec::Interior::Translation;
            spec.translation = Quad(Rat(1));
            return denjoy_blowup(
                PiecewiseMap::single_moebius(MoebiusMap::translation(Quad(Rat(1)))),
                CirclePoint::infinity(), spec);
        }(),
        {}};

    const long q = static_cast<long>(den(angle));
    // Angle 1/2 is exactly the projective half-turn, so that case stays in
    // the exact PwMoebius universe and words are decided outright.
    const bool exact_rotation = angle == Rat(1, 2);
    const std::vector<PiecewiseMap> gens =
        exact_rotation
            ? std::vector<PiecewiseMap>{G.t_alpha, G.t_beta,
                                        PiecewiseMap::single_moebius(MoebiusMap::half_turn())}
            : G.generators();
    for (const std::vector<Syllable>& word : normal_form_words(depth, q)) {
        ++G.words_checked;
        if (word.size() == 1 && !word.front().is_rot) {
            // Pure translation part: t_alpha^a t_beta^b translates by
            // a + b*t, nonzero exactly because t is irrational. It fixes
            // infinity and belongs to the stabilizer by construction.
            G.stabilizer_words.push_back(syllables_to_word(word));
            continue;
        }
        const GroupWord w = syllables_to_word(word);
        const PiecewiseMap map = word_to_map(gens, w);
        if (exact_rotation) {
            if (map.is_identity()) {
                throw BadRho("word acts trivially: " + w.str({"a", "b", "r"}));
            }
            if (pw_evaluate(map, CirclePoint::infinity()).is_infinity()) {
                throw BadRho("word fixing infinity outside the translation subgroup: " +
                             w.str({"a", "b", "r"}));
            }
            continue;
        }
        // Infinity sits at angle 0; a certified displacement there shows
        // both nontriviality and that the word is outside the stabilizer.
        if (certified_moves(map, Rat(0))) continue;
        bool nontrivial = false;
        for (long i = 1; i < 8 && !nontrivial; ++i) {
            nontrivial = certified_moves(map, Rat(i, 8));
        }
        throw BadRho(std::string(nontrivial ? "word fixing infinity outside the "
                                              "translation subgroup"
                                            : "word not certified nontrivial") +
                     ": " + w.str({"a", "b", "r"}));
    }
    G.stabilizer_is_translations = true;

    G.blown_alpha_fixed = fixed_points_report(G.blown_alpha.blown, Rat(1, 1024));
    const bool two_parabolic =
        G.blown_alpha_fixed.count() == 2 && !G.blown_alpha_fixed.has_fixed_arc() &&
        (G.blown_alpha_fixed.points[0].nature == LocalNature::ParabolicAboveBoth ||
         G.blown_alpha_fixed.points[0].nature == LocalNature::ParabolicBelowBoth) &&
        G.blown_alpha_fixed.points[0].nature == G.blown_alpha_fixed.points[1].nature;
    if (!two_parabolic) {
        throw DomainError("blown-up translation does not show the expected pair of "
                          "parabolic endpoints");
    }
    return G;
}

}  // namespace circlelab
