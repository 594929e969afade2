#include "circlelab/random_maps.hpp"

#include "circlelab/errors.hpp"

#include <algorithm>
#include <vector>

namespace circlelab {

namespace {

std::vector<int> distinct_sorted_ticks(std::mt19937& rng, int count, int denom) {
    std::uniform_int_distribution<int> tick(0, denom - 1);
    std::vector<int> t;
    while (static_cast<int>(t.size()) < count) {
        int v = tick(rng);
        if (std::find(t.begin(), t.end(), v) == t.end()) t.push_back(v);
    }
    std::sort(t.begin(), t.end());
    return t;
}

PiecewiseMap interpolate(const std::vector<Quad>& xs, const std::vector<Quad>& ys) {
    std::vector<AffinePiece> lines;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        Quad slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        lines.push_back({slope, ys[i] - slope * xs[i]});
    }
    return PiecewiseMap::affine(xs, lines);
}

}  // namespace

PiecewiseMap random_pw_affine(std::mt19937& rng, int max_pieces, int denom) {
    if (max_pieces < 1 || denom < 2 * max_pieces) {
        throw WrongInput("need max_pieces >= 1 and denom >= 2*max_pieces");
    }
    std::uniform_int_distribution<int> count(1, max_pieces);
    std::uniform_int_distribution<int> tick(0, denom - 1);
    const int k = count(rng);
    std::vector<int> bs = distinct_sorted_ticks(rng, k, denom);
    std::vector<int> vs = distinct_sorted_ticks(rng, k, denom);
    // Anchor the cuts at 0 so they span [0,1]; values get a random offset.
    const int shift = bs[0];
    const int voff = tick(rng);
    std::vector<Quad> cuts, vals;
    for (int i = 0; i < k; ++i) {
        cuts.emplace_back(Rat(bs[i] - shift, denom));
        vals.emplace_back(Rat(vs[i] + voff, denom));
    }
    cuts.emplace_back(Rat(1));
    vals.push_back(vals[0] + Quad(Rat(1)));
    return interpolate(cuts, vals);
}

MoebiusMap random_moebius(std::mt19937& rng, int range) {
    if (range < 1) throw WrongInput("range must be >= 1");
    std::uniform_int_distribution<long> coef(-range, range);
    for (;;) {
        long a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
        if (a * d - b * c > 0) {
            return MoebiusMap(Quad(Rat(a)), Quad(Rat(b)), Quad(Rat(c)), Quad(Rat(d)));
        }
    }
}

PiecewiseMap random_positive_below(std::mt19937& rng, const Rat& delta) {
    if (delta <= 0) throw WrongInput("delta must be positive");
    // Displacements live in (e/8, e/4) with e <= 1/2, so the map is
    // positive, the lift stays increasing across cut gaps >= 1/16, and
    // d_C0 to the identity is at most twice the sup displacement < delta.
    const Rat e = std::min(delta, Rat(1, 2));
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_int_distribution<int> numer(9, 15);  // of 64ths of e
    const int k = count(rng);
    std::vector<int> bs = distinct_sorted_ticks(rng, k, 16);
    std::vector<Quad> cuts, vals;
    std::vector<Rat> disp;
    for (int i = 0; i < k; ++i) disp.push_back(e * Rat(numer(rng), 64));
    const int shift = bs[0];
    for (int i = 0; i < k; ++i) {
        cuts.emplace_back(Rat(bs[i] - shift, 16));
        vals.push_back(cuts.back() + Quad(disp[i]));
    }
    cuts.emplace_back(Rat(1));
    vals.push_back(vals[0] + Quad(Rat(1)));
    return interpolate(cuts, vals);
}

}  // namespace circlelab
