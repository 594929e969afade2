#include "circlelab/blowup.hpp"

#include "circlelab/errors.hpp"
#include "circlelab/rotation.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace circlelab {

namespace {

Rat rat_pow(const Rat& r, long k) {
    Rat out(1);
    for (long i = 0; i < k; ++i) out = Rat(out * r);
    return out;
}

long floor_div_long(long a, long b) {
    long q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Interval with exact quadratic endpoints, used while positions still live
/// in the orbit's number field.
struct QIv {
    Quad lo, hi;
};

}  // namespace

/// The enumerated window of the blown orbit: points sorted on the circle,
/// their inserted lengths, exact prefix sums of those lengths, and a tail
/// bound covering every insertion not yet enumerated. Positions on the
/// blown-up circle are x + (insertions strictly below x), divided by T.
struct OrbitTable {
    explicit OrbitTable(PiecewiseMap base_map) : base(std::move(base_map)) {}

    PiecewiseMap base;  // angle-chart map the blow-up acts on
    bool base_exact = false;
    bool finite = false;
    long period = 0;  // finite orbits only
    Quad p{Rat(0)};
    Rat c{0}, r{0};
    std::optional<Rat> uniform;
    long cap = 48;
    BlowUpSpec::Interior interior = BlowUpSpec::Interior::Affine;
    Quad tau{Rat(0)};

    Rat total_len{0};  // sum of all inserted lengths (exact limit)
    Rat T{1};          // 1 + total_len

    long D = -1;              // enumerated window |n| <= D (infinite orbits)
    std::vector<Quad> z;      // sorted points in [0,1)
    std::vector<Rat> len;     // matching inserted lengths
    std::vector<long> idx;    // orbit index of z[j]
    std::vector<Rat> prefix;  // prefix[j] = len[0] + ... + len[j-1]
    Rat tail{0};              // total_len minus the enumerated lengths

    std::map<long, Quad> pts;  // orbit cache n -> angle in [0,1)

    Quad point(long n) {
        if (finite) n = ((n % period) + period) % period;
        auto it = pts.find(n);
        if (it != pts.end()) return it->second;
        if (!base_exact) throw PrecisionUnreachable("orbit extension needs an exact map");
        Quad v = n > 0 ? quad_frac(base.lift_value(point(n - 1)))
                       : quad_frac(base.lift_inverse_value(point(n + 1)));
        pts.emplace(n, v);
        return v;
    }

    Rat length_of(long n) const {
        if (uniform) return *uniform;
        return Rat(c * rat_pow(r, n >= 0 ? n : -n));
    }

    void ensure(long depth) {
        if (finite) {
            if (!z.empty()) return;
        } else {
            depth = std::min(depth, cap);
            if (depth <= D) return;
            D = depth;
        }
        long lo = finite ? 0 : -D;
        long hi = finite ? period - 1 : D;
        std::vector<std::pair<Quad, long>> items;
        for (long n = lo; n <= hi; ++n) items.emplace_back(point(n), n);
        std::sort(items.begin(), items.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        z.clear();
        len.clear();
        idx.clear();
        prefix.assign(1, Rat(0));
        for (auto& [v, n] : items) {
            if (!z.empty() && z.back() == v) {
                throw WrongInput("blown orbit points collide within the window");
            }
            z.push_back(v);
            idx.push_back(n);
            len.push_back(length_of(n));
            prefix.push_back(Rat(prefix.back() + len.back()));
        }
        tail = Rat(total_len - prefix.back());
    }

    size_t count_below(const Quad& x) const {
        return static_cast<size_t>(std::lower_bound(z.begin(), z.end(), x) - z.begin());
    }

    long sorted_index(const Quad& v) const {
        auto it = std::lower_bound(z.begin(), z.end(), v);
        if (it != z.end() && *it == v) return it - z.begin();
        return -1;
    }
};

namespace {

Quad exact_step(const PiecewiseMap& base, const Quad& x, int dir) {
    return dir > 0 ? base.lift_value(x) : base.lift_inverse_value(x);
}

QInterval numeric_step(const PiecewiseMap& base, const Rat& x, int dir, const Rat& w) {
    return dir > 0 ? base.lift_enclosure(x, w) : base.inverse_lift_enclosure(x, w);
}

/// Lower bound on the blown-up position of an image value v known to be the
/// image of a point strictly inside a complementary piece. Such an image
/// never equals an orbit point, so when v sits exactly on one (an endpoint
/// of the probed x-interval) the right limit applies and the whole inserted
/// interval lies below.
Quad gap_image_lo(const OrbitTable& t, const Quad& v) {
    Int k = quad_floor(v);
    Quad zf = v - Quad(Rat(k));
    Rat extra(0);
    long j = t.sorted_index(zf);
    if (j >= 0) extra = t.len[static_cast<size_t>(j)];
    return zf + Quad(Rat(t.prefix[t.count_below(zf)] + extra)) + Quad(Rat(k) * t.T);
}

/// Matching upper bound: the left limit, plus the tail of insertions not yet
/// enumerated.
Quad gap_image_hi(const OrbitTable& t, const Quad& v) {
    Int k = quad_floor(v);
    Quad zf = v - Quad(Rat(k));
    return zf + Quad(Rat(t.prefix[t.count_below(zf)] + t.tail)) + Quad(Rat(k) * t.T);
}

/// Monotone interior crossing of an inserted interval: the identity in
/// Affine mode, the translation by tau conjugated through
/// s(t) = (1 + t/(1+|t|))/2 in Translation mode (endpoints stay fixed).
Quad interior_value(const OrbitTable& t, const Quad& v, int dir) {
    if (t.interior == BlowUpSpec::Interior::Affine) return v;
    if (v.sign() <= 0) return Quad(Rat(0));
    if (!(v < Quad(Rat(1)))) return Quad(Rat(1));
    Quad one{Rat(1)};
    Quad s = Quad(Rat(2)) * v - one;
    Quad as = s.sign() < 0 ? -s : s;
    Quad u = s / (one - as);
    Quad u2 = dir > 0 ? u + t.tau : u - t.tau;
    Quad au2 = u2.sign() < 0 ? -u2 : u2;
    Quad s2 = u2 / (one + au2);
    return (one + s2) / Quad(Rat(2));
}

/// Blown-up image of the plateau of z[j] at relative heights rel in [0,1].
QIv plateau_result(OrbitTable& t, size_t j, const QIv& rel, int dir, const Rat& wf) {
    long n = t.idx[j];
    long n2 = t.finite ? ((n + dir) % t.period + t.period) % t.period : n + dir;

    QIv r2{interior_value(t, rel.lo, dir), interior_value(t, rel.hi, dir)};

    Quad a2lo{Rat(0)};
    Rat len2(0);
    Quad v{Rat(0)};
    if (t.finite || (n2 >= -t.D && n2 <= t.D)) {
        v = t.point(n2);
        long j2 = t.sorted_index(v);
        a2lo = t.z[static_cast<size_t>(j2)] + Quad(t.prefix[static_cast<size_t>(j2)]);
        len2 = t.len[static_cast<size_t>(j2)];
    } else {
        v = t.point(n2);  // beyond the window: position known up to the tail
        a2lo = v + Quad(t.prefix[t.count_below(v)]);
        len2 = t.length_of(n2);
    }

    Int k;
    if (t.base_exact) {
        k = quad_floor(exact_step(t.base, t.z[j], dir));
    } else {
        if (!t.z[j].is_rational() || !v.is_rational()) {
            throw PrecisionUnreachable("numeric blow-ups need a rational blown angle");
        }
        QInterval li =
            numeric_step(t.base, t.z[j].as_rational(), dir, std::min(wf, Rat(1, 1024)));
        k = rat_floor(Rat(li.mid() - v.as_rational() + Rat(1, 2)));
    }
    Quad kT{Rat(k) * t.T};
    return {a2lo + Quad(len2) * r2.lo + kT,
            a2lo + Quad(t.tail) + Quad(len2) * r2.hi + kT};
}

/// Blown-up image of the complementary piece following the plateau of z[j],
/// probed at blow-up coordinate Y (times T, one lift period of the table).
QIv gap_result(OrbitTable& t, size_t j, const Rat& Y, int dir, const Rat& wf) {
    Rat pre = t.prefix[j + 1];
    Rat xlo = Rat(Y - pre - t.tail);
    Rat xhi = Rat(Y - pre);
    Quad zlo{Rat(0)}, zhi{Rat(0)};
    if (t.base_exact) {
        zlo = exact_step(t.base, Quad(xlo), dir);
        zhi = exact_step(t.base, Quad(xhi), dir);
    } else {
        zlo = Quad(numeric_step(t.base, xlo, dir, wf).lo);
        zhi = Quad(numeric_step(t.base, xhi, dir, wf).hi);
    }
    return {gap_image_lo(t, zlo), gap_image_hi(t, zhi)};
}

QIv gap_point(const OrbitTable& t, size_t j, const Rat& Y) {
    Rat pre = t.prefix[j + 1];
    return {Quad(Rat(Y - pre - t.tail)), Quad(Rat(Y - pre))};
}

/// Value (blown lift, or collapse when collapse_mode) over every segment the
/// coordinate Y in [0, T) could lie in given the tail uncertainty.
QIv located_value(OrbitTable& t, const Rat& Y, int dir, const Rat& wf, bool collapse_mode) {
    const long d = static_cast<long>(t.z.size());
    auto alo = [&](long j) {
        return t.z[static_cast<size_t>(j)] + Quad(t.prefix[static_cast<size_t>(j)]);
    };
    auto split = [&](long e, long& j, long& k) {
        k = floor_div_long(e, d);
        j = e - k * d;
    };
    auto alo_e = [&](long e) {
        long j, k;
        split(e, j, k);
        return alo(j) + Quad(Rat(Rat(k) * t.T));
    };
    auto plat_possible = [&](long e) {
        long j, k;
        split(e, j, k);
        Quad a = alo_e(e);
        return a <= Quad(Y) && Quad(Y) <= a + Quad(Rat(t.tail + t.len[static_cast<size_t>(j)]));
    };
    auto gap_possible = [&](long e) {
        long j, k;
        split(e, j, k);
        Quad a = alo_e(e);
        Quad left = a + Quad(t.len[static_cast<size_t>(j)]);
        Quad right = alo_e(e + 1) + Quad(t.tail);
        if (!(left <= Quad(Y) && Quad(Y) <= right)) return false;
        // The preimage interval must overlap the open arc between the gap's
        // bounding orbit points; on the shared boundaries the neighboring
        // plateau owns the point and the gap hypothesis is vacuous.
        Rat yloc = Rat(Y - Rat(k) * t.T);
        Rat pre = t.prefix[static_cast<size_t>(j) + 1];
        Rat xlo = Rat(yloc - pre - t.tail);
        Rat xhi = Rat(yloc - pre);
        Quad znext = j + 1 < d ? t.z[static_cast<size_t>(j) + 1]
                               : t.z[0] + Quad(Rat(1));
        return Quad(xlo) < znext && t.z[static_cast<size_t>(j)] < Quad(xhi);
    };
    auto out_shift = [&](long k) {
        return Quad(collapse_mode ? Rat(k) : Rat(Rat(k) * t.T));
    };
    auto eval_plat = [&](long e) {
        long j, k;
        split(e, j, k);
        Rat yloc = Rat(Y - Rat(k) * t.T);
        Quad a = alo(j);
        Quad rel_lo = (Quad(yloc) - a - Quad(t.tail)) / Quad(t.len[static_cast<size_t>(j)]);
        Quad rel_hi = (Quad(yloc) - a) / Quad(t.len[static_cast<size_t>(j)]);
        if (rel_lo.sign() < 0) rel_lo = Quad(Rat(0));
        if (Quad(Rat(1)) < rel_hi) rel_hi = Quad(Rat(1));
        if (rel_hi < rel_lo) rel_hi = rel_lo;
        QIv v = collapse_mode
                    ? QIv{t.z[static_cast<size_t>(j)], t.z[static_cast<size_t>(j)]}
                    : plateau_result(t, static_cast<size_t>(j), {rel_lo, rel_hi}, dir, wf);
        Quad sh = out_shift(k);
        return QIv{v.lo + sh, v.hi + sh};
    };
    auto eval_gap = [&](long e) {
        long j, k;
        split(e, j, k);
        Rat yloc = Rat(Y - Rat(k) * t.T);
        QIv v = collapse_mode ? gap_point(t, static_cast<size_t>(j), yloc)
                              : gap_result(t, static_cast<size_t>(j), yloc, dir, wf);
        Quad sh = out_shift(k);
        return QIv{v.lo + sh, v.hi + sh};
    };

    // Starting segment: the last enumerated position at or below Y.
    long e0 = -1;
    {
        long lo = 0, hi = d;
        while (lo < hi) {
            long mid = (lo + hi) / 2;
            if (alo(mid) <= Quad(Y)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        e0 = lo - 1;
    }

    std::vector<QIv> cands;
    for (long e = e0, steps = 0; steps <= d + 1; --e, ++steps) {
        bool any = false;
        if (plat_possible(e)) {
            cands.push_back(eval_plat(e));
            any = true;
        }
        if (gap_possible(e)) {
            cands.push_back(eval_gap(e));
            any = true;
        }
        if (!any && e < e0) break;
    }
    for (long e = e0 + 1, steps = 0; steps <= d + 1; ++e, ++steps) {
        bool any = false;
        if (plat_possible(e)) {
            cands.push_back(eval_plat(e));
            any = true;
        }
        if (gap_possible(e)) {
            cands.push_back(eval_gap(e));
            any = true;
        }
        if (!any) break;
    }
    if (cands.empty()) throw PrecisionUnreachable("blow-up coordinate could not be located");
    QIv out = cands.front();
    for (const QIv& v : cands) {
        if (v.lo < out.lo) out.lo = v.lo;
        if (out.hi < v.hi) out.hi = v.hi;
    }
    return out;
}

/// Certified oracle shared by the blown lift (dir = +1), its functional
/// inverse (dir = -1), and the collapse lift (collapse_mode).
QInterval engine_eval(const std::shared_ptr<OrbitTable>& t, int dir, bool collapse_mode,
                      const Rat& y, const Rat& width) {
    if (!(width > 0)) throw WrongInput("enclosure width must be positive");
    Int m = rat_floor(y);
    Rat yf = Rat(y - Rat(m));
    long depth = t->finite ? 0 : std::max<long>(t->D, 8);
    Rat wf = Rat(width / 8);
    for (int attempt = 0; attempt < 80; ++attempt) {
        t->ensure(depth);
        Rat yc = Rat(yf * t->T);
        QIv out = located_value(*t, yc, dir, wf, collapse_mode);
        Quad olo = out.lo, ohi = out.hi;
        if (!collapse_mode) {
            olo = olo / Quad(t->T);
            ohi = ohi / Quad(t->T);
        }
        Rat bw = Rat(width / 8);
        QInterval res(quad_bracket(olo, bw).lo, quad_bracket(ohi, bw).hi);
        res = res + Rat(m);
        if (res.width() <= width) return res;
        bool progressed = false;
        if (!t->finite && depth < t->cap) {
            depth += 8;
            progressed = true;
        }
        if (!t->base_exact) {
            wf = Rat(wf / 16);
            progressed = true;
        }
        if (!progressed) {
            throw PrecisionUnreachable("blow-up depth cap reached before target width");
        }
    }
    throw PrecisionUnreachable("blow-up enclosure did not converge");
}

/// Exact piecewise-affine blown map for a finite periodic orbit of an exact
/// angle-chart map with affine interiors: plateau endpoints and the images
/// of the original breakpoints give the cuts, and the map interpolates the
/// exact blown-up lift values there.
PiecewiseMap build_finite_blown(OrbitTable& t) {
    const Rat& tt = t.T;
    long d = static_cast<long>(t.z.size());
    struct CutTarget {
        Quad cut;
        Quad target;
    };
    std::vector<CutTarget> cts;
    auto w_left = [&](const Quad& v) {
        Int k = quad_floor(v);
        Quad zf = v - Quad(Rat(k));
        return zf + Quad(t.prefix[t.count_below(zf)]) + Quad(Rat(k) * tt);
    };
    for (long j = 0; j < d; ++j) {
        size_t ju = static_cast<size_t>(j);
        Quad a = t.z[ju] + Quad(t.prefix[ju]);
        Quad fj = t.base.lift_value(t.z[ju]);
        Quad tl = w_left(fj);
        long j2 = t.sorted_index(quad_frac(fj));
        cts.push_back({a, tl});
        cts.push_back({a + Quad(t.len[ju]), tl + Quad(t.len[static_cast<size_t>(j2)])});
    }
    for (const Quad& b : t.base.affine_breaks()) {
        if (t.sorted_index(b) >= 0) continue;  // covered by the plateau cuts
        Quad cb = b + Quad(t.prefix[t.count_below(b)]);
        cts.push_back({cb, w_left(t.base.lift_value(b))});
    }
    std::sort(cts.begin(), cts.end(),
              [](const CutTarget& a, const CutTarget& b) { return a.cut < b.cut; });

    std::vector<Quad> cuts;
    std::vector<Quad> targets;
    for (const CutTarget& ct : cts) {
        cuts.push_back(ct.cut / Quad(tt));
        targets.push_back(ct.target / Quad(tt));
    }
    cuts.push_back(cuts.front() + Quad(Rat(1)));
    targets.push_back(targets.front() + Quad(Rat(1)));

    std::vector<AffinePiece> lines;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Quad slope = (targets[i + 1] - targets[i]) / (cuts[i + 1] - cuts[i]);
        Quad offset = targets[i] - slope * cuts[i];
        lines.push_back({slope, offset});
    }
    return PiecewiseMap::affine(cuts, lines);
}

}  // namespace

BlowUpMap::BlowUpMap(PiecewiseMap blown_map, PiecewiseMap base_map, LiftOracle collapse_lift,
                     bool is_exact, std::shared_ptr<OrbitTable> table)
    : blown(std::move(blown_map)),
      base(std::move(base_map)),
      collapse(std::move(collapse_lift)),
      exact(is_exact),
      table_(std::move(table)) {}

std::vector<GapInfo> BlowUpMap::gaps(long count, const Rat& width) const {
    std::vector<GapInfo> out;
    if (count <= 0 || !table_ || !(width > 0)) return out;
    OrbitTable& t = *table_;
    std::vector<long> order;
    if (t.finite) {
        t.ensure(0);
        for (long n = 0; n < t.period; ++n) order.push_back(n);
        std::stable_sort(order.begin(), order.end(),
                         [&](long a, long b) { return t.length_of(a) > t.length_of(b); });
        if (static_cast<long>(order.size()) > count) order.resize(static_cast<size_t>(count));
    } else {
        for (long i = 0; static_cast<long>(order.size()) < count; ++i) {
            order.push_back(i);
            if (i > 0 && static_cast<long>(order.size()) < count) order.push_back(-i);
        }
        long need = std::max<long>(8, (count + 1) / 2 + 2);
        t.ensure(need);
        while (t.tail > Rat(width / 2) && t.D < t.cap) t.ensure(t.D + 8);
    }
    for (long n : order) {
        long j = t.sorted_index(t.point(n));
        if (j < 0) continue;
        size_t ju = static_cast<size_t>(j);
        Quad a = t.z[ju] + Quad(t.prefix[ju]);
        Rat ln = t.len[ju];
        Rat bw = Rat(width / 4);
        QInterval where(quad_bracket(a / Quad(t.T), bw).lo,
                        quad_bracket((a + Quad(Rat(t.tail + ln))) / Quad(t.T), bw).hi);
        out.push_back({n, where, Rat(ln / t.T)});
    }
    return out;
}

BlowUpMap denjoy_blowup(const PiecewiseMap& f, const CirclePoint& p, const BlowUpSpec& spec) {
    if (spec.scale < 0 || (spec.uniform_length && *spec.uniform_length < 0)) {
        throw WrongInput("inserted lengths must be nonnegative");
    }
    if (!(spec.ratio > 0) || !(spec.ratio < 1)) throw WrongInput("ratio must lie in (0,1)");
    if (spec.depth_cap < 1) throw WrongInput("depth cap must be positive");
    if (!p.is_exact()) throw WrongInput("the blown point must be exact");

    PiecewiseMap base = f.chart() == Chart::Angle ? f : embed_numeric(f);
    Quad theta{Rat(0)};
    if (p.chart() == Chart::Angle) {
        theta = p.exact();
    } else if (p.is_infinity()) {
        theta = Quad(Rat(0));
    } else {
        throw WrongInput("projective blow-up points must be infinity");
    }

    bool zero = spec.uniform_length ? (*spec.uniform_length == 0) : (spec.scale == 0);
    if (zero) {
        LiftOracle ident = [](const Rat& y, const Rat&) { return QInterval(y); };
        return BlowUpMap(base, base, std::move(ident),
                         base.universe() != Universe::Numeric, nullptr);
    }

    bool base_exact = base.universe() == Universe::PwAffine;
    auto t = std::make_shared<OrbitTable>(base);
    t->base_exact = base_exact;
    t->p = quad_frac(theta);
    t->c = spec.scale;
    t->r = spec.ratio;
    t->uniform = spec.uniform_length;
    t->cap = spec.depth_cap;
    t->interior = spec.interior;
    t->tau = spec.translation;
    t->pts.emplace(0, t->p);

    if (spec.interior == BlowUpSpec::Interior::Translation) {
        if (!t->p.is_rational()) throw WrongInput("Translation interiors need a rational angle");
        if (base_exact && !(quad_frac(base.lift_value(t->p)) == t->p)) {
            throw WrongInput("Translation interiors need a fixed blown point");
        }
        t->finite = true;
        t->period = 1;
    } else if (base_exact) {
        Quad v = t->p;
        for (long k = 1; k <= std::min<long>(t->cap * 2, 96); ++k) {
            v = quad_frac(base.lift_value(v));
            if (v == t->p) {
                t->finite = true;
                t->period = k;
                break;
            }
            t->pts.emplace(k, v);
        }
        if (!t->finite) t->pts.clear(), t->pts.emplace(0, t->p);
    } else {
        throw WrongInput("numeric maps can only be blown up at a fixed point");
    }
    if (!t->finite && t->uniform) {
        throw WrongInput("uniform lengths need a finite orbit");
    }

    if (t->finite) {
        Rat s(0);
        for (long n = 0; n < t->period; ++n) s = Rat(s + t->length_of(n));
        t->total_len = s;
    } else {
        t->total_len = Rat(spec.scale * Rat(Rat(1) + spec.ratio) / Rat(Rat(1) - spec.ratio));
    }
    t->T = Rat(1 + t->total_len);
    t->ensure(t->finite ? 0 : 8);

    bool exact_blown =
        base_exact && t->finite && spec.interior == BlowUpSpec::Interior::Affine;
    LiftOracle collapse = [t](const Rat& y, const Rat& w) {
        return engine_eval(t, +1, true, y, w);
    };
    if (exact_blown) {
        return BlowUpMap(build_finite_blown(*t), base, std::move(collapse), true, t);
    }
    PiecewiseMap blown = PiecewiseMap::numeric(
        [t](const Rat& y, const Rat& w) { return engine_eval(t, +1, false, y, w); },
        [t](const Rat& y, const Rat& w) { return engine_eval(t, -1, false, y, w); });
    return BlowUpMap(std::move(blown), base, std::move(collapse), false, t);
}

SemiConjugacyReport semiconjugacy_check(const BlowUpMap& b, long samples, const Rat& eps) {
    if (samples < 1) throw WrongInput("need at least one sample");
    if (!(eps > 0)) throw WrongInput("tolerance must be positive");
    SemiConjugacyReport rep;
    rep.samples = samples;
    Rat w = Rat(eps / 8);
    auto note = [&rep](const Rat& bound, const Rat& y, const Rat& eps2, bool force) {
        if (bound > rep.worst) rep.worst = bound;
        if ((force || bound > eps2) && !rep.witness) {
            rep.ok = false;
            rep.witness = y;
        }
    };

    QInterval prev(Rat(0));
    bool have_prev = false;
    for (long i = 0; i < samples; ++i) {
        Rat y(i, samples);
        QInterval by = b.blown.lift_enclosure(y, w);
        QInterval lhs(b.collapse(by.lo, w).lo, b.collapse(by.hi, w).hi);
        QInterval cy = b.collapse(y, w);
        QInterval rhs(b.base.lift_enclosure(cy.lo, w).lo, b.base.lift_enclosure(cy.hi, w).hi);
        Rat d1 = Rat(lhs.hi - rhs.lo);
        Rat d2 = Rat(rhs.hi - lhs.lo);
        note(d1 > d2 ? d1 : d2, y, eps, false);
        if (have_prev && cy.hi < prev.lo) note(Rat(prev.lo - cy.hi), y, eps, true);
        prev = cy;
        have_prev = true;
    }
    // Degree one of the collapse lift.
    QInterval c0 = b.collapse(Rat(0), w);
    QInterval c1 = b.collapse(Rat(1), w);
    QInterval diff = c1 - c0;
    Rat dev1 = Rat(Rat(1) - diff.lo);
    Rat dev2 = Rat(diff.hi - Rat(1));
    note(rat_abs(dev1) > rat_abs(dev2) ? rat_abs(dev1) : rat_abs(dev2), Rat(1), eps, false);
    return rep;
}

CrossingReport gap_crossing_probe(const BlowUpMap& b, const PiecewiseMap& g, long n_gaps,
                                  long q_cap) {
    if (n_gaps < 1) throw WrongInput("need at least one gap");
    if (q_cap < 1) throw WrongInput("return-time cap must be positive");
    PiecewiseMap gl = g.chart() == Chart::Angle ? g : embed_numeric(g);

    // Return time: the closest return of the rotation number within the cap.
    long q = 1;
    std::optional<Quad> ang;
    if (b.base.universe() == Universe::PwAffine) ang = b.base.rigid_angle();
    if (ang) {
        Quad best{Rat(1)};
        for (long qq = 1; qq <= q_cap; ++qq) {
            Quad fr = quad_frac(Quad(Rat(qq)) * *ang);
            if (fr.sign() == 0) {
                q = qq;
                break;
            }
            Quad norm = Quad(Rat(1, 2)) < fr ? Quad(Rat(1)) - fr : fr;
            if (norm < best) {
                best = norm;
                q = qq;
            }
        }
    } else {
        RotResult rr = rotation_number(b.base, Int(q_cap));
        Int qi = rr.is_exact() ? den(rr.value) : Int(den(rr.lo) + den(rr.hi));
        q = static_cast<long>(std::min(Int(q_cap), std::max(Int(1), qi)).convert_to<long>());
    }

    std::vector<GapInfo> gaps = b.gaps(n_gaps);
    if (static_cast<long>(gaps.size()) < n_gaps) {
        throw WrongInput("the blow-up has fewer gaps than requested");
    }

    CrossingReport rep;
    rep.approximate = true;
    const long kSamples = 25;
    for (const GapInfo& gap : gaps) {
        Rat pad = gap.length;
        Rat wl = Rat(gap.where.lo - pad);
        Rat wr = Rat(gap.where.hi + pad);
        Rat w0 = Rat(gap.length / 64);
        std::optional<Int> level;
        int prev_sign = 0;
        Rat prev_x = wl;
        long certified = 0;
        for (long i = 0; i < kSamples; ++i) {
            Rat x = Rat(wl + Rat(i) * Rat(wr - wl) / Rat(kSamples - 1));
            int s = 0;
            Rat wi = w0;
            for (int attempt = 0; attempt < 4 && s == 0; ++attempt, wi = Rat(wi / 8)) {
                QInterval fq = lift_iterate_enclosure(b.blown, x, q, wi);
                QInterval gx = gl.lift_enclosure(x, wi);
                QInterval d = fq - gx;
                if (!level) level = rat_floor(Rat(d.mid() + Rat(1, 2)));
                QInterval dk = d - Rat(*level);
                if (dk.lo > 0) {
                    s = 1;
                } else if (dk.hi < 0) {
                    s = -1;
                }
            }
            if (s == 0) continue;
            ++certified;
            if (prev_sign != 0 && s != prev_sign) {
                rep.crossings.push_back({CirclePoint::approx(Chart::Angle, QInterval(prev_x, x)),
                                         CrossingKind::Hyperbolic});
            }
            prev_sign = s;
            prev_x = x;
        }
        if (certified < 2) {
            throw Indeterminate("gap probe could not certify enough signs");
        }
    }
    return rep;
}

}  // namespace circlelab
