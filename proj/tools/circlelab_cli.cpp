// Command-line front end: batch verification runs over exact circle maps.
// Exit codes: 0 success, 2 a checked claim failed, 3 bad input.

#include "CLI11.hpp"
#include "circlelab/constructions.hpp"
#include "circlelab/errors.hpp"
#include "circlelab/random_maps.hpp"
#include "circlelab/serialize.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace circlelab;

constexpr int kOk = 0;
constexpr int kClaimViolated = 2;
constexpr int kBadInput = 3;

std::string load_text(const std::string& arg) {
    if (arg.empty() || arg[0] != '@') return arg;
    std::ifstream in(arg.substr(1));
    if (!in) throw WrongInput("cannot read file: " + arg.substr(1));
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string s = buf.str();
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

PiecewiseMap map_arg(const std::string& arg) { return parse_map(load_text(arg)); }

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw WrongInput("cannot write file: " + out_path);
    out << content;
}

std::string header(const std::string& command) {
    return std::string("# ") + kSchemaVersion + " " + command + "\n";
}

std::string kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Trivial: return "trivial";
        case ElementKind::EllipticLike: return "elliptic-like";
        case ElementKind::ParabolicLike: return "parabolic-like";
        case ElementKind::HyperbolicLike: return "hyperbolic-like";
        case ElementKind::NotMoebiusLike: return "not-moebius-like";
        case ElementKind::Unknown: return "unknown";
    }
    return "unknown";
}

std::vector<std::string> generator_names(size_t n) {
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) names.push_back("g" + std::to_string(i));
    return names;
}

struct Options {
    std::string out;
    unsigned seed = 0;

    // Shared map/parameter slots; each subcommand wires the ones it uses.
    std::string map, map2, h0;
    std::vector<std::string> gens;
    long radius = 4, qcap = 10000, steps = 6, threshold = 2, draws = 100;
    long resolution = 256, gaps = 1, samples = 1000, depth = 4, mcap = 16;
    long expect = -1;
    std::string lambda = "2", mu = "3", rho = "1/7", eps = "1/100";
    std::string scale = "1/4", ratio = "1/2", uniform, interior = "affine";
    std::string amount = "1", translation = "0+1*sqrt(2)";
    std::string angle = "0", left, right, eta;
    bool csv = false;
};

std::vector<PiecewiseMap> gens_arg(const Options& o) {
    std::vector<PiecewiseMap> gens;
    for (const std::string& g : o.gens) gens.push_back(map_arg(g));
    if (gens.empty()) throw WrongInput("at least one --gen is required");
    return gens;
}

BlowUpSpec blow_spec(const Options& o) {
    BlowUpSpec spec;
    spec.scale = parse_rational(o.scale);
    spec.ratio = parse_rational(o.ratio);
    if (!o.uniform.empty()) spec.uniform_length = parse_rational(o.uniform);
    if (o.interior == "translation") {
        spec.interior = BlowUpSpec::Interior::Translation;
        spec.translation = parse_quad(o.amount);
    } else if (o.interior != "affine") {
        throw WrongInput("interior must be 'affine' or 'translation'");
    }
    return spec;
}

int cmd_rot(const Options& o) {
    RotResult r = rotation_number(map_arg(o.map), Int(o.qcap));
    std::ostringstream out;
    out << header("rot") << "rot: " << r.str() << '\n';
    out << "exact: " << (r.is_exact() ? "yes" : "no") << '\n';
    if (r.is_exact() && r.certificate) {
        out << "certificate: periodic point at " << r.certificate->str() << '\n';
    }
    emit(o.out, out.str());
    return kOk;
}

int cmd_classify(const Options& o) {
    Classification c = classify_element(map_arg(o.map), o.qcap);
    std::ostringstream out;
    out << header("classify") << "kind: " << kind_name(c.kind) << '\n';
    if (c.rot) out << "rot: " << c.rot->str() << '\n';
    for (const CirclePoint& p : c.fixed) out << "fixed: " << p.str() << '\n';
    out << "evidence: " << c.evidence << '\n';
    emit(o.out, out.str());
    return kOk;
}

int cmd_crossings(const Options& o) {
    CrossingReport rep = crossing_report(map_arg(o.map), map_arg(o.map2));
    emit(o.out, header("crossings") + crossing_text(rep));
    if (o.expect >= 0 && static_cast<long>(rep.count()) != o.expect) {
        std::cerr << "expected " << o.expect << " crossings, found " << rep.count() << '\n';
        return kClaimViolated;
    }
    return kOk;
}

int cmd_wordball(const Options& o) {
    std::vector<PiecewiseMap> gens;
    std::vector<std::string> names;
    if (o.gens.empty()) {
        TwoScalingsGroup G =
            build_two_scalings_group(parse_rational(o.lambda), parse_rational(o.mu));
        gens = G.generators();
        names = {"f", "R"};
    } else {
        gens = gens_arg(o);
        names = generator_names(gens.size());
    }
    std::optional<size_t> expect;
    if (o.expect >= 0) expect = static_cast<size_t>(o.expect);
    WordBallReport rep = word_ball_max_fixed(gens, o.radius, expect);
    emit(o.out, header("wordball") + word_ball_text(rep, names));
    if (rep.counterexample || (expect && rep.max_fixed_points > *expect)) {
        std::cerr << "fixed-point bound exceeded\n";
        return kClaimViolated;
    }
    return kOk;
}

int cmd_elementary(const Options& o) {
    RotAdditivityReport rep = rot_homomorphism_check(gens_arg(o), o.radius);
    std::ostringstream out;
    out << header("elementary") << "additive: " << (rep.ok ? "yes" : "no") << '\n';
    out << "pairs_checked: " << rep.pairs_checked << '\n';
    out << "certificate: " << rep.certificate.evidence << '\n';
    for (const CirclePoint& p : rep.certificate.orbit) out << "orbit: " << p.str() << '\n';
    emit(o.out, out.str());
    return rep.ok ? kOk : kClaimViolated;
}

int cmd_construct_scalings(const Options& o) {
    TwoScalingsGroup G =
        build_two_scalings_group(parse_rational(o.lambda), parse_rational(o.mu));
    auto m = involution_action_matrix(G);
    std::ostringstream out;
    out << header("construct scalings");
    out << "f: " << map_to_json(G.f) << '\n';
    out << "g: " << map_to_json(G.g) << '\n';
    out << "R: " << map_to_json(G.half_turn) << '\n';
    for (const std::string& r : G.relations) out << "relation: " << r << " (verified)\n";
    out << "involution_matrix: [[" << m[0][0] << "," << m[0][1] << "],[" << m[1][0] << ","
        << m[1][1] << "]]\n";
    emit(o.out, out.str());
    return kOk;
}

int cmd_construct_parabolic(const Options& o) {
    ParabolicRotationGroup G = build_parabolic_rotation_group(
        parse_quad(o.translation), parse_rational(o.rho), o.depth, blow_spec(o));
    std::ostringstream out;
    out << header("construct parabolic");
    out << "translation: " << format_quad(G.translation) << '\n';
    out << "rho: " << format_rational(G.rho) << '\n';
    out << "words_checked: " << G.words_checked << '\n';
    out << "relation_found: no\n";
    out << "stabilizer_words: " << G.stabilizer_words.size() << '\n';
    out << "stabilizer_is_translations: " << (G.stabilizer_is_translations ? "yes" : "no")
        << '\n';
    out << "blown_alpha_fixed_points: " << G.blown_alpha_fixed.count() << '\n';
    for (const FixedPointEntry& e : G.blown_alpha_fixed.points) {
        out << "blown_fixed: " << e.point.str() << '\n';
    }
    emit(o.out, out.str());
    return kOk;
}

int cmd_construct_denjoy(const Options& o) {
    PiecewiseMap base = map_arg(o.map);
    BlowUpMap b =
        denjoy_blowup(base, CirclePoint::angle(parse_rational(o.angle)), blow_spec(o));
    SemiConjugacyReport sc =
        semiconjugacy_check(b, o.samples, parse_rational(o.eps));
    RotResult rb = rotation_number(base, Int(o.qcap));
    RotResult rr = rotation_number(b.blown, Int(o.qcap));
    const bool rot_ok = rb.interval().intersects(rr.interval());
    std::ostringstream out;
    out << header("construct denjoy");
    out << "exact: " << (b.exact ? "yes" : "no") << '\n';
    out << "semiconjugacy: " << (sc.ok ? "ok" : "violated") << " at " << sc.samples
        << " samples\n";
    out << "rot_base: " << rb.str() << '\n';
    out << "rot_blown: " << rr.str() << '\n';
    for (const GapInfo& g : b.gaps(o.gaps)) {
        out << "gap " << g.index << ": length " << format_rational(g.length)
            << " within [" << format_rational(g.where.lo) << ","
            << format_rational(g.where.hi) << "]\n";
    }
    emit(o.out, out.str());
    if (!sc.ok || !rot_ok) {
        std::cerr << (sc.ok ? "rotation number not preserved\n" : "semiconjugacy failed\n");
        return kClaimViolated;
    }
    return kOk;
}

int cmd_lemma_perturb(const Options& o) {
    PiecewiseMap f = map_arg(o.map);
    auto angle = f.rigid_angle();
    if (!angle || !angle->is_rational()) {
        throw WrongInput("lemma-perturb needs a rigid rotation with rational angle");
    }
    const Rat pq = angle->as_rational();
    const Rat eps = parse_rational(o.eps);
    const Rat delta = delta_search(f, eps);
    const Rat q3(Int(1), den(pq) * den(pq) * den(pq));
    std::mt19937 rng(o.seed);
    long passed = 0;
    for (long i = 0; i < o.draws; ++i) {
        PiecewiseMap g = random_positive_below(rng, delta);
        PerturbationResult res = perturbation_step(f, g, eps);
        // Window membership decided exactly by two rot comparisons; the
        // Farey enclosure may be coarser than the window.
        PiecewiseMap gf = pw_compose(g, f);
        const Rat hi = pq + q3;
        const bool in_window =
            compare_rot(gf, num(pq), den(pq)).order == RotOrder::Greater &&
            compare_rot(gf, num(hi), den(hi)).order != RotOrder::Greater;
        if (res.dc0_ok && res.hypothesis_ok && in_window) ++passed;
    }
    std::ostringstream out;
    out << header("lemma-perturb");
    out << "delta: " << format_rational(delta) << '\n';
    out << "draws: " << o.draws << '\n';
    out << "passed: " << passed << '\n';
    emit(o.out, out.str());
    return passed == o.draws ? kOk : kClaimViolated;
}

int cmd_lemma_irrational(const Options& o) {
    std::mt19937 rng(o.seed);
    // Rigid draws keep every step's rotation number exactly rational, which
    // the trace requires; the angle is a random fraction of the budget.
    std::uniform_int_distribution<int> numer(8, 15);
    MapSupply supply = [&rng, &numer](const Rat& delta, long) {
        return PiecewiseMap::rigid_rotation(Quad(delta * Rat(numer(rng), 64)));
    };
    IterationTrace trace;
    try {
        trace = irrational_scheme(map_arg(o.h0), supply, o.steps, o.threshold);
    } catch (const TraceInvalid& e) {
        std::cerr << "trace invalid: " << e.what() << '\n';
        return kClaimViolated;
    }
    std::string body = o.csv ? trace_csv(trace) : trace_to_json(trace) + "\n";
    emit(o.out, o.csv ? body : header("lemma-irrational") + body);
    return dirichlet_nesting_check(trace) ? kOk : kClaimViolated;
}

int cmd_amplify(const Options& o) {
    if (o.left.empty() || o.right.empty() || o.eta.empty()) {
        throw WrongInput("amplify needs --left, --right and --eta");
    }
    PiecewiseMap f = map_arg(o.map);
    // Interval endpoints live in the chart of the maps.
    auto point = [&f](const Rat& v) {
        return f.universe() == Universe::PwMoebius ? CirclePoint::projective(Quad(v))
                                                   : CirclePoint::angle(v);
    };
    CircleInterval I{point(parse_rational(o.left)), point(parse_rational(o.right))};
    try {
        auto [m, h] = amplify_local_closeness(f, map_arg(o.map2), I,
                                              parse_rational(o.eta), o.mcap);
        std::ostringstream out;
        out << header("amplify") << "m: " << m << '\n';
        out << "conjugate_close: yes\n";
        emit(o.out, out.str());
    } catch (const CannotAmplify& e) {
        std::cerr << "cannot amplify: " << e.what() << '\n';
        return kClaimViolated;
    }
    return kOk;
}

int cmd_gapprobe(const Options& o) {
    PiecewiseMap base = map_arg(o.map);
    BlowUpMap b =
        denjoy_blowup(base, CirclePoint::angle(parse_rational(o.angle)), blow_spec(o));
    CrossingReport rep = gap_crossing_probe(b, map_arg(o.map2), o.gaps, o.qcap);
    emit(o.out, header("gapprobe") + crossing_text(rep));
    if (o.expect >= 0 && static_cast<long>(rep.count()) < o.expect) {
        std::cerr << "expected at least " << o.expect << " crossings, found "
                  << rep.count() << '\n';
        return kClaimViolated;
    }
    return kOk;
}

int cmd_graph(const Options& o) {
    emit(o.out, graph_csv(map_arg(o.map), o.resolution));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circlelab: a laboratory for group actions on the circle"};
    app.require_subcommand(1);
    app.fallthrough();  // --seed/--out may follow the subcommand
    app.set_config("--config", "", "key=value file holding the same options");
    app.allow_config_extras(CLI::config_extras_mode::error);  // unknown keys rejected

    Options o;
    std::function<int()> run;
    app.add_option("--out", o.out, "write the report here instead of stdout");
    app.add_option("--seed", o.seed, "seed for randomized batteries");

    auto wire = [&run](CLI::App* cmd, int (*fn)(const Options&), const Options* opts) {
        cmd->callback([&run, fn, opts] { run = [fn, opts] { return fn(*opts); }; });
    };

    CLI::App* rot = app.add_subcommand("rot", "certified rotation number of a map");
    rot->add_option("--map", o.map, "map text, JSON, or @file")->required();
    rot->add_option("--qcap", o.qcap, "denominator cap for the Farey walk");
    wire(rot, cmd_rot, &o);

    CLI::App* cls = app.add_subcommand("classify", "conjugacy type of one element");
    cls->add_option("--map", o.map)->required();
    cls->add_option("--qcap", o.qcap);
    wire(cls, cmd_classify, &o);

    CLI::App* cross = app.add_subcommand("crossings", "solutions of f(x) = g(x)");
    cross->add_option("--map", o.map)->required();
    cross->add_option("--map2", o.map2)->required();
    cross->add_option("--expect", o.expect, "fail (exit 2) unless the count matches");
    wire(cross, cmd_crossings, &o);

    CLI::App* ball = app.add_subcommand("wordball", "fixed-point survey of a word ball");
    ball->add_option("--gen", o.gens, "generator map (repeatable)");
    ball->add_option("--lambda", o.lambda, "two-scalings group parameter");
    ball->add_option("--mu", o.mu, "two-scalings group parameter");
    ball->add_option("--radius", o.radius)->required();
    ball->add_option("--expect", o.expect, "fail (exit 2) beyond this fixed-point count");
    wire(ball, cmd_wordball, &o);

    CLI::App* elem = app.add_subcommand("elementary", "rot additivity on a word ball");
    elem->add_option("--gen", o.gens)->required();
    elem->add_option("--radius", o.radius);
    wire(elem, cmd_elementary, &o);

    CLI::App* con = app.add_subcommand("construct", "build the example groups");
    con->require_subcommand(1);
    CLI::App* sc = con->add_subcommand("scalings", "two-scalings group with half-turn");
    sc->add_option("--lambda", o.lambda);
    sc->add_option("--mu", o.mu);
    wire(sc, cmd_construct_scalings, &o);
    CLI::App* pb = con->add_subcommand("parabolic", "parabolic pair with a rotation");
    pb->add_option("--translation", o.translation, "translation length, e.g. 0+1*sqrt(2)");
    pb->add_option("--rho", o.rho);
    pb->add_option("--depth", o.depth);
    pb->add_option("--scale", o.scale);
    pb->add_option("--ratio", o.ratio);
    wire(pb, cmd_construct_parabolic, &o);
    CLI::App* dj = con->add_subcommand("denjoy", "blow a map up at an orbit");
    dj->add_option("--map", o.map)->required();
    dj->add_option("--angle", o.angle, "blow-up point (angle chart)");
    dj->add_option("--scale", o.scale);
    dj->add_option("--ratio", o.ratio);
    dj->add_option("--uniform", o.uniform, "equal gap length (finite orbits)");
    dj->add_option("--interior", o.interior, "affine|translation");
    dj->add_option("--amount", o.amount, "translation amount for the interior");
    dj->add_option("--gaps", o.gaps, "gaps to list");
    dj->add_option("--samples", o.samples);
    dj->add_option("--eps", o.eps);
    dj->add_option("--qcap", o.qcap);
    wire(dj, cmd_construct_denjoy, &o);

    CLI::App* lp = app.add_subcommand("lemma-perturb",
                                      "rotation-number window under positive perturbation");
    lp->add_option("--map", o.map, "a rigid rotation rigid:p/q")->required();
    lp->add_option("--eps", o.eps);
    lp->add_option("--draws", o.draws);
    wire(lp, cmd_lemma_perturb, &o);

    CLI::App* li = app.add_subcommand("lemma-irrational",
                                      "nested Dirichlet interval iteration");
    li->add_option("--h0", o.h0, "starting map")->required();
    li->add_option("--steps", o.steps);
    li->add_option("--threshold", o.threshold);
    li->add_flag("--csv", o.csv, "emit the trace as CSV");
    wire(li, cmd_lemma_irrational, &o);

    CLI::App* amp = app.add_subcommand("amplify", "conjugation amplification of closeness");
    amp->add_option("--map", o.map, "the expanding map f")->required();
    amp->add_option("--map2", o.map2, "the nearby-identity map g")->required();
    amp->add_option("--left", o.left, "interval left endpoint (angle)");
    amp->add_option("--right", o.right, "interval right endpoint (angle)");
    amp->add_option("--eta", o.eta, "target closeness");
    amp->add_option("--mcap", o.mcap);
    wire(amp, cmd_amplify, &o);

    CLI::App* gp = app.add_subcommand("gapprobe", "crossing counts inside blow-up gaps");
    gp->add_option("--map", o.map, "base map to blow up")->required();
    gp->add_option("--map2", o.map2, "comparison map")->required();
    gp->add_option("--angle", o.angle);
    gp->add_option("--scale", o.scale);
    gp->add_option("--ratio", o.ratio);
    gp->add_option("--uniform", o.uniform);
    gp->add_option("--gaps", o.gaps);
    gp->add_option("--qcap", o.qcap, "return-time cap");
    gp->add_option("--expect", o.expect, "fail (exit 2) below this crossing count");
    wire(gp, cmd_gapprobe, &o);

    CLI::App* gr = app.add_subcommand("graph", "CSV graph of a map in the angle chart");
    gr->add_option("--map", o.map)->required();
    gr->add_option("--resolution", o.resolution);
    wire(gr, cmd_graph, &o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kBadInput;
    }

    try {
        return run();
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
}
