#include "circlelab/serialize.hpp"

#include "circlelab/errors.hpp"
#include "json.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>
#include <utility>

namespace circlelab {

namespace {

using nlohmann::json;

Int parse_integer(const std::string& text) {
    if (text.empty()) throw ParseError("empty integer");
    size_t i = text[0] == '-' || text[0] == '+' ? 1 : 0;
    if (i == text.size()) throw ParseError("sign without digits: '" + text + "'");
    for (size_t j = i; j < text.size(); ++j) {
        if (text[j] == '.') {
            throw ParseError("decimal literal in exact context: '" + text + "'");
        }
        if (!std::isdigit(static_cast<unsigned char>(text[j]))) {
            throw ParseError("malformed integer: '" + text + "'");
        }
    }
    return Int(text);
}

std::string approx(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json quad_json(const Quad& v) { return format_quad(v); }

json point_json(const CirclePoint& p) {
    if (p.is_infinity()) return "inf";
    if (!p.is_exact()) throw WrongInput("enclosure points have no exact serialization");
    return format_quad(p.exact());
}

CirclePoint parse_point(const json& j) {
    if (!j.is_string()) throw ParseError("breakpoint must be a string");
    const std::string s = j.get<std::string>();
    if (s == "inf") return CirclePoint::infinity();
    return CirclePoint::projective(parse_quad(s));
}

const json& field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'");
    return *it;
}

std::string string_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_string()) throw ParseError(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

PiecewiseMap map_from_json_value(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        constexpr const char* kRigid = "rigid:";
        if (s.rfind(kRigid, 0) != 0) throw ParseError("unknown map shorthand: '" + s + "'");
        return PiecewiseMap::rigid_rotation(parse_quad(s.substr(6)));
    }
    if (!j.is_object()) throw ParseError("map must be an object or a shorthand string");
    const std::string universe = string_field(j, "universe");
    const json& breaks = field(j, "breakpoints");
    const json& pieces = field(j, "pieces");
    if (!breaks.is_array() || !pieces.is_array() || breaks.size() != pieces.size() ||
        pieces.empty()) {
        throw ParseError("breakpoints and pieces must be matching nonempty arrays");
    }
    if (universe == "affine") {
        std::vector<Quad> cuts;
        for (const json& b : breaks) {
            if (!b.is_string()) throw ParseError("breakpoint must be a string");
            cuts.push_back(parse_quad(b.get<std::string>()));
        }
        cuts.push_back(cuts.front() + Quad(Rat(1)));
        std::vector<AffinePiece> lines;
        for (const json& p : pieces) {
            lines.push_back({parse_quad(string_field(p, "slope")),
                             parse_quad(string_field(p, "offset"))});
        }
        return PiecewiseMap::affine(cuts, lines);
    }
    if (universe == "moebius") {
        std::vector<CirclePoint> cuts;
        for (const json& b : breaks) cuts.push_back(parse_point(b));
        std::vector<MoebiusMap> ms;
        for (const json& p : pieces) {
            ms.emplace_back(parse_quad(string_field(p, "a")),
                            parse_quad(string_field(p, "b")),
                            parse_quad(string_field(p, "c")),
                            parse_quad(string_field(p, "d")));
        }
        return PiecewiseMap::moebius(cuts, ms);
    }
    throw ParseError("unknown universe: '" + universe + "'");
}

}  // namespace

std::string format_quad(const Quad& v) {
    if (v.is_rational()) return format_rational(v.as_rational());
    const Rat b = v.radical_coeff();
    std::string s = format_rational(v.rational_part());
    s += b < 0 ? "-" : "+";
    s += format_rational(rat_abs(b));
    s += "*sqrt(" + v.radicand().str() + ")";
    return s;
}

Quad parse_quad(const std::string& text) {
    const size_t star = text.find("*sqrt(");
    if (star == std::string::npos) return Quad(parse_rational(text));
    if (text.back() != ')') throw ParseError("unterminated sqrt: '" + text + "'");
    const Int n = parse_integer(text.substr(star + 6, text.size() - star - 7));
    // Split the b coefficient off at the sign that follows the a term.
    size_t split = std::string::npos;
    for (size_t i = 1; i < star; ++i) {
        if ((text[i] == '+' || text[i] == '-') && text[i - 1] != '/' &&
            std::isdigit(static_cast<unsigned char>(text[i - 1]))) {
            split = i;
        }
    }
    if (split == std::string::npos) throw ParseError("malformed quadratic: '" + text + "'");
    const Rat a = parse_rational(text.substr(0, split));
    const Rat b = parse_rational(text.substr(split, star - split));
    if (b == 0 || n < 2) throw ParseError("degenerate radical: '" + text + "'");
    return Quad(a, b, n);
}

std::string map_to_json(const PiecewiseMap& f) {
    if (f.universe() == Universe::Numeric) {
        throw WrongInput("numeric maps have no finite serialization");
    }
    if (auto angle = f.rigid_angle()) {
        return json("rigid:" + format_quad(*angle)).dump();
    }
    json j;
    j["schema"] = kSchemaVersion;
    if (f.universe() == Universe::PwAffine) {
        j["universe"] = "affine";
        json breaks = json::array();
        for (const Quad& b : f.affine_breaks()) breaks.push_back(quad_json(b));
        json pieces = json::array();
        for (const AffinePiece& p : f.affine_pieces()) {
            pieces.push_back({{"slope", quad_json(p.slope)}, {"offset", quad_json(p.offset)}});
        }
        j["breakpoints"] = std::move(breaks);
        j["pieces"] = std::move(pieces);
    } else {
        j["universe"] = "moebius";
        json breaks = json::array();
        for (const CirclePoint& b : f.moebius_breaks()) breaks.push_back(point_json(b));
        json pieces = json::array();
        for (const MoebiusMap& m : f.moebius_pieces()) {
            pieces.push_back({{"a", quad_json(m.a())},
                              {"b", quad_json(m.b())},
                              {"c", quad_json(m.c())},
                              {"d", quad_json(m.d())}});
        }
        j["breakpoints"] = std::move(breaks);
        j["pieces"] = std::move(pieces);
    }
    return j.dump();
}

PiecewiseMap parse_map(const std::string& text) {
    if (text.rfind("rigid:", 0) == 0) {
        return PiecewiseMap::rigid_rotation(parse_quad(text.substr(6)));
    }
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON map: '" + text + "'");
    return map_from_json_value(j);
}

std::string trace_to_json(const IterationTrace& trace) {
    json steps = json::array();
    for (const TraceStep& s : trace.steps) {
        steps.push_back({{"n", s.n},
                         {"map", s.map},
                         {"p", s.p.str()},
                         {"q", s.q.str()},
                         {"delta", format_rational(s.delta)},
                         {"interval",
                          {format_rational(s.interval.lo()), format_rational(s.interval.hi())}}});
    }
    json j{{"schema", kSchemaVersion}, {"threshold", trace.threshold}, {"steps", std::move(steps)}};
    return j.dump();
}

IterationTrace trace_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("malformed JSON trace");
    IterationTrace trace;
    const json& threshold = field(j, "threshold");
    if (!threshold.is_number_integer()) throw ParseError("threshold must be an integer");
    trace.threshold = threshold.get<long>();
    for (const json& s : field(j, "steps")) {
        TraceStep step;
        step.n = field(s, "n").get<long>();
        step.map = string_field(s, "map");
        step.p = parse_integer(string_field(s, "p"));
        step.q = parse_integer(string_field(s, "q"));
        step.delta = parse_rational(string_field(s, "delta"));
        step.interval = {step.p, step.q};
        const json& iv = field(s, "interval");
        if (!iv.is_array() || iv.size() != 2 ||
            parse_rational(iv[0].get<std::string>()) != step.interval.lo() ||
            parse_rational(iv[1].get<std::string>()) != step.interval.hi()) {
            throw ParseError("interval does not match p/q");
        }
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

std::string trace_csv(const IterationTrace& trace) {
    std::ostringstream out;
    out << "# " << kSchemaVersion << " trace; width_approx is approximate\n";
    out << "n,p,q,delta,interval_lo,interval_hi,width,width_approx\n";
    for (const TraceStep& s : trace.steps) {
        out << s.n << ',' << s.p.str() << ',' << s.q.str() << ','
            << format_rational(s.delta) << ',' << format_rational(s.interval.lo()) << ','
            << format_rational(s.interval.hi()) << ',' << format_rational(s.interval.width())
            << ',' << approx(to_double(s.interval.width())) << '\n';
    }
    return out.str();
}

std::string graph_csv(const PiecewiseMap& f, long resolution, const Rat& tol) {
    if (resolution < 1) throw WrongInput("resolution must be >= 1");
    std::ostringstream out;
    out << "# " << kSchemaVersion << " graph; fx_approx is approximate\n";
    out << "x,fx_lo,fx_hi,fx_approx\n";
    const PiecewiseMap g =
        f.universe() == Universe::PwMoebius ? embed_numeric(f) : f;
    for (long i = 0; i < resolution; ++i) {
        const Rat x(i, resolution);
        const QInterval y = g.lift_enclosure(x, tol);
        out << format_rational(x) << ',' << format_rational(y.lo) << ','
            << format_rational(y.hi) << ',' << approx(to_double(y.mid())) << '\n';
    }
    return out.str();
}

std::string word_ball_text(const WordBallReport& report,
                           const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "# " << kSchemaVersion << " word-ball report\n";
    out << "radius: " << report.radius << '\n';
    out << "words_examined: " << report.words_examined << '\n';
    out << "distinct_nontrivial: " << report.distinct_nontrivial << '\n';
    out << "max_fixed_points: " << report.max_fixed_points << '\n';
    out << "witness: " << report.witness.str(names) << '\n';
    out << "histogram:\n";
    for (const auto& [fixed, count] : report.histogram) {
        out << "  " << fixed << ": " << count << '\n';
    }
    if (report.counterexample) {
        out << "counterexample: " << report.counterexample->str(names) << '\n';
    }
    return out.str();
}

std::string crossing_text(const CrossingReport& report) {
    std::ostringstream out;
    out << "# " << kSchemaVersion << " crossing report\n";
    out << "count: " << report.count() << '\n';
    out << "degenerate: " << (report.degenerate ? "yes" : "no") << '\n';
    out << "approximate: " << (report.approximate ? "yes" : "no") << '\n';
    for (const Crossing& c : report.crossings) {
        out << (c.kind == CrossingKind::Hyperbolic ? "hyperbolic" : "parabolic") << " at "
            << c.point.str() << '\n';
    }
    return out.str();
}

}  // namespace circlelab
