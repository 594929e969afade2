#include "circlelab/rational.hpp"

#include <cctype>

namespace circlelab {

std::optional<Rat> try_parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::size_t slash = text.find('/');
    auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    // mpz rejects an explicit leading '+'.
    auto plusless = [](const std::string& s) { return s[0] == '+' ? s.substr(1) : s; };
    try {
        if (slash == std::string::npos) {
            if (!is_int(text)) return std::nullopt;
            return Rat(Int(plusless(text)));
        }
        std::string p = plusless(text.substr(0, slash));
        std::string q = text.substr(slash + 1);
        if (!is_int(p) || !is_int(q)) return std::nullopt;
        Int qi(q);
        if (qi == 0) return std::nullopt;
        return Rat(Int(p), qi);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

Rat parse_rational(const std::string& text) {
    auto r = try_parse_rational(text);
    if (!r) throw ParseError("not an exact rational literal: '" + text + "'");
    return *r;
}

std::string format_rational(const Rat& r) {
    std::string s = num(r).str();
    if (den(r) != 1) s += "/" + den(r).str();
    return s;
}

double to_double(const Rat& r) { return r.convert_to<double>(); }

}  // namespace circlelab
