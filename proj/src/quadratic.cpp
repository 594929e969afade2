#include "circlelab/quadratic.hpp"

#include <sstream>

namespace circlelab {

namespace {

// sign of c + b1*sqrt(n1) - b2*sqrt(n2), all exact; n1,n2 >= 0.
int sign_with_two_radicals(const Rat& c, const Rat& b1, const Int& n1, const Rat& b2,
                           const Int& n2);

int sign_single(const Rat& a, const Rat& b, const Int& n) {
    if (b == 0 || n == 0) return sign(a);
    if (a == 0) return sign(b);
    int sa = sign(a), sb = sign(b);
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with b^2*n.
    Rat lhs = a * a, rhs = b * b * Rat(n);
    int cmp = lhs.compare(rhs);
    if (cmp == 0) return 0;
    return cmp > 0 ? sa : sb;
}

int sign_with_two_radicals(const Rat& c, const Rat& b1, const Int& n1, const Rat& b2,
                           const Int& n2) {
    if (b2 == 0 || n2 == 0) return sign_single(c, b1, n1);
    if (b1 == 0 || n1 == 0) return sign_single(c, -b2, n2);
    int sa = sign_single(c, b1, n1);
    int sb = sign(b2);
    if (sa >= 0 && sb <= 0) return (sa == 0 && sb == 0) ? 0 : 1;
    if (sa <= 0 && sb >= 0) return (sa == 0 && sb == 0) ? 0 : -1;
    // Same nonzero sign: square the single-radical side A = c + b1*sqrt(n1),
    // A^2 - B^2 stays single-radical.
    Rat a2 = c * c + b1 * b1 * Rat(n1) - b2 * b2 * Rat(n2);
    int cmp = sign_single(a2, 2 * c * b1, n1);
    return sa > 0 ? cmp : -cmp;
}

Int isqrt_floor(const Int& n) { return boost::multiprecision::sqrt(n); }

}  // namespace

Quad::Quad(Rat a, Rat b, Int n) : a_(std::move(a)), b_(std::move(b)), n_(std::move(n)) {
    if (n_ < 0) throw std::invalid_argument("negative radicand");
    normalize();
}

void Quad::normalize() {
    if (b_ == 0 || n_ == 0) {
        b_ = 0;
        n_ = 0;
        return;
    }
    if (n_ == 1) {
        a_ += b_;
        b_ = 0;
        n_ = 0;
        return;
    }
    // Pull out small square factors so equal values usually share a radicand.
    for (Int d = 2; d * d <= 4096 && d * d <= n_; ++d) {
        while (n_ % (d * d) == 0) {
            n_ /= d * d;
            b_ *= Rat(d);
        }
    }
    Int s = isqrt_floor(n_);
    if (s * s == n_) {
        a_ += b_ * Rat(s);
        b_ = 0;
        n_ = 0;
    }
}

Quad Quad::sqrt_of(const Rat& r) {
    if (r < 0) throw std::invalid_argument("sqrt of negative rational");
    if (r == 0) return Quad();
    // sqrt(p/q) = sqrt(p*q)/q
    Int pq = num(r) * den(r);
    return Quad(Rat(0), Rat(Int(1), den(r)), pq);
}

const Rat& Quad::as_rational() const {
    if (!is_rational()) throw std::logic_error("Quad is irrational");
    return a_;
}

int Quad::sign() const { return sign_single(a_, b_, n_); }

Quad Quad::inverse() const {
    if (is_rational()) {
        if (a_ == 0) throw std::domain_error("inverse of zero");
        return Quad(1 / a_);
    }
    Rat norm = a_ * a_ - b_ * b_ * Rat(n_);
    if (norm == 0) throw std::domain_error("inverse of zero");
    return Quad(a_ / norm, -b_ / norm, n_);
}

namespace {
Int common_radicand(const Quad& x, const Quad& y) {
    if (x.is_rational()) return y.radicand();
    if (y.is_rational()) return x.radicand();
    if (x.radicand() != y.radicand())
        throw FieldMismatch("mixed radicals: sqrt(" + x.radicand().str() + ") vs sqrt(" +
                            y.radicand().str() + ")");
    return x.radicand();
}
}  // namespace

Quad operator+(const Quad& x, const Quad& y) {
    Int n = common_radicand(x, y);
    return Quad(x.rational_part() + y.rational_part(), x.radical_coeff() + y.radical_coeff(), n);
}

Quad operator-(const Quad& x, const Quad& y) {
    Int n = common_radicand(x, y);
    return Quad(x.rational_part() - y.rational_part(), x.radical_coeff() - y.radical_coeff(), n);
}

Quad operator*(const Quad& x, const Quad& y) {
    Int n = common_radicand(x, y);
    Rat a = x.rational_part() * y.rational_part() +
            x.radical_coeff() * y.radical_coeff() * Rat(n);
    Rat b = x.rational_part() * y.radical_coeff() + x.radical_coeff() * y.rational_part();
    return Quad(a, b, n);
}

int compare(const Quad& x, const Quad& y) {
    return sign_with_two_radicals(x.rational_part() - y.rational_part(), x.radical_coeff(),
                                  x.radicand(), y.radical_coeff(), y.radicand());
}

std::string Quad::str() const {
    if (is_rational()) return format_rational(a_);
    std::ostringstream os;
    os << format_rational(a_) << "+" << format_rational(b_) << "*sqrt(" << n_.str() << ")";
    return os.str();
}

double Quad::approx() const {
    double v = to_double(a_);
    if (b_ != 0) v += to_double(b_) * std::sqrt(n_.convert_to<double>());
    return v;
}

QuadBracket quad_bracket(const Quad& q, const Rat& width) {
    if (width <= 0) throw std::invalid_argument("width must be positive");
    if (q.is_rational()) return {q.as_rational(), q.as_rational()};
    // sqrt(n) in [s/2^k, (s+1)/2^k] with s = floor(sqrt(n*4^k)).
    Rat absb = rat_abs(q.radical_coeff());
    Int scale = 2;
    while (absb > width * Rat(scale)) scale *= 2;
    Int s = isqrt_floor(q.radicand() * scale * scale);
    Rat lo_r(s, scale), hi_r(s + 1, scale);
    Rat lo, hi;
    if (q.radical_coeff() > 0) {
        lo = q.rational_part() + q.radical_coeff() * lo_r;
        hi = q.rational_part() + q.radical_coeff() * hi_r;
    } else {
        lo = q.rational_part() + q.radical_coeff() * hi_r;
        hi = q.rational_part() + q.radical_coeff() * lo_r;
    }
    return {lo, hi};
}

Int quad_floor(const Quad& q) {
    if (q.is_rational()) return rat_floor(q.as_rational());
    QuadBracket b = quad_bracket(q, Rat(1, 2));
    Int lo = rat_floor(b.lo);
    Int hi = rat_floor(b.hi);
    for (Int c = lo; c <= hi; ++c) {
        if (Quad(Rat(c)) <= q && q < Quad(Rat(c + 1))) return c;
    }
    throw std::logic_error("quad_floor bracket missed the value");
}

Quad quad_frac(const Quad& q) { return q - Quad(Rat(quad_floor(q))); }

}  // namespace circlelab
