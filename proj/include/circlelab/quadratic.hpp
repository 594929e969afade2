#pragma once

#include "circlelab/rational.hpp"

#include <stdexcept>
#include <string>

namespace circlelab {

struct FieldMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact quadratic scalar a + b*sqrt(n) with rational a,b and integer n >= 0.
/// A value with b == 0 is stored with n == 0 and is compatible with any field.
/// Mixed radicals (two values with distinct positive n) are rejected in
/// arithmetic, but comparisons across fields are exact.
class Quad {
public:
    Quad() : a_(0), b_(0), n_(0) {}
    Quad(const Rat& r) : a_(r), b_(0), n_(0) {}  // NOLINT: implicit by design
    Quad(Rat a, Rat b, Int n);

    static Quad sqrt_of(const Rat& r);  // r >= 0; exact square root value

    const Rat& rational_part() const { return a_; }
    const Rat& radical_coeff() const { return b_; }
    const Int& radicand() const { return n_; }

    bool is_rational() const { return b_ == 0; }
    /// Valid only when is_rational().
    const Rat& as_rational() const;

    int sign() const;
    Quad operator-() const { return Quad(-a_, -b_, n_); }
    Quad inverse() const;

    friend Quad operator+(const Quad& x, const Quad& y);
    friend Quad operator-(const Quad& x, const Quad& y);
    friend Quad operator*(const Quad& x, const Quad& y);
    friend Quad operator/(const Quad& x, const Quad& y) { return x * y.inverse(); }

    // Exact order, also across distinct radicands.
    friend int compare(const Quad& x, const Quad& y);
    friend bool operator==(const Quad& x, const Quad& y) { return compare(x, y) == 0; }
    friend bool operator<(const Quad& x, const Quad& y) { return compare(x, y) < 0; }
    friend bool operator<=(const Quad& x, const Quad& y) { return compare(x, y) <= 0; }
    friend bool operator>(const Quad& x, const Quad& y) { return compare(x, y) > 0; }
    friend bool operator>=(const Quad& x, const Quad& y) { return compare(x, y) >= 0; }

    std::string str() const;
    double approx() const;

private:
    void normalize();

    Rat a_, b_;
    Int n_;
};

/// Exact rational bracket lo <= a+b*sqrt(n) <= hi with hi-lo <= width.
struct QuadBracket {
    Rat lo, hi;
};
QuadBracket quad_bracket(const Quad& q, const Rat& width);

/// Exact floor and fractional part (frac in [0,1)).
Int quad_floor(const Quad& q);
Quad quad_frac(const Quad& q);

}  // namespace circlelab
