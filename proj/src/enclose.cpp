#include "circlelab/enclose.hpp"

#include "circlelab/errors.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <sstream>

namespace circlelab {

std::string QInterval::str() const {
    std::ostringstream os;
    os << "[" << format_rational(lo) << "," << format_rational(hi) << "]";
    return os.str();
}

namespace {

// Every finite mpfr value is a binary rational; recover it exactly.
Rat mpfr_to_rat(mpfr_t v) {
    if (!mpfr_number_p(v)) throw PrecisionUnreachable("non-finite value in enclosure pipeline");
    if (mpfr_zero_p(v)) return Rat(0);
    mpz_t z;
    mpz_init(z);
    mpfr_exp_t e = mpfr_get_z_2exp(z, v);
    Int mant(z);
    mpz_clear(z);
    Rat r(mant);
    if (e > 0) {
        r *= boost::multiprecision::pow(Int(2), static_cast<unsigned>(e));
    } else if (e < 0) {
        r /= boost::multiprecision::pow(Int(2), static_cast<unsigned>(-e));
    }
    return r;
}

void mpfr_set_rat(mpfr_t v, const Rat& r, mpfr_rnd_t rnd) {
    mpq_t q;
    mpq_init(q);
    mpq_set(q, r.backend().data());
    mpfr_set_q(v, q, rnd);
    mpq_clear(q);
}

// One directed-rounding pass: f computed at precision `prec` with both
// rounding modes; returns a certified [lo,hi].
template <typename Fn>
QInterval directed_pass(mpfr_prec_t prec, Fn&& fn) {
    mpfr_t lo, hi;
    mpfr_init2(lo, prec);
    mpfr_init2(hi, prec);
    fn(lo, MPFR_RNDD);
    fn(hi, MPFR_RNDU);
    QInterval out(mpfr_to_rat(lo), mpfr_to_rat(hi));
    mpfr_clears(lo, hi, static_cast<mpfr_ptr>(nullptr));
    return out;
}

template <typename Fn>
QInterval refine_to_width(const Rat& width, Fn&& fn) {
    if (width <= 0) throw std::invalid_argument("width must be positive");
    for (mpfr_prec_t prec = 64; prec <= 1 << 20; prec *= 2) {
        QInterval out = directed_pass(prec, fn);
        if (out.width() <= width) return out;
    }
    throw PrecisionUnreachable("enclosure did not converge to requested width");
}

}  // namespace

QInterval tan_pi(const Rat& t, const Rat& width) {
    if (t <= Rat(-1, 2) || t >= Rat(1, 2))
        throw std::invalid_argument("tan_pi argument outside (-1/2,1/2)");
    if (t == 0) return QInterval(Rat(0));
    if (t == Rat(1, 4)) return QInterval(Rat(1));
    if (t == Rat(-1, 4)) return QInterval(Rat(-1));
    const bool pos = t > 0;
    return refine_to_width(width, [&](mpfr_t out, mpfr_rnd_t rnd) {
        // tan increasing on (-pi/2, pi/2): a directed bound on the argument
        // carries through. For a lower bound of pi*t with t>0, round pi down.
        mpfr_t pi, arg;
        mpfr_init2(pi, mpfr_get_prec(out));
        mpfr_init2(arg, mpfr_get_prec(out));
        mpfr_rnd_t pi_rnd = (rnd == MPFR_RNDD) == pos ? MPFR_RNDD : MPFR_RNDU;
        mpfr_const_pi(pi, pi_rnd);
        mpfr_set_rat(arg, t, rnd);
        mpfr_mul(arg, arg, pi, rnd);
        mpfr_tan(out, arg, rnd);
        mpfr_clears(pi, arg, static_cast<mpfr_ptr>(nullptr));
    });
}

QInterval atan_over_pi(const Rat& x, const Rat& width) {
    if (x == 0) return QInterval(Rat(0));
    if (x == 1) return QInterval(Rat(1, 4));
    if (x == -1) return QInterval(Rat(-1, 4));
    const bool pos = x > 0;
    return refine_to_width(width, [&](mpfr_t out, mpfr_rnd_t rnd) {
        mpfr_t pi, a;
        mpfr_init2(pi, mpfr_get_prec(out));
        mpfr_init2(a, mpfr_get_prec(out));
        // Dividing a positive value by pi: round pi the opposite way.
        mpfr_rnd_t pi_rnd = (rnd == MPFR_RNDD) == pos ? MPFR_RNDU : MPFR_RNDD;
        mpfr_const_pi(pi, pi_rnd);
        mpfr_set_rat(a, x, rnd);
        mpfr_atan(a, a, rnd);
        mpfr_div(out, a, pi, rnd);
        mpfr_clears(pi, a, static_cast<mpfr_ptr>(nullptr));
    });
}

}  // namespace circlelab
