// Minimal double-double arithmetic (~31 significant digits), used as a
// fallback for the Bessel ascending series when the J + iY combination
// cancels exponentially. Error-free transformations follow the usual
// TwoSum / FMA-based TwoProd constructions.
#ifndef RESOLAB_DETAIL_DOUBLE_DOUBLE_HPP
#define RESOLAB_DETAIL_DOUBLE_DOUBLE_HPP

#include <cmath>
#include <cstdlib>
#include <string_view>

namespace resolab::dd_detail {

struct dd {
    double hi = 0.0, lo = 0.0;
    dd() = default;
    dd(double h) : hi(h), lo(0.0) {}
    dd(double h, double l) : hi(h), lo(l) {}
    explicit operator double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) {
    double q1 = a.hi / b.hi;
    dd r = a - b * dd(q1);
    double q2 = r.hi / b.hi;
    r = r - b * dd(q2);
    double q3 = r.hi / b.hi;
    dd q = quick_two_sum(q1, q2);
    return q + dd(q3);
}

inline dd from_decimal(std::string_view s) {
    dd v(0.0);
    dd scale(1.0);
    bool frac = false, neg = false;
    for (char c : s) {
        if (c == '-') { neg = true; continue; }
        if (c == '.') { frac = true; continue; }
        v = v * dd(10.0) + dd(static_cast<double>(c - '0'));
        if (frac) scale = scale * dd(10.0);
    }
    v = v / scale;
    return neg ? -v : v;
}

inline const dd& dd_pi() {
    static const dd v = from_decimal("3.14159265358979323846264338327950288419716939937511");
    return v;
}

inline const dd& dd_ln2() {
    static const dd v = from_decimal("0.69314718055994530941723212145817656807550013436026");
    return v;
}

inline const dd& dd_euler_gamma() {
    static const dd v = from_decimal("0.57721566490153286060651209008240243104215933593992");
    return v;
}

/// Natural log of a positive double, in double-double precision, via
/// frexp reduction and the atanh series.
inline dd dd_log(double x) {
    int e = 0;
    double m = std::frexp(x, &e); // x = m * 2^e, m in [0.5, 1)
    if (m < M_SQRT1_2) { m *= 2.0; e -= 1; }
    dd u = (dd(m) - dd(1.0)) / (dd(m) + dd(1.0)); // |u| <= 3 - 2*sqrt(2) ~ 0.172
    dd u2 = u * u;
    dd term = u;
    dd sum = u;
    for (int k = 3; k < 60; k += 2) {
        term = term * u2;
        dd add = term / dd(static_cast<double>(k));
        sum = sum + add;
        if (std::abs(add.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    return dd(2.0) * sum + dd(static_cast<double>(e)) * dd_ln2();
}

/// sin and cos of a double angle, in double-double precision. Reduction
/// against the dd value of pi/2 keeps the result accurate for the moderate
/// angles used here (|th| up to a few tens).
inline void dd_sincos(double th, dd& s, dd& c) {
    dd half_pi = dd_pi() / dd(2.0);
    double kd = std::round(th / (0.5 * M_PI));
    dd x = dd(th) - dd(kd) * half_pi; // |x| <= pi/4 + tiny
    dd x2 = x * x;

    dd st = x, ssum = x;
    dd ct(1.0), csum(1.0);
    for (int k = 1; k < 25; ++k) {
        st = st * x2 / dd(static_cast<double>(-(2 * k) * (2 * k + 1)));
        ct = ct * x2 / dd(static_cast<double>(-(2 * k - 1) * (2 * k)));
        ssum = ssum + st;
        csum = csum + ct;
        if (std::abs(st.hi) < 1e-34 && std::abs(ct.hi) < 1e-34) break;
    }

    long k = static_cast<long>(kd);
    switch (((k % 4) + 4) % 4) {
        case 0: s = ssum; c = csum; break;
        case 1: s = csum; c = -ssum; break;
        case 2: s = -ssum; c = -csum; break;
        default: s = -csum; c = ssum; break;
    }
}

struct ddc {
    dd re, im;
    ddc() = default;
    ddc(dd r, dd i) : re(r), im(i) {}
    ddc(double r, double i = 0.0) : re(r), im(i) {}
};

inline ddc operator+(ddc a, ddc b) { return {a.re + b.re, a.im + b.im}; }
inline ddc operator-(ddc a, ddc b) { return {a.re - b.re, a.im - b.im}; }
inline ddc operator*(ddc a, ddc b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ddc operator*(ddc a, dd s) { return {a.re * s, a.im * s}; }
inline ddc operator/(ddc a, dd s) { return {a.re / s, a.im / s}; }

inline ddc invert(ddc a) {
    dd d = a.re * a.re + a.im * a.im;
    return {a.re / d, -a.im / d};
}

} // namespace resolab::dd_detail

#endif
