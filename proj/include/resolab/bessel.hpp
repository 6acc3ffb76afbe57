#ifndef RESOLAB_BESSEL_HPP
#define RESOLAB_BESSEL_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "resolab/detail/double_double.hpp"
#include "resolab/log_cover.hpp"

namespace resolab {

/// Order m = twice_order/2: even values are the integer orders (planar
/// problems), odd values the half-integer orders (n = 3 closed forms).
struct BesselOrder {
    int twice_order;

    explicit BesselOrder(int t) : twice_order(t) {
        if (t < 0)
            throw std::domain_error("BesselOrder: nonnegative orders only");
    }
    static BesselOrder integer(int m) { return BesselOrder(2 * m); }
    static BesselOrder half_integer(int l) { return BesselOrder(2 * l + 1); }

    bool is_integer() const { return twice_order % 2 == 0; }
    int integer_part() const { return twice_order / 2; }
    /// l for order l + 1/2.
    int spherical_degree() const { return (twice_order - 1) / 2; }
    double value() const { return 0.5 * twice_order; }
};

namespace bessel_detail {

using cplx = std::complex<double>;
constexpr double euler_gamma = 0.57721566490153286060651209;

/// |z| at or below this: ascending series (with a double-double rescue when
/// the requested combination cancels). Above: large-argument expansion,
/// whose optimal truncation error e^{-2|z|} is below 1e-13 from here on.
constexpr double series_asymptotic_switch = 15.0;
/// Beyond this modulus the large-argument expansion is not tuned and
/// accuracy degrades; callers can query within_tuned_range().
constexpr double tuned_modulus_limit = 50.0;

enum class Kind { H1, H2, J, Y };

struct JYPair {
    cplx j, y;
    double err; // absolute roundoff estimate shared by both components
};

inline cplx combine(const JYPair& s, Kind k) {
    switch (k) {
        case Kind::H1: return s.j + cplx(0, 1) * s.y;
        case Kind::H2: return s.j - cplx(0, 1) * s.y;
        case Kind::J: return s.j;
        default: return s.y;
    }
}

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// J_n and Y_n by the ascending series with the logarithm taken on the cover
/// (multi-sheet continuation comes from the unrestricted argument alone).
/// Tracks the largest intermediate magnitude to estimate cancellation.
inline JYPair jy_series(int n, const LogPoint& p) {
    double r = p.modulus, theta = p.argument;
    double th = std::remainder(theta, 2.0 * M_PI);
    cplx z = std::polar(r, th);
    cplx logzh(std::log(0.5 * r), theta);

    cplx half = 0.5 * z;
    cplx q = half * half;
    double peak = 1.0;

    cplx lead = 1.0;
    for (int k = 0; k < n; ++k) lead *= half / static_cast<double>(k + 1);
    cplx term = 1.0, jsum = 1.0;
    for (int k = 1; k < 300; ++k) {
        term *= -q / static_cast<double>(k * (k + n));
        jsum += term;
        peak = std::max(peak, std::abs(term));
        if (std::abs(term) < 1e-18 * std::abs(jsum) + 1e-300) break;
    }
    cplx j = lead * jsum;
    peak *= std::abs(lead);

    cplx finite = 0.0; // sum_{k<n} (n-k-1)!/k! (z/2)^{2k-n}
    if (n > 0) {
        cplx pw = std::pow(half, -n);
        double c = factorial(n - 1);
        for (int k = 0; k < n; ++k) {
            finite += c * pw;
            peak = std::max(peak, std::abs(c * pw));
            pw *= q;
            if (k + 1 < n) c /= static_cast<double>((n - 1 - k) * (k + 1));
        }
    }

    // sum_k (-1)^k (psi(k+1)+psi(n+k+1)) (z/2)^{2k+n} / (k! (n+k)!)
    double psi_k = -euler_gamma;
    double psi_nk = -euler_gamma;
    for (int jj = 1; jj <= n; ++jj) psi_nk += 1.0 / jj;
    cplx pw = std::pow(half, n) / factorial(n);
    cplx t = pw * (psi_k + psi_nk);
    cplx acc = t;
    for (int k = 1; k < 300; ++k) {
        pw *= -q / static_cast<double>(k * (k + n));
        psi_k += 1.0 / k;
        psi_nk += 1.0 / (n + k);
        t = pw * (psi_k + psi_nk);
        acc += t;
        peak = std::max(peak, std::abs(t));
        if (std::abs(t) < 1e-18 * std::abs(acc) + 1e-300) break;
    }

    cplx y = (2.0 / M_PI) * logzh * j - finite / M_PI - acc / M_PI;
    double err = 1e-15 * peak * std::max(1.0, std::abs(logzh));
    return {j, y, err};
}

struct JYPairDD {
    dd_detail::ddc j, y;
};

/// Same series in double-double precision; rescues the exponentially small
/// Hankel combination when the double path cancels. The J + iY combination
/// must also be formed in dd, so this returns the unrounded pair.
inline JYPairDD jy_series_dd(int n, const LogPoint& p) {
    using namespace dd_detail;
    double r = p.modulus, theta = p.argument;
    dd sth, cth;
    dd_sincos(theta, sth, cth);
    ddc z(dd(r) * cth, dd(r) * sth);
    ddc half = z * dd(0.5);
    ddc q = half * half;
    ddc logzh(dd_log(0.5 * r), dd(theta));

    ddc lead(1.0, 0.0);
    for (int k = 0; k < n; ++k) lead = lead * half / dd(static_cast<double>(k + 1));
    ddc term(1.0, 0.0), jsum(1.0, 0.0);
    for (int k = 1; k < 400; ++k) {
        term = term * q / dd(static_cast<double>(-k * (k + n)));
        jsum = jsum + term;
        if (std::abs(term.re.hi) + std::abs(term.im.hi) <
            1e-34 * (std::abs(jsum.re.hi) + std::abs(jsum.im.hi)) + 1e-300)
            break;
    }
    ddc j = lead * jsum;

    ddc finite(0.0, 0.0);
    if (n > 0) {
        ddc pw(1.0, 0.0);
        for (int k = 0; k < n; ++k) pw = pw * half;
        pw = invert(pw);
        dd c(factorial(n - 1));
        for (int k = 0; k < n; ++k) {
            finite = finite + pw * c;
            pw = pw * q;
            if (k + 1 < n) c = c / dd(static_cast<double>((n - 1 - k) * (k + 1)));
        }
    }

    dd psi_k = -dd_euler_gamma();
    dd psi_nk = -dd_euler_gamma();
    for (int jj = 1; jj <= n; ++jj) psi_nk = psi_nk + dd(1.0) / dd(static_cast<double>(jj));
    ddc pw(1.0, 0.0);
    for (int k = 0; k < n; ++k) pw = pw * half;
    pw = pw / dd(factorial(n));
    ddc acc = pw * (psi_k + psi_nk);
    for (int k = 1; k < 400; ++k) {
        pw = pw * q / dd(static_cast<double>(-k * (k + n)));
        psi_k = psi_k + dd(1.0) / dd(static_cast<double>(k));
        psi_nk = psi_nk + dd(1.0) / dd(static_cast<double>(n + k));
        ddc t = pw * (psi_k + psi_nk);
        acc = acc + t;
        if (std::abs(t.re.hi) + std::abs(t.im.hi) <
            1e-34 * (std::abs(acc.re.hi) + std::abs(acc.im.hi)) + 1e-300)
            break;
    }

    ddc y = logzh * j * (dd(2.0) / dd_pi()) - finite / dd_pi() - acc / dd_pi();
    return {j, y};
}

inline cplx combine_dd(const JYPairDD& s, Kind k) {
    using namespace dd_detail;
    ddc v;
    switch (k) {
        case Kind::H1: v = s.j + ddc(-s.y.im, s.y.re); break;
        case Kind::H2: v = s.j - ddc(-s.y.im, s.y.re); break;
        case Kind::J: v = s.j; break;
        default: v = s.y;
    }
    return {double(v.re), double(v.im)};
}

/// Large-argument Hankel expansions on the principal sector. kind = +1 for
/// H^(1), -1 for H^(2). Truncated adaptively; adequate for the desk-scale
/// window |z| in (14, 50] at moderate orders.
inline cplx hankel_asymptotic(int n, cplx z, int kind) {
    double mu = 4.0 * n * n;
    cplx iz(0.0, kind * 1.0);
    cplx term = 1.0, sum = 1.0;
    double prev = 1.0;
    for (int k = 1; k <= 40; ++k) {
        double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= num / (8.0 * k) * iz / z;
        double mag = std::abs(term);
        if (mag > prev) break; // divergent tail
        sum += term;
        prev = mag;
        if (mag < 1e-17 * std::abs(sum)) break;
    }
    cplx phase = z - (0.5 * n + 0.25) * M_PI;
    cplx expo = std::exp(cplx(0.0, kind * 1.0) * phase);
    return std::sqrt(2.0 / (M_PI * z)) * expo * sum;
}

/// Both cover Hankel solutions in the asymptotic regime, via reduction to
/// the principal sector and the H_n(z e^{il pi}) continuation identities.
inline std::pair<cplx, cplx> integer_asymptotic_pair(int n, const LogPoint& p) {
    double r = p.modulus, theta = p.argument;
    int l = static_cast<int>(std::floor(theta / M_PI + 0.5));
    double th0 = theta - l * M_PI;
    cplx z0 = std::polar(r, th0);
    // The expansion is most accurate at orders 0 and 1; higher orders come
    // from upward recurrence, which is stable for the Hankel solutions.
    cplx h1 = hankel_asymptotic(0, z0, +1);
    cplx h2 = hankel_asymptotic(0, z0, -1);
    if (n > 0) {
        cplx h1p = h1, h2p = h2;
        h1 = hankel_asymptotic(1, z0, +1);
        h2 = hankel_asymptotic(1, z0, -1);
        for (int k = 1; k < n; ++k) {
            cplx f = 2.0 * k / z0;
            cplx h1n = f * h1 - h1p;
            cplx h2n = f * h2 - h2p;
            h1p = h1; h1 = h1n;
            h2p = h2; h2 = h2n;
        }
    }
    double sign = ((static_cast<long>(l) * n) % 2 != 0) ? -1.0 : 1.0;
    double ld = static_cast<double>(l);
    cplx H1 = sign * ((1.0 - ld) * h1 - ld * h2);
    cplx H2 = sign * ((1.0 + ld) * h2 + ld * h1);
    return {H1, H2};
}

inline cplx integer_eval(int n, const LogPoint& p, Kind kind) {
    double r = p.modulus;
    // the series also serves orders at or above the modulus, where the
    // large-argument expansion degrades but the series stays benign
    if (r <= series_asymptotic_switch || n >= r) {
        JYPair s = jy_series(n, p);
        cplx v = combine(s, kind);
        if (s.err > 3e-13 * std::abs(v)) v = combine_dd(jy_series_dd(n, p), kind);
        return v;
    }
    auto [H1, H2] = integer_asymptotic_pair(n, p);
    switch (kind) {
        case Kind::H1: return H1;
        case Kind::H2: return H2;
        case Kind::J: return 0.5 * (H1 + H2);
        default: return (H1 - H2) / cplx(0.0, 2.0);
    }
}

/// J_n and H^(1)_n together from one series (or one asymptotic reduction):
/// the kernel assembly evaluates both at every quadrature pair, and in the
/// rescue band the double-double series dominates the cost.
inline std::pair<cplx, cplx> integer_eval_j_h1(int n, const LogPoint& p) {
    double r = p.modulus;
    if (r <= series_asymptotic_switch || n >= r) {
        JYPair s = jy_series(n, p);
        cplx j = combine(s, Kind::J);
        cplx h = combine(s, Kind::H1);
        if (s.err > 3e-13 * std::min(std::abs(j), std::abs(h))) {
            JYPairDD sdd = jy_series_dd(n, p);
            j = combine_dd(sdd, Kind::J);
            h = combine_dd(sdd, Kind::H1);
        }
        return {j, h};
    }
    auto [H1, H2] = integer_asymptotic_pair(n, p);
    return {0.5 * (H1 + H2), H1};
}

/// Half-integer orders via the spherical closed forms; only the square root
/// consults the cover argument, everything else is single-valued.
inline cplx half_integer_eval(int l, const LogPoint& p, Kind kind) {
    double r = p.modulus, theta = p.argument;
    double th = std::remainder(theta, 2.0 * M_PI);
    cplx z = std::polar(r, th);
    cplx s1 = 0.0, s2 = 0.0;
    double a = 1.0; // (l+k)! / (2^k k! (l-k)!)
    cplx ipow(1.0, 0.0);
    cplx invz = 1.0 / z;
    cplx zk = 1.0;
    for (int k = 0; k <= l; ++k) {
        s1 += a * ipow * zk;
        s2 += a * std::conj(ipow) * zk;
        a *= static_cast<double>((l + k + 1) * (l - k)) / (2.0 * (k + 1));
        ipow *= cplx(0.0, 1.0);
        zk *= invz;
    }
    cplx mi_pow = std::pow(cplx(0.0, -1.0), l + 1);
    cplx h1s = mi_pow * std::exp(cplx(0.0, 1.0) * z) / z * s1;
    cplx h2s = std::conj(mi_pow) * std::exp(cplx(0.0, -1.0) * z) / z * s2;
    // H_{l+1/2} = sqrt(2z/pi) h_l with the cover square root.
    cplx sqrt_z = std::exp(0.5 * cplx(std::log(r), theta));
    cplx f = std::sqrt(2.0 / M_PI) * sqrt_z;
    JYPair s{0.5 * f * (h1s + h2s), f * (h1s - h2s) / cplx(0.0, 2.0), 0.0};
    switch (kind) {
        case Kind::H1: return f * h1s;
        case Kind::H2: return f * h2s;
        default: return combine(s, kind);
    }
}

inline cplx eval(const BesselOrder& o, const LogPoint& p, Kind kind) {
    if (o.is_integer()) return integer_eval(o.integer_part(), p, kind);
    return half_integer_eval(o.spherical_degree(), p, kind);
}

/// Possibly-negative twice_order, via the reflection identities
/// F_{-v} = (-1)^v F_v (integer) and H^(1)_{-v} = e^{i v pi} H^(1)_v etc.
inline cplx eval_signed(int twice_order, const LogPoint& p, Kind kind) {
    if (twice_order >= 0) return eval(BesselOrder(twice_order), p, kind);
    BesselOrder o(-twice_order);
    if (o.is_integer()) {
        double sgn = (o.integer_part() % 2 != 0) ? -1.0 : 1.0;
        return sgn * eval(o, p, kind);
    }
    double v = o.value();
    cplx f1 = std::exp(cplx(0.0, M_PI * v));
    cplx h1 = f1 * eval(o, p, Kind::H1);
    cplx h2 = std::conj(f1) * eval(o, p, Kind::H2);
    switch (kind) {
        case Kind::H1: return h1;
        case Kind::H2: return h2;
        case Kind::J: return 0.5 * (h1 + h2);
        default: return (h1 - h2) / cplx(0.0, 2.0);
    }
}

} // namespace bessel_detail

inline bool within_tuned_range(const LogPoint& p) {
    return p.modulus <= bessel_detail::tuned_modulus_limit;
}

inline std::complex<double> hankel1(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::eval(o, p, bessel_detail::Kind::H1);
}

/// J_n and H^(1)_n together (integer order): one shared series evaluation,
/// halving the cost of kernel assemblies that need both.
inline std::pair<std::complex<double>, std::complex<double>>
bessel_j_and_hankel1(int n, const LogPoint& p) {
    int a = n >= 0 ? n : -n;
    auto v = bessel_detail::integer_eval_j_h1(a, p);
    if (n < 0 && a % 2 != 0) return {-v.first, -v.second};
    return v;
}

inline std::complex<double> hankel2(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::eval(o, p, bessel_detail::Kind::H2);
}

inline std::complex<double> bessel_j(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::eval(o, p, bessel_detail::Kind::J);
}

inline std::complex<double> bessel_y(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::eval(o, p, bessel_detail::Kind::Y);
}

/// J on the plane (principal branch). Integer orders are entire; half-integer
/// orders need z != 0.
inline std::complex<double> bessel_j(const BesselOrder& o, std::complex<double> z) {
    if (z == std::complex<double>(0.0, 0.0)) {
        if (o.is_integer())
            return o.integer_part() == 0 ? 1.0 : 0.0;
        throw std::domain_error("bessel_j: z = 0 with half-integer order");
    }
    return bessel_j(o, LogPoint(std::abs(z), std::arg(z)));
}

namespace bessel_detail {

/// d/dz F_v(z) = F_{v-1}(z) - (v/z) F_v(z), the stated derivative formula;
/// works for each of J, Y, H1, H2.
inline cplx cylinder_deriv(const BesselOrder& o, const LogPoint& p, Kind kind) {
    cplx z = project(p);
    cplx lower = eval_signed(o.twice_order - 2, p, kind);
    cplx same = eval_signed(o.twice_order, p, kind);
    return lower - (o.value() / z) * same;
}

} // namespace bessel_detail

inline std::complex<double> hankel1_deriv(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::cylinder_deriv(o, p, bessel_detail::Kind::H1);
}

inline std::complex<double> hankel2_deriv(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::cylinder_deriv(o, p, bessel_detail::Kind::H2);
}

inline std::complex<double> bessel_j_deriv(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::cylinder_deriv(o, p, bessel_detail::Kind::J);
}

inline std::complex<double> bessel_y_deriv(const BesselOrder& o, const LogPoint& p) {
    return bessel_detail::cylinder_deriv(o, p, bessel_detail::Kind::Y);
}

} // namespace resolab

#endif
