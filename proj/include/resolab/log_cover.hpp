#ifndef RESOLAB_LOG_COVER_HPP
#define RESOLAB_LOG_COVER_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace resolab {

/// A point on the logarithmic cover of the punctured plane: positive modulus
/// plus an unrestricted real argument. Two points with the same projection to
/// the plane but arguments differing by 2*pi are distinct.
struct LogPoint {
    double modulus;
    double argument;

    LogPoint(double mod, double arg) : modulus(mod), argument(arg) {
        if (!(mod > 0.0))
            throw std::domain_error("LogPoint: modulus must be positive");
    }

    bool operator==(const LogPoint& o) const {
        return modulus == o.modulus && argument == o.argument;
    }
};

inline std::complex<double> project(const LogPoint& p) {
    return std::polar(p.modulus, p.argument);
}

/// Shift by an integer number of half-turns: arg -> arg + l*pi.
inline LogPoint shift_sheet(const LogPoint& p, int l) {
    return LogPoint(p.modulus, p.argument + static_cast<double>(l) * M_PI);
}

/// Scale by a positive real factor; the argument is unchanged.
inline LogPoint scale(const LogPoint& p, double factor) {
    return LogPoint(p.modulus * factor, p.argument);
}

/// Lift a nonzero complex number near a reference cover point: the result
/// projects to z and its argument lies within (-pi, pi] of the reference's.
inline LogPoint lift_near(std::complex<double> z, const LogPoint& ref) {
    double m = std::abs(z);
    if (!(m > 0.0))
        throw std::domain_error("lift_near: cannot lift 0 to the cover");
    double delta = std::arg(z * std::polar(1.0, -ref.argument));
    return LogPoint(m, ref.argument + delta);
}

/// Open sector-annulus region on the cover, cf. the sets used for the
/// genericity sweep: bounded argument window and bounded modulus window.
struct SectorRegion {
    double arg_min, arg_max;
    double mod_min, mod_max;

    SectorRegion(double a0, double a1, double m0, double m1)
        : arg_min(a0), arg_max(a1), mod_min(m0), mod_max(m1) {
        if (!(a0 < a1))
            throw std::invalid_argument("SectorRegion: arg_min < arg_max required");
        if (!(0.0 < m0 && m0 < m1))
            throw std::invalid_argument("SectorRegion: 0 < mod_min < mod_max required");
    }
};

inline bool contains(const SectorRegion& r, const LogPoint& p) {
    return r.arg_min < p.argument && p.argument < r.arg_max &&
           r.mod_min < p.modulus && p.modulus < r.mod_max;
}

} // namespace resolab

#endif
