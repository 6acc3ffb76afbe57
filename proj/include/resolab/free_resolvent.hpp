#ifndef RESOLAB_FREE_RESOLVENT_HPP
#define RESOLAB_FREE_RESOLVENT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "resolab/bessel.hpp"
#include "resolab/log_cover.hpp"

namespace resolab {

struct KernelEval {
    int dim;
    LogPoint lambda;
    std::complex<double> value;
    double dist;
};

/// Outgoing free-space kernel at spectral parameter lambda (on the cover for
/// dim 2) and point separation dist. Normalized so that (-Lap - lambda^2)
/// applied to the convolution with a test function returns the test function;
/// see the delta-identity checks in the test suite.
inline std::complex<double> kernel(int dim, const LogPoint& lambda, double dist) {
    if (dist <= 0.0) throw std::domain_error("kernel: dist must be positive");
    if (dim == 2) {
        LogPoint z(lambda.modulus * dist, lambda.argument);
        return std::complex<double>(0.0, 0.25) * hankel1(BesselOrder::integer(0), z);
    }
    if (dim == 3) {
        // single-valued in lambda: e^{i lambda d} / (4 pi d). Reducing the
        // argument first makes full-turn sheet shifts exact no-ops.
        double th = std::remainder(lambda.argument, 2.0 * M_PI);
        std::complex<double> lam = std::polar(lambda.modulus, th);
        return std::exp(std::complex<double>(0.0, 1.0) * lam * dist) / (4.0 * M_PI * dist);
    }
    throw std::domain_error("kernel: dim must be 2 or 3");
}

inline KernelEval kernel_eval(int dim, const LogPoint& lambda, double dist) {
    return {dim, lambda, kernel(dim, lambda, dist), dist};
}

/// Difference of the kernel across ell half-turn sheet shifts. In dim 2 this
/// is a smooth J-Bessel kernel, linear in ell; in dim 3 the kernel is
/// single-valued so the jump vanishes for even ell (odd ell would flip the
/// sign of lambda itself and is not a sheet operation there).
inline std::complex<double> branch_jump(int dim, const LogPoint& lambda, int ell,
                                        double dist) {
    if (dist <= 0.0) throw std::domain_error("branch_jump: dist must be positive");
    if (dim == 3) {
        if (ell % 2 == 0) return 0.0;
        throw std::domain_error("branch_jump: odd ell unsupported for dim 3");
    }
    if (dim != 2) throw std::domain_error("branch_jump: dim must be 2 or 3");
    return kernel(2, shift_sheet(lambda, ell), dist) - kernel(2, lambda, dist);
}

struct BoundReport {
    double c_near = 0.0;      // fitted constant of the short-distance bound
    double c_far = 0.0;       // fitted constant of the long-distance bound
    double boundary_ratio = 0.0; // mismatch of the two bounds at dist = 1/|lambda|
    int samples_used = 0;
};

namespace resolvent_detail {

inline double near_shape(int dim, double dist) {
    return dim == 2 ? std::max(1.0, -std::log(dist)) : 1.0 / dist;
}

inline double far_shape(int dim, const LogPoint& lambda, double dist) {
    double im = lambda.modulus * std::sin(lambda.argument);
    double n = dim;
    return std::exp(-im * dist) * std::pow(lambda.modulus, 0.5 * (n - 3.0)) *
           std::pow(dist, 0.5 * (1.0 - n));
}

} // namespace resolvent_detail

/// Empirical fit of the smallest constants in the two-regime kernel bounds
/// over a sample grid in the given region. Diagnostic: reported, not gated.
inline BoundReport bound_check(int dim, const SectorRegion& region, int samples) {
    if (samples < 1) throw std::domain_error("bound_check: samples >= 1");
    BoundReport rep;
    std::vector<LogPoint> lams;
    double worst_near = 0.0, worst_far = 0.0, worst_boundary = 0.0;
    for (int i = 0; i < samples; ++i) {
        double fm = samples == 1 ? 0.5 : static_cast<double>(i) / (samples - 1);
        double mod = region.mod_min * std::pow(region.mod_max / region.mod_min, fm);
        for (int a = 0; a < samples; ++a) {
            double fa = samples == 1 ? 0.5 : static_cast<double>(a) / (samples - 1);
            // keep strictly inside the argument window
            double arg = region.arg_min + (0.02 + 0.96 * fa) * (region.arg_max - region.arg_min);
            LogPoint lam(mod, arg);
            double d_star = 1.0 / mod;
            for (int k = 0; k < 12; ++k) {
                double dn = d_star * std::pow(0.01, (k + 1) / 12.0);
                worst_near = std::max(worst_near,
                                      std::abs(kernel(dim, lam, dn)) /
                                          resolvent_detail::near_shape(dim, dn));
                double df = d_star * std::pow(20.0, (k + 1) / 12.0);
                worst_far = std::max(worst_far,
                                     std::abs(kernel(dim, lam, df)) /
                                         resolvent_detail::far_shape(dim, lam, df));
            }
            lams.push_back(lam);
            ++rep.samples_used;
        }
    }
    rep.c_near = worst_near;
    rep.c_far = worst_far;
    // mismatch of the two fitted bounds where the regimes meet
    for (const LogPoint& lam : lams) {
        double d_star = 1.0 / lam.modulus;
        double near_b = rep.c_near * resolvent_detail::near_shape(dim, d_star);
        double far_b = rep.c_far * resolvent_detail::far_shape(dim, lam, d_star);
        double ratio = near_b > far_b ? near_b / far_b : far_b / near_b;
        worst_boundary = std::max(worst_boundary, ratio);
    }
    rep.boundary_ratio = worst_boundary;
    return rep;
}

} // namespace resolab

#endif
