// Oracle for the defining property of the free-space kernel: convolving it
// with a smooth compactly supported bump and applying (-Lap - lambda^2) must
// return the bump. The Laplacian is moved onto the bump analytically
// (convolution commutes with derivatives), so the check is a pure quadrature
// identity with no finite differencing.
#ifndef RESOLAB_TESTS_DELTA_IDENTITY_HPP
#define RESOLAB_TESTS_DELTA_IDENTITY_HPP

#include <array>
#include <cmath>
#include <complex>

#include "quadrature.hpp"
#include "resolab/free_resolvent.hpp"

namespace delta_id {

constexpr double bump_radius = 0.5;

/// phi(p) = exp(-1/(1 - (|p|/R)^2)) inside |p| < R, 0 outside.
inline double bump(double rho) {
    double w = (rho / bump_radius) * (rho / bump_radius);
    if (w >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - w));
}

/// Laplacian of the radial bump in dimension n: f'' + (n-1)/rho * f'.
inline double bump_laplacian(double rho, int n) {
    double R2 = bump_radius * bump_radius;
    double w = rho * rho / R2;
    if (w >= 1.0) return 0.0;
    double f = std::exp(-1.0 / (1.0 - w));
    double om = 1.0 - w;
    double qp = -2.0 * rho / (R2 * om * om);
    double qpp = -2.0 / (R2 * om * om) - 8.0 * rho * rho / (R2 * R2 * om * om * om);
    double fpp = (qpp + qp * qp) * f;
    if (rho == 0.0) return n * qpp * f; // f'/rho -> qpp*f as rho -> 0
    return fpp + (n - 1.0) / rho * qp * f;
}

/// Convolution (K * g)(x) in dim 2 for radial g supported in |p| < R:
/// polar coordinates centered at x; tanh-sinh absorbs the log of the kernel.
template <typename G>
std::complex<double> convolve2(const resolab::LogPoint& lambda,
                               std::array<double, 2> x, G&& g,
                               int n_rad = 801, int n_ang = 192) {
    double xr = std::hypot(x[0], x[1]);
    double r_max = xr + bump_radius;
    auto rad = testq::tanh_sinh(0.0, r_max, n_rad);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        double r = rad.nodes[i];
        double ring = 0.0;
        for (int a = 0; a < n_ang; ++a) {
            double al = 2.0 * M_PI * a / n_ang;
            double py = x[0] + r * std::cos(al), pz = x[1] + r * std::sin(al);
            ring += g(std::hypot(py, pz));
        }
        ring *= 2.0 * M_PI / n_ang;
        acc += rad.weights[i] * r * ring * resolab::kernel(2, lambda, r);
    }
    return acc;
}

/// Same in dim 3: spherical coordinates about x; the r^2 weight cancels the
/// kernel's 1/r so plain Gauss-Legendre suffices radially.
template <typename G>
std::complex<double> convolve3(const resolab::LogPoint& lambda,
                               std::array<double, 3> x, G&& g,
                               int n_rad = 400, int n_pol = 64, int n_az = 128) {
    double xr = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    double r_max = xr + bump_radius;
    auto rad = testq::gauss_legendre(0.0, r_max, n_rad);
    auto pol = testq::gauss_legendre(-1.0, 1.0, n_pol); // in cos(theta)
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n_rad; ++i) {
        double r = rad.nodes[i];
        double sphere = 0.0;
        for (int j = 0; j < n_pol; ++j) {
            double ct = pol.nodes[j], st = std::sqrt(1.0 - ct * ct);
            double row = 0.0;
            for (int a = 0; a < n_az; ++a) {
                double al = 2.0 * M_PI * a / n_az;
                double p0 = x[0] + r * st * std::cos(al);
                double p1 = x[1] + r * st * std::sin(al);
                double p2 = x[2] + r * ct;
                row += g(std::sqrt(p0 * p0 + p1 * p1 + p2 * p2));
            }
            sphere += pol.weights[j] * row * (2.0 * M_PI / n_az);
        }
        acc += rad.weights[i] * r * r * sphere * resolab::kernel(3, lambda, r);
    }
    return acc;
}

/// (-Lap - lambda^2)(K * phi)(x) evaluated as -(K * Lap phi) - lambda^2 (K * phi).
inline std::complex<double> operator_applied(int dim, const resolab::LogPoint& lambda,
                                             std::array<double, 3> x) {
    std::complex<double> lam2 = std::pow(resolab::project(lambda), 2);
    auto phi = [](double rho) { return bump(rho); };
    auto lap = [dim](double rho) { return bump_laplacian(rho, dim); };
    if (dim == 2) {
        std::array<double, 2> x2{x[0], x[1]};
        return -convolve2(lambda, x2, lap) - lam2 * convolve2(lambda, x2, phi);
    }
    return -convolve3(lambda, x, lap) - lam2 * convolve3(lambda, x, phi);
}

} // namespace delta_id

#endif
