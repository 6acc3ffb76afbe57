#ifndef RESOLAB_NYSTROM_HPP
#define RESOLAB_NYSTROM_HPP

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resolab/bessel.hpp"
#include "resolab/boundary.hpp"
#include "resolab/free_resolvent.hpp"
#include "resolab/log_cover.hpp"

namespace resolab {

struct QuadratureDescriptor {
    int n_points = 0;
    std::string rule = "log-split-trapezoid";
};

/// Discretization of the single-layer operator S_lambda on a boundary curve.
/// The matrix depends analytically on lambda (as a cover point), and its
/// smallest singular value is the resonance indicator.
struct DiscreteOperator {
    LogPoint lambda;
    Eigen::MatrixXcd matrix;
    std::string curve_id;
    QuadratureDescriptor quadrature;
};

namespace nystrom_detail {

inline constexpr double euler_gamma = 0.5772156649015328606;

/// Product-quadrature weights for the periodic logarithm ln(4 sin^2((t-s)/2))
/// on the equispaced 2n-point grid: R_k for grid offset k.
inline std::vector<double> log_weights(int n) {
    std::vector<double> R(2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        double acc = 0.0;
        for (int m = 1; m < n; ++m) acc += std::cos(m * k * M_PI / n) / m;
        R[k] = -(2.0 * M_PI / n) * acc - (M_PI / (n * n)) * ((k % 2 == 0) ? 1.0 : -1.0);
    }
    return R;
}

/// Deterministic identifier of a curve: hash of its Fourier data.
inline std::string curve_fingerprint(const BoundaryCurve& c) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t len) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& a : c.fourier_x) mix(a.data(), sizeof(a));
    for (const auto& a : c.fourier_y) mix(a.data(), sizeof(a));
    mix(&c.n_samples, sizeof(c.n_samples));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace nystrom_detail

/// Nystrom matrix for S_lambda[phi](x) = int kernel(2, lambda, |x-y|) phi(y) dS(y)
/// on the equispaced parameter grid of the curve, with the logarithmic part of
/// the kernel handled by product quadrature and the smooth remainder by the
/// trapezoid rule. Spectrally accurate for smooth curves.
inline DiscreteOperator assemble_single_layer(const BoundaryCurve& curve,
                                              const LogPoint& lambda) {
    validate_curve(curve);
    int N = curve.n_samples;
    if (N > 1024)
        throw std::invalid_argument("assemble_single_layer: N <= 1024 required");
    int n = N / 2;
    using cplx = std::complex<double>;
    const cplx I(0.0, 1.0);

    std::vector<double> t(N), speed(N);
    std::vector<Vec2> pos(N);
    for (int i = 0; i < N; ++i) {
        t[i] = 2.0 * M_PI * i / N;
        pos[i] = curve_position(curve, t[i]);
        speed[i] = norm(curve_velocity(curve, t[i]));
    }
    std::vector<double> R = nystrom_detail::log_weights(n);

    Eigen::MatrixXcd A(N, N);
    for (int i = 0; i < N; ++i) {
        // diagonal limit of the smooth remainder after the log split
        cplx log_half_lambda =
            cplx(std::log(0.5 * lambda.modulus * speed[i]), lambda.argument);
        cplx m1 = -1.0 / (4.0 * M_PI);
        cplx m2 = I / 4.0 - nystrom_detail::euler_gamma / (2.0 * M_PI) -
                  log_half_lambda / (2.0 * M_PI);
        A(i, i) = (R[0] * m1 + (M_PI / n) * m2) * speed[i];
        // off-diagonal entries share the kernel values across the symmetric
        // pair (i,j)/(j,i); only the speed factor differs
        for (int j = i + 1; j < N; ++j) {
            double d = norm(pos[i] - pos[j]);
            LogPoint z(lambda.modulus * d, lambda.argument);
            auto [jv, hv] = bessel_j_and_hankel1(0, z);
            cplx full = I / 4.0 * hv;
            cplx mm1 = -jv / (4.0 * M_PI);
            double ls = std::log(4.0 * std::pow(std::sin(0.5 * (t[i] - t[j])), 2));
            cplx entry = R[j - i] * mm1 + (M_PI / n) * (full - mm1 * ls);
            A(i, j) = entry * speed[j];
            A(j, i) = entry * speed[i];
        }
    }
    return {lambda, std::move(A), nystrom_detail::curve_fingerprint(curve),
            {N, "log-split-trapezoid"}};
}

inline double smallest_singular_value(const DiscreteOperator& op) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(op.matrix);
    return svd.singularValues().minCoeff();
}

/// Binary dump: 32-byte header (magic "RESOLAB1", N as uint64, lambda modulus
/// and argument as float64), then the row-major complex128 matrix entries.
/// All fields little-endian.
inline void write_operator(const DiscreteOperator& op, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_operator: cannot open " + path);
    char header[32] = {};
    std::memcpy(header, "RESOLAB1", 8);
    std::uint64_t N = static_cast<std::uint64_t>(op.matrix.rows());
    std::memcpy(header + 8, &N, 8);
    std::memcpy(header + 16, &op.lambda.modulus, 8);
    std::memcpy(header + 24, &op.lambda.argument, 8);
    f.write(header, 32);
    for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
            std::complex<double> v = op.matrix(i, j);
            double re = v.real(), im = v.imag();
            f.write(reinterpret_cast<const char*>(&re), 8);
            f.write(reinterpret_cast<const char*>(&im), 8);
        }
    if (!f) throw std::runtime_error("write_operator: write failed for " + path);
}

inline DiscreteOperator read_operator(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_operator: cannot open " + path);
    char header[32];
    f.read(header, 32);
    if (!f || std::memcmp(header, "RESOLAB1", 8) != 0)
        throw std::runtime_error("read_operator: bad header in " + path);
    std::uint64_t N;
    double mod, arg;
    std::memcpy(&N, header + 8, 8);
    std::memcpy(&mod, header + 16, 8);
    std::memcpy(&arg, header + 24, 8);
    Eigen::MatrixXcd A(N, N);
    for (std::uint64_t i = 0; i < N; ++i)
        for (std::uint64_t j = 0; j < N; ++j) {
            double re, im;
            f.read(reinterpret_cast<char*>(&re), 8);
            f.read(reinterpret_cast<char*>(&im), 8);
            A(i, j) = {re, im};
        }
    if (!f) throw std::runtime_error("read_operator: truncated file " + path);
    return {LogPoint(mod, arg), std::move(A), "", {static_cast<int>(N),
            "log-split-trapezoid"}};
}

} // namespace resolab

#endif
