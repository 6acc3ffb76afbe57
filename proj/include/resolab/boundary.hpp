#ifndef RESOLAB_BOUNDARY_HPP
#define RESOLAB_BOUNDARY_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

using Vec2 = std::array<double, 2>;

inline double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(Vec2 a) { return std::hypot(a[0], a[1]); }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a[0], c * a[1]}; }

/// Smooth closed curve given by truncated Fourier series in the parameter:
/// x(s) = sum_k a_k cos(ks) + b_k sin(ks), likewise y(s). Coefficient pair
/// k=0 contributes only its cos part. Simple, regular, counterclockwise.
struct BoundaryCurve {
    std::vector<std::array<double, 2>> fourier_x; // (cos, sin) per harmonic
    std::vector<std::array<double, 2>> fourier_y;
    int n_samples = 128;
};

struct CurvePoint {
    Vec2 point;
    Vec2 tangent;       // unit
    Vec2 inward_normal; // unit, toward the obstacle interior
    double speed;       // |gamma'(s)|
};

namespace boundary_detail {

inline Vec2 series(const std::vector<std::array<double, 2>>& cx,
                   const std::vector<std::array<double, 2>>& cy, double s,
                   int deriv) {
    double vx = 0.0, vy = 0.0;
    std::size_t n = std::max(cx.size(), cy.size());
    for (std::size_t k = 0; k < n; ++k) {
        double c = std::cos(k * s), sn = std::sin(k * s);
        double bc, bs; // basis (cos ks, sin ks) differentiated deriv times
        double kp = std::pow(static_cast<double>(k), deriv);
        switch (deriv % 4) {
            case 0: bc = c; bs = sn; break;
            case 1: bc = -sn; bs = c; break;
            case 2: bc = -c; bs = -sn; break;
            default: bc = sn; bs = -c; break;
        }
        if (k < cx.size()) vx += kp * (cx[k][0] * bc + cx[k][1] * bs);
        if (k < cy.size()) vy += kp * (cy[k][0] * bc + cy[k][1] * bs);
    }
    return {vx, vy};
}

} // namespace boundary_detail

inline Vec2 curve_position(const BoundaryCurve& c, double s) {
    return boundary_detail::series(c.fourier_x, c.fourier_y, s, 0);
}

inline Vec2 curve_velocity(const BoundaryCurve& c, double s) {
    return boundary_detail::series(c.fourier_x, c.fourier_y, s, 1);
}

inline Vec2 curve_acceleration(const BoundaryCurve& c, double s) {
    return boundary_detail::series(c.fourier_x, c.fourier_y, s, 2);
}

inline CurvePoint curve_point(const BoundaryCurve& c, double s) {
    Vec2 p = curve_position(c, s);
    Vec2 v = curve_velocity(c, s);
    double sp = norm(v);
    Vec2 t{v[0] / sp, v[1] / sp};
    // left normal of a counterclockwise curve points into the obstacle
    Vec2 nu{-t[1], t[0]};
    return {p, t, nu, sp};
}

/// Throws std::invalid_argument if the curve is not simple, regular,
/// counterclockwise with even positive n_samples.
inline void validate_curve(const BoundaryCurve& c) {
    if (c.n_samples <= 0 || c.n_samples % 2 != 0)
        throw std::invalid_argument("curve: n_samples must be positive and even");
    if (c.fourier_x.empty() || c.fourier_y.empty())
        throw std::invalid_argument("curve: empty coefficient lists");
    int n = std::max(c.n_samples, 64);
    std::vector<Vec2> pts(n);
    double area2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 2.0 * M_PI * i / n;
        pts[i] = curve_position(c, s);
        if (norm(curve_velocity(c, s)) <= 1e-12)
            throw std::invalid_argument("curve: vanishing tangent (not regular)");
    }
    for (int i = 0; i < n; ++i) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[(i + 1) % n];
        area2 += a[0] * b[1] - a[1] * b[0];
        // non-adjacent samples must keep a positive distance
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (norm(pts[i] - pts[j]) < 1e-9)
                throw std::invalid_argument("curve: self-intersection detected");
        }
    }
    if (area2 <= 0.0)
        throw std::invalid_argument("curve: orientation must be counterclockwise");
}

/// Cumulative arc length table on an oversampled grid, with per-cell
/// Gauss refinement for point queries.
class ArcLength {
  public:
    explicit ArcLength(const BoundaryCurve& c) : curve_(&c), m_(4 * c.n_samples) {
        cum_.resize(m_ + 1, 0.0);
        // composite 5-point Gauss per cell: spectral-grade for smooth speed
        for (int i = 0; i < m_; ++i)
            cum_[i + 1] = cum_[i] + cell_integral(2.0 * M_PI * i / m_,
                                                  2.0 * M_PI * (i + 1) / m_);
    }

    double total() const { return cum_[m_]; }

    /// Arc length of gamma([0, s]) for s in [0, 2 pi); larger s wraps.
    double from_zero(double s) const {
        double u = s - 2.0 * M_PI * std::floor(s / (2.0 * M_PI));
        double cell = u * m_ / (2.0 * M_PI);
        int i = std::min(static_cast<int>(cell), m_ - 1);
        double s0 = 2.0 * M_PI * i / m_;
        return cum_[i] + cell_integral(s0, u);
    }

  private:
    double cell_integral(double a, double b) const {
        static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                     0.5384693101056831, 0.9061798459386640};
        static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                                     0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int q = 0; q < 5; ++q)
            acc += ws[q] * norm(curve_velocity(*curve_, mid + half * xs[q]));
        return acc * half;
    }

    const BoundaryCurve* curve_;
    int m_;
    std::vector<double> cum_;
};

/// Shortest along-curve distance between gamma(s1) and gamma(s2).
inline double arc_distance(const BoundaryCurve& c, double s1, double s2) {
    ArcLength arc(c);
    double l1 = arc.from_zero(s1), l2 = arc.from_zero(s2);
    double d = std::abs(l1 - l2);
    return std::min(d, arc.total() - d);
}

/// Normalized geodesic bump of radius h centered at gamma(center_param).
struct BumpFunction {
    double center_param = 0.0;
    double h = 0.1;
    double normalization = 1.0;
};

namespace boundary_detail {

inline double bump_profile(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

} // namespace boundary_detail

/// chi evaluated at parameter s (uses a shared precomputed arc table).
inline double bump_value(const BoundaryCurve& c, const ArcLength& arc,
                         const BumpFunction& b, double s) {
    double l1 = arc.from_zero(s), l0 = arc.from_zero(b.center_param);
    double d = std::abs(l1 - l0);
    d = std::min(d, arc.total() - d);
    return b.normalization * boundary_detail::bump_profile(d / b.h);
}

inline double bump_value(const BoundaryCurve& c, const BumpFunction& b, double s) {
    ArcLength arc(c);
    return bump_value(c, arc, b, s);
}

/// Constructs the bump and fixes its normalization so the arc-length
/// integral over the curve is exactly 1 (trapezoid on a grid resolving h).
inline BumpFunction make_bump(const BoundaryCurve& c, double center_param, double h) {
    if (h <= 0.0) throw std::invalid_argument("make_bump: h must be positive");
    ArcLength arc(c);
    if (h >= 0.5 * arc.total())
        throw std::invalid_argument("make_bump: h too large for this curve");
    BumpFunction b{center_param, h, 1.0};
    int n = std::max(2048, static_cast<int>(64.0 * arc.total() / h));
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 2.0 * M_PI * i / n;
        integral += bump_value(c, arc, b, s) * norm(curve_velocity(c, s));
    }
    integral *= 2.0 * M_PI / n;
    b.normalization = 1.0 / integral;
    return b;
}

// --- presets -------------------------------------------------------------

inline BoundaryCurve unit_circle(int n_samples = 128) {
    BoundaryCurve c;
    c.fourier_x = {{0.0, 0.0}, {1.0, 0.0}};
    c.fourier_y = {{0.0, 0.0}, {0.0, 1.0}};
    c.n_samples = n_samples;
    return c;
}

inline BoundaryCurve ellipse(double a, double b, int n_samples = 128) {
    BoundaryCurve c;
    c.fourier_x = {{0.0, 0.0}, {a, 0.0}};
    c.fourier_y = {{0.0, 0.0}, {0.0, b}};
    c.n_samples = n_samples;
    return c;
}

} // namespace resolab

#endif
