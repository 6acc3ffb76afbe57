#ifndef RESOLAB_DEFORMATION_HPP
#define RESOLAB_DEFORMATION_HPP

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "resolab/boundary.hpp"

namespace resolab {

using Mat2 = std::array<std::array<double, 2>, 2>;

namespace deform_detail {

/// Smooth step: 1 for u <= 1/2, 0 for u >= 1, strictly monotone between.
inline double cut(double u) {
    auto B = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    double up = B(2.0 - 2.0 * u), down = B(2.0 * u - 1.0);
    if (up == 0.0) return 0.0;
    return up / (up + down);
}

} // namespace deform_detail

/// Parameter of the curve point closest to x. Scans a coarse grid on
/// [center - window, center + window] (full curve by default), then runs
/// safeguarded Newton on the normal-projection equation.
namespace deform_detail {

/// Newton refinement of the normal-projection equation from a bracketing
/// coarse-scan minimum at best_s with grid spacing `spacing`.
inline double closest_param_refine(const BoundaryCurve& c, Vec2 x, double best_s,
                                   double spacing) {
    double lo = best_s - spacing, hi = best_s + spacing;
    double s = best_s;
    for (int it = 0; it < 40; ++it) {
        Vec2 g = curve_position(c, s), v = curve_velocity(c, s);
        Vec2 acc = curve_acceleration(c, s);
        double f = dot(g - x, v);
        double fp = dot(v, v) + dot(g - x, acc);
        double step = fp != 0.0 ? f / fp : 0.0;
        double snew = s - step;
        if (snew < lo || snew > hi) snew = 0.5 * (lo + hi);
        if (f > 0)
            hi = s;
        else
            lo = s;
        if (std::abs(snew - s) < 1e-14) { s = snew; break; }
        s = snew;
    }
    return s;
}

} // namespace deform_detail

inline double closest_param(const BoundaryCurve& c, Vec2 x,
                            double center = 0.0, double window = M_PI) {
    int n = std::max(32, static_cast<int>(std::max(c.n_samples, 128) * window / M_PI));
    double best_s = center, best_d = 1e300;
    for (int i = 0; i <= n; ++i) {
        double s = center - window + 2.0 * window * i / n;
        double d = norm(curve_position(c, s) - x);
        if (d < best_d) {
            best_d = d;
            best_s = s;
        }
    }
    return deform_detail::closest_param_refine(c, x, best_s, 2.0 * window / n);
}

/// Normal bump vector field: delta_h * chi_h(closest boundary point) *
/// inward normal, shut off smoothly away from the center and the boundary.
class DeformationField {
  public:
    DeformationField(std::shared_ptr<const BoundaryCurve> curve, BumpFunction bump,
                     double delta_h, double cutoff_radius)
        : curve_(std::move(curve)),
          arc_(std::make_shared<ArcLength>(*curve_)),
          bump_(bump),
          delta_h_(delta_h),
          cutoff_radius_(cutoff_radius),
          x0_(curve_point(*curve_, bump.center_param).point) {
        // parameter window covering every boundary point that can be the
        // closest one to a point of the support ball
        int n = std::max(curve_->n_samples, 256);
        window_ = 2.0 * M_PI / n;
        for (int i = -n / 2; i <= n / 2; ++i) {
            double s = bump_.center_param + 2.0 * M_PI * i / n;
            if (norm(curve_position(*curve_, s) - x0_) <= 2.0 * cutoff_radius_ + 1e-9)
                window_ = std::max(window_, std::abs(2.0 * M_PI * i / n) + 4.0 * M_PI / n);
        }
        window_ = std::min(window_, M_PI);
        // precompute the coarse scan grid used by every field evaluation
        int m = std::max(32, static_cast<int>(std::max(curve_->n_samples, 128) *
                                              window_ / M_PI));
        scan_s_.resize(m + 1);
        scan_p_.resize(m + 1);
        for (int i = 0; i <= m; ++i) {
            scan_s_[i] = bump_.center_param - window_ + 2.0 * window_ * i / m;
            scan_p_[i] = curve_position(*curve_, scan_s_[i]);
        }
        scan_spacing_ = 2.0 * window_ / m;
        center_len_ = arc_->from_zero(bump_.center_param);
    }

    Vec2 eval(Vec2 x) const {
        double rr = norm(x - x0_);
        if (rr >= cutoff_radius_) return {0.0, 0.0};
        double best_s = scan_s_[0], best_d = 1e300;
        for (std::size_t i = 0; i < scan_s_.size(); ++i) {
            double d2 = (scan_p_[i][0] - x[0]) * (scan_p_[i][0] - x[0]) +
                        (scan_p_[i][1] - x[1]) * (scan_p_[i][1] - x[1]);
            if (d2 < best_d) {
                best_d = d2;
                best_s = scan_s_[i];
            }
        }
        double s = deform_detail::closest_param_refine(*curve_, x, best_s,
                                                       scan_spacing_);
        auto cp = curve_point(*curve_, s);
        double d = norm(x - cp.point);
        double arc_d = std::abs(arc_->from_zero(s) - center_len_);
        arc_d = std::min(arc_d, arc_->total() - arc_d);
        double chi = bump_.normalization * boundary_detail::bump_profile(arc_d / bump_.h);
        if (chi == 0.0) return {0.0, 0.0};
        double amp = delta_h_ * chi * deform_detail::cut(rr / cutoff_radius_) *
                     deform_detail::cut(d / (0.5 * cutoff_radius_));
        return amp * cp.inward_normal;
    }

    const BoundaryCurve& curve() const { return *curve_; }
    std::shared_ptr<const BoundaryCurve> curve_ptr() const { return curve_; }
    const BumpFunction& bump() const { return bump_; }
    double delta_h() const { return delta_h_; }
    double cutoff_radius() const { return cutoff_radius_; }
    Vec2 center() const { return x0_; }

  private:
    std::shared_ptr<const BoundaryCurve> curve_;
    std::shared_ptr<ArcLength> arc_;
    BumpFunction bump_;
    double delta_h_;
    double cutoff_radius_;
    Vec2 x0_;
    double window_ = M_PI;
    std::vector<double> scan_s_;
    std::vector<Vec2> scan_p_;
    double scan_spacing_ = 0.0;
    double center_len_ = 0.0;
};

/// Field with amplitude h^{2M+dim-1} (prefactor 1) and cutoff radius 4h.
/// Rejects h so large that the collar of half-width 2h exceeds the curve's
/// minimal radius of curvature (normal-line extension would fold).
inline DeformationField make_field(const BoundaryCurve& curve, double center_param,
                                   double h, int M, int dim) {
    if (M < 1) throw std::invalid_argument("make_field: M >= 1 required");
    if (dim != 2) throw std::invalid_argument("make_field: planar fields only");
    double min_curv_radius = 1e300;
    int n = std::max(curve.n_samples, 128);
    for (int i = 0; i < n; ++i) {
        double s = 2.0 * M_PI * i / n;
        Vec2 v = curve_velocity(curve, s), a = curve_acceleration(curve, s);
        double cross = v[0] * a[1] - v[1] * a[0];
        double sp = norm(v);
        if (std::abs(cross) > 1e-14)
            min_curv_radius = std::min(min_curv_radius, sp * sp * sp / std::abs(cross));
    }
    // the smooth collar cutoff vanishes at distance 2h, so folding exactly
    // at 2h (e.g. h = 0.5 on the unit circle) is still admissible
    if (2.0 * h > min_curv_radius * (1.0 + 1e-9))
        throw std::invalid_argument("make_field: h too large for the curve's curvature");
    auto bump = make_bump(curve, center_param, h);
    double delta_h = std::pow(h, 2 * M + dim - 1);
    return DeformationField(std::make_shared<BoundaryCurve>(curve), bump, delta_h,
                            4.0 * h);
}

/// Time-t flow of a deformation field, integrated by fixed-step RK4.
/// Exposes the map, its Jacobian and second derivatives (finite differences).
class FlowDeformation {
  public:
    FlowDeformation(DeformationField field, double t, int rk_steps = 64)
        : field_(std::move(field)), t_(t), rk_steps_(rk_steps) {
        if (rk_steps < 1) throw std::invalid_argument("flow: rk_steps >= 1");
        validate_injectivity();
    }

    Vec2 map(Vec2 x) const {
        if (t_ == 0.0) return x;
        if (norm(x - field_.center()) >= field_.cutoff_radius()) return x;
        double dt = t_ / rk_steps_;
        Vec2 p = x;
        for (int i = 0; i < rk_steps_; ++i) {
            Vec2 k1 = field_.eval(p);
            Vec2 k2 = field_.eval(p + (0.5 * dt) * k1);
            Vec2 k3 = field_.eval(p + (0.5 * dt) * k2);
            Vec2 k4 = field_.eval(p + dt * k3);
            p = p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return p;
    }

    Mat2 jacobian(Vec2 x) const {
        if (t_ == 0.0 ||
            norm(x - field_.center()) >= field_.cutoff_radius() + 1e-3)
            return {{{1.0, 0.0}, {0.0, 1.0}}};
        const double h = 1e-5;
        Mat2 J{};
        for (int j = 0; j < 2; ++j) {
            Vec2 e{j == 0 ? h : 0.0, j == 1 ? h : 0.0};
            Vec2 plus = map(x + e), minus = map(x - e);
            J[0][j] = (plus[0] - minus[0]) / (2 * h);
            J[1][j] = (plus[1] - minus[1]) / (2 * h);
        }
        return J;
    }

    /// H[m][i][j] = d^2 Phi^m / dx_i dx_j.
    std::array<Mat2, 2> second_derivative(Vec2 x) const {
        std::array<Mat2, 2> H{};
        if (t_ == 0.0 ||
            norm(x - field_.center()) >= field_.cutoff_radius() + 1e-3)
            return H;
        const double h = 1e-4;
        Vec2 ex{h, 0.0}, ey{0.0, h};
        Vec2 c = map(x);
        Vec2 xp = map(x + ex), xm = map(x - ex);
        Vec2 yp = map(x + ey), ym = map(x - ey);
        Vec2 pp = map(x + ex + ey), pm = map(x + ex - ey);
        Vec2 mp = map(x - ex + ey), mm = map(x - ex - ey);
        for (int m = 0; m < 2; ++m) {
            H[m][0][0] = (xp[m] - 2 * c[m] + xm[m]) / (h * h);
            H[m][1][1] = (yp[m] - 2 * c[m] + ym[m]) / (h * h);
            H[m][0][1] = H[m][1][0] =
                (pp[m] - pm[m] - mp[m] + mm[m]) / (4 * h * h);
        }
        return H;
    }

    const DeformationField& field() const { return field_; }
    double t() const { return t_; }
    int rk_steps() const { return rk_steps_; }

  private:
    void validate_injectivity() const {
        if (t_ == 0.0) return;
        double R = field_.cutoff_radius();
        Vec2 c = field_.center();
        for (int i = -6; i <= 6; ++i) {
            for (int j = -6; j <= 6; ++j) {
                Vec2 x{c[0] + R * i / 6.0, c[1] + R * j / 6.0};
                Mat2 J = jacobian(x);
                double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
                if (det < 0.1)
                    throw std::runtime_error(
                        "flow: injectivity validation failed (|t| too large)");
            }
        }
    }

    DeformationField field_;
    double t_;
    int rk_steps_;
};

/// Empirical C^2 distance of the flow map to the identity: sup over a grid
/// covering the field support of |Phi-id|, |DPhi-I| and |D^2 Phi|, with the
/// derivative tensors measured in the Frobenius norm so the value does not
/// depend on the orientation of the coordinate axes.
inline double c2_distance(const FlowDeformation& d) {
    if (d.t() == 0.0) return 0.0;
    double R = d.field().cutoff_radius();
    Vec2 c = d.field().center();
    double worst = 0.0;
    for (int i = -5; i <= 5; ++i) {
        for (int j = -5; j <= 5; ++j) {
            Vec2 x{c[0] + R * i / 5.0, c[1] + R * j / 5.0};
            Vec2 p = d.map(x);
            worst = std::max(worst, norm(p - x));
            Mat2 J = d.jacobian(x);
            J[0][0] -= 1.0;
            J[1][1] -= 1.0;
            double jf = 0.0;
            for (auto& row : J)
                for (double v : row) jf += v * v;
            worst = std::max(worst, std::sqrt(jf));
            auto H = d.second_derivative(x);
            double hf = 0.0;
            for (int m = 0; m < 2; ++m)
                for (auto& row : H[m])
                    for (double v : row) hf += v * v;
            worst = std::max(worst, std::sqrt(hf));
        }
    }
    return worst;
}

struct ConjugatedCoeffs {
    Mat2 a;                  // second-order coefficients
    std::array<double, 2> b; // first-order coefficients
};

/// Coefficients of V = Lap - (pullback-conjugated Laplacian) for any map
/// exposing map/jacobian/second_derivative; templated so synthetic maps can
/// be injected in tests.
template <typename MapT>
ConjugatedCoeffs conjugated_coeffs(const MapT& d, Vec2 x) {
    Mat2 D = d.jacobian(x);
    double det = D[0][0] * D[1][1] - D[0][1] * D[1][0];
    if (std::abs(det) < 1e-12)
        throw std::runtime_error("conjugated_coeffs: singular Jacobian");
    Mat2 J{{{D[1][1] / det, -D[0][1] / det}, {-D[1][0] / det, D[0][0] / det}}};
    ConjugatedCoeffs out{};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            double s = 0.0;
            for (int j = 0; j < 2; ++j) s += J[l][j] * J[k][j];
            out.a[k][l] = (k == l ? 1.0 : 0.0) - s;
        }
    auto H = d.second_derivative(x);
    // Drift of the conjugated Laplacian is -sum (d2 Phi^m) J^{km} J^{ij} J^{lj}
    // (from d2(Phi^{-1}) = -J . D2Phi[J.,J.]), so V = Lap - conj carries +sum.
    for (int k = 0; k < 2; ++k) {
        double s = 0.0;
        for (int m = 0; m < 2; ++m)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int l = 0; l < 2; ++l)
                        s += H[m][i][l] * J[k][m] * J[i][j] * J[l][j];
        out.b[k] = s;
    }
    return out;
}

/// Push the boundary through the flow and refit a Fourier curve by discrete
/// trigonometric interpolation of the flowed samples (exact at the nodes).
inline BoundaryCurve deform_curve(const BoundaryCurve& c, const FlowDeformation& d) {
    int N = c.n_samples;
    std::vector<Vec2> pts(N);
    for (int i = 0; i < N; ++i) pts[i] = d.map(curve_position(c, 2.0 * M_PI * i / N));
    BoundaryCurve out;
    out.n_samples = N;
    int half = N / 2;
    out.fourier_x.assign(half + 1, {0.0, 0.0});
    out.fourier_y.assign(half + 1, {0.0, 0.0});
    for (int k = 0; k <= half; ++k) {
        double cx = 0, sx = 0, cy = 0, sy = 0;
        for (int i = 0; i < N; ++i) {
            double ang = 2.0 * M_PI * k * i / N;
            double co = std::cos(ang), si = std::sin(ang);
            cx += pts[i][0] * co;
            sx += pts[i][0] * si;
            cy += pts[i][1] * co;
            sy += pts[i][1] * si;
        }
        double scale = (k == 0 || k == half) ? 1.0 / N : 2.0 / N;
        out.fourier_x[k] = {scale * cx, scale * sx};
        out.fourier_y[k] = {scale * cy, scale * sy};
    }
    // Nyquist sine component is unresolvable on this grid
    out.fourier_x[half][1] = 0.0;
    out.fourier_y[half][1] = 0.0;
    return out;
}

} // namespace resolab

#endif
