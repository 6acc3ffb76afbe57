#ifndef RESOLAB_RESONANCE_HPP
#define RESOLAB_RESONANCE_HPP

#include <algorithm>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "resolab/bessel.hpp"
#include "resolab/deformation.hpp"
#include "resolab/log_cover.hpp"
#include "resolab/nystrom.hpp"

namespace resolab {

enum class ResonanceSource { bie, disk_oracle, sphere_oracle };

inline const char* to_string(ResonanceSource s) {
    switch (s) {
        case ResonanceSource::bie: return "bie";
        case ResonanceSource::disk_oracle: return "disk_oracle";
        default: return "sphere_oracle";
    }
}

/// A located resonance: cover point, algebraic multiplicity, and the solver's
/// diagnostic residual (smallest singular value or function modulus there).
struct ResonanceRecord {
    LogPoint location;
    int multiplicity;
    double residual;
    ResonanceSource source;
};

/// Circular contour in the lambda plane, lifted to the cover around `center`.
struct ContourSpec {
    LogPoint center;
    double radius;
    int nodes = 32;
    double rank_tol = 1e-6;
    int probe_dim = 8;

    ContourSpec(LogPoint c, double r, int n = 32, double tol = 1e-6, int p = 8)
        : center(c), radius(r), nodes(n), rank_tol(tol), probe_dim(p) {
        if (!(radius > 0.0))
            throw std::invalid_argument("ContourSpec: radius must be positive");
        if (nodes < 16 || nodes % 2 != 0)
            throw std::invalid_argument("ContourSpec: nodes >= 16 and even required");
        if (!(rank_tol > 0.0 && rank_tol < 1.0))
            throw std::invalid_argument("ContourSpec: rank_tol in (0,1) required");
        if (probe_dim < 1)
            throw std::invalid_argument("ContourSpec: probe_dim >= 1 required");
        // the lifted contour must stay inside one argument window of the
        // cover (not wrap past center.argument +- pi/2), so it cannot
        // approach or encircle the puncture at 0
        if (!(radius < 0.999 * center.modulus))
            throw std::invalid_argument(
                "ContourSpec: radius must be smaller than the center modulus");
    }
};

namespace resonance_detail {

using cplx = std::complex<double>;

inline cplx hankel_at(int m, cplx w) {
    // evaluate H^(1)_m at the cover point exp(w), w = ln(mod) + i arg
    return hankel1(BesselOrder::integer(m), LogPoint(std::exp(w.real()), w.imag()));
}

/// Winding functions work on "log values": Re = log|f|, Im = arg f in
/// (-pi, pi].  Carrying the magnitude matters: a sampled phase alone can
/// alias silently (a double zero at distance << step length below the path
/// contributes a full 2 pi turn that leaves the endpoint phases unchanged),
/// but in that geometry the midpoint always sits close to the zeros, so the
/// log-magnitude dip exposes it.
inline cplx log_value(cplx f) { return cplx(std::log(std::abs(f)), std::arg(f)); }

/// Phase increment of f along the straight segment [a,b] in the w chart, by
/// adaptive bisection (one level forced) until each step turns by < 0.8 rad
/// and the magnitude moves by < e^2.
inline double segment_phase(const std::function<cplx(cplx)>& f, cplx a, cplx b,
                            cplx fa, cplx fb, int depth) {
    double d = std::remainder(fb.imag() - fa.imag(), 2.0 * M_PI);
    if (depth >= 1 && std::abs(d) < 0.8 &&
        std::abs(fb.real() - fa.real()) < 2.0)
        return d;
    if (depth > 40)
        throw std::runtime_error("winding: zero on or too close to the path");
    cplx mid = 0.5 * (a + b);
    cplx fm = f(mid);
    if (!std::isfinite(fm.real()))
        throw std::runtime_error("winding: exact zero on the path");
    return segment_phase(f, a, mid, fa, fm, depth + 1) +
           segment_phase(f, mid, b, fm, fb, depth + 1);
}

/// Winding number of f (given as log values) around the w-chart rectangle
/// [x0,x1] x [y0,y1].
inline int rectangle_winding(const std::function<cplx(cplx)>& f, double x0,
                             double x1, double y0, double y1) {
    std::vector<cplx> corners = {cplx(x0, y0), cplx(x1, y0), cplx(x1, y1),
                                 cplx(x0, y1)};
    // the phase rate of a many-mode determinant grows with the modulus
    // (roughly like mod^2 from the modes with m <~ mod) and can exceed pi per
    // step with a flat magnitude, which no endpoint criterion can detect;
    // bound the initial step by the scale the rate allows
    double h = std::clamp(0.5 * std::exp(-2.0 * std::max(x0, x1)), 0.015, 0.1);
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        cplx a = corners[e], b = corners[(e + 1) % 4];
        int steps = std::max(8, static_cast<int>(std::ceil(std::abs(b - a) / h)));
        cplx prev = a;
        cplx fprev = f(a);
        for (int s = 1; s <= steps; ++s) {
            cplx p = a + (b - a) * (static_cast<double>(s) / steps);
            cplx fp = f(p);
            total += segment_phase(f, prev, p, fprev, fp, 0);
            prev = p;
            fprev = fp;
        }
    }
    double n = total / (2.0 * M_PI);
    int ni = static_cast<int>(std::lround(n));
    if (std::abs(n - ni) > 0.1)
        throw std::runtime_error("winding: non-integer winding number");
    return ni;
}

/// Newton iteration for a zero of H^(1)_m from a w-chart starting point.
inline cplx hankel_newton(int m, cplx w0) {
    auto ord = BesselOrder::integer(m);
    cplx w = w0;
    for (int it = 0; it < 80; ++it) {
        LogPoint p(std::exp(w.real()), w.imag());
        cplx H = hankel1(ord, p);
        cplx Hp = hankel1_deriv(ord, p);
        cplx dw = H / (project(p) * Hp);
        if (std::abs(dw) > 0.2) dw *= 0.2 / std::abs(dw);
        w -= dw;
        if (std::abs(dw) < 1e-15) break;
    }
    return w;
}

/// Recursively subdivide a w-chart box until each piece isolates one zero.
inline void collect_hankel_zeros(int m, double x0, double x1, double y0,
                                 double y1, std::vector<cplx>& out, int depth) {
    auto f = [m](cplx w) { return log_value(hankel_at(m, w)); };
    int n = rectangle_winding(f, x0, x1, y0, y1);
    if (n == 0) return;
    double dx = x1 - x0, dy = y1 - y0;
    if (n == 1 && dx < 0.3 && dy < 0.3) {
        cplx w = hankel_newton(m, cplx(0.5 * (x0 + x1), 0.5 * (y0 + y1)));
        double res = std::abs(hankel_at(m, w));
        bool inside = w.real() > x0 - 1e-9 && w.real() < x1 + 1e-9 &&
                      w.imag() > y0 - 1e-9 && w.imag() < y1 + 1e-9;
        if (res < 1e-11 && inside) {
            out.push_back(w);
            return;
        }
    }
    if (depth > 40)
        throw std::runtime_error("disk_resonances: subdivision failed to converge");
    // split the longer side; slightly uneven ratio dodges zeros that would
    // otherwise land exactly on a subdivision line
    if (dx >= dy) {
        double xm = x0 + 0.5071 * dx;
        collect_hankel_zeros(m, x0, xm, y0, y1, out, depth + 1);
        collect_hankel_zeros(m, xm, x1, y0, y1, out, depth + 1);
    } else {
        double ym = y0 + 0.5071 * dy;
        collect_hankel_zeros(m, x0, x1, y0, ym, out, depth + 1);
        collect_hankel_zeros(m, x0, x1, ym, y1, out, depth + 1);
    }
}

} // namespace resonance_detail

/// All resonances of the unit disk in the region: zeros of H^(1)_m on the
/// cover for 0 <= m <= m_max, with multiplicity 1 for m=0 and 2 for m >= 1
/// (the e^{+-i m theta} angular doublet).
inline std::vector<ResonanceRecord> disk_resonances(int m_max,
                                                    const SectorRegion& region) {
    if (m_max < 0)
        throw std::invalid_argument("disk_resonances: m_max >= 0 required");
    if (region.arg_min < -2.0 * M_PI || region.arg_max > -0.01)
        throw std::domain_error(
            "disk_resonances: region must lie within arg in (-2 pi, -0.01)");
    using resonance_detail::cplx;
    std::vector<ResonanceRecord> out;
    double x0 = std::log(region.mod_min), x1 = std::log(region.mod_max);
    for (int m = 0; m <= m_max; ++m) {
        std::vector<cplx> zs;
        resonance_detail::collect_hankel_zeros(m, x0, x1, region.arg_min,
                                               region.arg_max, zs, 0);
        for (cplx w : zs) {
            LogPoint z(std::exp(w.real()), w.imag());
            if (!contains(region, z)) continue;
            bool dup = false;
            for (const auto& r : out)
                if (std::abs(project(r.location) - project(z)) < 1e-8 &&
                    std::abs(r.location.argument - z.argument) < 1e-6)
                    dup = true;
            if (dup) continue;
            double res = std::abs(hankel1(BesselOrder::integer(m), z));
            out.push_back({z, m == 0 ? 1 : 2, res, ResonanceSource::disk_oracle});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.location.modulus != b.location.modulus)
            return a.location.modulus < b.location.modulus;
        return a.location.argument < b.location.argument;
    });
    return out;
}

/// Resonances of the unit sphere (n=3): zeros of the spherical Hankel
/// polynomial factor for 0 <= l <= l_max, each with multiplicity 2l+1.
/// h^(1)_l(z) is e^{iz}/z times a degree-l polynomial in 1/z; the zeros are
/// found as companion-matrix eigenvalues of that polynomial.
inline std::vector<ResonanceRecord> sphere_resonances(int l_max,
                                                      const SectorRegion& region) {
    if (l_max < 0)
        throw std::invalid_argument("sphere_resonances: l_max >= 0 required");
    if (region.arg_min < -M_PI || region.arg_max > M_PI)
        throw std::domain_error(
            "sphere_resonances: region must lie within arg in [-pi, pi)");
    using resonance_detail::cplx;
    std::vector<ResonanceRecord> out;
    for (int l = 1; l <= l_max; ++l) {
        // p_l(u) = sum_k i^k (l+k)! / (k! (l-k)! 2^k) u^k with u = 1/z
        std::vector<cplx> c(l + 1);
        for (int k = 0; k <= l; ++k) {
            double v = 1.0;
            for (int j = l - k + 1; j <= l + k; ++j) v *= j; // (l+k)!/(l-k)!
            for (int j = 2; j <= k; ++j) v /= j;             // / k!
            v /= std::pow(2.0, k);
            cplx ik = std::pow(cplx(0.0, 1.0), k);
            c[k] = ik * v;
        }
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(l, l);
        for (int i = 1; i < l; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < l; ++i) comp(i, l - 1) = -c[i] / c[l];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
        for (int i = 0; i < l; ++i) {
            cplx u = es.eigenvalues()(i);
            cplx z = 1.0 / u;
            LogPoint p(std::abs(z), std::arg(z));
            if (!contains(region, p)) continue;
            cplx pu = 0.0;
            for (int k = l; k >= 0; --k) pu = pu * u + c[k];
            out.push_back({p, 2 * l + 1, std::abs(pu), ResonanceSource::sphere_oracle});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.location.modulus != b.location.modulus)
            return a.location.modulus < b.location.modulus;
        return a.location.argument < b.location.argument;
    });
    return out;
}

namespace resonance_detail {

struct ContourData {
    std::vector<LogPoint> nodes;          // lifted quadrature nodes
    std::vector<cplx> zeta;               // plane positions
    std::vector<cplx> weight;             // (1/2 pi i) dzeta, trapezoid
};

inline ContourData contour_nodes(const ContourSpec& spec) {
    ContourData d;
    cplx c = project(spec.center);
    for (int j = 0; j < spec.nodes; ++j) {
        double th = 2.0 * M_PI * j / spec.nodes;
        cplx e = std::polar(1.0, th);
        cplx z = c + spec.radius * e;
        d.zeta.push_back(z);
        d.nodes.push_back(lift_near(z, spec.center));
        // dzeta = i r e^{i th} dth; (1/2 pi i) dzeta -> (r/nodes) e^{i th}
        d.weight.push_back(spec.radius / spec.nodes * e);
    }
    return d;
}

/// Deterministic complex Gaussian probe matrix (fixed seed: reproducibility
/// of the random ensemble is part of the experiment contract).
inline Eigen::MatrixXcd probe_matrix(int n, int p) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd V(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) {
            double re = g(rng), im = g(rng);
            V(i, j) = cplx(re, im);
        }
    return V;
}

struct BeynMoments {
    Eigen::MatrixXcd A0, A1;
    double sigma_floor; // smallest sigma_min seen along the contour
    double solve_scale; // largest ||S_zeta^{-1} V||_F along the contour
    double radius;
};

inline BeynMoments beyn_moments(const BoundaryCurve& curve,
                                const ContourSpec& spec) {
    validate_curve(curve);
    ContourData cd = contour_nodes(spec);
    int N = curve.n_samples;
    Eigen::MatrixXcd V = probe_matrix(N, spec.probe_dim);
    Eigen::MatrixXcd A0 = Eigen::MatrixXcd::Zero(N, spec.probe_dim);
    Eigen::MatrixXcd A1 = Eigen::MatrixXcd::Zero(N, spec.probe_dim);
    double floor = 1e300, xscale = 0.0;
    for (int j = 0; j < spec.nodes; ++j) {
        auto op = assemble_single_layer(curve, cd.nodes[j]);
        double sm = smallest_singular_value(op);
        floor = std::min(floor, sm);
        if (sm < 1e-9)
            throw std::runtime_error(
                "beyn_solve: contour passes through or very near a resonance");
        Eigen::MatrixXcd X = op.matrix.partialPivLu().solve(V);
        xscale = std::max(xscale, X.norm());
        A0 += cd.weight[j] * X;
        A1 += cd.weight[j] * cd.zeta[j] * X;
    }
    return {std::move(A0), std::move(A1), floor, xscale, spec.radius};
}

struct ReducedPencil {
    int rank = 0;
    std::vector<cplx> eigenvalues; // plane positions
};

inline ReducedPencil reduce_pencil(const BeynMoments& mom, const ContourSpec& spec) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(
        mom.A0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    ReducedPencil out;
    // an empty contour leaves only quadrature noise in A_0, exponentially
    // small relative to the resolvent scale seen along the contour
    if (sv.size() == 0 || sv(0) < 1e-10 * mom.radius * mom.solve_scale)
        return out;
    int k = 0;
    while (k < sv.size() && sv(k) > spec.rank_tol * sv(0)) ++k;
    if (k == spec.probe_dim)
        throw std::runtime_error(
            "beyn_solve: numerical rank equals probe_dim; increase probe_dim");
    if (k == 0) return out;
    Eigen::MatrixXcd U = svd.matrixU().leftCols(k);
    Eigen::MatrixXcd W = svd.matrixV().leftCols(k);
    Eigen::VectorXd s = sv.head(k);
    Eigen::MatrixXcd B = U.adjoint() * mom.A1 * W * s.cwiseInverse().asDiagonal();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B);
    // eigenvalues just outside the contour can leak into the moments through
    // quadrature error at the rank_tol level; only points inside count
    cplx c = std::polar(spec.center.modulus, spec.center.argument);
    for (int i = 0; i < k; ++i) {
        cplx z = es.eigenvalues()(i);
        if (std::abs(z - c) <= spec.radius) out.eigenvalues.push_back(z);
    }
    out.rank = static_cast<int>(out.eigenvalues.size());
    return out;
}

} // namespace resonance_detail

/// Contour-integral eigensolver for the single-layer family: moments
/// A_0 = (1/2 pi i) oint S_zeta^{-1} V dzeta, A_1 likewise with weight zeta,
/// SVD-truncated at rank_tol; eigenvalues of the reduced pencil are the
/// resonances inside the contour, with multiplicities from clustering.
inline std::vector<ResonanceRecord> beyn_solve(const BoundaryCurve& curve,
                                               const ContourSpec& spec) {
    using resonance_detail::cplx;
    auto mom = resonance_detail::beyn_moments(curve, spec);
    auto red = resonance_detail::reduce_pencil(mom, spec);
    if (red.rank == 0) return {};

    // per-eigenvalue diagnostic residual: the resonance indicator there
    int k = red.rank;
    std::vector<double> residual(k);
    std::vector<LogPoint> lifted;
    for (int i = 0; i < k; ++i) {
        LogPoint z = lift_near(red.eigenvalues[i], spec.center);
        lifted.push_back(z);
        residual[i] = smallest_singular_value(assemble_single_layer(curve, z));
    }

    // cluster eigenvalues within 10x the residual scale (union-find)
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) {
        return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            double rad = 10.0 * std::max(residual[i], residual[j]) + 1e-12;
            if (std::abs(red.eigenvalues[i] - red.eigenvalues[j]) <= rad)
                parent[find(i)] = find(j);
        }

    std::vector<ResonanceRecord> out;
    for (int root = 0; root < k; ++root) {
        if (find(root) != root) continue;
        int mult = 0, best = root;
        for (int i = 0; i < k; ++i)
            if (find(i) == root) {
                ++mult;
                if (residual[i] < residual[best]) best = i;
            }
        out.push_back({lifted[best], mult, residual[best], ResonanceSource::bie});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.location.modulus != b.location.modulus)
            return a.location.modulus < b.location.modulus;
        return a.location.argument < b.location.argument;
    });
    return out;
}

/// Total algebraic multiplicity inside the contour: the numerical rank of the
/// Beyn moment A_0, cross-checked against the winding number of det S_lambda
/// along the contour (argument principle). A mismatch means the
/// discretization cannot be trusted and raises a diagnostic error.
inline int multiplicity_in(const BoundaryCurve& curve, const ContourSpec& spec) {
    using resonance_detail::cplx;
    auto mom = resonance_detail::beyn_moments(curve, spec);
    auto red = resonance_detail::reduce_pencil(mom, spec);

    // winding of det S_lambda: phase-continuous log-det around the contour
    cplx c = project(spec.center);
    int n = std::max(64, 2 * spec.nodes);
    double total = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<double> phase(n + 1);
        bool ok = true;
        double prev = 0.0;
        total = 0.0;
        for (int j = 0; j <= n; ++j) {
            double th = 2.0 * M_PI * j / n;
            cplx z = c + spec.radius * std::polar(1.0, th);
            auto op = assemble_single_layer(curve, lift_near(z, spec.center));
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(op.matrix);
            cplx ld = 0.0;
            for (int i = 0; i < op.matrix.rows(); ++i)
                ld += std::log(lu.matrixLU()(i, i));
            double ph = ld.imag();
            // det = sign(P) * prod(diag U); a pivoting parity flip between
            // neighboring nodes would otherwise fake a pi phase jump
            if (lu.permutationP().determinant() < 0) ph += M_PI;
            if (j > 0) {
                double d = std::remainder(ph - prev, 2.0 * M_PI);
                if (std::abs(d) > 1.5) { ok = false; break; }
                total += d;
            }
            prev = ph;
        }
        if (ok) break;
        n *= 2;
        if (attempt == 3)
            throw std::runtime_error(
                "multiplicity_in: winding number did not stabilize");
    }
    int winding = static_cast<int>(std::lround(total / (2.0 * M_PI)));
    if (std::abs(total / (2.0 * M_PI) - winding) > 0.1)
        throw std::runtime_error("multiplicity_in: non-integer winding number");
    if (winding != red.rank)
        throw std::runtime_error(
            "multiplicity_in: contour-moment rank " + std::to_string(red.rank) +
            " disagrees with det winding " + std::to_string(winding) +
            " (discretization too coarse)");
    return red.rank;
}

/// Options for the region-wide solver: contour parameters for the local
/// extraction step and the target box size of the subdivision.
struct RegionSolveOptions {
    int nodes = 32;
    double rank_tol = 1e-6;
    int probe_dim = 8;
    double box_tol = 0.12; // maximal box side in the log chart before solving
};

namespace resonance_detail {

/// log det S_lambda at a log-chart point, memoized, in the winding functions'
/// log-value convention: Re = sum of log|U_ii| (overflow-safe), Im = phase of
/// the determinant (LU diagonal args plus the permutation sign) wrapped to
/// (-pi, pi].
class DetPhase {
  public:
    DetPhase(const BoundaryCurve& curve) : curve_(curve) {}

    cplx operator()(cplx w) {
        auto key = std::pair<double, double>(w.real(), w.imag());
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto op = assemble_single_layer(curve_, LogPoint(std::exp(w.real()), w.imag()));
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(op.matrix);
        double ph = 0.0, lm = 0.0;
        for (int i = 0; i < op.matrix.rows(); ++i) {
            ph += std::arg(lu.matrixLU()(i, i));
            lm += std::log(std::abs(lu.matrixLU()(i, i)));
        }
        if (lu.permutationP().determinant() < 0) ph += M_PI;
        cplx v(lm, std::remainder(ph, 2.0 * M_PI));
        cache_.emplace(key, v);
        return v;
    }

  private:
    const BoundaryCurve& curve_;
    std::map<std::pair<double, double>, cplx> cache_;
};

inline void region_boxes(const BoundaryCurve& curve, DetPhase& det, double x0,
                         double x1, double y0, double y1,
                         const RegionSolveOptions& opt,
                         std::vector<ResonanceRecord>& out, int depth) {
    auto f = [&det](cplx w) { return det(w); };
    int winding = rectangle_winding(f, x0, x1, y0, y1);
    if (winding == 0) return;
    if (depth > 24)
        throw std::runtime_error("region_resonances: subdivision failed to converge");
    double dx = x1 - x0, dy = y1 - y0;
    if (dx <= opt.box_tol && dy <= opt.box_tol) {
        // extract locations and multiplicities on a circle circumscribing the
        // box
        cplx wc(0.5 * (x0 + x1), 0.5 * (y0 + y1));
        LogPoint center(std::exp(wc.real()), wc.imag());
        double radius = 0.0;
        for (cplx corner :
             {cplx(x0, y0), cplx(x1, y0), cplx(x0, y1), cplx(x1, y1)})
            radius = std::max(radius, std::abs(std::exp(corner) - project(center)));
        int nodes = opt.nodes;
        double rad = radius * 1.2;
        for (int attempt = 0; attempt < 4; ++attempt) {
            std::vector<ResonanceRecord> found;
            try {
                found = beyn_solve(curve, ContourSpec(center, rad, nodes,
                                                      opt.rank_tol,
                                                      opt.probe_dim));
            } catch (const std::runtime_error&) {
                // a neighboring zero can sit on the circumscribed circle;
                // grow it
                rad *= 1.17;
                continue;
            }
            // the circumscribed contours of adjacent boxes overlap, so the
            // solve also returns the neighbors' zeros; boxes partition the
            // region, so each box keeps exactly the records it owns and
            // validates them against its own winding
            std::vector<ResonanceRecord> inbox;
            int summult = 0;
            for (auto& r : found) {
                double wx = std::log(r.location.modulus);
                double wy = r.location.argument;
                if (wx >= x0 && wx < x1 && wy >= y0 && wy < y1) {
                    summult += r.multiplicity;
                    inbox.push_back(std::move(r));
                }
            }
            if (summult == winding) {
                for (auto& r : inbox) out.push_back(std::move(r));
                return;
            }
            // a zero near the contour can be displaced across a box edge by
            // quadrature leakage from just-outside singularities; refine the
            // contour quadrature once before falling back to subdivision
            if (attempt >= 1) break;
            nodes *= 2;
        }
        // the contour could not isolate this box's zeros (in the log chart a
        // fixed box side means a plane size growing with the modulus, so at
        // large modulus the circumscribed circle can span several clusters);
        // subdivide further so the contours shrink
    }
    // uneven ratio dodges zeros landing exactly on a subdivision line
    if (dx >= dy) {
        double xm = x0 + 0.5071 * dx;
        region_boxes(curve, det, x0, xm, y0, y1, opt, out, depth + 1);
        region_boxes(curve, det, xm, x1, y0, y1, opt, out, depth + 1);
    } else {
        double ym = y0 + 0.5071 * dy;
        region_boxes(curve, det, x0, x1, y0, ym, opt, out, depth + 1);
        region_boxes(curve, det, x0, x1, ym, y1, opt, out, depth + 1);
    }
}

} // namespace resonance_detail

/// All resonances of the curve inside the sector, by argument-principle
/// subdivision of the log chart (winding of det S_lambda, so no candidate
/// can be missed) with a local contour solve on each isolated box.
inline std::vector<ResonanceRecord> region_resonances(
    const BoundaryCurve& curve, const SectorRegion& region,
    const RegionSolveOptions& opt = {}) {
    validate_curve(curve);
    if (region.arg_min < -2.0 * M_PI || region.arg_max > -0.01)
        throw std::domain_error(
            "region_resonances: region must lie within arg in (-2 pi, -0.01)");
    resonance_detail::DetPhase det(curve);
    double x0 = std::log(region.mod_min), x1 = std::log(region.mod_max);
    auto f = [&det](resonance_detail::cplx w) { return det(w); };
    int total_winding = resonance_detail::rectangle_winding(
        f, x0, x1, region.arg_min, region.arg_max);
    std::vector<ResonanceRecord> out;
    resonance_detail::region_boxes(curve, det, x0, x1, region.arg_min,
                                   region.arg_max, opt, out, 0);
    int total = 0;
    for (const auto& r : out) total += r.multiplicity;
    if (total != total_winding)
        throw std::runtime_error(
            "region_resonances: collected multiplicity " + std::to_string(total) +
            " disagrees with the region's det winding " +
            std::to_string(total_winding));
    // zoom pass: the circumscribed box contours count reliably but can sit
    // close to neighboring zeros, leaving ~1e-4 location noise that lets the
    // record clustering merge a finely split pair into a spurious multiple.
    // Re-solve every multiplicity >= 2 record on a tight dedicated contour
    // and accept the refinement when it preserves the record's multiplicity.
    std::vector<ResonanceRecord> refined;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].multiplicity < 2) {
            refined.push_back(out[i]);
            continue;
        }
        double dmin = 1e300;
        for (std::size_t j = 0; j < out.size(); ++j)
            if (j != i)
                dmin = std::min(dmin, std::abs(project(out[j].location) -
                                               project(out[i].location)));
        double rz = std::min({0.45 * dmin,
                              0.05 * std::max(1.0, out[i].location.modulus)});
        bool replaced = false;
        for (int attempt = 0; attempt < 3 && !replaced; ++attempt) {
            try {
                auto zoom = beyn_solve(curve,
                                       ContourSpec(out[i].location, rz, opt.nodes,
                                                   opt.rank_tol, opt.probe_dim));
                int zsum = 0;
                for (const auto& z : zoom) zsum += z.multiplicity;
                if (zsum == out[i].multiplicity) {
                    for (auto& z : zoom) refined.push_back(std::move(z));
                    replaced = true;
                }
            } catch (const std::runtime_error&) {
            }
            rz *= 0.7;
        }
        if (!replaced) refined.push_back(out[i]);
    }
    out = std::move(refined);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.location.modulus != b.location.modulus)
            return a.location.modulus < b.location.modulus;
        return a.location.argument < b.location.argument;
    });
    return out;
}

/// Re-run beyn_solve on the flowed curve for each t, keeping the contour
/// fixed; verifies that the total multiplicity inside the contour is constant
/// across the sweep (multiplicity stability) while the resonances may split.
inline std::vector<std::pair<double, std::vector<ResonanceRecord>>>
track_resonance(const BoundaryCurve& curve, const DeformationField& field,
                const std::vector<double>& t_values, const ContourSpec& seed_contour) {
    if (t_values.empty() || t_values.front() != 0.0 ||
        !std::is_sorted(t_values.begin(), t_values.end()))
        throw std::invalid_argument(
            "track_resonance: t_values must be sorted and start at 0");
    std::vector<std::pair<double, std::vector<ResonanceRecord>>> out;
    int total = -1;
    for (double t : t_values) {
        BoundaryCurve deformed = curve;
        if (t != 0.0) {
            FlowDeformation flow(field, t);
            deformed = deform_curve(curve, flow);
        }
        std::vector<ResonanceRecord> recs;
        try {
            recs = beyn_solve(deformed, seed_contour);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(
                "track_resonance: solve failed at t = " + std::to_string(t) +
                " (resonance migrated onto the contour? shrink the t range): " +
                e.what());
        }
        int sum = 0;
        for (const auto& r : recs) sum += r.multiplicity;
        if (total < 0) total = sum;
        if (sum != total)
            throw std::runtime_error(
                "track_resonance: total multiplicity changed from " +
                std::to_string(total) + " to " + std::to_string(sum) + " at t = " +
                std::to_string(t) + " (contour no longer isolates the cluster)");
        out.emplace_back(t, std::move(recs));
    }
    return out;
}

} // namespace resolab

#endif
