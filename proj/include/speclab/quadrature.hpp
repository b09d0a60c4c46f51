#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "speclab/errors.hpp"

namespace speclab {

/// One quadrature node in up to 3 dimensions.
struct QuadNode {
    std::array<double, 3> x{0, 0, 0};
    double w = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
inline void gauss_legendre(int npts, std::vector<double>& nodes, std::vector<double>& weights) {
    if (npts < 1) throw estimation_error("gauss_legendre: need at least one point");
    nodes.resize(static_cast<std::size_t>(npts));
    weights.resize(static_cast<std::size_t>(npts));
    const int m = (npts + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double pp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < npts; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = npts * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[std::size_t(i)] = -x;
        nodes[std::size_t(npts - 1 - i)] = x;
        weights[std::size_t(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[std::size_t(npts - 1 - i)] = weights[std::size_t(i)];
    }
}

/// Gauss-Legendre rule mapped to [a, b].
inline std::vector<QuadNode> gauss_legendre_interval(int npts, double a, double b) {
    std::vector<double> x, w;
    gauss_legendre(npts, x, w);
    std::vector<QuadNode> out(static_cast<std::size_t>(npts));
    for (int i = 0; i < npts; ++i) {
        out[std::size_t(i)].x[0] = 0.5 * (b - a) * x[std::size_t(i)] + 0.5 * (a + b);
        out[std::size_t(i)].w = 0.5 * (b - a) * w[std::size_t(i)];
    }
    return out;
}

/// Tensor-product rule on the ball B_r(center) in dimension n <= 3, via
/// radial x angular factorization. cos_range restricts the polar angle about
/// `axis`: {-1, 1} gives the full ball, {0, 1} the half with
/// sign*(x_axis - y_axis) >= 0... concretely nodes y satisfy
/// sign*(center[axis] - y[axis]) >= 0 when cos_lo = 0.
inline std::vector<QuadNode> ball_rule(int n, const std::array<double, 3>& center, double r,
                                       int radial_pts, int angular_pts, int axis = 0,
                                       double sign = 1.0, double cos_lo = -1.0) {
    if (n < 1 || n > 3) throw estimation_error("ball_rule supports n in {1,2,3}");
    if (!(r > 0)) throw estimation_error("ball_rule: radius must be positive");
    std::vector<QuadNode> out;
    const auto radial = gauss_legendre_interval(radial_pts, 0.0, r);

    // unit direction of the polar axis (negated so cos>=0 means y below center)
    std::array<double, 3> d{0, 0, 0};
    d[std::size_t(axis)] = -sign;

    if (n == 1) {
        for (const auto& rn : radial) {
            for (double s : {1.0, -1.0}) {
                // s = +1 lies on the d side (cos = 1), s = -1 opposite (cos = -1)
                const double c = s;
                if (c < cos_lo) continue;
                QuadNode q;
                q.x = center;
                q.x[std::size_t(axis)] += s * d[std::size_t(axis)] * rn.x[0];
                q.w = rn.w;
                out.push_back(q);
            }
        }
        return out;
    }

    // orthonormal complement of d
    std::array<double, 3> e1{0, 0, 0}, e2{0, 0, 0};
    e1[std::size_t((axis + 1) % 3)] = 1.0;
    e2[std::size_t((axis + 2) % 3)] = 1.0;

    if (n == 2) {
        // y = center + s( cos(phi) d + sin(phi) e1 ), phi in (-phi_max, phi_max)
        const double phi_max = std::acos(std::clamp(cos_lo, -1.0, 1.0));
        const auto ang = gauss_legendre_interval(angular_pts, -phi_max, phi_max);
        for (const auto& rn : radial) {
            const double s = rn.x[0];
            for (const auto& an : ang) {
                const double cphi = std::cos(an.x[0]), sphi = std::sin(an.x[0]);
                QuadNode q;
                for (int k = 0; k < 2; ++k)
                    q.x[std::size_t(k)] =
                        center[std::size_t(k)] +
                        s * (cphi * d[std::size_t(k)] + sphi * e1[std::size_t(k)]);
                q.w = rn.w * an.w * s; // 2-d Jacobian
                out.push_back(q);
            }
        }
        return out;
    }

    // n == 3: y = center + s( cos(theta) d + sin(theta)(cos(phi) e1 + sin(phi) e2) )
    const auto cosv = gauss_legendre_interval(angular_pts, cos_lo, 1.0);
    const auto phiv = gauss_legendre_interval(angular_pts, 0.0, 2.0 * std::numbers::pi);
    for (const auto& rn : radial) {
        const double s = rn.x[0];
        for (const auto& cn : cosv) {
            const double ct = cn.x[0];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (const auto& pn : phiv) {
                const double cp = std::cos(pn.x[0]), sp = std::sin(pn.x[0]);
                QuadNode q;
                for (int k = 0; k < 3; ++k)
                    q.x[std::size_t(k)] =
                        center[std::size_t(k)] +
                        s * (ct * d[std::size_t(k)] +
                             st * (cp * e1[std::size_t(k)] + sp * e2[std::size_t(k)]));
                q.w = rn.w * cn.w * pn.w * s * s; // 3-d Jacobian
                out.push_back(q);
            }
        }
    }
    return out;
}

/// Half-ball rule: nodes y in B_r(center) with center[axis] >= y[axis].
inline std::vector<QuadNode> half_ball_rule(int n, const std::array<double, 3>& center, double r,
                                            int radial_pts, int angular_pts, int axis) {
    return ball_rule(n, center, r, radial_pts, angular_pts, axis, 1.0, 0.0);
}

/// Surface area of the unit sphere S^{n-1}.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace speclab
