#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/rng.hpp"

namespace speclab {

/// Gaussian fundamental solution of the heat equation with purely
/// time-dependent coefficient:
///   G(sigma, x; s, y) = (4 pi rho nu mu'(s) (sigma-s))^{-n/2}
///                       exp(-|x-y|^2 / (4 rho nu mu'(s) (sigma-s))).
struct GaussianKernel {
    int dim = 3;
    double rho = 1.0;
    double nu = 1.0;
    std::function<double(double)> mu_prime = [](double) { return 1.0; };

    /// diffusivity besides rho at time s
    double beta(double s) const {
        const double m = mu_prime(s);
        if (!(m > 0)) throw domain_error("gaussian kernel: mu' must be positive");
        return nu * m;
    }
};

namespace detail {

inline double sq_dist(std::span<const double> x, std::span<const double> y, int n) {
    double s = 0;
    for (int j = 0; j < n; ++j) {
        const double d = x[std::size_t(j)] - y[std::size_t(j)];
        s += d * d;
    }
    return s;
}

}  // namespace detail

inline double gaussian_eval(const GaussianKernel& k, double sigma, std::span<const double> x,
                            double s, std::span<const double> y) {
    if (!(sigma > s)) throw domain_error("gaussian_eval requires sigma > s");
    const double a = k.rho * k.beta(s) * (sigma - s);
    const double r2 = detail::sq_dist(x, y, k.dim);
    return std::exp(-r2 / (4.0 * a)) / std::pow(4.0 * std::numbers::pi * a, 0.5 * k.dim);
}

/// Analytic x_j-derivative: -((x_j - y_j) / (2 rho nu mu'(s)(sigma-s))) * G.
/// Antisymmetric under reflection of (x_j - y_j).
inline double gaussian_grad(const GaussianKernel& k, double sigma, std::span<const double> x,
                            double s, std::span<const double> y, int j) {
    if (!(sigma > s)) throw domain_error("gaussian_grad requires sigma > s");
    const double a = k.rho * k.beta(s) * (sigma - s);
    const double d = x[std::size_t(j)] - y[std::size_t(j)];
    return -(d / (2.0 * a)) * gaussian_eval(k, sigma, x, s, y);
}

/// Spatial integral of G by radial quadrature (exact angular factor); should
/// be 1 to quadrature accuracy for any sigma > s.
inline double gaussian_normalization(const GaussianKernel& k, double sigma, double s,
                                     int radial_points = 96, double cut = 12.0) {
    if (!(sigma > s)) throw domain_error("gaussian_normalization requires sigma > s");
    const double a = k.rho * k.beta(s) * (sigma - s);
    const int n = k.dim;
    const double area = (n == 1) ? 2.0 : unit_sphere_area(n);
    double acc = 0;
    for (const auto& q : gauss_legendre_interval(radial_points, 0.0, cut)) {
        const double z = q.x[0];
        const double r = z * std::sqrt(4.0 * a);
        acc += q.w * std::sqrt(4.0 * a) * std::pow(r, double(n - 1)) * std::exp(-z * z) /
               std::pow(4.0 * std::numbers::pi * a, 0.5 * n);
    }
    return acc * area;
}

/// exp(-rho nu mu' |xi|^2 dt): the exact heat multiplier used by the product
/// scheme's diagonal.
inline double fourier_damping_factor(std::span<const double> xi, double dt, double rho, double nu,
                                     double mu_prime) {
    if (!(dt > 0)) throw domain_error("fourier_damping_factor: dt must be > 0");
    double x2 = 0;
    for (double v : xi) x2 += v * v;
    return std::exp(-rho * nu * mu_prime * x2 * dt);
}

// ---------------------------------------------------------------------------
// half-ball antisymmetry

struct BallQuadratureSpec {
    int radial_points = 32;
    int angular_points = 32;
};

struct HalfBallResult {
    double full = 0;          // integral over the full ball
    double half_reflected = 0; // reflected-difference integral over the half ball
};

/// Checks the cancellation identity behind the gradient-kernel estimates:
///   integral_{B_r(x)} f(y) ((x_j-y_j)/(sigma-s)) G*(sigma,x;s,y) dy
/// equals the same integral over {y : x_j >= y_j} with integrand
/// (f(y) - f(y^{-j})) (...), where y^{-j} reflects the j-th coordinate about
/// x_j and G* = G / (2 rho nu mu'(s)) carries the non-odd factor of the
/// gradient. Both numbers are returned; they agree to quadrature accuracy.
inline HalfBallResult antisym_half_ball_check(
    const GaussianKernel& k, const std::function<double(std::span<const double>)>& f,
    const std::array<double, 3>& x, double r, double sigma, double s, int j,
    const BallQuadratureSpec& quad = {}) {
    if (!(sigma > s)) throw domain_error("antisym_half_ball_check requires sigma > s");
    if (j < 0 || j >= k.dim) throw domain_error("antisym_half_ball_check: bad axis");
    const double gs_scale = 1.0 / (2.0 * k.rho * k.beta(s));
    auto kernel = [&](std::span<const double> y) {
        const double d = x[std::size_t(j)] - y[std::size_t(j)];
        return (d / (sigma - s)) * gs_scale *
               gaussian_eval(k, sigma, std::span<const double>(x.data(), std::size_t(k.dim)), s,
                             y);
    };

    HalfBallResult out;
    for (const auto& q : ball_rule(k.dim, x, r, quad.radial_points, quad.angular_points, j)) {
        const std::span<const double> y(q.x.data(), std::size_t(k.dim));
        out.full += q.w * f(y) * kernel(y);
    }
    for (const auto& q :
         half_ball_rule(k.dim, x, r, quad.radial_points, quad.angular_points, j)) {
        std::array<double, 3> yr = q.x;
        yr[std::size_t(j)] = 2.0 * x[std::size_t(j)] - yr[std::size_t(j)];
        const std::span<const double> y(q.x.data(), std::size_t(k.dim));
        const std::span<const double> yrs(yr.data(), std::size_t(k.dim));
        out.half_reflected += q.w * (f(y) - f(yrs)) * kernel(y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// parametrix first-term bound

struct LevySampleSpec {
    double s_lo = 0.1;
    double s_hi = 0.5;
    double min_gap = 1e-6;   // keep sigma strictly above s
    double spatial_cut = 6.0; // offsets sampled within cut * kernel width
    long samples = 10000;
    std::uint64_t seed = 2026;
};

struct LevyBoundReport {
    long samples = 0;
    long violations = 0;
    double min_slack = std::numeric_limits<double>::infinity(); // bound - |term|, worst case
    double max_slack = 0;
    std::string first_violation; // empty if none
};

/// Verifies, sample by sample, the uniform Gaussian-form bound on the first
/// parametrix correction (mu'(sigma) - mu'(s)) * Delta~G, where Delta~ is the
/// Laplacian bracket with the time-scale factor rho extracted:
///   |L G| <= (C0 + c n / (2 nu mu'(s))) * (sqrt(2)/sqrt(8 pi rho nu mu'(s) dt))^n
///            * exp(-|x-y|^2 / (8 rho nu mu'(s) dt)),
/// with C0 = sup_z 2 z^2 e^{-z^2} = 2/e and c the Lipschitz constant of
/// nu mu' on the sampled interval. The n on the second constant restores the
/// dimension factor of the Laplacian trace term.
inline LevyBoundReport levy_term_bound_check(const GaussianKernel& k, double lipschitz_c,
                                             const LevySampleSpec& spec = {}) {
    static const double C0 = 2.0 / std::numbers::e;
    LevyBoundReport rep;
    Rng rng(spec.seed);
    const int n = k.dim;
    for (long it = 0; it < spec.samples; ++it) {
        const double s = rng.uniform(spec.s_lo, spec.s_hi - spec.min_gap);
        const double sigma = rng.uniform(s + spec.min_gap, spec.s_hi);
        const double dt = sigma - s;
        const double bs = k.beta(s);
        const double width = std::sqrt(4.0 * k.rho * bs * dt);
        std::array<double, 3> x{0, 0, 0}, y{0, 0, 0};
        for (int j = 0; j < n; ++j)
            y[std::size_t(j)] = rng.uniform(-spec.spatial_cut * width, spec.spatial_cut * width);

        const double r2 = detail::sq_dist(std::span<const double>(x.data(), std::size_t(n)),
                                          std::span<const double>(y.data(), std::size_t(n)), n);
        const double g = gaussian_eval(k, sigma, std::span<const double>(x.data(), std::size_t(n)),
                                       s, std::span<const double>(y.data(), std::size_t(n)));
        const double dbeta = k.beta(sigma) - bs;
        double bracket = 0;
        for (int j = 0; j < n; ++j) {
            const double dj = x[std::size_t(j)] - y[std::size_t(j)];
            const double t = dj / (2.0 * bs * dt);
            bracket += t * t;
        }
        bracket -= double(n) / (2.0 * bs * dt);
        const double lhs = std::abs(dbeta * bracket * g);

        const double bound = (C0 + lipschitz_c * double(n) / (2.0 * bs)) *
                             std::pow(2.0, 0.5 * n) /
                             std::pow(8.0 * std::numbers::pi * k.rho * bs * dt, 0.5 * n) *
                             std::exp(-r2 / (8.0 * k.rho * bs * dt));
        const double slack = bound - lhs;
        rep.min_slack = std::min(rep.min_slack, slack);
        rep.max_slack = std::max(rep.max_slack, slack);
        ++rep.samples;
        if (slack < 0) {
            ++rep.violations;
            if (rep.first_violation.empty())
                rep.first_violation = "s=" + std::to_string(s) + " sigma=" + std::to_string(sigma) +
                                      " |x-y|=" + std::to_string(std::sqrt(r2));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// local gradient-bound fit

struct GradBoundFit {
    double C = 0;      // fitted constant, including headroom
    double delta = 0;  // singularity exponent used
};

/// Fits the smallest C with |G_{,j}| <= C / (dt^delta |x-y|^{n+1-2delta}) on a
/// reference grid, then applies the given headroom factor. The returned
/// constant is meant to be held fixed and re-verified on other samples.
inline GradBoundFit fit_grad_local_bound(const GaussianKernel& k, double delta, double dt_lo,
                                         double dt_hi, double r_lo, double r_hi, int grid,
                                         double headroom = 1.05) {
    if (!(delta > 0.5 && delta < 1.0)) throw domain_error("fit_grad_local_bound: delta in (0.5,1)");
    double C = 0;
    std::array<double, 3> x{0, 0, 0}, y{0, 0, 0};
    for (int a = 0; a < grid; ++a) {
        const double dt = dt_lo + (dt_hi - dt_lo) * (a + 0.5) / grid;
        for (int b = 0; b < grid; ++b) {
            const double r = r_lo + (r_hi - r_lo) * (b + 0.5) / grid;
            y[0] = r;
            const double g =
                std::abs(gaussian_grad(k, dt, std::span<const double>(x.data(), std::size_t(k.dim)),
                                       0.0, std::span<const double>(y.data(), std::size_t(k.dim)), 0));
            C = std::max(C, g * std::pow(dt, delta) * std::pow(r, double(k.dim) + 1.0 - 2.0 * delta));
        }
    }
    return GradBoundFit{C * headroom, delta};
}

/// Worst ratio |G_{,j}| / (C / (dt^delta r^{n+1-2delta})) over a grid; <= 1
/// means the held constant still covers the samples.
inline double verify_grad_local_bound(const GaussianKernel& k, const GradBoundFit& fit,
                                      double dt_lo, double dt_hi, double r_lo, double r_hi,
                                      int grid) {
    double worst = 0;
    std::array<double, 3> x{0, 0, 0}, y{0, 0, 0};
    for (int a = 0; a < grid; ++a) {
        const double dt = dt_lo + (dt_hi - dt_lo) * double(a) / (grid - 1);
        for (int b = 0; b < grid; ++b) {
            const double r = r_lo + (r_hi - r_lo) * double(b) / (grid - 1);
            y[0] = r;
            const double g =
                std::abs(gaussian_grad(k, dt, std::span<const double>(x.data(), std::size_t(k.dim)),
                                       0.0, std::span<const double>(y.data(), std::size_t(k.dim)), 0));
            const double bound =
                fit.C / (std::pow(dt, fit.delta) *
                         std::pow(r, double(k.dim) + 1.0 - 2.0 * fit.delta));
            worst = std::max(worst, g / bound);
        }
    }
    return worst;
}

}  // namespace speclab
