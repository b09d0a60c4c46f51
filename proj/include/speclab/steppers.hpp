#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "speclab/dilatation.hpp"
#include "speclab/dynamics.hpp"
#include "speclab/mode_field.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/rng.hpp"

namespace speclab {

enum class Scheme { euler, trotter_first_order, trotter_exact_exp, rk4 };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::euler: return "euler";
        case Scheme::trotter_first_order: return "trotter_first_order";
        case Scheme::trotter_exact_exp: return "trotter_exact_exp";
        case Scheme::rk4: return "rk4";
    }
    return "?";
}

struct StepPlan {
    double dt = 1e-2;           // step in t (or sigma for damped runs)
    std::int64_t steps = 1;
    Scheme scheme = Scheme::euler;
};

namespace detail {

inline void require_finite(const ModeField& v, std::int64_t step_index) {
    if (!v.all_finite())
        throw numeric_blowup(step_index, "non-finite amplitude during time step");
}

}  // namespace detail

/// Explicit Euler: out = state + dt * rhs(state). Non-finite output raises
/// numeric_blowup carrying the step index.
template <class Rhs>
ModeField euler_step(const ModeField& state, Rhs&& rhs, double dt,
                     std::int64_t step_index = 0) {
    if (!(dt > 0)) throw domain_error("euler_step: dt must be > 0");
    ModeField k1 = rhs(state);
    ModeField out = state;
    k1 *= cplx(dt, 0.0);
    out += k1;
    detail::require_finite(out, step_index);
    return out;
}

/// Classical fourth-order Runge-Kutta step.
template <class Rhs>
ModeField rk4_step(const ModeField& state, Rhs&& rhs, double dt,
                   std::int64_t step_index = 0) {
    if (!(dt > 0)) throw domain_error("rk4_step: dt must be > 0");
    const cplx h(dt, 0.0), half(0.5 * dt, 0.0);
    ModeField k1 = rhs(state);
    ModeField s2 = state; { ModeField t = k1; t *= half; s2 += t; }
    ModeField k2 = rhs(s2);
    ModeField s3 = state; { ModeField t = k2; t *= half; s3 += t; }
    ModeField k3 = rhs(s3);
    ModeField s4 = state; { ModeField t = k3; t *= h; s4 += t; }
    ModeField k4 = rhs(s4);
    ModeField out = state;
    k2 *= cplx(2.0, 0.0);
    k3 *= cplx(2.0, 0.0);
    k1 += k2; k1 += k3; k1 += k4;
    k1 *= cplx(dt / 6.0, 0.0);
    out += k1;
    detail::require_finite(out, step_index);
    return out;
}

enum class TrotterVariant { first_order, exact_exp };

struct TrotterOptions {
    TrotterVariant variant = TrotterVariant::first_order;
    bool nonlinear = true;            // false: pure heat multiplier step
    std::int64_t exact_exp_max_rows = 512;
};

/// Chart context for the damped form of the Trotter step; coefficients are
/// frozen at the step's starting sigma.
struct DampedContext {
    DilatationChart chart;
    double sigma = 0.0;
    Nonlinearity nl = Nonlinearity::navier_stokes;
};

namespace detail {

/// Flat dense complex matrix with row-major storage, just big enough for the
/// frozen-coefficient exponential at desk scale.
struct DenseMatrix {
    std::int64_t n = 0;
    std::vector<cplx> a;

    explicit DenseMatrix(std::int64_t rows = 0)
        : n(rows), a(static_cast<std::size_t>(rows * rows), cplx(0, 0)) {}

    cplx& operator()(std::int64_t r, std::int64_t c) {
        return a[static_cast<std::size_t>(r * n + c)];
    }
    const cplx& operator()(std::int64_t r, std::int64_t c) const {
        return a[static_cast<std::size_t>(r * n + c)];
    }

    double inf_norm() const {
        double best = 0;
        for (std::int64_t r = 0; r < n; ++r) {
            double s = 0;
            for (std::int64_t c = 0; c < n; ++c) s += std::abs((*this)(r, c));
            best = std::max(best, s);
        }
        return best;
    }

    static DenseMatrix identity(std::int64_t n) {
        DenseMatrix m(n);
        for (std::int64_t r = 0; r < n; ++r) m(r, r) = cplx(1, 0);
        return m;
    }

    DenseMatrix mul(const DenseMatrix& o) const {
        DenseMatrix out(n);
        for (std::int64_t r = 0; r < n; ++r) {
            for (std::int64_t k = 0; k < n; ++k) {
                const cplx v = (*this)(r, k);
                if (v == cplx(0, 0)) continue;
                const cplx* src = &o.a[static_cast<std::size_t>(k * n)];
                cplx* dst = &out.a[static_cast<std::size_t>(r * n)];
                for (std::int64_t c = 0; c < n; ++c) dst[c] += v * src[c];
            }
        }
        return out;
    }

    std::vector<cplx> apply(const std::vector<cplx>& x) const {
        std::vector<cplx> y(static_cast<std::size_t>(n), cplx(0, 0));
        for (std::int64_t r = 0; r < n; ++r) {
            cplx acc(0, 0);
            const cplx* row = &a[static_cast<std::size_t>(r * n)];
            for (std::int64_t c = 0; c < n; ++c) acc += row[c] * x[std::size_t(c)];
            y[std::size_t(r)] = acc;
        }
        return y;
    }
};

/// Scaling-and-squaring matrix exponential with a Taylor core run to machine
/// precision on the scaled matrix.
inline DenseMatrix expm(DenseMatrix A) {
    int squarings = 0;
    double nrm = A.inf_norm();
    while (nrm > 0.5) {
        for (cplx& z : A.a) z *= 0.5;
        nrm *= 0.5;
        ++squarings;
    }
    DenseMatrix result = DenseMatrix::identity(A.n);
    DenseMatrix term = DenseMatrix::identity(A.n);
    for (int k = 1; k <= 30; ++k) {
        term = term.mul(A);
        for (cplx& z : term.a) z *= 1.0 / double(k);
        double tn = term.inf_norm();
        for (std::size_t i = 0; i < term.a.size(); ++i) result.a[i] += term.a[i];
        if (tn < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = result.mul(result);
    return result;
}

/// Frozen Euler-term matrix e(v): row (i,alpha), column (j,gamma) entry
///   -(2 pi i (alpha_j - gamma_j)/l) * [P(alpha) v_{.,(alpha-gamma)}]_i,
/// which satisfies e(v) v = -P[B(v)] (the Leray-projected advection term).
/// For n = 1 the projector is the identity.
inline DenseMatrix euler_term_matrix(const ModeField& v, double l) {
    const Lattice& lat = v.lattice();
    const int n = lat.dim();
    const std::int64_t L = lat.size();
    const std::int64_t rows = n * L;
    DenseMatrix e(rows);
    const auto table = lat.coords_table();
    const double c = 2.0 * std::numbers::pi / l;
    for (std::int64_t ka = 0; ka < L; ++ka) {
        const Coord& alpha = table[std::size_t(ka)];
        const double a2 = Lattice::norm_sq(alpha, n);
        for (std::int64_t kg = 0; kg < L; ++kg) {
            const Coord& gamma = table[std::size_t(kg)];
            Coord beta;
            bool ok = true;
            for (int j = 0; j < n; ++j) {
                beta[j] = alpha[j] - gamma[j];
                if (beta[j] < -lat.truncation() || beta[j] > lat.truncation()) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            const std::int64_t kb = lat.flat_unchecked(beta);
            // P(alpha) applied to the velocity vector at beta
            cplx proj[max_dimension];
            cplx dot(0, 0);
            for (int i = 0; i < n; ++i) proj[i] = v.component(i)[kb];
            if (a2 > 0 && n >= 2) {
                for (int i = 0; i < n; ++i) dot += double(alpha[i]) * proj[i];
                dot /= a2;
                for (int i = 0; i < n; ++i) proj[i] -= double(alpha[i]) * dot;
            }
            for (int j = 0; j < n; ++j) {
                const cplx w = cplx(0.0, -c * beta[j]);
                for (int i = 0; i < n; ++i) e(i * L + ka, j * L + kg) = w * proj[i];
            }
        }
    }
    return e;
}

}  // namespace detail

/// One step of the product scheme: heat multiplier times (an approximation
/// of) the exponential of the frozen Euler-term matrix,
///   out = Diag(exp(-nu 4 pi^2 |alpha|^2 dt / l^2)) * E(v, dt) * v,
/// with E = I + e(v) dt (first_order) or exp(e(v) dt) (exact_exp, dense and
/// capped). With a DampedContext the viscous, nonlinear and damping factors
/// pick up the chart coefficients rho*mu^{tau,1}, rho*lambda*mu^{tau,2} and
/// exp(-mu dt) respectively.
inline ModeField trotter_step(const ModeField& v, const FluidParams& p,
                              const std::optional<DampedContext>& damped, double dt,
                              const TrotterOptions& opt = {}, std::int64_t step_index = 0) {
    if (!(dt > 0)) throw domain_error("trotter_step: dt must be > 0");
    const Lattice& lat = v.lattice();
    const int n = lat.dim();

    double visc_coeff = 1.0, nl_coeff = 1.0, damp_mu = 0.0;
    if (damped) {
        const MuCoefficients mu = mu_at(damped->chart, damped->sigma);
        visc_coeff = damped->chart.rho() * mu.mu_tau1;
        nl_coeff = damped->chart.rho() * damped->chart.lambda() * mu.mu_tau2;
        damp_mu = mu.mu;
    }

    ModeField out(lat, v.torus_length());
    if (opt.nonlinear) {
        if (opt.variant == TrotterVariant::first_order) {
            ModeField adv = detail::advection_term(v, p.torus_length);
            if (n >= 2) adv = leray_project(adv);
            adv *= cplx(-nl_coeff * dt, 0.0); // e(v) v = -P[B(v)]
            out = v;
            out += adv;
        } else {
            const std::int64_t rows = n * lat.size();
            if (rows > opt.exact_exp_max_rows)
                throw config_error("trotter exact_exp: lattice exceeds dense-matrix cap (" +
                                   std::to_string(rows) + " > " +
                                   std::to_string(opt.exact_exp_max_rows) + " rows)");
            detail::DenseMatrix e = detail::euler_term_matrix(v, p.torus_length);
            for (cplx& z : e.a) z *= nl_coeff * dt;
            const detail::DenseMatrix E = detail::expm(std::move(e));
            std::vector<cplx> x(static_cast<std::size_t>(rows));
            for (int i = 0; i < n; ++i)
                for (std::int64_t k = 0; k < lat.size(); ++k)
                    x[std::size_t(i * lat.size() + k)] = v.component(i)[k];
            const std::vector<cplx> y = E.apply(x);
            out = ModeField(lat, v.torus_length());
            for (int i = 0; i < n; ++i)
                for (std::int64_t k = 0; k < lat.size(); ++k)
                    out.component(i)[k] = y[std::size_t(i * lat.size() + k)];
        }
    } else {
        out = v;
    }

    // viscous diagonal, exact exponential per mode; plus the damping factor
    const double cvisc = p.viscosity * 4.0 * std::numbers::pi * std::numbers::pi /
                         (p.torus_length * p.torus_length) * visc_coeff;
    const auto table = lat.coords_table();
    const double damp_factor = std::exp(-damp_mu * dt);
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const double a2 = Lattice::norm_sq(table[std::size_t(k)], n);
        const double f = std::exp(-cvisc * a2 * dt) * damp_factor;
        for (int i = 0; i < n; ++i) out.component(i)[k] *= f;
    }
    out.set_real_valued(v.real_valued());
    out.set_solenoidal(v.solenoidal() && n >= 2);
    detail::require_finite(out, step_index);
    return out;
}

// ---------------------------------------------------------------------------
// step-size machinery

/// Constant bundle entering the admissible-step-size bound. C is the working
/// norm/envelope bound of the data (the h^s lattice norm is used as the
/// computable surrogate at order sobolev_order), Delta the substep length,
/// alpha_h and delta_k the Hoelder and kernel-singularity exponents.
struct ContractionConstants {
    double C = 1.0;
    double Delta = 0.5773502691896258; // 1/sqrt(3)
    double alpha_h = 0.75;             // in (1/2, 1]
    double delta_k = 0.75;             // in (1/2, 1)
    double c_mu = 0.0;                 // damping infimum on the substep horizon
    double c_sup_mu = 0.0;             // coefficient supremum
    double C_G = 0.0;                  // heat-kernel gradient space-time L1 bound
    double C_K = 0.0;                  // Laplacian-kernel derivative L1+L2 bound
    double C_m = 0.0;                  // product-estimate constant (sampled)
};

/// Admissible time-scale factor:
///   rho <= (c_mu Delta^{alpha+delta-1} C/2 - eps)
///          / (c_sup_mu n C_G C_m (1 + n C_K) C^2).
/// Envelope preservation must hold for any rho below the returned value.
inline double step_size_bound(const ContractionConstants& k, int n, double eps) {
    if (!(eps > 0)) throw domain_error("step_size_bound: eps must be > 0");
    const double numerator =
        k.c_mu * std::pow(k.Delta, k.alpha_h + k.delta_k - 1.0) * 0.5 * k.C - eps;
    if (!(numerator > 0))
        throw estimation_error("step_size_bound: no admissible step (non-positive numerator)");
    const double denominator =
        k.c_sup_mu * double(n) * k.C_G * k.C_m * (1.0 + double(n) * k.C_K) * k.C * k.C;
    if (!(denominator > 0))
        throw estimation_error("step_size_bound: constants incomplete (zero denominator)");
    return numerator / denominator;
}

/// Quadrature and sampling policy for estimate_constants. Recorded in run
/// manifests so estimated constants are reproducible.
struct EstimationSpec {
    int radial_points = 64;
    int angular_points = 64;
    int time_points = 48;
    double gaussian_cut = 10.0;   // radial cut in standard deviations
    int field_samples = 32;       // C_m sampling
    int sample_truncation = 0;    // lattice M for C_m samples; 0 -> use caller's M
    std::uint64_t seed = 1;
    double sobolev_order = 2.0;   // norm order for C_m and C
    double alpha_h = 0.75;
    double delta_k = 0.75;
    double Delta = 0.5773502691896258;
    double t0 = 0.0;
    ChartMode chart_mode = ChartMode::localized_factor;
    int mu_samples = 10001;
};

namespace detail {

/// Angular moment over S^{n-1}: integral of |cos theta|^pow sin^{n-2} theta
/// times the (n-2)-sphere area, i.e. the full surface integral of |omega_1|^pow.
inline double sphere_abs_cos_moment(int n, int pow_, int pts) {
    if (n == 1) return 2.0; // S^0 = two points, |omega| = 1
    const double ring = (n == 2) ? 2.0 : unit_sphere_area(n - 1);
    // n == 2: integrate over the angle directly
    const auto rule = gauss_legendre_interval(pts, 0.0, std::numbers::pi);
    double acc = 0;
    for (const auto& q : rule) {
        const double c = std::pow(std::abs(std::cos(q.x[0])), double(pow_));
        const double s = (n >= 3) ? std::pow(std::sin(q.x[0]), double(n - 2)) : 1.0;
        acc += q.w * c * s;
    }
    return ring * acc;
}

}  // namespace detail

/// Numeric estimation of the constant bundle:
///  - C_K: L1 norm of the Laplacian-kernel derivative K_{n,i} ~ x_i/(w_n |x|^n)
///    over the unit ball plus its L2 norm outside (n >= 3; n = 1 has no
///    pressure kernel and gets C_K = 0, n = 2 is unsupported).
///  - C_G: space-time L1 of the first derivative of the reference heat kernel
///    (unit diffusivity) over [0, Delta], divided by Delta^{1-delta_k}.
///  - C_m: empirical product-estimate constant, sup over seeded random field
///    pairs of ||f*g||_{h^m} / (||f||_{h^m} ||g||_{h^m}) at m = sobolev_order.
///  - c_mu, c_sup_mu: sampled extrema of mu and mu^{tau,2} on [0, Delta].
/// C is left at 1; callers replace it with the norm bound of their data.
inline ContractionConstants estimate_constants(int n, int M, const EstimationSpec& spec = {}) {
    ContractionConstants k;
    k.Delta = spec.Delta;
    k.alpha_h = spec.alpha_h;
    k.delta_k = spec.delta_k;
    if (!(k.alpha_h > 0.5 && k.alpha_h <= 1.0))
        throw estimation_error("alpha_h must lie in (1/2, 1]");
    if (!(k.delta_k > 0.5 && k.delta_k < 1.0))
        throw estimation_error("delta_k must lie in (1/2, 1)");

    // damping extrema over the substep horizon
    {
        DilatationChart chart(spec.t0, 1.0, 1.0, spec.chart_mode);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (int i = 0; i < spec.mu_samples; ++i) {
            const double sigma = spec.Delta * double(i) / double(spec.mu_samples - 1);
            const MuCoefficients mu = mu_at(chart, sigma);
            lo = std::min(lo, mu.mu);
            hi = std::max(hi, mu.mu_tau2);
        }
        k.c_mu = lo;
        k.c_sup_mu = hi;
    }

    // Laplacian-kernel constant
    if (n == 1) {
        k.C_K = 0.0;
    } else if (n == 2) {
        throw estimation_error(
            "estimate_constants: the n = 2 Laplacian kernel is outside the supported range");
    } else {
        const double area = unit_sphere_area(n);
        const double m1 = detail::sphere_abs_cos_moment(n, 1, spec.angular_points);
        const double m2 = detail::sphere_abs_cos_moment(n, 2, spec.angular_points);
        // L1 over B_1: radial integrand is constant = m1/area
        double l1 = 0;
        for (const auto& q : gauss_legendre_interval(spec.radial_points, 0.0, 1.0))
            l1 += q.w * (m1 / area);
        // L2^2 outside: substitute r = 1/u so the radial factor is u^{n-3}
        double l2sq = 0;
        for (const auto& q : gauss_legendre_interval(spec.radial_points, 0.0, 1.0))
            l2sq += q.w * std::pow(q.x[0], double(n - 3)) * (m2 / (area * area));
        k.C_K = l1 + std::sqrt(l2sq);
    }

    // heat-kernel gradient constant, reference diffusivity 1
    {
        const double D = 1.0;
        // spatial L1 of |grad_j G| at time t: closed radial form integrated
        // numerically in z = r / sqrt(4 D t)
        const double m1 = detail::sphere_abs_cos_moment(n, 1, spec.angular_points);
        auto spatial_l1 = [&](double t) {
            double acc = 0;
            for (const auto& q :
                 gauss_legendre_interval(spec.radial_points, 0.0, spec.gaussian_cut)) {
                const double z = q.x[0];
                // r^{n-1} * (r/(2Dt)) * G, with r = z sqrt(4Dt)
                const double g = std::exp(-z * z) / std::pow(4.0 * std::numbers::pi * D * t, 0.5 * n);
                const double r = z * std::sqrt(4.0 * D * t);
                acc += q.w * std::sqrt(4.0 * D * t) * std::pow(r, double(n - 1)) *
                       (r / (2.0 * D * t)) * g;
            }
            return acc * m1; // times the surface integral of |omega_j|
        };
        // time integral over [0, Delta] with t = w^2 smoothing the sqrt singularity
        double st = 0;
        for (const auto& q :
             gauss_legendre_interval(spec.time_points, 0.0, std::sqrt(spec.Delta))) {
            const double w = q.x[0];
            st += q.w * 2.0 * w * spatial_l1(w * w);
        }
        k.C_G = st / std::pow(spec.Delta, 1.0 - spec.delta_k);
    }

    // sampled product-estimate constant: structured probes (delta and
    // envelope first factors) and random fields, each tightened over the
    // second factor by power iteration on the weighted convolution operator
    {
        const int Ms = spec.sample_truncation > 0 ? spec.sample_truncation : M;
        const Lattice lat(n, Ms);
        Rng rng(spec.seed);
        const double m_ord = spec.sobolev_order;
        const auto table = lat.coords_table();
        std::vector<double> w2(static_cast<std::size_t>(lat.size()));
        for (std::int64_t kk = 0; kk < lat.size(); ++kk)
            w2[std::size_t(kk)] =
                1.0 + std::pow(Lattice::norm(table[std::size_t(kk)], n), 2.0 * m_ord);

        auto conj_flip = [&](const ModeScalar& f) {
            ModeScalar out(lat);
            for (std::int64_t kk = 0; kk < lat.size(); ++kk) {
                Coord neg = table[std::size_t(kk)];
                for (int j = 0; j < n; ++j) neg[j] = -neg[j];
                out[lat.flat_unchecked(neg)] = std::conj(f[kk]);
            }
            return out;
        };

        // ||f * .|| operator norm on the weighted space, by power iteration
        auto op_norm = [&](const ModeScalar& f) {
            const ModeScalar fc = conj_flip(f);
            ModeScalar g(lat);
            for (std::int64_t kk = 0; kk < lat.size(); ++kk)
                g[kk] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
            double norm_ratio = 0;
            for (int it = 0; it < 12; ++it) {
                const double ng = hs_norm(g, m_ord);
                if (!(ng > 0)) break;
                g *= cplx(1.0 / ng, 0.0);
                ModeScalar tg = convolve_fast(f, g);
                norm_ratio = hs_norm(tg, m_ord);
                // adjoint: w^{-2} . conv(conj_flip(f), w^2 . Tg)
                for (std::int64_t kk = 0; kk < lat.size(); ++kk) tg[kk] *= w2[std::size_t(kk)];
                ModeScalar back = convolve_fast(fc, tg);
                for (std::int64_t kk = 0; kk < lat.size(); ++kk)
                    back[kk] /= w2[std::size_t(kk)];
                g = back;
            }
            return norm_ratio;
        };

        double sup = 0;
        auto probe = [&](const ModeScalar& f) {
            const double nf = hs_norm(f, m_ord);
            if (nf > 0) sup = std::max(sup, op_norm(f) / nf);
        };

        {
            ModeScalar delta0(lat);
            delta0[lat.flat_unchecked(Coord{})] = cplx(1, 0);
            probe(delta0);
        }
        {
            ModeScalar env(lat);
            for (std::int64_t kk = 0; kk < lat.size(); ++kk)
                env[kk] =
                    cplx(1.0 / (1.0 + std::pow(Lattice::norm(table[std::size_t(kk)], n),
                                               double(n) + 2.0)),
                         0.0);
            probe(env);
        }
        for (int s = 0; s < spec.field_samples; ++s) {
            ModeScalar f(lat);
            for (std::int64_t kk = 0; kk < lat.size(); ++kk)
                f[kk] = std::polar(rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
            probe(f);
        }
        if (!(sup > 0)) throw estimation_error("C_m sampling degenerated");
        k.C_m = sup;
    }

    return k;
}

}  // namespace speclab
