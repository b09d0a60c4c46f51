#pragma once

// Sign conventions, fixed once for the whole module:
//  - Navier-Stokes advection enters the right side as -P[B(v)] with
//    B_{i,alpha} = sum_j sum_gamma (2 pi i gamma_j / l) v_{j,(alpha-gamma)} v_{i,gamma}
//    and P the mode-space Leray projector.
//  - The Burgers nonlinearity enters with a plus sign and weight k_j (no
//    2 pi i factor), torus length normalized to 1.
// The damped right side inherits whichever convention its model selects.

#include <cmath>
#include <numbers>
#include <vector>

#include "speclab/dilatation.hpp"
#include "speclab/mode_field.hpp"

namespace speclab {

struct FluidParams {
    double viscosity = 0.0;    // nu = 0 selects the inviscid regime
    double torus_length = 1.0; // l > 0
};

/// Time-dependent scalar coefficient c(t): closed-form tag or a lookup table
/// with linear interpolation.
struct CoefficientFn {
    enum class Kind { constant, sinusoid, table };
    Kind kind = Kind::constant;
    double value = 1.0;                // constant
    double amplitude = 1.0;            // sinusoid: amplitude*sin(2*pi*freq*t + phase)
    double frequency = 1.0;
    double phase = 0.0;
    std::vector<double> times, values; // table, times ascending

    double operator()(double t) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::sinusoid:
                return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
            case Kind::table: {
                if (times.empty() || times.size() != values.size())
                    throw config_error("coefficient table must be non-empty and aligned");
                if (t <= times.front()) return values.front();
                if (t >= times.back()) return values.back();
                std::size_t hi = 1;
                while (times[hi] < t) ++hi;
                const double w = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
                return (1.0 - w) * values[hi - 1] + w * values[hi];
            }
        }
        return 0.0;
    }
};

enum class ForcingKind { none, static_orthant, dynamic_counterexample };

/// Source-term specification. For the orthant kinds the closed-form part is
///   f_{i,alpha}(t) = c_i(t) / (1 + |alpha|^{(3+epsilon)/2})   if all alpha_j >= 0,
/// zero on mixed-sign orthants, and (for the dynamic kind) the all-negative
/// orthant is driven by the cancellation rule of dynamic_forcing_update.
struct ForcingSpec {
    ForcingKind kind = ForcingKind::none;
    double epsilon = 0.1;
    std::vector<CoefficientFn> coefficients; // size 1 (broadcast) or n

    const CoefficientFn& coefficient(int i) const {
        if (coefficients.empty()) throw config_error("forcing requires coefficients");
        if (coefficients.size() == 1) return coefficients.front();
        return coefficients.at(static_cast<std::size_t>(i));
    }
};

/// Which quadratic term the damped equation carries.
enum class Nonlinearity { navier_stokes, burgers, none };

namespace detail {

/// Shared FFT plumbing for B_{i,alpha} = sum_j sum_gamma w_j(gamma)
/// v_{j,(alpha-gamma)} v_{i,gamma}: the forward transforms of the v_j are
/// reused across all n^2 convolutions (n^2 + 2n transforms in total).
template <class WeightFn>
ModeField bilinear_sum(const ModeField& v, WeightFn&& weight) {
    const Lattice& lat = v.lattice();
    const int n = lat.dim();
    const int side = lat.side();
    const std::size_t pad = speclab::detail::next_pow2(std::size_t(2 * side - 1));
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= pad;
    const auto table = lat.coords_table();

    auto embed = [&](auto&& value_at) {
        std::vector<cplx> buf(total, cplx(0, 0));
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const Coord& c = table[std::size_t(k)];
            std::size_t idx = 0;
            for (int j = 0; j < n; ++j) idx = idx * pad + std::size_t(c[j] + lat.truncation());
            buf[idx] = value_at(k);
        }
        speclab::detail::fft_nd(buf.data(), n, pad, false);
        return buf;
    };

    std::vector<std::vector<cplx>> fv(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        fv[std::size_t(j)] = embed([&](std::int64_t k) { return v.component(j)[k]; });

    ModeField out(lat, v.torus_length());
    std::vector<cplx> acc(total);
    const double scale = 1.0 / double(total);
    for (int i = 0; i < n; ++i) {
        std::fill(acc.begin(), acc.end(), cplx(0, 0));
        for (int j = 0; j < n; ++j) {
            const std::vector<cplx> fw = embed([&](std::int64_t k) {
                return weight(j, table[std::size_t(k)]) * v.component(i)[k];
            });
            for (std::size_t p = 0; p < total; ++p) acc[p] += fv[std::size_t(j)][p] * fw[p];
        }
        speclab::detail::fft_nd(acc.data(), n, pad, true);
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const Coord& c = table[std::size_t(k)];
            std::size_t idx = 0;
            for (int j = 0; j < n; ++j)
                idx = idx * pad + std::size_t(c[j] + 2 * lat.truncation());
            out.component(i)[k] = acc[idx] * scale;
        }
    }
    return out;
}

/// B_{i,alpha} = sum_j sum_gamma (2 pi i gamma_j / l) v_{j,(alpha-gamma)} v_{i,gamma}:
/// the advection sums of the mode ODE.
inline ModeField advection_term(const ModeField& v, double l) {
    const double c = 2.0 * std::numbers::pi / l;
    return bilinear_sum(v, [c](int j, const Coord& gamma) { return cplx(0.0, c * gamma[j]); });
}

/// Burgers nonlinearity, torus length 1 normalization:
/// B_{i,l} = sum_j sum_{k != 0} u_{j,(l-k)} k_j u_{i,k}. The k = 0 term drops
/// automatically because its weight k_j vanishes for every j.
inline ModeField burgers_term(const ModeField& u) {
    return bilinear_sum(u,
                        [](int j, const Coord& gamma) { return cplx(double(gamma[j]), 0.0); });
}

/// Diagonal viscous factor per mode: -nu * 4 pi^2 |alpha|^2 / l^2.
inline ModeField viscous_term(const ModeField& v, double nu, double l) {
    const Lattice& lat = v.lattice();
    ModeField out = v;
    const double c = -nu * 4.0 * std::numbers::pi * std::numbers::pi / (l * l);
    const auto table = lat.coords_table();
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const double f = c * Lattice::norm_sq(table[std::size_t(k)], lat.dim());
        for (int i = 0; i < lat.dim(); ++i) out.component(i)[k] *= f;
    }
    return out;
}

}  // namespace detail

/// Closed-form part of the forcing at time t (positive orthant only).
inline ModeField forcing_field(const Lattice& lat, double torus_length, const ForcingSpec& f,
                               double t) {
    ModeField out(lat, torus_length);
    if (f.kind == ForcingKind::none) return out;
    const auto table = lat.coords_table();
    const double p = (3.0 + f.epsilon) / 2.0;
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const Coord& alpha = table[std::size_t(k)];
        bool nonneg = true;
        for (int j = 0; j < lat.dim(); ++j)
            if (alpha[j] < 0) { nonneg = false; break; }
        if (!nonneg) continue;
        const double r = Lattice::norm(alpha, lat.dim());
        const double env = 1.0 / (1.0 + std::pow(r, p));
        for (int i = 0; i < lat.dim(); ++i)
            out.component(i)[k] = cplx(f.coefficient(i)(t) * env, 0.0);
    }
    return out;
}

/// Navier-Stokes mode ODE right side:
///   dv_{i,alpha}/dt = -nu (4 pi^2 |alpha|^2 / l^2) v_{i,alpha}
///                     - [P(alpha) B(v)]_{i,alpha} + f_{i,alpha}(t),
/// assembled as viscous diagonal + Leray projection of the advection sums +
/// forcing.
inline ModeField ns_rhs(const ModeField& v, const FluidParams& p, const ForcingSpec& f,
                        double t) {
    const int n = v.dim();
    ModeField rhs = detail::viscous_term(v, p.viscosity, p.torus_length);
    ModeField adv = detail::advection_term(v, p.torus_length);
    if (n >= 2) adv = leray_project(adv);
    rhs -= adv;
    if (f.kind != ForcingKind::none)
        rhs += forcing_field(v.lattice(), p.torus_length, f, t);
    rhs.set_solenoidal(v.solenoidal() && n >= 2);
    rhs.set_real_valued(v.real_valued() && f.kind == ForcingKind::none);
    return rhs;
}

/// Burgers mode ODE right side (torus length 1 normalization):
///   du_{i,l}/dt = -nu 4 pi^2 |l|^2 u_{i,l} + sum_j sum_{k != 0} u_{j,(l-k)} k_j u_{i,k}.
inline ModeField burgers_rhs(const ModeField& u, const FluidParams& p) {
    ModeField rhs = detail::viscous_term(u, p.viscosity, 1.0);
    rhs += detail::burgers_term(u);
    rhs.set_real_valued(false);
    rhs.set_solenoidal(false);
    return rhs;
}

/// Auto-controlled (damped) right side in the dilated time sigma:
///   du/dsigma = rho mu^{tau,1}(sigma) [viscous diagonal] u
///             + rho lambda mu^{tau,2}(sigma) [nonlinear term] u
///             - mu(sigma) u,
/// where the nonlinear term matches the selected model's convention
/// (-P[B] for Navier-Stokes, +Burgers sums for Burgers). rho multiplies every
/// spatial term; the damping term carries no rho.
inline ModeField damped_rhs(const ModeField& u, const DilatationChart& chart, double sigma,
                            const FluidParams& p,
                            Nonlinearity nl = Nonlinearity::navier_stokes) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw domain_error("damped_rhs: sigma must be finite and >= 0");
    const MuCoefficients mu = mu_at(chart, sigma);
    const double rho = chart.rho();
    const double lambda = chart.lambda();

    const double visc_l = (nl == Nonlinearity::burgers) ? 1.0 : p.torus_length;
    ModeField rhs = detail::viscous_term(u, p.viscosity, visc_l);
    rhs *= cplx(rho * mu.mu_tau1, 0.0);

    if (nl == Nonlinearity::navier_stokes) {
        ModeField adv = detail::advection_term(u, p.torus_length);
        if (u.dim() >= 2) adv = leray_project(adv);
        adv *= cplx(rho * lambda * mu.mu_tau2, 0.0);
        rhs -= adv;
    } else if (nl == Nonlinearity::burgers) {
        ModeField b = detail::burgers_term(u);
        b *= cplx(rho * lambda * mu.mu_tau2, 0.0);
        rhs += b;
    }

    ModeField damp = u;
    damp *= cplx(mu.mu, 0.0);
    rhs -= damp;
    rhs.set_real_valued(u.real_valued());
    rhs.set_solenoidal(u.solenoidal() && nl == Nonlinearity::navier_stokes && u.dim() >= 2);
    return rhs;
}

/// Forcing field for one explicit Euler update v <- v + dt*(rhs_parts + f):
///   - all alpha_j >= 0: the closed-form orthant value at time t;
///   - all alpha_j < 0:  f = -v/dt - rhs_parts, so the update lands exactly
///     on zero (and a mode that is exactly zero stays exactly zero);
///   - mixed orthants: zero.
inline ModeField dynamic_forcing_update(const ModeField& v, const ModeField& rhs_parts,
                                        const ForcingSpec& spec, double dt, double t) {
    if (spec.kind != ForcingKind::dynamic_counterexample)
        throw config_error("dynamic_forcing_update requires the dynamic_counterexample kind");
    if (!(dt > 0)) throw domain_error("dynamic_forcing_update: dt must be > 0");
    v.require_compatible(rhs_parts);
    const Lattice& lat = v.lattice();
    ModeField f = forcing_field(lat, v.torus_length(), spec, t);
    const auto table = lat.coords_table();
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const Coord& alpha = table[std::size_t(k)];
        bool allneg = true;
        for (int j = 0; j < lat.dim(); ++j)
            if (alpha[j] >= 0) { allneg = false; break; }
        if (!allneg) continue;
        for (int i = 0; i < lat.dim(); ++i)
            f.component(i)[k] = -v.component(i)[k] / dt - rhs_parts.component(i)[k];
    }
    return f;
}

}  // namespace speclab
