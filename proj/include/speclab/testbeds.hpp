#pragma once

#include <cmath>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/mode_field.hpp"

namespace speclab {

// ---------------------------------------------------------------------------
// scalar quadratic ODE under auto-control

/// dx/dt = lambda x^2, x(0) = x0. For x0 > 0 the solution blows up at
/// t = 1/(lambda x0).
struct ScalarOdeConfig {
    double x0 = 1.0;
    double lambda = 1.0;
    double t0 = 0.0;

    double blowup_time() const {
        if (!(x0 != 0.0)) throw config_error("scalar ODE requires x0 != 0");
        return 1.0 / (lambda * x0);
    }
};

/// x(t) = x0 / (1 - lambda x0 t); domain error at/after the blow-up time.
inline double ode_analytic(const ScalarOdeConfig& cfg, double t) {
    const double denom = 1.0 - cfg.lambda * cfg.x0 * t;
    if (cfg.x0 > 0 && !(t < cfg.blowup_time()))
        throw domain_error("ode_analytic: t at/after blow-up time");
    return cfg.x0 / denom;
}

/// Inverse chart time t(s) = t0 + s / sqrt(1 + s^2) for the scalar testbed.
inline double ode_chart_time(double t0, double s) {
    if (!(s >= 0)) throw domain_error("ode_chart_time: s must be >= 0");
    return t0 + s / std::sqrt(1.0 + s * s);
}

/// Transformed solution for t0 = 0, lambda = 1, x0 = 1:
/// y(s) = 1 / ((1 + t(s))(1 - t(s))) = 1 + s^2.
inline double ode_transformed_analytic(double s) {
    const double t = ode_chart_time(0.0, s);
    return 1.0 / ((1.0 + t) * (1.0 - t));
}

/// lambda-scaled transformed solution (t0 = 0, x0 = 1):
/// y_lambda(s) = 1 / (lambda (1 + t(s)) (1 - lambda t(s))).
inline double ode_transformed_analytic_scaled(double lambda, double s) {
    const double t = ode_chart_time(0.0, s);
    const double denom = lambda * (1.0 + t) * (1.0 - lambda * t);
    if (!(denom > 0)) throw domain_error("scaled transformed solution past its singularity");
    return 1.0 / denom;
}

/// Right side of the transformed equation for dx/dt = lambda x^2 under the
/// comparison map x = lambda (1+t) y, t = t(s):
///   dy/ds = lambda^2 sqrt(1-(t-t0)^2)^3 (1+t) y^2 - (sqrt(1-(t-t0)^2)^3/(1+t)) y.
/// The quadratic coefficient carries one lambda from the equation and one
/// from the transform amplitude; this is the reading consistent with the
/// closed-form transformed solutions. The damping term is linear, while the
/// growth term keeps its quadratic character - the point of this testbed.
inline double ode_transformed_rhs(const ScalarOdeConfig& cfg, double y, double s) {
    const double t = ode_chart_time(cfg.t0, s);
    const double d = t - cfg.t0;
    const double w = 1.0 - d * d;
    const double w3 = w * std::sqrt(w);
    return cfg.lambda * cfg.lambda * w3 * (1.0 + t) * y * y - (w3 / (1.0 + t)) * y;
}

/// RK4 for the scalar ODE; returns the last finite value reached and the
/// number of completed steps (stops early if the value leaves the finite
/// range).
struct ScalarIntegration {
    std::vector<double> times;
    std::vector<double> values;
    bool finite = true;
};

template <class Rhs>
ScalarIntegration integrate_scalar(double y0, Rhs&& rhs, double t_begin, double dt,
                                   std::int64_t steps, bool record = true) {
    ScalarIntegration out;
    double y = y0, t = t_begin;
    if (record) {
        out.times.push_back(t);
        out.values.push_back(y);
    }
    for (std::int64_t i = 0; i < steps; ++i) {
        const double k1 = rhs(y, t);
        const double k2 = rhs(y + 0.5 * dt * k1, t + 0.5 * dt);
        const double k3 = rhs(y + 0.5 * dt * k2, t + 0.5 * dt);
        const double k4 = rhs(y + dt * k3, t + dt);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        if (!std::isfinite(y)) {
            out.finite = false;
            break;
        }
        if (record) {
            out.times.push_back(t);
            out.values.push_back(y);
        }
    }
    return out;
}

/// Blow-up time estimate: first crossing of 1/eps_threshold under RK4 at dt
/// and dt/2, Richardson-extrapolated (2 t_half - t_full).
inline double estimate_blowup_time(const ScalarOdeConfig& cfg, double dt, double eps_threshold,
                                   double horizon) {
    const double big = 1.0 / eps_threshold;
    auto crossing = [&](double step) {
        double x = cfg.x0, t = 0.0;
        auto rhs = [&](double v, double) { return cfg.lambda * v * v; };
        const std::int64_t n = std::int64_t(horizon / step) + 1;
        for (std::int64_t i = 0; i < n; ++i) {
            const double k1 = rhs(x, t);
            const double k2 = rhs(x + 0.5 * step * k1, t);
            const double k3 = rhs(x + 0.5 * step * k2, t);
            const double k4 = rhs(x + step * k3, t);
            x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += step;
            if (!std::isfinite(x) || x > big) return t;
        }
        throw domain_error("estimate_blowup_time: no crossing within horizon");
    };
    const double t_full = crossing(dt);
    const double t_half = crossing(0.5 * dt);
    return 2.0 * t_half - t_full;
}

// ---------------------------------------------------------------------------
// dyadic shell model

/// Shell-model configuration. The dissipation sign is an explicit parameter
/// (s_visc = -1 is the dissipative reading); the equation is
///   dK_m/dt = s_visc mu^{2 m alpha} K_m + mu^{m-1} K_{m-1}^2 - mu^m K_m K_{m-1},
/// with K below the shell range treated as zero and cascade transfer from
/// shell m-1 to m.
struct ShellConfig {
    double mu = 2.0;        // lacunarity parameter
    double alpha = 0.1;     // dissipation exponent
    double s_visc = -1.0;   // dissipation sign
    int m_min = 0;
    int m_max = 15;
    std::vector<double> initial; // K_m(0), indexed from m_min; missing = 0

    int shells() const { return m_max - m_min + 1; }
};

using ShellState = std::vector<double>;

inline ShellState shell_initial(const ShellConfig& cfg) {
    ShellState k(static_cast<std::size_t>(cfg.shells()), 0.0);
    for (std::size_t i = 0; i < cfg.initial.size() && i < k.size(); ++i) k[i] = cfg.initial[i];
    return k;
}

inline ShellState kp_rhs(const ShellState& state, const ShellConfig& cfg) {
    if (state.size() != std::size_t(cfg.shells()))
        throw config_error("kp_rhs: state size does not match shell range");
    ShellState out(state.size(), 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double m = double(cfg.m_min) + double(i);
        const double km = state[i];
        const double km1 = (i == 0) ? 0.0 : state[i - 1];
        out[i] = cfg.s_visc * std::pow(cfg.mu, 2.0 * m * cfg.alpha) * km +
                 std::pow(cfg.mu, m - 1.0) * km1 * km1 - std::pow(cfg.mu, m) * km * km1;
    }
    return out;
}

inline double shell_l2(const ShellState& s) {
    double acc = 0;
    for (double v : s) acc += v * v;
    return std::sqrt(acc);
}

/// Embeds shell amplitudes on the lattice diagonal: shell m maps to the mode
/// m*(1,...,1) (component 1), with the conjugate mode mirrored so the field
/// is reality-symmetric. Shells beyond the truncation are dropped.
inline ModeField shell_to_field(const ShellState& state, const ShellConfig& cfg, int n, int M) {
    ModeField v(Lattice(n, M));
    for (std::size_t i = 0; i < state.size(); ++i) {
        const int m = cfg.m_min + int(i);
        if (m < 0 || m > M) continue;
        ModeIndex alpha(std::size_t(n), m), neg(std::size_t(n), -m);
        v.at(0, alpha) = cplx(state[i], 0.0);
        v.at(0, neg) = cplx(state[i], 0.0);
    }
    v.set_real_valued(true);
    return v;
}

}  // namespace speclab
