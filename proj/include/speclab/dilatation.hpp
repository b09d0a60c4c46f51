#pragma once

#include <cmath>
#include <string>

#include "speclab/errors.hpp"
#include "speclab/mode_field.hpp"

namespace speclab {

/// Amplitude factor family of the comparison-function transform:
/// global_factor uses lambda*(1+tau), localized_factor uses
/// lambda*(1+(tau-t0)).
enum class ChartMode { global_factor, localized_factor };

inline std::string to_string(ChartMode m) {
    return m == ChartMode::global_factor ? "global_factor" : "localized_factor";
}

/// Damping coefficients of the transformed equation at a given sigma:
/// mu multiplies the potential (damping) term, mu_tau1 the viscosity,
/// mu_tau2 the nonlinearity. mu_tauk = D^k * mu with D the chart's
/// amplitude denominator.
struct MuCoefficients {
    double mu;
    double mu_tau1;
    double mu_tau2;
};

/// Time-dilatation chart anchored at t0: the substitution
///   sigma = (tau - t0) / sqrt(1 - (tau - t0)^2),  tau - t0 in [0, 1),
/// together with the time-scale factor rho (t = rho * tau) and the amplitude
/// scale lambda. One chart per experiment; every run states its chart.
class DilatationChart {
public:
    DilatationChart(double t0, double rho, double lambda, ChartMode mode)
        : t0_(t0), rho_(rho), lambda_(lambda), mode_(mode) {
        if (!(t0 >= 0) || !std::isfinite(t0)) throw config_error("chart t0 must be >= 0");
        if (!(rho > 0) || rho > 1.0) throw config_error("chart rho must be in (0, 1]");
        if (!(lambda > 0) || !std::isfinite(lambda))
            throw config_error("chart lambda must be > 0");
    }

    double t0() const noexcept { return t0_; }
    double rho() const noexcept { return rho_; }
    double lambda() const noexcept { return lambda_; }
    ChartMode mode() const noexcept { return mode_; }

    bool operator==(const DilatationChart& o) const noexcept {
        return t0_ == o.t0_ && rho_ == o.rho_ && lambda_ == o.lambda_ && mode_ == o.mode_;
    }

    /// Amplitude denominator D(tau): 1+tau (global) or 1+(tau-t0) (localized).
    double denominator(double tau) const noexcept {
        return mode_ == ChartMode::global_factor ? 1.0 + tau : 1.0 + (tau - t0_);
    }

private:
    double t0_;
    double rho_;
    double lambda_;
    ChartMode mode_;
};

/// sigma(tau) = (tau - t0)/sqrt(1 - (tau - t0)^2). Strictly increasing,
/// sigma(t0) = 0, finite only for tau - t0 < 1 (hard error past the end of
/// the chart; clamping would mask scheme bugs near the singular end).
inline double sigma_of_tau(const DilatationChart& chart, double tau) {
    const double d = tau - chart.t0();
    if (!(d >= 0.0) || d >= 1.0 || !std::isfinite(tau))
        throw domain_error("sigma_of_tau: tau - t0 must lie in [0, 1)");
    return d / std::sqrt(1.0 - d * d);
}

/// Inverse chart map: tau(sigma) = t0 + sigma/sqrt(1 + sigma^2).
inline double tau_of_sigma(const DilatationChart& chart, double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw domain_error("tau_of_sigma: sigma must be finite and >= 0");
    return chart.t0() + sigma / std::sqrt(1.0 + sigma * sigma);
}

/// d sigma / d tau = (1 - (tau - t0)^2)^{-3/2}; >= 1 with equality at tau = t0.
inline double dsigma_dtau(const DilatationChart& chart, double tau) {
    const double d = tau - chart.t0();
    if (!(d >= 0.0) || d >= 1.0 || !std::isfinite(tau))
        throw domain_error("dsigma_dtau: tau - t0 must lie in [0, 1)");
    const double w = 1.0 - d * d;
    return 1.0 / (w * std::sqrt(w));
}

/// Coefficients at sigma: mu = sqrt(1-(tau-t0)^2)^3 / D, mu_tauk = D^k mu,
/// with D the chart's amplitude denominator at tau(sigma). The shifted
/// (tau - t0) reading is used under the square root for both chart modes.
inline MuCoefficients mu_at(const DilatationChart& chart, double sigma) {
    const double tau = tau_of_sigma(chart, sigma);
    const double d = tau - chart.t0();
    const double w = 1.0 - d * d;
    const double w3 = w * std::sqrt(w);
    const double D = chart.denominator(tau);
    const double mu = w3 / D;
    return MuCoefficients{mu, D * mu, D * D * mu};
}

/// Comparison-function map u = v / (lambda * D(tau)): a pure amplitude
/// rescale, lattice unchanged.
inline ModeField to_comparison(const ModeField& v, const DilatationChart& chart, double tau) {
    const double d = tau - chart.t0();
    if (!(d >= 0.0) || d >= 1.0 || !std::isfinite(tau))
        throw domain_error("to_comparison: tau - t0 must lie in [0, 1)");
    ModeField u = v;
    u *= cplx(1.0 / (chart.lambda() * chart.denominator(tau)), 0.0);
    return u;
}

/// Exact inverse of to_comparison at tau = tau_of_sigma(sigma):
/// v = lambda * D(tau(sigma)) * u.
inline ModeField from_comparison(const ModeField& u, const DilatationChart& chart, double sigma) {
    const double tau = tau_of_sigma(chart, sigma);
    ModeField v = u;
    v *= cplx(chart.lambda() * chart.denominator(tau), 0.0);
    return v;
}

}  // namespace speclab
