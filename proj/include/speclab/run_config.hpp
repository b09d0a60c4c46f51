#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "speclab/dilatation.hpp"
#include "speclab/dynamics.hpp"
#include "speclab/steppers.hpp"
#include "speclab/testbeds.hpp"

namespace speclab {

enum class Model {
    ns,
    euler,
    burgers,
    damped_comparison,
    ode,
    kp,
    forced_counterexample,
    kernel_checks
};

inline std::string to_string(Model m) {
    switch (m) {
        case Model::ns: return "ns";
        case Model::euler: return "euler";
        case Model::burgers: return "burgers";
        case Model::damped_comparison: return "damped_comparison";
        case Model::ode: return "ode";
        case Model::kp: return "kp";
        case Model::forced_counterexample: return "forced_counterexample";
        case Model::kernel_checks: return "kernel_checks";
    }
    return "?";
}

inline Model model_from_string(const std::string& s) {
    if (s == "ns") return Model::ns;
    if (s == "euler") return Model::euler;
    if (s == "burgers") return Model::burgers;
    if (s == "damped_comparison") return Model::damped_comparison;
    if (s == "ode") return Model::ode;
    if (s == "kp") return Model::kp;
    if (s == "forced_counterexample") return Model::forced_counterexample;
    if (s == "kernel_checks") return Model::kernel_checks;
    throw validation_error("model", "unknown model '" + s + "'");
}

struct LatticeConfig {
    int n = 3;
    int M = 4;
    double l = 1.0;
};

struct InitialSpec {
    enum class Kind { zero, envelope, file };
    Kind kind = Kind::zero;
    double C = 1.0; // envelope magnitude
    double s = 5.0; // envelope exponent
    std::string path;
};

struct DiagnosticsSpec {
    std::vector<double> norms{0.0};   // h^s orders to record
    std::optional<double> envelope_s; // run the preservation monitor at this exponent
    double blowup_ratio = 10.0;
    int cadence = 1;                  // record every k-th step
};

struct KernelCheckConfig {
    double rho = 0.01;
    double nu = 1.0;
    double s_lo = 0.1;
    double s_hi = 0.5;
    long levy_samples = 10000;
    int radial_points = 32;
    int angular_points = 32;
    double half_ball_radius = 0.25;
};

struct RunConfig {
    std::string experiment = "run";
    Model model = Model::ns;
    LatticeConfig lattice;
    double viscosity = 0.0;
    ForcingSpec forcing;
    std::optional<DilatationChart> chart;
    StepPlan plan;
    InitialSpec initial;
    DiagnosticsSpec diagnostics;
    ScalarOdeConfig ode;
    ShellConfig shells;
    KernelCheckConfig kernel;
    Nonlinearity damped_nonlinearity = Nonlinearity::burgers;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    bool expect_blowup = false;
};

// ---------------------------------------------------------------------------
// JSON mapping

inline nlohmann::json to_json(const CoefficientFn& c) {
    switch (c.kind) {
        case CoefficientFn::Kind::constant:
            return {{"kind", "constant"}, {"value", c.value}};
        case CoefficientFn::Kind::sinusoid:
            return {{"kind", "sinusoid"},
                    {"amplitude", c.amplitude},
                    {"frequency", c.frequency},
                    {"phase", c.phase}};
        case CoefficientFn::Kind::table:
            return {{"kind", "table"}, {"times", c.times}, {"values", c.values}};
    }
    return {};
}

inline CoefficientFn coefficient_from_json(const nlohmann::json& j) {
    CoefficientFn c;
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") {
        c.kind = CoefficientFn::Kind::constant;
        c.value = j.value("value", 1.0);
    } else if (kind == "sinusoid") {
        c.kind = CoefficientFn::Kind::sinusoid;
        c.amplitude = j.value("amplitude", 1.0);
        c.frequency = j.value("frequency", 1.0);
        c.phase = j.value("phase", 0.0);
    } else if (kind == "table") {
        c.kind = CoefficientFn::Kind::table;
        c.times = j.at("times").get<std::vector<double>>();
        c.values = j.at("values").get<std::vector<double>>();
    } else {
        throw validation_error("forcing.coefficients.kind", "unknown kind '" + kind + "'");
    }
    return c;
}

inline nlohmann::json to_json(const ForcingSpec& f) {
    nlohmann::json j;
    switch (f.kind) {
        case ForcingKind::none: j["kind"] = "none"; break;
        case ForcingKind::static_orthant: j["kind"] = "static_orthant"; break;
        case ForcingKind::dynamic_counterexample: j["kind"] = "dynamic_counterexample"; break;
    }
    if (f.kind != ForcingKind::none) {
        j["epsilon"] = f.epsilon;
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : f.coefficients) cs.push_back(to_json(c));
        j["coefficients"] = std::move(cs);
    }
    return j;
}

inline ForcingSpec forcing_from_json(const nlohmann::json& j) {
    ForcingSpec f;
    const std::string kind = j.value("kind", "none");
    if (kind == "none") f.kind = ForcingKind::none;
    else if (kind == "static_orthant") f.kind = ForcingKind::static_orthant;
    else if (kind == "dynamic_counterexample") f.kind = ForcingKind::dynamic_counterexample;
    else throw validation_error("forcing.kind", "unknown kind '" + kind + "'");
    if (f.kind != ForcingKind::none) {
        f.epsilon = j.value("epsilon", 0.1);
        if (j.contains("coefficients"))
            for (const auto& c : j["coefficients"]) f.coefficients.push_back(coefficient_from_json(c));
    }
    return f;
}

inline nlohmann::json to_json(const DilatationChart& c) {
    return {{"t0", c.t0()}, {"rho", c.rho()}, {"lambda", c.lambda()},
            {"mode", to_string(c.mode())}};
}

inline DilatationChart chart_from_json(const nlohmann::json& j) {
    const std::string mode = j.value("mode", "localized_factor");
    ChartMode m;
    if (mode == "global_factor") m = ChartMode::global_factor;
    else if (mode == "localized_factor") m = ChartMode::localized_factor;
    else throw validation_error("chart.mode", "unknown mode '" + mode + "'");
    try {
        return DilatationChart(j.value("t0", 0.0), j.value("rho", 1.0), j.value("lambda", 1.0), m);
    } catch (const config_error& e) {
        throw validation_error("chart", e.what());
    }
}

inline nlohmann::json to_json(const StepPlan& p) {
    return {{"dt", p.dt}, {"steps", p.steps}, {"scheme", to_string(p.scheme)}};
}

inline StepPlan plan_from_json(const nlohmann::json& j) {
    StepPlan p;
    p.dt = j.value("dt", 1e-2);
    p.steps = j.value("steps", std::int64_t(1));
    const std::string s = j.value("scheme", "euler");
    if (s == "euler") p.scheme = Scheme::euler;
    else if (s == "trotter_first_order") p.scheme = Scheme::trotter_first_order;
    else if (s == "trotter_exact_exp") p.scheme = Scheme::trotter_exact_exp;
    else if (s == "rk4") p.scheme = Scheme::rk4;
    else throw validation_error("plan.scheme", "unknown scheme '" + s + "'");
    return p;
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["experiment"] = c.experiment;
    j["model"] = to_string(c.model);
    j["lattice"] = {{"n", c.lattice.n}, {"M", c.lattice.M}, {"l", c.lattice.l}};
    j["fluid"] = {{"viscosity", c.viscosity}};
    j["forcing"] = to_json(c.forcing);
    if (c.chart) j["chart"] = to_json(*c.chart);
    j["plan"] = to_json(c.plan);
    {
        nlohmann::json ji;
        switch (c.initial.kind) {
            case InitialSpec::Kind::zero: ji["kind"] = "zero"; break;
            case InitialSpec::Kind::envelope:
                ji["kind"] = "envelope";
                ji["C"] = c.initial.C;
                ji["s"] = c.initial.s;
                break;
            case InitialSpec::Kind::file:
                ji["kind"] = "file";
                ji["path"] = c.initial.path;
                break;
        }
        j["initial"] = std::move(ji);
    }
    {
        nlohmann::json jd;
        jd["norms"] = c.diagnostics.norms;
        if (c.diagnostics.envelope_s) jd["envelope_s"] = *c.diagnostics.envelope_s;
        jd["blowup_ratio"] = c.diagnostics.blowup_ratio;
        jd["cadence"] = c.diagnostics.cadence;
        j["diagnostics"] = std::move(jd);
    }
    if (c.model == Model::ode)
        j["ode"] = {{"x0", c.ode.x0}, {"lambda", c.ode.lambda}, {"t0", c.ode.t0}};
    if (c.model == Model::kp)
        j["kp"] = {{"mu", c.shells.mu},       {"alpha", c.shells.alpha},
                   {"s_visc", c.shells.s_visc}, {"m_min", c.shells.m_min},
                   {"m_max", c.shells.m_max},  {"initial", c.shells.initial}};
    if (c.model == Model::kernel_checks)
        j["kernel"] = {{"rho", c.kernel.rho},
                       {"nu", c.kernel.nu},
                       {"s_lo", c.kernel.s_lo},
                       {"s_hi", c.kernel.s_hi},
                       {"levy_samples", c.kernel.levy_samples},
                       {"radial_points", c.kernel.radial_points},
                       {"angular_points", c.kernel.angular_points},
                       {"half_ball_radius", c.kernel.half_ball_radius}};
    if (c.model == Model::damped_comparison) {
        j["damped_nonlinearity"] = c.damped_nonlinearity == Nonlinearity::navier_stokes
                                       ? "navier_stokes"
                                       : (c.damped_nonlinearity == Nonlinearity::burgers ? "burgers"
                                                                                         : "none");
    }
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["expect_blowup"] = c.expect_blowup;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.experiment = j.value("experiment", "run");
    c.model = model_from_string(j.value("model", "ns"));
    if (j.contains("lattice")) {
        c.lattice.n = j["lattice"].value("n", 3);
        c.lattice.M = j["lattice"].value("M", 4);
        c.lattice.l = j["lattice"].value("l", 1.0);
    }
    if (j.contains("fluid")) c.viscosity = j["fluid"].value("viscosity", 0.0);
    if (j.contains("forcing")) c.forcing = forcing_from_json(j["forcing"]);
    if (j.contains("chart") && !j["chart"].is_null()) c.chart = chart_from_json(j["chart"]);
    if (j.contains("plan")) c.plan = plan_from_json(j["plan"]);
    if (j.contains("initial")) {
        const auto& ji = j["initial"];
        const std::string kind = ji.value("kind", "zero");
        if (kind == "zero") c.initial.kind = InitialSpec::Kind::zero;
        else if (kind == "envelope") {
            c.initial.kind = InitialSpec::Kind::envelope;
            c.initial.C = ji.value("C", 1.0);
            c.initial.s = ji.value("s", 5.0);
        } else if (kind == "file") {
            c.initial.kind = InitialSpec::Kind::file;
            c.initial.path = ji.value("path", "");
        } else {
            throw validation_error("initial.kind", "unknown kind '" + kind + "'");
        }
    }
    if (j.contains("diagnostics")) {
        const auto& jd = j["diagnostics"];
        if (jd.contains("norms")) c.diagnostics.norms = jd["norms"].get<std::vector<double>>();
        if (jd.contains("envelope_s")) c.diagnostics.envelope_s = jd["envelope_s"].get<double>();
        c.diagnostics.blowup_ratio = jd.value("blowup_ratio", 10.0);
        c.diagnostics.cadence = jd.value("cadence", 1);
    }
    if (j.contains("ode")) {
        c.ode.x0 = j["ode"].value("x0", 1.0);
        c.ode.lambda = j["ode"].value("lambda", 1.0);
        c.ode.t0 = j["ode"].value("t0", 0.0);
    }
    if (j.contains("kp")) {
        const auto& jk = j["kp"];
        c.shells.mu = jk.value("mu", 2.0);
        c.shells.alpha = jk.value("alpha", 0.1);
        c.shells.s_visc = jk.value("s_visc", -1.0);
        c.shells.m_min = jk.value("m_min", 0);
        c.shells.m_max = jk.value("m_max", 15);
        if (jk.contains("initial")) c.shells.initial = jk["initial"].get<std::vector<double>>();
    }
    if (j.contains("kernel")) {
        const auto& jk = j["kernel"];
        c.kernel.rho = jk.value("rho", 0.01);
        c.kernel.nu = jk.value("nu", 1.0);
        c.kernel.s_lo = jk.value("s_lo", 0.1);
        c.kernel.s_hi = jk.value("s_hi", 0.5);
        c.kernel.levy_samples = jk.value("levy_samples", 10000L);
        c.kernel.radial_points = jk.value("radial_points", 32);
        c.kernel.angular_points = jk.value("angular_points", 32);
        c.kernel.half_ball_radius = jk.value("half_ball_radius", 0.25);
    }
    if (j.contains("damped_nonlinearity")) {
        const std::string nl = j["damped_nonlinearity"].get<std::string>();
        if (nl == "navier_stokes") c.damped_nonlinearity = Nonlinearity::navier_stokes;
        else if (nl == "burgers") c.damped_nonlinearity = Nonlinearity::burgers;
        else if (nl == "none") c.damped_nonlinearity = Nonlinearity::none;
        else throw validation_error("damped_nonlinearity", "unknown value '" + nl + "'");
    }
    c.output_dir = j.value("output_dir", "out");
    c.seed = j.value("seed", std::uint64_t(1));
    c.expect_blowup = j.value("expect_blowup", false);
    return c;
}

/// Model-specific structural validation; throws validation_error naming the
/// offending field.
inline void validate(const RunConfig& c) {
    if (c.experiment.empty()) throw validation_error("experiment", "must be non-empty");
    if (c.lattice.n < 1 || c.lattice.n > max_dimension)
        throw validation_error("lattice.n", "dimension out of supported range");
    if (c.lattice.M < 0) throw validation_error("lattice.M", "must be >= 0");
    if (!(c.lattice.l > 0)) throw validation_error("lattice.l", "must be > 0");
    if (!(c.plan.dt > 0)) throw validation_error("plan.dt", "must be > 0");
    if (c.plan.steps < 1) throw validation_error("plan.steps", "must be >= 1");
    if (!(c.viscosity >= 0)) throw validation_error("fluid.viscosity", "must be >= 0");
    if (!(c.diagnostics.blowup_ratio > 1))
        throw validation_error("diagnostics.blowup_ratio", "must be > 1");
    if (c.diagnostics.cadence < 1) throw validation_error("diagnostics.cadence", "must be >= 1");
    for (double s : c.diagnostics.norms)
        if (!(s >= 0)) throw validation_error("diagnostics.norms", "orders must be >= 0");
    if (c.initial.kind == InitialSpec::Kind::envelope &&
        (!(c.initial.C > 0) || !(c.initial.s > 0)))
        throw validation_error("initial", "envelope generator needs C > 0 and s > 0");
    if (c.initial.kind == InitialSpec::Kind::file && c.initial.path.empty())
        throw validation_error("initial.path", "file initial data needs a path");

    switch (c.model) {
        case Model::euler:
            if (c.viscosity != 0.0)
                throw validation_error("fluid.viscosity", "the euler model is inviscid");
            break;
        case Model::ns:
        case Model::burgers:
            break;
        case Model::damped_comparison:
            if (!c.chart) throw validation_error("chart", "damped runs require a chart");
            if (c.plan.scheme == Scheme::trotter_exact_exp)
                throw validation_error("plan.scheme", "exact_exp is not wired to damped runs");
            break;
        case Model::ode:
            if (c.ode.x0 == 0.0) throw validation_error("ode.x0", "must be nonzero");
            if (!(c.ode.lambda > 0)) throw validation_error("ode.lambda", "must be > 0");
            break;
        case Model::kp:
            if (c.shells.m_max < c.shells.m_min)
                throw validation_error("kp.m_max", "must be >= m_min");
            if (!(c.shells.mu > 0)) throw validation_error("kp.mu", "must be > 0");
            break;
        case Model::forced_counterexample:
            if (c.forcing.kind != ForcingKind::dynamic_counterexample)
                throw validation_error("forcing.kind",
                                       "forced_counterexample requires dynamic_counterexample");
            if (c.forcing.coefficients.empty())
                throw validation_error("forcing.coefficients", "must supply c_i(t)");
            if (c.plan.scheme != Scheme::euler)
                throw validation_error("plan.scheme",
                                       "the dynamic forcing construction is Euler-exact");
            break;
        case Model::kernel_checks:
            if (!(c.kernel.rho > 0)) throw validation_error("kernel.rho", "must be > 0");
            if (!(c.kernel.nu > 0)) throw validation_error("kernel.nu", "must be > 0");
            if (!(c.kernel.s_hi > c.kernel.s_lo))
                throw validation_error("kernel.s_hi", "must exceed s_lo");
            break;
    }
    if (c.forcing.kind != ForcingKind::none && c.forcing.coefficients.empty())
        throw validation_error("forcing.coefficients", "must supply c_i(t)");
}

}  // namespace speclab
