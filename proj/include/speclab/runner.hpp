#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "speclab/diagnostics.hpp"
#include "speclab/heat_kernel.hpp"
#include "speclab/run_config.hpp"
#include "speclab/serialization.hpp"

namespace speclab {

inline constexpr std::string_view code_version = "speclab 0.1.0";

namespace detail {

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

/// Short tag for a norm order: 5.0 -> "h5", 2.5 -> "h2.5".
inline std::string norm_tag(double s) {
    std::ostringstream os;
    os << "h" << s;
    return os.str();
}

}  // namespace detail

struct FileRecord {
    std::string path; // relative to the output directory
    std::uint64_t bytes = 0;
    std::string digest;
};

struct RunManifest {
    nlohmann::json config_echo;
    std::string version;
    double wall_seconds = 0;
    nlohmann::json constants = nlohmann::json::object(); // estimated constants used
    std::vector<std::string> events;                     // blow-up, violations
    nlohmann::json results = nlohmann::json::object();   // model-specific summary
    std::vector<FileRecord> outputs;
    int exit_code = 0;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["config"] = m.config_echo;
    j["version"] = m.version;
    j["wall_seconds"] = m.wall_seconds;
    j["constants"] = m.constants;
    j["events"] = m.events;
    j["results"] = m.results;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& f : m.outputs)
        outs.push_back({{"path", f.path}, {"bytes", f.bytes}, {"digest", f.digest}});
    j["outputs"] = std::move(outs);
    j["exit_code"] = m.exit_code;
    return j;
}

/// Persists a run's files, recording content digests for the manifest.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path& dir() const { return dir_; }

    FileRecord write(const std::string& name, std::string_view content) {
        const std::filesystem::path p = dir_ / name;
        std::ofstream os(p, std::ios::binary);
        if (!os) throw error("cannot open output file " + p.string());
        os.write(content.data(), std::streamsize(content.size()));
        os.close();
        FileRecord rec{name, content.size(), detail::hex64(detail::fnv1a64(content))};
        records_.push_back(rec);
        return rec;
    }

    const std::vector<FileRecord>& records() const { return records_; }

private:
    std::filesystem::path dir_;
    std::vector<FileRecord> records_;
};

/// Re-hashes every file listed in a run manifest; returns false on any
/// missing file or digest mismatch.
inline bool verify_manifest(const std::filesystem::path& dir) {
    std::ifstream is(dir / "manifest.json");
    if (!is) return false;
    nlohmann::json j;
    is >> j;
    for (const auto& f : j.at("outputs")) {
        const std::filesystem::path p = dir / f.at("path").get<std::string>();
        std::ifstream fi(p, std::ios::binary);
        if (!fi) return false;
        std::ostringstream buf;
        buf << fi.rdbuf();
        if (detail::hex64(detail::fnv1a64(buf.str())) != f.at("digest").get<std::string>())
            return false;
    }
    return true;
}

inline std::string series_to_csv(const NormSeries& series) {
    std::ostringstream os;
    os << "time";
    for (const auto& [s, v] : series.values) os << "," << detail::norm_tag(s);
    if (!series.sup_mode.empty()) os << ",sup_mode";
    os << "\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        os << detail::format_double(series.times[i]);
        for (const auto& [s, v] : series.values) os << "," << detail::format_double(v[i]);
        if (!series.sup_mode.empty()) os << "," << detail::format_double(series.sup_mode[i]);
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// initial data

/// Builtin envelope generator: |v_{i,alpha}| = C/(1+|alpha|^s) with phases
/// drawn from the seeded generator, then reality-symmetrized, then (for the
/// solenoidal models) Leray-projected.
inline ModeField generate_envelope_field(const Lattice& lat, double torus_length, double C,
                                         double s, std::uint64_t seed, bool project) {
    ModeField v(lat, torus_length);
    Rng rng(seed);
    const auto table = lat.coords_table();
    for (int i = 0; i < lat.dim(); ++i) {
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const double r = Lattice::norm(table[std::size_t(k)], lat.dim());
            const double mag = C / (1.0 + std::pow(r, s));
            v.component(i)[k] = std::polar(mag, 2.0 * std::numbers::pi * rng.uniform());
        }
    }
    // reality symmetrization: v <- (v + conj-flip(v))/2
    for (int i = 0; i < lat.dim(); ++i) {
        auto& c = v.component(i);
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            Coord neg = table[std::size_t(k)];
            for (int j = 0; j < lat.dim(); ++j) neg[j] = -neg[j];
            const std::int64_t kn = lat.flat_unchecked(neg);
            if (kn < k) continue;
            const cplx a = c[k], b = c[kn];
            const cplx sym = 0.5 * (a + std::conj(b));
            c[k] = sym;
            c[kn] = std::conj(sym);
        }
    }
    v.set_real_valued(true);
    if (project && lat.dim() >= 2) v = leray_project(v);
    return v;
}

inline ModeField build_initial_field(const RunConfig& cfg) {
    const Lattice lat(cfg.lattice.n, cfg.lattice.M);
    const bool solenoidal_model = cfg.model == Model::ns || cfg.model == Model::euler ||
                                  (cfg.model == Model::damped_comparison &&
                                   cfg.damped_nonlinearity == Nonlinearity::navier_stokes);
    switch (cfg.initial.kind) {
        case InitialSpec::Kind::zero: {
            ModeField v(lat, cfg.lattice.l);
            v.set_real_valued(true);
            return v;
        }
        case InitialSpec::Kind::envelope:
            return generate_envelope_field(lat, cfg.lattice.l, cfg.initial.C, cfg.initial.s,
                                           cfg.seed, solenoidal_model);
        case InitialSpec::Kind::file: {
            std::ifstream is(cfg.initial.path);
            if (!is) throw validation_error("initial.path", "cannot open " + cfg.initial.path);
            nlohmann::json j;
            is >> j;
            ModeField v = field_from_json(j);
            if (!(v.lattice() == lat) || v.torus_length() != cfg.lattice.l)
                throw validation_error("initial.path", "field lattice does not match config");
            return v;
        }
    }
    throw validation_error("initial.kind", "unhandled kind");
}

// ---------------------------------------------------------------------------
// experiment drivers

namespace detail {

/// Requested norm orders with the l2 column always present.
inline std::vector<double> norm_orders(const DiagnosticsSpec& d) {
    std::vector<double> out = d.norms;
    if (std::find(out.begin(), out.end(), 0.0) == out.end()) out.push_back(0.0);
    return out;
}

struct FieldRunResult {
    NormSeries series;
    std::vector<ModeField> snapshots;
    std::vector<double> snapshot_times;
    std::optional<std::int64_t> nonfinite_step;
};

template <class RhsFn>
FieldRunResult run_field_loop(const RunConfig& cfg, ModeField state, RhsFn&& rhs_at,
                              double t_begin) {
    FieldRunResult out;
    const std::vector<double> norms = norm_orders(cfg.diagnostics);
    const auto record = [&](double t, const ModeField& v) {
        out.series.times.push_back(t);
        for (double s : norms) out.series.values[s].push_back(hs_norm(v, s));
        out.series.sup_mode.push_back(v.max_abs());
        out.snapshots.push_back(v);
        out.snapshot_times.push_back(t);
    };
    record(t_begin, state);
    double t = t_begin;
    try {
        for (std::int64_t m = 0; m < cfg.plan.steps; ++m) {
            const double t_step = t; // coefficients frozen at the step start
            auto rhs = [&](const ModeField& v) { return rhs_at(v, t_step); };
            switch (cfg.plan.scheme) {
                case Scheme::euler: state = euler_step(state, rhs, cfg.plan.dt, m); break;
                case Scheme::rk4: state = rk4_step(state, rhs, cfg.plan.dt, m); break;
                case Scheme::trotter_first_order:
                case Scheme::trotter_exact_exp:
                    throw config_error("trotter schemes use the dedicated driver");
            }
            t += cfg.plan.dt;
            if ((m + 1) % cfg.diagnostics.cadence == 0 || m + 1 == cfg.plan.steps)
                record(t, state);
        }
    } catch (const numeric_blowup& e) {
        out.nonfinite_step = e.step_index();
        out.series.nonfinite_event = {t + cfg.plan.dt, e.step_index()};
    }
    return out;
}

}  // namespace detail

/// Executes the configured experiment, writes its outputs and returns the
/// manifest. Deterministic given (config, seed).
inline RunManifest run(const RunConfig& cfg) {
    validate(cfg);
    const auto t_start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.config_echo = to_json(cfg);
    manifest.version = std::string(code_version);

    const char* root_env = std::getenv("SPECLAB_OUTPUT_ROOT");
    std::filesystem::path outdir = cfg.output_dir;
    if (root_env != nullptr && outdir.is_relative())
        outdir = std::filesystem::path(root_env) / outdir;
    OutputWriter writer(outdir);

    bool blew_up = false;

    switch (cfg.model) {
        case Model::ode: {
            auto rhs = [&](double x, double) { return cfg.ode.lambda * x * x; };
            ScalarIntegration traj =
                integrate_scalar(cfg.ode.x0, rhs, 0.0, cfg.plan.dt, cfg.plan.steps);
            std::ostringstream csv;
            csv << "time,x\n";
            for (std::size_t i = 0; i < traj.times.size(); ++i)
                csv << detail::format_double(traj.times[i]) << ","
                    << detail::format_double(traj.values[i]) << "\n";
            writer.write("series.csv", csv.str());
            const double ratio = cfg.diagnostics.blowup_ratio;
            std::optional<double> crossing;
            for (std::size_t i = 0; i < traj.values.size(); ++i) {
                if (std::abs(traj.values[i]) > ratio * std::abs(cfg.ode.x0)) {
                    crossing = traj.times[i];
                    break;
                }
            }
            if (!traj.finite || crossing) {
                blew_up = true;
                manifest.events.push_back(
                    "blow-up: " +
                    (crossing ? "threshold crossed at t=" + detail::format_double(*crossing)
                              : std::string("non-finite value reached")));
            }
            manifest.results["analytic_blowup_time"] =
                cfg.ode.x0 > 0 ? cfg.ode.blowup_time() : std::numeric_limits<double>::infinity();
            break;
        }

        case Model::kp: {
            ShellState state = shell_initial(cfg.shells);
            NormSeries series;
            auto record = [&](double t, const ShellState& s) {
                series.times.push_back(t);
                series.values[0.0].push_back(shell_l2(s));
                double sup = 0;
                for (double v : s) sup = std::max(sup, std::abs(v));
                series.sup_mode.push_back(sup);
            };
            record(0.0, state);
            double t = 0.0;
            for (std::int64_t m = 0; m < cfg.plan.steps; ++m) {
                const double dt = cfg.plan.dt;
                auto f = [&](const ShellState& s) { return kp_rhs(s, cfg.shells); };
                ShellState k1 = f(state), s2 = state;
                for (std::size_t i = 0; i < s2.size(); ++i) s2[i] += 0.5 * dt * k1[i];
                ShellState k2 = f(s2), s3 = state;
                for (std::size_t i = 0; i < s3.size(); ++i) s3[i] += 0.5 * dt * k2[i];
                ShellState k3 = f(s3), s4 = state;
                for (std::size_t i = 0; i < s4.size(); ++i) s4[i] += dt * k3[i];
                ShellState k4 = f(s4);
                bool finite = true;
                for (std::size_t i = 0; i < state.size(); ++i) {
                    state[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
                    finite = finite && std::isfinite(state[i]);
                }
                t += dt;
                if (!finite) {
                    series.nonfinite_event = {t, m};
                    break;
                }
                if ((m + 1) % cfg.diagnostics.cadence == 0 || m + 1 == cfg.plan.steps)
                    record(t, state);
            }
            writer.write("series.csv", series_to_csv(series));
            if (auto ev = blowup_detect(series, cfg.diagnostics.blowup_ratio)) {
                blew_up = true;
                manifest.events.push_back("blow-up: " + ev->reason + " at t=" +
                                          detail::format_double(ev->time));
                manifest.results["blowup_time"] = ev->time;
            }
            break;
        }

        case Model::ns:
        case Model::euler:
        case Model::burgers: {
            const FluidParams p{cfg.viscosity, cfg.lattice.l};
            ModeField v0 = build_initial_field(cfg);
            detail::FieldRunResult r;
            if (cfg.plan.scheme == Scheme::trotter_first_order ||
                cfg.plan.scheme == Scheme::trotter_exact_exp) {
                if (cfg.model == Model::burgers)
                    throw validation_error("plan.scheme", "trotter steps are wired to ns/euler");
                TrotterOptions opt;
                opt.variant = cfg.plan.scheme == Scheme::trotter_first_order
                                  ? TrotterVariant::first_order
                                  : TrotterVariant::exact_exp;
                ModeField state = v0;
                const std::vector<double> norms = detail::norm_orders(cfg.diagnostics);
                auto record = [&](double t, const ModeField& f) {
                    r.series.times.push_back(t);
                    for (double s : norms) r.series.values[s].push_back(hs_norm(f, s));
                    r.series.sup_mode.push_back(f.max_abs());
                    r.snapshots.push_back(f);
                    r.snapshot_times.push_back(t);
                };
                record(0.0, state);
                double t = 0.0;
                try {
                    for (std::int64_t m = 0; m < cfg.plan.steps; ++m) {
                        state = trotter_step(state, p, std::nullopt, cfg.plan.dt, opt, m);
                        t += cfg.plan.dt;
                        if ((m + 1) % cfg.diagnostics.cadence == 0 || m + 1 == cfg.plan.steps)
                            record(t, state);
                    }
                } catch (const numeric_blowup& e) {
                    r.nonfinite_step = e.step_index();
                    r.series.nonfinite_event = {t + cfg.plan.dt, e.step_index()};
                }
            } else {
                auto rhs_at = [&](const ModeField& v, double t) {
                    return cfg.model == Model::burgers ? burgers_rhs(v, p)
                                                       : ns_rhs(v, p, cfg.forcing, t);
                };
                r = detail::run_field_loop(cfg, v0, rhs_at, 0.0);
            }
            writer.write("series.csv", series_to_csv(r.series));
            writer.write("field_final.json", field_to_json(r.snapshots.back()).dump(1));
            if (cfg.diagnostics.envelope_s) {
                const EnvelopeFitResult fit0 = envelope_fit(r.snapshots.front());
                DecayEnvelope env{0.0, *cfg.diagnostics.envelope_s};
                // minimal C at the requested exponent so the initial data satisfy it
                env.C = 0.0;
                const auto table = v0.lattice().coords_table();
                for (int i = 0; i < v0.dim(); ++i)
                    for (std::int64_t k = 0; k < v0.lattice().size(); ++k)
                        env.C = std::max(env.C,
                                         std::abs(r.snapshots.front().component(i)[k]) *
                                             (1.0 + std::pow(Lattice::norm(table[std::size_t(k)],
                                                                           v0.dim()),
                                                             env.s)));
                env.C *= 1.0 + 1e-12; // so the defining snapshot itself passes
                const PreservationReport rep =
                    envelope_preserved(r.snapshots, r.snapshot_times, env);
                nlohmann::json jr{{"envelope_C", env.C},
                                  {"envelope_s", env.s},
                                  {"initial_fit_C", fit0.C},
                                  {"initial_fit_s", fit0.s},
                                  {"preserved", rep.preserved},
                                  {"worst_margin", rep.worst_margin}};
                if (rep.first_violation_time) jr["first_violation_time"] = *rep.first_violation_time;
                writer.write("envelope.json", jr.dump(1));
                manifest.results["envelope"] = jr;
                if (!rep.preserved)
                    manifest.events.push_back("envelope violated at t=" +
                                              detail::format_double(*rep.first_violation_time));
            }
            if (auto ev = blowup_detect(r.series, cfg.diagnostics.blowup_ratio)) {
                blew_up = true;
                manifest.events.push_back("blow-up: " + ev->reason + " at t=" +
                                          detail::format_double(ev->time));
            }
            break;
        }

        case Model::damped_comparison: {
            const FluidParams p{cfg.viscosity, cfg.lattice.l};
            const DilatationChart chart = *cfg.chart;
            ModeField u0 = build_initial_field(cfg);
            const Nonlinearity nl = cfg.damped_nonlinearity;
            auto rhs_at = [&](const ModeField& u, double sigma) {
                return damped_rhs(u, chart, sigma, p, nl);
            };
            detail::FieldRunResult r = detail::run_field_loop(cfg, u0, rhs_at, 0.0);
            writer.write("series.csv", series_to_csv(r.series));
            writer.write("field_final.json", field_to_json(r.snapshots.back()).dump(1));

            // reference route: integrate the untransformed dynamics in tau and
            // map through the chart at the end
            const double sigma_end = cfg.plan.dt * double(cfg.plan.steps);
            if (!r.nonfinite_step) {
                const double tau_end = tau_of_sigma(chart, sigma_end);
                const std::int64_t ref_steps = 4 * cfg.plan.steps;
                const double dtau = (tau_end - chart.t0()) / double(ref_steps);
                ModeField v = from_comparison(u0, chart, 0.0);
                auto ref_rhs = [&](const ModeField& w) {
                    ModeField base = (nl == Nonlinearity::burgers)
                                         ? burgers_rhs(w, p)
                                         : ns_rhs(w, p, ForcingSpec{}, 0.0);
                    base *= cplx(chart.rho(), 0.0); // t = rho tau time scale
                    return base;
                };
                for (std::int64_t m = 0; m < ref_steps; ++m) v = rk4_step(v, ref_rhs, dtau, m);
                const ModeField v_from_u = from_comparison(r.snapshots.back(), chart, sigma_end);
                const double ref_norm = hs_norm(v, 0.0);
                const double err = hs_norm(v_from_u - v, 0.0);
                manifest.results["two_route_error"] = ref_norm > 0 ? err / ref_norm : err;
            }

            if (cfg.diagnostics.envelope_s) {
                DecayEnvelope env{0.0, *cfg.diagnostics.envelope_s};
                const auto table = u0.lattice().coords_table();
                for (int i = 0; i < u0.dim(); ++i)
                    for (std::int64_t k = 0; k < u0.lattice().size(); ++k)
                        env.C = std::max(
                            env.C, std::abs(u0.component(i)[k]) *
                                       (1.0 + std::pow(Lattice::norm(table[std::size_t(k)],
                                                                     u0.dim()),
                                                       env.s)));
                env.C *= 1.0 + 1e-12; // so the defining snapshot itself passes
                const PreservationReport rep =
                    envelope_preserved(r.snapshots, r.snapshot_times, env);
                nlohmann::json jr{{"envelope_C", env.C},
                                  {"envelope_s", env.s},
                                  {"preserved", rep.preserved},
                                  {"worst_margin", rep.worst_margin}};
                if (rep.first_violation_time) jr["first_violation_time"] = *rep.first_violation_time;
                writer.write("envelope.json", jr.dump(1));
                manifest.results["envelope"] = jr;
            }
            if (r.nonfinite_step) {
                blew_up = true;
                manifest.events.push_back("blow-up: nonfinite at step " +
                                          std::to_string(*r.nonfinite_step));
            }
            break;
        }

        case Model::forced_counterexample: {
            const FluidParams p{cfg.viscosity, cfg.lattice.l};
            ModeField v = build_initial_field(cfg);
            NormSeries series;
            std::ostringstream fits;
            fits << "time,fit_C,fit_s\n";
            std::vector<double> fit_s_series;
            const std::vector<double> norms = detail::norm_orders(cfg.diagnostics);
            auto record = [&](double t, const ModeField& f) {
                series.times.push_back(t);
                for (double s : norms) series.values[s].push_back(hs_norm(f, s));
                series.sup_mode.push_back(f.max_abs());
                if (f.max_abs() > 0) {
                    const EnvelopeFitResult fit = envelope_fit(f);
                    fits << detail::format_double(t) << "," << detail::format_double(fit.C) << ","
                         << detail::format_double(fit.s) << "\n";
                    fit_s_series.push_back(fit.s);
                }
            };
            record(0.0, v);
            double t = 0.0;
            for (std::int64_t m = 0; m < cfg.plan.steps; ++m) {
                const ModeField parts = ns_rhs(v, p, ForcingSpec{}, t);
                const ModeField f = dynamic_forcing_update(v, parts, cfg.forcing, cfg.plan.dt, t);
                ModeField rhs = parts;
                rhs += f;
                v = euler_step(v, [&](const ModeField&) { return rhs; }, cfg.plan.dt, m);
                t += cfg.plan.dt;
                if ((m + 1) % cfg.diagnostics.cadence == 0 || m + 1 == cfg.plan.steps)
                    record(t, v);
            }
            writer.write("series.csv", series_to_csv(series));
            writer.write("envelope_fits.csv", fits.str());
            writer.write("field_final.json", field_to_json(v).dump(1));
            // exactness of the negative-orthant cancellation
            double neg_max = 0;
            const auto table = v.lattice().coords_table();
            for (std::int64_t k = 0; k < v.lattice().size(); ++k) {
                bool allneg = true;
                for (int j = 0; j < v.dim(); ++j)
                    if (table[std::size_t(k)][j] >= 0) { allneg = false; break; }
                if (!allneg) continue;
                for (int i = 0; i < v.dim(); ++i)
                    neg_max = std::max(neg_max, std::abs(v.component(i)[k]));
            }
            manifest.results["negative_orthant_max"] = neg_max;
            manifest.results["fit_s_series"] = fit_s_series;
            break;
        }

        case Model::kernel_checks: {
            const DilatationChart chart(0.0, 1.0, 1.0, ChartMode::localized_factor);
            GaussianKernel k;
            k.dim = cfg.lattice.n;
            k.rho = cfg.kernel.rho;
            k.nu = cfg.kernel.nu;
            k.mu_prime = [chart](double s) { return mu_at(chart, s).mu_tau1; };

            nlohmann::json rep;
            // normalization over a (sigma, s) grid
            double norm_err = 0;
            for (int a = 1; a <= 3; ++a)
                for (int b = 0; b < a; ++b) {
                    const double sig = cfg.kernel.s_lo +
                                       (cfg.kernel.s_hi - cfg.kernel.s_lo) * double(a) / 3.0;
                    const double s = cfg.kernel.s_lo +
                                     (cfg.kernel.s_hi - cfg.kernel.s_lo) * double(b) / 3.0;
                    norm_err = std::max(norm_err,
                                        std::abs(gaussian_normalization(k, sig, s) - 1.0));
                }
            rep["normalization_max_error"] = norm_err;

            // Lipschitz constant of nu*mu' on the sampled interval
            double lip = 0;
            for (int i = 0; i < 2000; ++i) {
                const double s = cfg.kernel.s_lo +
                                 (cfg.kernel.s_hi - cfg.kernel.s_lo) * double(i) / 1999.0;
                const double h = 1e-6;
                lip = std::max(lip, std::abs(k.beta(s + h) - k.beta(std::max(0.0, s - h))) /
                                        (s + h - std::max(0.0, s - h)));
            }
            LevySampleSpec lspec;
            lspec.s_lo = cfg.kernel.s_lo;
            lspec.s_hi = cfg.kernel.s_hi;
            lspec.samples = cfg.kernel.levy_samples;
            lspec.seed = cfg.seed;
            const LevyBoundReport levy = levy_term_bound_check(k, lip * 1.0000001, lspec);
            rep["levy"] = {{"samples", levy.samples},
                           {"violations", levy.violations},
                           {"max_slack", levy.max_slack},
                           {"min_slack", levy.min_slack}};
            if (levy.violations > 0) {
                manifest.events.push_back("levy bound violated: " + levy.first_violation);
                rep["levy"]["first_violation"] = levy.first_violation;
            }

            // half-ball identity on a linear f
            {
                const std::array<double, 3> x{0.1, -0.2, 0.05};
                auto f = [](std::span<const double> y) { return 0.3 + 2.0 * y[0]; };
                const double sig = 0.5 * (cfg.kernel.s_lo + cfg.kernel.s_hi);
                BallQuadratureSpec q{cfg.kernel.radial_points, cfg.kernel.angular_points};
                const HalfBallResult h = antisym_half_ball_check(
                    k, f, x, cfg.kernel.half_ball_radius, sig, cfg.kernel.s_lo, 0, q);
                rep["half_ball"] = {{"full", h.full},
                                    {"half_reflected", h.half_reflected},
                                    {"difference", std::abs(h.full - h.half_reflected)}};
            }
            rep["config"] = manifest.config_echo["kernel"];
            writer.write("report.json", rep.dump(1));
            manifest.results["kernel_checks"] = rep;
            break;
        }
    }

    manifest.exit_code = blew_up ? (cfg.expect_blowup ? 0 : 3) : 0;
    if (blew_up && cfg.expect_blowup)
        manifest.events.push_back("blow-up was declared expected by the config");

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    manifest.outputs = writer.records();
    {
        std::ofstream os(writer.dir() / "manifest.json");
        os << manifest_to_json(manifest).dump(1) << "\n";
    }
    return manifest;
}

}  // namespace speclab
