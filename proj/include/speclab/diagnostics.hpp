#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/mode_field.hpp"

namespace speclab {

/// Time series of norms recorded during a run. values is keyed by the norm
/// order s (0 = plain l2); sup_mode tracks max_{i,alpha} |v_{i,alpha}|.
struct NormSeries {
    std::vector<double> times;
    std::map<double, std::vector<double>> values;
    std::vector<double> sup_mode;
    std::optional<std::pair<double, std::int64_t>> nonfinite_event; // (time, step)

    void validate() const {
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw config_error("norm series times must be strictly increasing");
        for (const auto& [s, v] : values)
            if (v.size() != times.size())
                throw config_error("norm series column length mismatch (s=" + std::to_string(s) +
                                   ")");
        if (!sup_mode.empty() && sup_mode.size() != times.size())
            throw config_error("norm series sup_mode length mismatch");
    }
};

struct EnvelopeFitResult {
    double C = 0;
    double s = 0;
    bool underdetermined = false;
};

/// Least-squares fit of log|v_{i,alpha}| against -log(1 + |alpha|^s) over the
/// nonzero amplitudes with |alpha| >= 1 (the zero mode enters only the final
/// constant). Returns the fitted exponent together with the minimal C such
/// that the envelope holds exactly at that exponent. With fewer than two
/// distinct radii the exponent is unidentifiable: s = 0, C = max |v|, and the
/// underdetermined flag is set.
inline EnvelopeFitResult envelope_fit(const ModeField& v) {
    const Lattice& lat = v.lattice();
    const auto table = lat.coords_table();
    std::vector<double> radii, logs;
    double max_abs_all = 0;
    for (int i = 0; i < v.dim(); ++i) {
        const auto& c = v.component(i);
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const double m = std::abs(c[k]);
            max_abs_all = std::max(max_abs_all, m);
            const double r = Lattice::norm(table[std::size_t(k)], v.dim());
            if (r < 1.0 || m <= 1e-300) continue;
            radii.push_back(r);
            logs.push_back(std::log(m));
        }
    }
    if (max_abs_all == 0) throw degenerate_input_error("envelope_fit: all-zero field");

    std::size_t distinct = 0;
    {
        std::vector<double> sorted = radii;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        distinct = sorted.size();
    }
    if (distinct < 2) return EnvelopeFitResult{max_abs_all, 0.0, true};

    auto sse = [&](double s) {
        double mean = 0;
        std::vector<double> pred(radii.size());
        for (std::size_t i = 0; i < radii.size(); ++i) {
            pred[i] = -std::log1p(std::pow(radii[i], s));
            mean += logs[i] - pred[i];
        }
        mean /= double(radii.size());
        double acc = 0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double d = logs[i] - (mean + pred[i]);
            acc += d * d;
        }
        return acc;
    };

    // coarse scan then ternary refinement
    const double s_max = 24.0;
    double best_s = 0, best = sse(0.0);
    for (int i = 1; i <= 96; ++i) {
        const double s = s_max * double(i) / 96.0;
        const double val = sse(s);
        if (val < best) { best = val; best_s = s; }
    }
    double lo = std::max(0.0, best_s - s_max / 96.0);
    double hi = std::min(s_max, best_s + s_max / 96.0);
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (sse(m1) < sse(m2)) hi = m2; else lo = m1;
    }
    const double s_hat = 0.5 * (lo + hi);

    double C = 0;
    for (int i = 0; i < v.dim(); ++i) {
        const auto& c = v.component(i);
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const double r = Lattice::norm(table[std::size_t(k)], v.dim());
            C = std::max(C, std::abs(c[k]) * (1.0 + std::pow(r, s_hat)));
        }
    }
    return EnvelopeFitResult{C, s_hat, false};
}

// ---------------------------------------------------------------------------
// convolution-rule oracle

enum class ConvWeight { none, gamma_norm };

struct ConvolutionRuleResult {
    double c = 0;          // max over |alpha| <= M/2 of (1+|alpha|^{s_out}) * sum
    double stability = 0;  // c_M / c_{M/2} on the shared window |alpha| <= M/4
    double s_out = 0;      // s_a + s_b - n - 1
    // per-radius maxima of the raw sums, for measured-exponent reports
    std::vector<std::pair<double, double>> radial_max;
};

namespace detail {

/// Raw sum S(alpha) = sum_{gamma in [-M,M]^n} w(gamma) /
/// ((1+|alpha-gamma|^{s_a})(1+|gamma|^{s_b})), via lookup tables.
class ConvRuleSum {
public:
    ConvRuleSum(int n, double s_a, double s_b, int trunc, ConvWeight w)
        : n_(n), trunc_(trunc) {
        const int gside = 2 * trunc + 1;
        std::size_t gtotal = 1;
        for (int j = 0; j < n; ++j) gtotal *= std::size_t(gside);
        gtab_.assign(gtotal, 0.0);
        for (std::size_t k = 0; k < gtotal; ++k) {
            std::size_t rem = k;
            double r2 = 0;
            for (int j = n - 1; j >= 0; --j) {
                const int cj = int(rem % std::size_t(gside)) - trunc;
                rem /= std::size_t(gside);
                r2 += double(cj) * cj;
            }
            const double r = std::sqrt(r2);
            const double wgt = (w == ConvWeight::gamma_norm) ? r : 1.0;
            gtab_[k] = wgt / (1.0 + std::pow(r, s_b));
        }
        // beta table covers alpha - gamma for |alpha_j| <= trunc/2
        bpad_ = trunc + trunc / 2;
        const int bside = 2 * bpad_ + 1;
        std::size_t btotal = 1;
        for (int j = 0; j < n; ++j) btotal *= std::size_t(bside);
        btab_.assign(btotal, 0.0);
        for (std::size_t k = 0; k < btotal; ++k) {
            std::size_t rem = k;
            double r2 = 0;
            for (int j = n - 1; j >= 0; --j) {
                const int cj = int(rem % std::size_t(bside)) - bpad_;
                rem /= std::size_t(bside);
                r2 += double(cj) * cj;
            }
            btab_[k] = 1.0 / (1.0 + std::pow(std::sqrt(r2), s_a));
        }
    }

    double operator()(const std::vector<int>& alpha) const {
        const int gside = 2 * trunc_ + 1;
        const int bside = 2 * bpad_ + 1;
        // iterate gamma in row-major order, tracking the beta index
        double acc = 0;
        std::vector<int> g(std::size_t(n_), -trunc_);
        std::size_t gidx = 0;
        const std::size_t total = gtab_.size();
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t bidx = 0;
            for (int j = 0; j < n_; ++j)
                bidx = bidx * std::size_t(bside) + std::size_t(alpha[std::size_t(j)] - g[std::size_t(j)] + bpad_);
            acc += gtab_[gidx] * btab_[bidx];
            ++gidx;
            for (int j = n_ - 1; j >= 0; --j) {
                if (++g[std::size_t(j)] <= trunc_) break;
                g[std::size_t(j)] = -trunc_;
            }
        }
        return acc;
    }

private:
    int n_;
    int trunc_;
    int bpad_;
    std::vector<double> gtab_;
    std::vector<double> btab_;
};

/// All alpha with sorted non-negative coordinates and |alpha| <= rmax. The
/// summand tables are invariant under coordinate permutations and sign flips,
/// so these canonical representatives cover every window value.
inline std::vector<std::vector<int>> canonical_alphas(int n, double rmax) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(std::size_t(n), 0);
    const int cap = int(std::floor(rmax));
    auto rec = [&](auto&& self, int pos, int lo) -> void {
        if (pos == n) {
            double r2 = 0;
            for (int v : a) r2 += double(v) * v;
            if (r2 <= rmax * rmax) out.push_back(a);
            return;
        }
        for (int v = lo; v <= cap; ++v) {
            a[std::size_t(pos)] = v;
            self(self, pos + 1, v);
        }
    };
    rec(rec, 0, 0);
    return out;
}

}  // namespace detail

/// Brute-force summability oracle for products of polynomially decaying mode
/// sequences: computes c(alpha) = (1+|alpha|^{s_out}) * S(alpha) over
/// |alpha| <= M/2 with S the truncated double sum, s_out = s_a + s_b - n - 1,
/// plus a truncation-doubling stability ratio (M vs M/2 on the window
/// |alpha| <= M/4) and per-radius maxima of the raw sums.
inline ConvolutionRuleResult convolution_rule_oracle(int n, double s_a, double s_b, int M,
                                                     ConvWeight weight = ConvWeight::none) {
    if (n < 1 || n > 3) throw domain_error("convolution_rule_oracle supports n in {1,2,3}");
    if (!(s_a > n && s_b > n))
        throw domain_error("convolution_rule_oracle requires s_a, s_b > n for summability");
    if (M < 4) throw domain_error("convolution_rule_oracle requires M >= 4");

    ConvolutionRuleResult res;
    res.s_out = s_a + s_b - double(n) - 1.0;

    const detail::ConvRuleSum sum_full(n, s_a, s_b, M, weight);
    const detail::ConvRuleSum sum_half(n, s_a, s_b, M / 2, weight);

    std::map<double, double> bins; // radius -> max raw sum
    double c_full_win = 0, c_half_win = 0, c_max = 0;
    const double window = double(M) / 2.0;
    const double shared = double(M) / 4.0;
    for (const auto& alpha : detail::canonical_alphas(n, window)) {
        double r2 = 0;
        for (int v : alpha) r2 += double(v) * v;
        const double r = std::sqrt(r2);
        const double S = sum_full(alpha);
        const double c_alpha = (1.0 + std::pow(r, res.s_out)) * S;
        c_max = std::max(c_max, c_alpha);
        auto [it, inserted] = bins.emplace(r, S);
        if (!inserted) it->second = std::max(it->second, S);
        if (r <= shared) {
            c_full_win = std::max(c_full_win, c_alpha);
            c_half_win = std::max(c_half_win, (1.0 + std::pow(r, res.s_out)) * sum_half(alpha));
        }
    }
    res.c = c_max;
    res.stability = c_full_win / c_half_win;
    res.radial_max.assign(bins.begin(), bins.end());
    return res;
}

// ---------------------------------------------------------------------------
// preservation and blow-up monitors

struct PreservationReport {
    bool preserved = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    std::optional<double> first_violation_time;
    std::vector<bool> per_snapshot;
};

inline PreservationReport envelope_preserved(std::span<const ModeField> snapshots,
                                             std::span<const double> times,
                                             const DecayEnvelope& env) {
    if (snapshots.size() != times.size())
        throw config_error("envelope_preserved: snapshot/time count mismatch");
    PreservationReport rep;
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        if (i > 0 && !(snapshots[i].lattice() == snapshots[0].lattice()))
            throw config_error("envelope_preserved: snapshots must share one lattice");
        const double margin = env.margin(snapshots[i]);
        rep.worst_margin = std::min(rep.worst_margin, margin);
        const bool ok = margin >= 0.0;
        rep.per_snapshot.push_back(ok);
        if (!ok && !rep.first_violation_time) {
            rep.first_violation_time = times[i];
            rep.preserved = false;
        }
    }
    return rep;
}

struct BlowupEvent {
    double time = 0;
    std::int64_t index = 0;
    std::string reason;
};

/// First time the l2 column exceeds threshold_ratio times its initial value,
/// or the recorded non-finite stepper event, whichever comes first.
inline std::optional<BlowupEvent> blowup_detect(const NormSeries& series, double threshold_ratio) {
    if (!(threshold_ratio > 1.0)) throw domain_error("blowup_detect: threshold ratio must be > 1");
    series.validate();
    auto it = series.values.find(0.0);
    if (it == series.values.end())
        throw config_error("blowup_detect: series lacks the l2 (s=0) column");
    const auto& l2 = it->second;
    std::optional<BlowupEvent> ev;
    if (!l2.empty()) {
        const double v0 = l2.front();
        for (std::size_t i = 1; i < l2.size(); ++i) {
            if (l2[i] > threshold_ratio * v0) {
                ev = BlowupEvent{series.times[i], std::int64_t(i), "threshold"};
                break;
            }
        }
    }
    if (series.nonfinite_event) {
        const auto& [t, step] = *series.nonfinite_event;
        if (!ev || t < ev->time) ev = BlowupEvent{t, step, "nonfinite"};
    }
    return ev;
}

}  // namespace speclab
