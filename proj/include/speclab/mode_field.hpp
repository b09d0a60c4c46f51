#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "speclab/detail/fft.hpp"
#include "speclab/errors.hpp"
#include "speclab/lattice.hpp"

namespace speclab {

/// Divergence tolerance for the solenoidal invariant, relative to the field's
/// l2 norm.
inline constexpr double tol_div = 1e-12;

using cplx = std::complex<double>;

/// A single scalar function on the truncated mode lattice: one dense complex
/// amplitude per lattice index. Absent-from-map semantics are represented by
/// exact zeros.
class ModeScalar {
public:
    explicit ModeScalar(Lattice lat)
        : lat_(lat), amp_(static_cast<std::size_t>(lat.size()), cplx(0.0, 0.0)) {}

    const Lattice& lattice() const noexcept { return lat_; }

    cplx& operator[](std::int64_t flat) { return amp_[static_cast<std::size_t>(flat)]; }
    const cplx& operator[](std::int64_t flat) const {
        return amp_[static_cast<std::size_t>(flat)];
    }

    cplx& at(std::span<const int> alpha) { return amp_[static_cast<std::size_t>(lat_.flat(alpha))]; }
    const cplx& at(std::span<const int> alpha) const {
        return amp_[static_cast<std::size_t>(lat_.flat(alpha))];
    }
    cplx& at(const ModeIndex& alpha) { return at(std::span<const int>(alpha)); }
    const cplx& at(const ModeIndex& alpha) const { return at(std::span<const int>(alpha)); }

    std::span<cplx> data() noexcept { return amp_; }
    std::span<const cplx> data() const noexcept { return amp_; }

    double max_abs() const noexcept {
        double m = 0;
        for (const cplx& z : amp_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const noexcept {
        for (const cplx& z : amp_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ModeScalar& operator+=(const ModeScalar& o) {
        require_same(o);
        for (std::size_t k = 0; k < amp_.size(); ++k) amp_[k] += o.amp_[k];
        return *this;
    }
    ModeScalar& operator-=(const ModeScalar& o) {
        require_same(o);
        for (std::size_t k = 0; k < amp_.size(); ++k) amp_[k] -= o.amp_[k];
        return *this;
    }
    ModeScalar& operator*=(cplx c) {
        for (cplx& z : amp_) z *= c;
        return *this;
    }

private:
    void require_same(const ModeScalar& o) const {
        if (!(lat_ == o.lat_)) throw config_error("mode lattice mismatch");
    }

    Lattice lat_;
    std::vector<cplx> amp_;
};

/// Vector field of complex Fourier amplitudes v_{i,alpha} on [-M,M]^n with
/// one component per space dimension. Carries the torus length and the two
/// structural flags (conjugate symmetry of a real-valued field, and
/// solenoidality). The flags are claims that can be checked with
/// reality_defect() / divergence_defect().
class ModeField {
public:
    ModeField(Lattice lat, double torus_length = 1.0)
        : lat_(lat), l_(torus_length), comp_(static_cast<std::size_t>(lat.dim()), ModeScalar(lat)) {
        if (!(torus_length > 0)) throw config_error("torus length must be positive");
    }

    const Lattice& lattice() const noexcept { return lat_; }
    int dim() const noexcept { return lat_.dim(); }
    int truncation() const noexcept { return lat_.truncation(); }
    double torus_length() const noexcept { return l_; }

    bool real_valued() const noexcept { return real_valued_; }
    bool solenoidal() const noexcept { return solenoidal_; }
    void set_real_valued(bool b) noexcept { real_valued_ = b; }
    void set_solenoidal(bool b) noexcept { solenoidal_ = b; }

    ModeScalar& component(int i) { return comp_[static_cast<std::size_t>(i)]; }
    const ModeScalar& component(int i) const { return comp_[static_cast<std::size_t>(i)]; }

    cplx& at(int i, std::span<const int> alpha) { return comp_[std::size_t(i)].at(alpha); }
    const cplx& at(int i, std::span<const int> alpha) const {
        return comp_[std::size_t(i)].at(alpha);
    }
    cplx& at(int i, const ModeIndex& alpha) { return at(i, std::span<const int>(alpha)); }
    const cplx& at(int i, const ModeIndex& alpha) const {
        return at(i, std::span<const int>(alpha));
    }

    double max_abs() const noexcept {
        double m = 0;
        for (const auto& c : comp_) m = std::max(m, c.max_abs());
        return m;
    }

    bool all_finite() const noexcept {
        for (const auto& c : comp_)
            if (!c.all_finite()) return false;
        return true;
    }

    ModeField& operator+=(const ModeField& o) {
        require_compatible(o);
        for (int i = 0; i < dim(); ++i) comp_[std::size_t(i)] += o.comp_[std::size_t(i)];
        return *this;
    }
    ModeField& operator-=(const ModeField& o) {
        require_compatible(o);
        for (int i = 0; i < dim(); ++i) comp_[std::size_t(i)] -= o.comp_[std::size_t(i)];
        return *this;
    }
    ModeField& operator*=(cplx c) {
        for (auto& comp : comp_) comp *= c;
        return *this;
    }

    friend ModeField operator+(ModeField a, const ModeField& b) { return a += b; }
    friend ModeField operator-(ModeField a, const ModeField& b) { return a -= b; }
    friend ModeField operator*(cplx c, ModeField a) { return a *= c; }

    void require_compatible(const ModeField& o) const {
        if (!(lat_ == o.lat_) || l_ != o.l_)
            throw config_error("mode field lattice/torus mismatch");
    }

    /// max_{i,alpha} |v_{i,-alpha} - conj(v_{i,alpha})|.
    double reality_defect() const {
        double worst = 0;
        const auto table = lat_.coords_table();
        for (int i = 0; i < dim(); ++i) {
            const auto& c = comp_[std::size_t(i)];
            for (std::int64_t k = 0; k < lat_.size(); ++k) {
                Coord neg = table[std::size_t(k)];
                for (int j = 0; j < dim(); ++j) neg[j] = -neg[j];
                const cplx d = c[lat_.flat_unchecked(neg)] - std::conj(c[k]);
                worst = std::max(worst, std::abs(d));
            }
        }
        return worst;
    }

private:
    Lattice lat_;
    double l_;
    bool real_valued_ = false;
    bool solenoidal_ = false;
    std::vector<ModeScalar> comp_;
};

/// Decay envelope |v_{i,alpha}| <= C / (1 + |alpha|^s), with |alpha| the
/// Euclidean norm. The regularity currency of every preservation experiment.
struct DecayEnvelope {
    double C = 1.0;
    double s = 1.0;

    double bound(double alpha_norm) const { return C / (1.0 + std::pow(alpha_norm, s)); }

    /// Worst margin over all modes: min over (i,alpha) of bound - |v|.
    /// Negative means the envelope is violated somewhere.
    double margin(const ModeField& v) const {
        double worst = std::numeric_limits<double>::infinity();
        const auto table = v.lattice().coords_table();
        for (int i = 0; i < v.dim(); ++i) {
            const auto& c = v.component(i);
            for (std::int64_t k = 0; k < v.lattice().size(); ++k) {
                const double r = Lattice::norm(table[std::size_t(k)], v.dim());
                worst = std::min(worst, bound(r) - std::abs(c[k]));
            }
        }
        return worst;
    }

    bool satisfied(const ModeField& v) const { return margin(v) >= 0.0; }
};

// ---------------------------------------------------------------------------
// convolution

/// Direct O(lattice^2) truncated convolution: out_alpha = sum_gamma
/// a_{alpha-gamma} b_gamma over pairs staying on the lattice. Products that
/// fall outside [-M,M]^n are dropped (sharp Galerkin truncation). This is the
/// oracle path; convolve_fast must agree with it.
inline ModeScalar convolve(const ModeScalar& a, const ModeScalar& b) {
    if (!(a.lattice() == b.lattice())) throw config_error("convolve: lattice mismatch");
    const Lattice& lat = a.lattice();
    const int n = lat.dim();
    ModeScalar out(lat);
    const auto table = lat.coords_table();
    for (std::int64_t oa = 0; oa < lat.size(); ++oa) {
        const Coord& alpha = table[std::size_t(oa)];
        cplx acc(0.0, 0.0);
        for (std::int64_t g = 0; g < lat.size(); ++g) {
            Coord beta = table[std::size_t(g)];
            bool ok = true;
            for (int j = 0; j < n; ++j) {
                beta[j] = alpha[j] - beta[j];
                if (beta[j] < -lat.truncation() || beta[j] > lat.truncation()) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            acc += a[lat.flat_unchecked(beta)] * b[g];
        }
        out[oa] = acc;
    }
    return out;
}

/// FFT-backed fast path for the same truncated convolution: zero-pad each
/// axis to a power of two >= 2*(2M+1)-1 so the circular convolution is
/// linear, then crop the centre window.
inline ModeScalar convolve_fast(const ModeScalar& a, const ModeScalar& b) {
    if (!(a.lattice() == b.lattice())) throw config_error("convolve: lattice mismatch");
    const Lattice& lat = a.lattice();
    const int n = lat.dim();
    const int side = lat.side();
    const std::size_t pad = detail::next_pow2(std::size_t(2 * side - 1));
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= pad;

    std::vector<cplx> fa(total, cplx(0, 0)), fb(total, cplx(0, 0));
    const auto table = lat.coords_table();
    auto embed = [&](const ModeScalar& src, std::vector<cplx>& dst) {
        for (std::int64_t k = 0; k < lat.size(); ++k) {
            const Coord& c = table[std::size_t(k)];
            std::size_t idx = 0;
            for (int j = 0; j < n; ++j) idx = idx * pad + std::size_t(c[j] + lat.truncation());
            dst[idx] = src[k];
        }
    };
    embed(a, fa);
    embed(b, fb);
    detail::fft_nd(fa.data(), n, pad, false);
    detail::fft_nd(fb.data(), n, pad, false);
    for (std::size_t k = 0; k < total; ++k) fa[k] *= fb[k];
    detail::fft_nd(fa.data(), n, pad, true);
    const double scale = 1.0 / double(total);

    ModeScalar out(lat);
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const Coord& c = table[std::size_t(k)];
        // full linear convolution index = (c_j + M) + (0 + M) shifted by +M
        std::size_t idx = 0;
        for (int j = 0; j < n; ++j) idx = idx * pad + std::size_t(c[j] + 2 * lat.truncation());
        out[k] = fa[idx] * scale;
    }
    return out;
}

// ---------------------------------------------------------------------------
// structural operations

/// Mode-space Leray projection: for alpha != 0,
///   out_{i,alpha} = v_{i,alpha} - alpha_i (alpha . v_alpha) / |alpha|^2,
/// i.e. P(alpha) = I - alpha alpha^T/|alpha|^2 applied per mode; the zero
/// mode passes through. Requires n >= 2.
inline ModeField leray_project(const ModeField& v) {
    const int n = v.dim();
    if (n < 2) throw config_error("leray_project requires dimension >= 2");
    const Lattice& lat = v.lattice();
    ModeField out = v;
    const auto table = lat.coords_table();
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const Coord& alpha = table[std::size_t(k)];
        const double a2 = Lattice::norm_sq(alpha, n);
        if (a2 == 0.0) continue;
        cplx dot(0.0, 0.0);
        for (int j = 0; j < n; ++j) dot += double(alpha[j]) * v.component(j)[k];
        dot /= a2;
        for (int i = 0; i < n; ++i) out.component(i)[k] -= double(alpha[i]) * dot;
    }
    out.set_solenoidal(true);
    out.set_real_valued(v.real_valued());
    return out;
}

/// Incompressibility diagnostic: d_alpha = sum_j (2 pi i alpha_j / l) v_{j,alpha}.
inline ModeScalar divergence(const ModeField& v) {
    const Lattice& lat = v.lattice();
    ModeScalar out(lat);
    const double two_pi_over_l = 2.0 * std::numbers::pi / v.torus_length();
    const auto table = lat.coords_table();
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const Coord& alpha = table[std::size_t(k)];
        cplx s(0.0, 0.0);
        for (int j = 0; j < v.dim(); ++j) s += double(alpha[j]) * v.component(j)[k];
        out[k] = cplx(0.0, two_pi_over_l) * s;
    }
    return out;
}

/// Dual Sobolev norm: sqrt( sum_{i,alpha} (1 + |alpha|^{2s}) |v_{i,alpha}|^2 ).
/// s = 0 gives the plain l2 norm.
inline double hs_norm(const ModeScalar& v, double s) {
    if (!std::isfinite(s) || s < 0) throw domain_error("hs_norm: s must be finite and >= 0");
    const Lattice& lat = v.lattice();
    const auto table = lat.coords_table();
    double acc = 0;
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const double r = Lattice::norm(table[std::size_t(k)], lat.dim());
        acc += (1.0 + std::pow(r, 2.0 * s)) * std::norm(v[k]);
    }
    return std::sqrt(acc);
}

inline double hs_norm(const ModeField& v, double s) {
    if (!std::isfinite(s) || s < 0) throw domain_error("hs_norm: s must be finite and >= 0");
    const Lattice& lat = v.lattice();
    const auto table = lat.coords_table();
    double acc = 0;
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const double r = Lattice::norm(table[std::size_t(k)], lat.dim());
        const double w = 1.0 + std::pow(r, 2.0 * s);
        for (int i = 0; i < v.dim(); ++i) acc += w * std::norm(v.component(i)[k]);
    }
    return std::sqrt(acc);
}

/// max_alpha |div_alpha| relative check helper: returns the raw sup of
/// sum_j alpha_j v_{j,alpha} (no 2 pi/l factor), which the solenoidal
/// invariant compares against tol_div * ||v||.
inline double divergence_defect(const ModeField& v) {
    const Lattice& lat = v.lattice();
    const auto table = lat.coords_table();
    double worst = 0;
    for (std::int64_t k = 0; k < lat.size(); ++k) {
        const Coord& alpha = table[std::size_t(k)];
        cplx s(0.0, 0.0);
        for (int j = 0; j < v.dim(); ++j) s += double(alpha[j]) * v.component(j)[k];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

inline bool is_solenoidal(const ModeField& v, double tol = tol_div) {
    return divergence_defect(v) <= tol * hs_norm(v, 0.0);
}

}  // namespace speclab
