#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "speclab/errors.hpp"

namespace speclab {

/// Lattice coordinates are held in a fixed-capacity array so hot loops stay
/// allocation-free. Dimensions above this cap are not supported.
inline constexpr int max_dimension = 4;

using Coord = std::array<int, max_dimension>;

/// Mode index as exposed at API boundaries (JSON, CLI).
using ModeIndex = std::vector<int>;

/// Truncated mode lattice [-M, M]^n with flat row-major indexing.
class Lattice {
public:
    Lattice(int n, int M) : n_(n), M_(M) {
        if (n < 1 || n > max_dimension)
            throw config_error("lattice dimension must be in [1, " +
                               std::to_string(max_dimension) + "]");
        if (M < 0) throw config_error("lattice truncation M must be >= 0");
        side_ = 2 * M + 1;
        size_ = 1;
        for (int j = 0; j < n; ++j) size_ *= side_;
    }

    int dim() const noexcept { return n_; }
    int truncation() const noexcept { return M_; }
    int side() const noexcept { return side_; }
    std::int64_t size() const noexcept { return size_; }

    bool operator==(const Lattice& o) const noexcept {
        return n_ == o.n_ && M_ == o.M_;
    }

    bool contains(std::span<const int> alpha) const noexcept {
        if (static_cast<int>(alpha.size()) != n_) return false;
        for (int j = 0; j < n_; ++j)
            if (alpha[j] < -M_ || alpha[j] > M_) return false;
        return true;
    }

    bool contains(const Coord& alpha) const noexcept {
        for (int j = 0; j < n_; ++j)
            if (alpha[j] < -M_ || alpha[j] > M_) return false;
        return true;
    }

    std::int64_t flat(std::span<const int> alpha) const {
        if (!contains(alpha)) throw domain_error("mode index outside lattice");
        std::int64_t idx = 0;
        for (int j = 0; j < n_; ++j) idx = idx * side_ + (alpha[j] + M_);
        return idx;
    }

    /// Unchecked flat index for coordinates known to lie on the lattice.
    std::int64_t flat_unchecked(const Coord& alpha) const noexcept {
        std::int64_t idx = 0;
        for (int j = 0; j < n_; ++j) idx = idx * side_ + (alpha[j] + M_);
        return idx;
    }

    Coord coords(std::int64_t idx) const noexcept {
        Coord c{};
        for (int j = n_ - 1; j >= 0; --j) {
            c[j] = static_cast<int>(idx % side_) - M_;
            idx /= side_;
        }
        return c;
    }

    ModeIndex mode_index(std::int64_t idx) const {
        Coord c = coords(idx);
        return ModeIndex(c.begin(), c.begin() + n_);
    }

    /// Decode table for every flat index; built on demand by lattice loops.
    std::vector<Coord> coords_table() const {
        std::vector<Coord> t(static_cast<std::size_t>(size_));
        for (std::int64_t k = 0; k < size_; ++k) t[static_cast<std::size_t>(k)] = coords(k);
        return t;
    }

    static double norm(const Coord& alpha, int n) noexcept {
        double s = 0;
        for (int j = 0; j < n; ++j) s += double(alpha[j]) * alpha[j];
        return std::sqrt(s);
    }

    static double norm_sq(const Coord& alpha, int n) noexcept {
        double s = 0;
        for (int j = 0; j < n; ++j) s += double(alpha[j]) * alpha[j];
        return s;
    }

    double norm(std::span<const int> alpha) const noexcept {
        double s = 0;
        for (int v : alpha) s += double(v) * v;
        return std::sqrt(s);
    }

private:
    int n_;
    int M_;
    int side_;
    std::int64_t size_;
};

}  // namespace speclab
