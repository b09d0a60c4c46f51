#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace speclab::detail {

/// In-place iterative radix-2 complex FFT. `size` must be a power of two.
/// inverse=true applies the conjugate transform without the 1/N factor.
inline void fft_pow2(std::complex<double>* data, std::size_t size, bool inverse) {
    // bit reversal
    for (std::size_t i = 1, j = 0; i < size; ++i) {
        std::size_t bit = size >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= size; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / double(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < size; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

/// n-dimensional FFT over a dense row-major array with equal side length
/// (power of two) along every axis.
inline void fft_nd(std::complex<double>* data, int ndim, std::size_t side, bool inverse) {
    std::size_t total = 1;
    for (int a = 0; a < ndim; ++a) total *= side;
    std::vector<std::complex<double>> line(side);
    for (int axis = ndim - 1; axis >= 0; --axis) {
        // stride of this axis in the row-major layout
        std::size_t stride = 1;
        for (int a = axis + 1; a < ndim; ++a) stride *= side;
        const std::size_t block = stride * side;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                std::complex<double>* p = data + base + off;
                if (stride == 1) {
                    fft_pow2(p, side, inverse);
                } else {
                    for (std::size_t k = 0; k < side; ++k) line[k] = p[k * stride];
                    fft_pow2(line.data(), side, inverse);
                    for (std::size_t k = 0; k < side; ++k) p[k * stride] = line[k];
                }
            }
        }
    }
}

}  // namespace speclab::detail
