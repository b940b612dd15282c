#pragma once

// Small self-contained FFT: iterative radix-2 for power-of-two sizes and
// Bluestein's chirp-z reduction for everything else. Unnormalized forward
// transform X_k = sum_t x_t e^{-2 pi i k t / N}; inverse carries the 1/N.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "modelsr/core.hpp"

namespace modelsr::fft {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void radix2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

inline void bluestein(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;
    const double sign = inverse ? 1.0 : -1.0;
    // chirp factors e^{sign * pi i t^2 / n}; t^2 mod 2n keeps the argument small
    std::vector<cplx> w(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t t2 = (t * t) % (2 * n);
        double ang = sign * kPi * static_cast<double>(t2) / static_cast<double>(n);
        w[t] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> x(m, cplx{}), y(m, cplx{});
    for (std::size_t t = 0; t < n; ++t) x[t] = a[t] * w[t];
    y[0] = std::conj(w[0]);
    for (std::size_t t = 1; t < n; ++t) y[t] = y[m - t] = std::conj(w[t]);
    radix2(x, false);
    radix2(y, false);
    for (std::size_t t = 0; t < m; ++t) x[t] *= y[t];
    radix2(x, true);
    for (std::size_t t = 0; t < n; ++t) a[t] = x[t] * w[t] / static_cast<double>(m);
}

}  // namespace detail

inline void transform(std::vector<cplx>& a, bool inverse) {
    if (a.empty()) throw std::invalid_argument("fft: empty input");
    if (a.size() == 1) return;
    if (is_pow2(a.size()))
        detail::radix2(a, inverse);
    else
        detail::bluestein(a, inverse);
    if (inverse) {
        double inv = 1.0 / static_cast<double>(a.size());
        for (auto& v : a) v *= inv;
    }
}

inline std::vector<cplx> forward(std::vector<cplx> a) {
    transform(a, false);
    return a;
}

inline std::vector<cplx> inverse(std::vector<cplx> a) {
    transform(a, true);
    return a;
}

}  // namespace modelsr::fft
