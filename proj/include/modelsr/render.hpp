#pragma once

// Physical-domain synthesis: high-resolution spectra from fitted models,
// Dirichlet kernels, and band-limited reconstruction via zero-padded
// inverse DFT (spectrum entry k goes to DFT bin k mod G).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "modelsr/core.hpp"
#include "modelsr/fft.hpp"
#include "modelsr/models.hpp"

namespace modelsr {

struct PhysicalGrid {
    std::size_t count;  // G points x_t = t/G, uniform on [0,1)

    explicit PhysicalGrid(std::size_t g) : count(g) {
        if (g < 1) throw std::invalid_argument("PhysicalGrid: need at least one point");
    }
    double point(std::size_t t) const { return static_cast<double>(t) / static_cast<double>(count); }
};

struct Spectrum {
    Measurement samples;
    std::string provenance;  // "raw" or the fitted model tag

    Spectrum(Measurement m, std::string prov = "raw")
        : samples(std::move(m)), provenance(std::move(prov)) {}
};

// P_H(theta_hat): the fitted model sampled on the high-resolution grid.
inline Spectrum extrapolate(const ModelInstance& theta_hat, int k_high) {
    return Spectrum(forward(theta_hat, FrequencyGrid(k_high)), model_tag(theta_hat));
}

// D_K(x) = sum_{|k|<=K} e^{2 pi i k x} = sin((2K+1) pi x) / sin(pi x).
inline double dirichlet(int k_max, double x) {
    if (k_max < 0) throw std::invalid_argument("dirichlet: k_max must be >= 0");
    double xr = x - std::round(x);  // wrap to [-1/2, 1/2); kernel is 1-periodic
    double denom = std::sin(kPi * xr);
    if (std::fabs(denom) < 1e-12) {
        // removable singularity at integer x: expand around the peak
        return (2.0 * k_max + 1.0) * std::cos((2.0 * k_max + 1.0) * kPi * xr) / std::cos(kPi * xr);
    }
    return std::sin((2.0 * k_max + 1.0) * kPi * xr) / denom;
}

// s(x_t) = sum_k g_k e^{2 pi i k x_t} via zero-padded inverse DFT.
inline std::vector<cplx> synthesize(const Spectrum& spectrum, const PhysicalGrid& grid) {
    const auto& m = spectrum.samples;
    const std::size_t G = grid.count;
    if (G < m.grid.size() || G < static_cast<std::size_t>(2 * m.grid.k_max() + 1))
        throw std::invalid_argument("synthesize: physical grid too small for spectrum");
    std::vector<cplx> bins(G, cplx{});
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        long k = m.grid.index(i);
        long b = ((k % static_cast<long>(G)) + static_cast<long>(G)) % static_cast<long>(G);
        bins[static_cast<std::size_t>(b)] += m.values[i];
    }
    auto out = fft::inverse(std::move(bins));
    for (auto& v : out) v *= static_cast<double>(G);  // unnormalized synthesis sum
    return out;
}

// Band-limited ground truth of an FRI signal:
//   sum_{r,j} a_{r,j} sum_{|k|<=K} (2 pi i k)^r e^{2 pi i k (x - x_{r,j})}
// i.e. the r-th Dirichlet kernel derivative train.
inline std::vector<cplx> fri_truth_render(const FriParams& params, int k_max,
                                          const PhysicalGrid& grid) {
    validate(params);
    std::vector<cplx> out(grid.count, cplx{});
    for (std::size_t t = 0; t < grid.count; ++t) {
        double x = grid.point(t);
        cplx s{};
        for (const auto& o : params.orders) {
            for (std::size_t j = 0; j < o.amplitudes.size(); ++j) {
                double u = x - o.positions[j].value;
                cplx acc{};
                for (int k = -k_max; k <= k_max; ++k) {
                    cplx factor = std::pow(cplx(0.0, -kTwoPi * k), o.order);
                    acc += factor * std::polar(1.0, kTwoPi * k * u);
                }
                s += o.amplitudes[j] * acc;
            }
        }
        out[t] = s;
    }
    return out;
}

}  // namespace modelsr
