#pragma once

// The four concrete signal models: parameter spaces, forward maps g_k(theta),
// analytic Jacobians, and per-frequency Hessian operator norms.
//
// Parameter flattening puts all amplitudes first, then all positions
// (then widths/means for the Gaussian mixture; the six kappa rows for the
// chirped-Gaussian model).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "modelsr/core.hpp"
#include "modelsr/fft.hpp"

namespace modelsr {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Dirac train: sum_j a_j * delta(x - x_j), amplitudes in [-A_I, A_I].
struct PointSourceParams {
    std::vector<double> amplitudes;
    std::vector<WrapPosition> positions;
    double amplitude_bound = 2.0;  // A_I

    std::size_t n() const { return amplitudes.size(); }
};

// One derivative order of an FRI signal: n_r copies of delta^(r).
struct FriOrder {
    int order = 0;  // r
    std::vector<double> amplitudes;
    std::vector<WrapPosition> positions;
};

struct FriParams {
    std::vector<FriOrder> orders;  // ascending r
    double amplitude_bound = 2.0;

    std::size_t total_sources() const {
        std::size_t n = 0;
        for (const auto& o : orders) n += o.amplitudes.size();
        return n;
    }
};

// Gaussian mixture density: sum_j w_j exp(-(x-mu_j)^2 / (2 s_j^2)).
struct GaussParams {
    std::vector<double> weights;
    std::vector<double> stddevs;
    std::vector<WrapPosition> means;

    std::size_t n() const { return weights.size(); }
};

// Chirped Gaussian component: (k0 + i k1) e^{i(k2 x^2 + k3 x)} e^{-(x-k4)^2/(2 k5^2)}.
struct ChirpComponent {
    double amp_re = 1.0;     // kappa_0
    double amp_im = 0.0;     // kappa_1
    double quad_phase = 0.0; // kappa_2
    double lin_phase = 0.0;  // kappa_3
    double center = 0.5;     // kappa_4, in (0,1)
    double width = 0.05;     // kappa_5, > 0
};

struct ChirpParams {
    std::vector<ChirpComponent> components;
    std::size_t fft_grid_size = 128;  // power of two
    // false: x_t = t/G (uniform DFT bins). true: x_t = t/(G-1), the grid
    // used for the 128-point reference experiment.
    bool endpoint_grid = false;

    std::size_t n() const { return components.size(); }
};

using ModelInstance = std::variant<PointSourceParams, FriParams, GaussParams, ChirpParams>;

// --- validation ---

inline void validate(const PointSourceParams& p) {
    if (p.amplitudes.empty() || p.amplitudes.size() != p.positions.size())
        throw std::invalid_argument("point model: need matching nonempty amplitude/position lists");
    for (double a : p.amplitudes)
        if (a == 0.0) throw std::invalid_argument("point model: zero amplitude");
    for (std::size_t i = 0; i < p.positions.size(); ++i)
        for (std::size_t j = i + 1; j < p.positions.size(); ++j)
            if (wrap_distance(p.positions[i], p.positions[j]) == 0.0)
                throw std::invalid_argument("point model: coincident positions");
}

inline void validate(const FriParams& p) {
    if (p.orders.empty()) throw std::invalid_argument("fri model: no orders");
    int prev = -1;
    for (const auto& o : p.orders) {
        if (o.order < 0 || o.order <= prev)
            throw std::invalid_argument("fri model: orders must be ascending and >= 0");
        prev = o.order;
        if (o.amplitudes.empty() || o.amplitudes.size() != o.positions.size())
            throw std::invalid_argument("fri model: bad order block");
        for (double a : o.amplitudes)
            if (a == 0.0) throw std::invalid_argument("fri model: zero amplitude");
        for (std::size_t i = 0; i < o.positions.size(); ++i)
            for (std::size_t j = i + 1; j < o.positions.size(); ++j)
                if (wrap_distance(o.positions[i], o.positions[j]) == 0.0)
                    throw std::invalid_argument("fri model: coincident positions within an order");
    }
}

inline void validate(const GaussParams& p) {
    if (p.weights.empty() || p.weights.size() != p.stddevs.size() ||
        p.weights.size() != p.means.size())
        throw std::invalid_argument("gauss model: need matching nonempty parameter lists");
    for (double w : p.weights)
        if (w == 0.0) throw std::invalid_argument("gauss model: zero weight");
    for (double s : p.stddevs)
        if (!(s > 0.0)) throw std::invalid_argument("gauss model: nonpositive stddev");
    for (std::size_t i = 0; i < p.n(); ++i)
        for (std::size_t j = i + 1; j < p.n(); ++j)
            if (p.stddevs[i] == p.stddevs[j] &&
                wrap_distance(p.means[i], p.means[j]) == 0.0)
                throw std::invalid_argument("gauss model: duplicate (stddev, mean) pair");
}

inline void validate(const ChirpParams& p) {
    if (p.components.empty()) throw std::invalid_argument("chirp model: no components");
    if (p.fft_grid_size < 2 || !fft::is_pow2(p.fft_grid_size))
        throw std::invalid_argument("chirp model: fft_grid_size must be a power of two >= 2");
    for (const auto& c : p.components) {
        if (!(c.width > 0.0)) throw std::invalid_argument("chirp model: nonpositive width");
        if (!(c.center > 0.0 && c.center < 1.0))
            throw std::invalid_argument("chirp model: center must lie in (0,1)");
    }
}

inline void validate(const ModelInstance& m) {
    std::visit([](const auto& p) { validate(p); }, m);
}

// --- flatten / unflatten ---

inline std::size_t param_count(const PointSourceParams& p) { return 2 * p.n(); }
inline std::size_t param_count(const FriParams& p) { return 2 * p.total_sources(); }
inline std::size_t param_count(const GaussParams& p) { return 3 * p.n(); }
inline std::size_t param_count(const ChirpParams& p) { return 6 * p.n(); }

inline std::size_t param_count(const ModelInstance& m) {
    return std::visit([](const auto& p) { return param_count(p); }, m);
}

inline VectorXd flatten(const ModelInstance& m) {
    VectorXd theta(param_count(m));
    std::visit(
        [&theta](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            Eigen::Index i = 0;
            if constexpr (std::is_same_v<T, PointSourceParams>) {
                for (double a : p.amplitudes) theta[i++] = a;
                for (auto x : p.positions) theta[i++] = x.value;
            } else if constexpr (std::is_same_v<T, FriParams>) {
                for (const auto& o : p.orders)
                    for (double a : o.amplitudes) theta[i++] = a;
                for (const auto& o : p.orders)
                    for (auto x : o.positions) theta[i++] = x.value;
            } else if constexpr (std::is_same_v<T, GaussParams>) {
                for (double w : p.weights) theta[i++] = w;
                for (double s : p.stddevs) theta[i++] = s;
                for (auto x : p.means) theta[i++] = x.value;
            } else {
                for (const auto& c : p.components) theta[i++] = c.amp_re;
                for (const auto& c : p.components) theta[i++] = c.amp_im;
                for (const auto& c : p.components) theta[i++] = c.quad_phase;
                for (const auto& c : p.components) theta[i++] = c.lin_phase;
                for (const auto& c : p.components) theta[i++] = c.center;
                for (const auto& c : p.components) theta[i++] = c.width;
            }
        },
        m);
    return theta;
}

// Rebuild an instance with the same structure as `proto` from a flat vector.
// Positions are wrapped into [0,1); chirp centers are taken as given so the
// caller can enforce its own policy, and validation is optional for the
// solver's intermediate iterates.
inline ModelInstance unflatten(const ModelInstance& proto, const VectorXd& theta,
                               bool check = true) {
    if (static_cast<std::size_t>(theta.size()) != param_count(proto))
        throw std::invalid_argument("unflatten: parameter count mismatch");
    ModelInstance out = proto;
    std::visit(
        [&theta](auto& p) {
            using T = std::decay_t<decltype(p)>;
            Eigen::Index i = 0;
            if constexpr (std::is_same_v<T, PointSourceParams>) {
                for (double& a : p.amplitudes) a = theta[i++];
                for (auto& x : p.positions) x = WrapPosition::wrap(theta[i++]);
            } else if constexpr (std::is_same_v<T, FriParams>) {
                for (auto& o : p.orders)
                    for (double& a : o.amplitudes) a = theta[i++];
                for (auto& o : p.orders)
                    for (auto& x : o.positions) x = WrapPosition::wrap(theta[i++]);
            } else if constexpr (std::is_same_v<T, GaussParams>) {
                for (double& w : p.weights) w = theta[i++];
                for (double& s : p.stddevs) s = theta[i++];
                for (auto& x : p.means) x = WrapPosition::wrap(theta[i++]);
            } else {
                for (auto& c : p.components) c.amp_re = theta[i++];
                for (auto& c : p.components) c.amp_im = theta[i++];
                for (auto& c : p.components) c.quad_phase = theta[i++];
                for (auto& c : p.components) c.lin_phase = theta[i++];
                for (auto& c : p.components) c.center = theta[i++];
                for (auto& c : p.components) c.width = theta[i++];
            }
        },
        out);
    if (check) validate(out);
    return out;
}

// --- chirp physical sampling helpers ---

namespace detail {

inline double chirp_abscissa(const ChirpParams& p, std::size_t t) {
    double div = p.endpoint_grid ? static_cast<double>(p.fft_grid_size - 1)
                                 : static_cast<double>(p.fft_grid_size);
    return static_cast<double>(t) / div;
}

// g_k = sum_t s_t e^{-2 pi i k x_t} for all grid indices at once.
// On the t/G grid this is a plain DFT; on the endpoint grid t/(G-1) the
// first G-1 samples form a (G-1)-point DFT and the last sample contributes
// a constant (e^{-2 pi i k} = 1 for integer k).
inline std::vector<cplx> chirp_spectrum(const ChirpParams& p, const std::vector<cplx>& samples,
                                        const FrequencyGrid& grid) {
    const std::size_t G = p.fft_grid_size;
    if (G < static_cast<std::size_t>(2 * grid.k_max() + 1))
        throw std::invalid_argument("chirp model: fft_grid_size too small for grid");
    std::vector<cplx> out(grid.size());
    if (!p.endpoint_grid) {
        std::vector<cplx> bins = fft::forward(samples);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            long k = grid.index(i);
            long b = ((k % static_cast<long>(G)) + static_cast<long>(G)) % static_cast<long>(G);
            out[i] = bins[static_cast<std::size_t>(b)];
        }
    } else {
        const std::size_t n = G - 1;
        std::vector<cplx> head(samples.begin(), samples.begin() + static_cast<long>(n));
        std::vector<cplx> bins = fft::forward(std::move(head));
        cplx tail = samples[n];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            long k = grid.index(i);
            long b = ((k % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
            out[i] = bins[static_cast<std::size_t>(b)] + tail;
        }
    }
    return out;
}

inline cplx chirp_envelope(const ChirpComponent& c, double x) {
    double dx = x - c.center;
    double gauss = std::exp(-dx * dx / (2.0 * c.width * c.width));
    double phase = c.quad_phase * x * x + c.lin_phase * x;
    return cplx(std::cos(phase), std::sin(phase)) * gauss;
}

}  // namespace detail

// --- forward maps ---

inline Measurement forward(const PointSourceParams& p, const FrequencyGrid& grid) {
    Measurement m(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k = grid.omega(i);
        cplx s{};
        for (std::size_t j = 0; j < p.n(); ++j)
            s += p.amplitudes[j] * std::polar(1.0, -kTwoPi * p.positions[j].value * k);
        m.values[i] = s;
    }
    return m;
}

inline Measurement forward(const FriParams& p, const FrequencyGrid& grid) {
    Measurement m(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k = grid.omega(i);
        cplx s{};
        for (const auto& o : p.orders) {
            cplx factor = std::pow(cplx(0.0, -kTwoPi * k), o.order);
            for (std::size_t j = 0; j < o.amplitudes.size(); ++j)
                s += o.amplitudes[j] * factor *
                     std::polar(1.0, -kTwoPi * o.positions[j].value * k);
        }
        m.values[i] = s;
    }
    return m;
}

inline Measurement forward(const GaussParams& p, const FrequencyGrid& grid) {
    const double c0 = std::sqrt(kTwoPi);
    Measurement m(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double w = grid.omega(i);
        cplx s{};
        for (std::size_t j = 0; j < p.n(); ++j) {
            double decay = std::exp(-2.0 * kPi * kPi * p.stddevs[j] * p.stddevs[j] * w * w);
            s += p.weights[j] * p.stddevs[j] * decay *
                 std::polar(1.0, -kTwoPi * p.means[j].value * w);
        }
        m.values[i] = c0 * s;
    }
    return m;
}

inline Measurement forward(const ChirpParams& p, const FrequencyGrid& grid) {
    const std::size_t G = p.fft_grid_size;
    std::vector<cplx> samples(G, cplx{});
    for (std::size_t t = 0; t < G; ++t) {
        double x = detail::chirp_abscissa(p, t);
        cplx s{};
        for (const auto& c : p.components)
            s += cplx(c.amp_re, c.amp_im) * detail::chirp_envelope(c, x);
        samples[t] = s;
    }
    return Measurement(grid, detail::chirp_spectrum(p, samples, grid));
}

inline Measurement forward(const ModelInstance& m, const FrequencyGrid& grid) {
    return std::visit([&grid](const auto& p) { return forward(p, grid); }, m);
}

// --- extended-precision forward evaluation ---
//
// Objective comparisons near convergence are limited by rounding in the
// forward sums, not by the optimizer. Evaluating in long double pushes the
// attainable residual floor down by roughly three decades for the models
// with direct closed-form sums. The chirped model goes through the FFT
// sampling path and stays in double; its solves are noise-dominated.

using cplxl = std::complex<long double>;

inline constexpr long double kTwoPiL = 6.283185307179586476925286766559L;

inline std::vector<cplxl> forward_precise(const PointSourceParams& p, const FrequencyGrid& grid) {
    std::vector<cplxl> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        long double k = grid.omega(i);
        cplxl s{};
        for (std::size_t j = 0; j < p.n(); ++j) {
            long double ph = -kTwoPiL * static_cast<long double>(p.positions[j].value) * k;
            s += static_cast<long double>(p.amplitudes[j]) * cplxl(std::cos(ph), std::sin(ph));
        }
        out[i] = s;
    }
    return out;
}

inline std::vector<cplxl> forward_precise(const FriParams& p, const FrequencyGrid& grid) {
    std::vector<cplxl> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        long double k = grid.omega(i);
        cplxl s{};
        for (const auto& o : p.orders) {
            cplxl factor(1.0L, 0.0L);
            for (int r = 0; r < o.order; ++r) factor *= cplxl(0.0L, -kTwoPiL * k);
            for (std::size_t j = 0; j < o.amplitudes.size(); ++j) {
                long double ph = -kTwoPiL * static_cast<long double>(o.positions[j].value) * k;
                s += static_cast<long double>(o.amplitudes[j]) * factor *
                     cplxl(std::cos(ph), std::sin(ph));
            }
        }
        out[i] = s;
    }
    return out;
}

inline std::vector<cplxl> forward_precise(const GaussParams& p, const FrequencyGrid& grid) {
    const long double c0 = std::sqrt(kTwoPiL);
    std::vector<cplxl> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        long double w = grid.omega(i);
        cplxl s{};
        for (std::size_t j = 0; j < p.n(); ++j) {
            long double sd = p.stddevs[j];
            long double decay = std::exp(-0.5L * kTwoPiL * kTwoPiL * sd * sd * w * w);
            long double ph = -kTwoPiL * static_cast<long double>(p.means[j].value) * w;
            s += static_cast<long double>(p.weights[j]) * sd * decay *
                 cplxl(std::cos(ph), std::sin(ph));
        }
        out[i] = c0 * s;
    }
    return out;
}

inline std::vector<cplxl> forward_precise(const ChirpParams& p, const FrequencyGrid& grid) {
    Measurement m = forward(p, grid);
    std::vector<cplxl> out(m.values.size());
    for (std::size_t i = 0; i < m.values.size(); ++i) out[i] = cplxl(m.values[i]);
    return out;
}

inline std::vector<cplxl> forward_precise(const ModelInstance& m, const FrequencyGrid& grid) {
    return std::visit([&grid](const auto& p) { return forward_precise(p, grid); }, m);
}

// --- analytic Jacobians (rows = frequencies, cols = flattened parameters) ---

inline MatrixXcd jacobian(const PointSourceParams& p, const FrequencyGrid& grid) {
    const std::size_t n = p.n();
    MatrixXcd J(grid.size(), 2 * n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k = grid.omega(i);
        for (std::size_t j = 0; j < n; ++j) {
            cplx e = std::polar(1.0, -kTwoPi * p.positions[j].value * k);
            J(i, j) = e;
            J(i, n + j) = cplx(0.0, -kTwoPi * k) * p.amplitudes[j] * e;
        }
    }
    return J;
}

inline MatrixXcd jacobian(const FriParams& p, const FrequencyGrid& grid) {
    const std::size_t N = p.total_sources();
    MatrixXcd J(grid.size(), 2 * N);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k = grid.omega(i);
        std::size_t col = 0;
        for (const auto& o : p.orders) {
            cplx base = std::pow(cplx(0.0, -kTwoPi * k), o.order);
            cplx next = base * cplx(0.0, -kTwoPi * k);
            for (std::size_t j = 0; j < o.amplitudes.size(); ++j, ++col) {
                cplx e = std::polar(1.0, -kTwoPi * o.positions[j].value * k);
                J(i, col) = base * e;
                J(i, N + col) = o.amplitudes[j] * next * e;
            }
        }
    }
    return J;
}

inline MatrixXcd jacobian(const GaussParams& p, const FrequencyGrid& grid) {
    const std::size_t n = p.n();
    const double c0 = std::sqrt(kTwoPi);
    MatrixXcd J(grid.size(), 3 * n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double w = grid.omega(i);
        for (std::size_t j = 0; j < n; ++j) {
            double s = p.stddevs[j];
            cplx e = c0 * std::exp(-2.0 * kPi * kPi * s * s * w * w) *
                     std::polar(1.0, -kTwoPi * p.means[j].value * w);
            J(i, j) = s * e;
            J(i, n + j) = p.weights[j] * (1.0 - 4.0 * kPi * kPi * s * s * w * w) * e;
            J(i, 2 * n + j) = cplx(0.0, -kTwoPi * w) * p.weights[j] * s * e;
        }
    }
    return J;
}

inline MatrixXcd jacobian(const ChirpParams& p, const FrequencyGrid& grid) {
    const std::size_t n = p.n();
    const std::size_t G = p.fft_grid_size;
    MatrixXcd J(grid.size(), 6 * n);
    std::vector<cplx> deriv(G);
    // the DFT is linear, so differentiate the physical samples and transform
    for (std::size_t j = 0; j < n; ++j) {
        const auto& c = p.components[j];
        cplx amp(c.amp_re, c.amp_im);
        for (std::size_t row = 0; row < 6; ++row) {
            for (std::size_t t = 0; t < G; ++t) {
                double x = detail::chirp_abscissa(p, t);
                cplx env = detail::chirp_envelope(c, x);
                double dx = x - c.center;
                switch (row) {
                    case 0: deriv[t] = env; break;                            // d/d kappa0
                    case 1: deriv[t] = cplx(0.0, 1.0) * env; break;           // d/d kappa1
                    case 2: deriv[t] = amp * cplx(0.0, x * x) * env; break;   // d/d kappa2
                    case 3: deriv[t] = amp * cplx(0.0, x) * env; break;       // d/d kappa3
                    case 4: deriv[t] = amp * (dx / (c.width * c.width)) * env; break;
                    case 5:
                        deriv[t] = amp * (dx * dx / (c.width * c.width * c.width)) * env;
                        break;
                }
            }
            auto col = detail::chirp_spectrum(p, deriv, grid);
            for (std::size_t i = 0; i < grid.size(); ++i) J(i, row * n + j) = col[i];
        }
    }
    return J;
}

inline MatrixXcd jacobian(const ModelInstance& m, const FrequencyGrid& grid) {
    return std::visit([&grid](const auto& p) { return jacobian(p, grid); }, m);
}

// --- per-frequency Hessians of g_k ---

// Point model second derivatives are closed-form; the Hessian at frequency k
// couples only (a_j, x_j), so it is block-diagonal up to permutation.
inline std::vector<MatrixXcd> model_hessians(const PointSourceParams& p,
                                             const FrequencyGrid& grid) {
    const std::size_t n = p.n();
    std::vector<MatrixXcd> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double k = grid.omega(i);
        MatrixXcd H = MatrixXcd::Zero(2 * n, 2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            cplx e = std::polar(1.0, -kTwoPi * p.positions[j].value * k);
            cplx c = cplx(0.0, -kTwoPi * k) * e;
            cplx d = cplx(0.0, -kTwoPi * k) * cplx(0.0, -kTwoPi * k) * p.amplitudes[j] * e;
            H(j, n + j) = H(n + j, j) = c;
            H(n + j, n + j) = d;
        }
        out.push_back(std::move(H));
    }
    return out;
}

namespace detail {

// Central finite differences of the analytic Jacobian.
inline std::vector<MatrixXcd> fd_model_hessians(const ModelInstance& model,
                                                const FrequencyGrid& grid) {
    const VectorXd theta = flatten(model);
    const auto m = static_cast<Eigen::Index>(param_count(model));
    const auto rows = static_cast<Eigen::Index>(grid.size());
    std::vector<MatrixXcd> H(grid.size(), MatrixXcd::Zero(m, m));
    for (Eigen::Index q = 0; q < m; ++q) {
        double eps = 1e-5 * std::max(1.0, std::fabs(theta[q]));
        VectorXd tp = theta, tm = theta;
        tp[q] += eps;
        tm[q] -= eps;
        MatrixXcd Jp = jacobian(unflatten(model, tp, false), grid);
        MatrixXcd Jm = jacobian(unflatten(model, tm, false), grid);
        for (Eigen::Index k = 0; k < rows; ++k)
            H[static_cast<std::size_t>(k)].col(q) =
                (Jp.row(k) - Jm.row(k)).transpose() / (2.0 * eps);
    }
    for (auto& Hk : H) Hk = 0.5 * (Hk + Hk.transpose()).eval();
    return H;
}

}  // namespace detail

inline std::vector<MatrixXcd> model_hessians(const ModelInstance& model,
                                             const FrequencyGrid& grid) {
    if (const auto* p = std::get_if<PointSourceParams>(&model))
        return model_hessians(*p, grid);
    return detail::fd_model_hessians(model, grid);
}

// Largest singular value by power iteration on H^H H.
inline double operator_norm_power(const MatrixXcd& H, double tol = 1e-6, int max_iter = 500) {
    const Eigen::Index m = H.cols();
    VectorXcd v = VectorXcd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] += 0.01 * static_cast<double>(i);  // break symmetry
    v /= v.norm();
    double prev = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        VectorXcd w = H * v;
        double s = w.norm();
        if (s < 1e-300) return 0.0;
        if (prev >= 0.0 && std::fabs(s - prev) <= tol * std::max(1.0, s)) return s;
        prev = s;
        v = H.adjoint() * w;
        v /= v.norm();
    }
    return -1.0;  // caller reports non-convergence
}

// xi_k = ||grad^2 g_k||_op per frequency. Analytic for the point model,
// power iteration on finite-difference Hessians otherwise.
inline std::vector<double> hessian_norms(const ModelInstance& model, const FrequencyGrid& grid) {
    std::vector<double> xi(grid.size());
    if (const auto* p = std::get_if<PointSourceParams>(&model)) {
        // each 2x2 block [[0,c],[c,d]] has sigma_max^2 = (T + sqrt(T^2-4|c|^4))/2,
        // T = 2|c|^2 + |d|^2
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double k = grid.omega(i);
            double c2 = kTwoPi * k * kTwoPi * k;
            double best = 0.0;
            for (double a : p->amplitudes) {
                double d2 = c2 * c2 * a * a;
                double T = 2.0 * c2 + d2;
                double s2 = 0.5 * (T + std::sqrt(std::max(0.0, T * T - 4.0 * c2 * c2)));
                best = std::max(best, std::sqrt(s2));
            }
            xi[i] = best;
        }
        return xi;
    }
    auto H = model_hessians(model, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = operator_norm_power(H[i]);
        if (s < 0.0) {
            std::ostringstream msg;
            msg << "hessian_norms: power iteration did not converge at frequency index "
                << grid.index(i);
            throw std::runtime_error(msg.str());
        }
        xi[i] = s;
    }
    return xi;
}

// --- misc model queries ---

inline bool guarantees_conjugate_symmetry(const ModelInstance& m) {
    if (std::holds_alternative<PointSourceParams>(m) || std::holds_alternative<GaussParams>(m))
        return true;
    if (const auto* p = std::get_if<FriParams>(&m)) {
        for (const auto& o : p->orders)
            if (o.order % 2 != 0) return false;
        return true;
    }
    return false;
}

// Soft identifiability check: returns a message when the grid carries fewer
// samples than the model's stated condition requires.
inline std::optional<std::string> identifiability_warning(const ModelInstance& m,
                                                          const FrequencyGrid& grid) {
    const std::size_t dim = param_count(m);
    if (grid.size() < dim) {
        std::ostringstream s;
        s << "grid provides " << grid.size() << " samples for " << dim << " parameters";
        return s.str();
    }
    if (const auto* p = std::get_if<PointSourceParams>(&m)) {
        if (static_cast<std::size_t>(grid.k_max()) < p->n())
            return "point model expects K_L >= n";
    } else if (const auto* p2 = std::get_if<FriParams>(&m)) {
        if (static_cast<std::size_t>(grid.k_max()) < p2->total_sources())
            return "fri model expects K_L >= N";
    } else if (const auto* p3 = std::get_if<GaussParams>(&m)) {
        if (grid.size() < 3 * p3->n()) return "gauss model expects 2*K_L+1 >= 3n";
    }
    return std::nullopt;
}

inline std::string model_tag(const ModelInstance& m) {
    switch (m.index()) {
        case 0: return "point";
        case 1: return "fri";
        case 2: return "gauss";
        default: return "chirp";
    }
}

}  // namespace modelsr
