#pragma once

// Numerical stability machinery: closed-form bounds on ||DP_H||_op for each
// model, local convexity certificates for the least-squares objective, the
// admissible-noise threshold, and empirical Lipschitz-ratio sampling.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "modelsr/core.hpp"
#include "modelsr/models.hpp"
#include "modelsr/solver.hpp"

namespace modelsr {

struct StabilityReport {
    double c_prime = 0.0;             // bound on ||DP_H||_op
    double sigma_min_jacobian = 0.0;  // sigma_min(DP_L(theta_hat))
    double xi_norm = 0.0;             // ||xi||
    double noise_threshold = 0.0;     // sigma_min^2 / ||xi||
    double hessian_lambda_min = 0.0;
    double hessian_lambda_max = 0.0;
    std::vector<double> lipschitz_ratio_samples;
};

// C'^2 = (2K_H+1) n + (4 n pi^2 A_I^2 / 3) K_H (K_H+1) (2K_H+1)
inline double dph_bound_point(std::size_t n, int k_high, double a_bound) {
    if (n < 1 || k_high < 0 || !(a_bound > 0.0))
        throw std::invalid_argument("dph_bound_point: bad arguments");
    double kh = k_high;
    double c2 = (2.0 * kh + 1.0) * static_cast<double>(n) +
                (4.0 * static_cast<double>(n) * kPi * kPi * a_bound * a_bound / 3.0) * kh *
                    (kh + 1.0) * (2.0 * kh + 1.0);
    return std::sqrt(c2);
}

// C'^2 = sum_k sum_r n_r (2 pi k)^{2r} (1 + 4 pi^2 k^2 A_I^2).
// The printed bound sums k over the low-resolution range; since the quantity
// bounds ||DP_H|| we sum over the high-resolution range by default and expose
// the summation range separately. Evaluated in log space to survive large
// r * k_range products.
inline double dph_bound_fri(const std::vector<std::size_t>& counts_by_order, int k_high,
                            double a_bound, int k_sum_range = -1) {
    if (counts_by_order.empty() || k_high < 0 || !(a_bound > 0.0))
        throw std::invalid_argument("dph_bound_fri: bad arguments");
    const int krange = k_sum_range < 0 ? k_high : k_sum_range;
    double log_sum = -std::numeric_limits<double>::infinity();
    auto log_add = [&log_sum](double lt) {
        if (lt == -std::numeric_limits<double>::infinity()) return;
        if (log_sum == -std::numeric_limits<double>::infinity()) { log_sum = lt; return; }
        double hi = std::max(log_sum, lt), lo = std::min(log_sum, lt);
        log_sum = hi + std::log1p(std::exp(lo - hi));
    };
    for (int k = -krange; k <= krange; ++k) {
        double lk = k == 0 ? -std::numeric_limits<double>::infinity()
                           : std::log(kTwoPi * std::fabs(static_cast<double>(k)));
        double lpoly = std::log1p(4.0 * kPi * kPi * static_cast<double>(k) *
                                  static_cast<double>(k) * a_bound * a_bound);
        for (std::size_t r = 0; r < counts_by_order.size(); ++r) {
            if (counts_by_order[r] == 0) continue;
            double ln = std::log(static_cast<double>(counts_by_order[r]));
            if (k == 0) {
                if (r == 0) log_add(ln);  // (2 pi k)^0 = 1; A_I term vanishes at k=0
                continue;
            }
            log_add(ln + 2.0 * static_cast<double>(r) * lk + lpoly);
        }
    }
    double half = 0.5 * log_sum;
    if (half > std::log(std::numeric_limits<double>::max()))
        throw std::overflow_error("dph_bound_fri: bound not representable in double");
    return std::exp(half);
}

// C'^2 = 2 pi * sum_j sum_k (w^2 + s^2 + 16 pi^4 w^2 s^4 k^4 + 4 pi^2 w^2 s^2 k^2)
//        * e^{-4 pi^2 s^2 k^2}
// The leading 2 pi carries the sqrt(2 pi) amplitude of the mixture transform
// so the bound dominates the actual Frobenius norm. The series converges for
// any positive width; summation stops once terms drop below 1e-16 of the
// running sum, which also makes the value independent of k_high for large
// cutoffs.
inline double dph_bound_gauss(const GaussParams& params, int k_high) {
    validate(params);
    if (k_high < 0) throw std::invalid_argument("dph_bound_gauss: k_high must be >= 0");
    auto term_at = [&params](double k) {
        double s = 0.0;
        for (std::size_t j = 0; j < params.n(); ++j) {
            double w = params.weights[j], sd = params.stddevs[j];
            double k2 = k * k;
            double poly = w * w + sd * sd + 16.0 * std::pow(kPi, 4) * w * w * std::pow(sd, 4) * k2 * k2 +
                          4.0 * kPi * kPi * w * w * sd * sd * k2;
            s += poly * std::exp(-4.0 * kPi * kPi * sd * sd * k2);
        }
        return s;
    };
    double sum = term_at(0.0);
    for (int k = 1; k <= k_high; ++k) {
        double t = 2.0 * term_at(static_cast<double>(k));  // +k and -k
        sum += t;
        if (t < 1e-16 * sum) break;
    }
    return std::sqrt(kTwoPi * sum);
}

inline double dph_bound(const ModelInstance& model, int k_high, double a_bound) {
    if (const auto* p = std::get_if<PointSourceParams>(&model))
        return dph_bound_point(p->n(), k_high, a_bound);
    if (const auto* p = std::get_if<FriParams>(&model)) {
        std::vector<std::size_t> counts(static_cast<std::size_t>(p->orders.back().order) + 1, 0);
        for (const auto& o : p->orders)
            counts[static_cast<std::size_t>(o.order)] = o.amplitudes.size();
        return dph_bound_fri(counts, k_high, a_bound);
    }
    if (const auto* p = std::get_if<GaussParams>(&model)) return dph_bound_gauss(*p, k_high);
    throw std::invalid_argument("dph_bound: no closed-form bound for this model");
}

struct ConvexityCertificate {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double noise_threshold = 0.0;  // sigma_min^2(DP_L) / ||xi||
    double sigma_min_jacobian = 0.0;
    double xi_norm = 0.0;
};

// Assembles grad^2 phi = Re{ J^H J + sum_k conj(r_k) H_k } and returns its
// eigenvalue range together with the admissible-noise threshold.
inline ConvexityCertificate convexity_certificate(const ModelInstance& theta_hat,
                                                  const Measurement& y) {
    MatrixXcd J = jacobian(theta_hat, y.grid);
    VectorXcd r = residual(theta_hat, y);
    auto Hk = model_hessians(theta_hat, y.grid);
    MatrixXcd M = J.adjoint() * J;
    for (std::size_t k = 0; k < Hk.size(); ++k)
        M += std::conj(r[static_cast<Eigen::Index>(k)]) * Hk[k];
    Eigen::MatrixXd Hphi = M.real();
    Hphi = 0.5 * (Hphi + Hphi.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hphi);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("convexity_certificate: eigensolver failed");

    ConvexityCertificate cert;
    cert.lambda_min = es.eigenvalues().minCoeff();
    cert.lambda_max = es.eigenvalues().maxCoeff();
    Eigen::JacobiSVD<MatrixXcd> svd(J);
    cert.sigma_min_jacobian = svd.singularValues().minCoeff();
    auto xi = hessian_norms(theta_hat, y.grid);
    double xn = 0.0;
    for (double v : xi) xn += v * v;
    cert.xi_norm = std::sqrt(xn);
    cert.noise_threshold =
        cert.xi_norm > 0.0
            ? cert.sigma_min_jacobian * cert.sigma_min_jacobian / cert.xi_norm
            : std::numeric_limits<double>::infinity();
    return cert;
}

// Sampling region U around a reference parameter: amplitude balls of radius
// |a_j|/2, width balls of radius s_j/2, position balls of radius
// Delta = 1/2 min pairwise wrap distance (per derivative order for FRI).
struct RegionSpec {
    ModelInstance center;
    double amplitude_cap = std::numeric_limits<double>::infinity();  // |a| <= A_I
};

namespace detail {

inline double half_min_separation(const std::vector<WrapPosition>& xs) {
    if (xs.size() < 2) return 0.25;  // single source: any modest ball works
    double best = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            best = std::min(best, wrap_distance(xs[i], xs[j]));
    return 0.5 * best;
}

inline ModelInstance sample_in_region(const RegionSpec& region, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto jitter_amp = [&](double a) {
        double lo = a - 0.5 * std::fabs(a), hi = a + 0.5 * std::fabs(a);
        lo = std::max(lo, -region.amplitude_cap);
        hi = std::min(hi, region.amplitude_cap);
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * unit(rng);
    };
    ModelInstance out = region.center;
    std::visit(
        [&](auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointSourceParams>) {
                double delta = half_min_separation(p.positions);
                for (double& a : p.amplitudes) a = jitter_amp(a);
                for (auto& x : p.positions)
                    x = WrapPosition::wrap(x.value + delta * unit(rng));
            } else if constexpr (std::is_same_v<T, FriParams>) {
                for (auto& o : p.orders) {
                    double delta = half_min_separation(o.positions);
                    for (double& a : o.amplitudes) a = jitter_amp(a);
                    for (auto& x : o.positions)
                        x = WrapPosition::wrap(x.value + delta * unit(rng));
                }
            } else if constexpr (std::is_same_v<T, GaussParams>) {
                double delta = half_min_separation(p.means);
                for (double& w : p.weights) w = jitter_amp(w);
                for (double& s : p.stddevs) s = s + 0.5 * s * unit(rng);
                for (auto& x : p.means)
                    x = WrapPosition::wrap(x.value + delta * unit(rng));
            } else {
                throw std::invalid_argument("sample_in_region: chirp regions unsupported");
            }
        },
        out);
    return out;
}

}  // namespace detail

struct LipschitzSample {
    double theta_over_low = 0.0;  // ||theta - theta'|| / ||P_L diff||
    double high_over_low = 0.0;   // ||P_H diff|| / ||P_L diff||
};

struct LipschitzReport {
    double max_theta_over_low = 0.0;  // empirical lower bound on C_U
    double max_high_over_low = 0.0;   // empirical lower bound on C'_U
    std::size_t pairs_used = 0;
    std::vector<LipschitzSample> samples;
};

inline LipschitzReport empirical_lipschitz(const RegionSpec& region, int k_low, int k_high,
                                           std::size_t sample_pairs, std::mt19937_64& rng) {
    LipschitzReport rep;
    FrequencyGrid low(k_low), high(k_high);
    for (std::size_t s = 0; s < sample_pairs; ++s) {
        ModelInstance a = detail::sample_in_region(region, rng);
        ModelInstance b = detail::sample_in_region(region, rng);
        VectorXd ta = flatten(a), tb = flatten(b);
        double dt = (ta - tb).norm();
        if (dt == 0.0) continue;  // degenerate pair
        Measurement la = forward(a, low), lb = forward(b, low);
        double dl = 0.0;
        for (std::size_t i = 0; i < la.values.size(); ++i) dl += std::norm(la.values[i] - lb.values[i]);
        dl = std::sqrt(dl);
        if (dl == 0.0) continue;
        Measurement ha = forward(a, high), hb = forward(b, high);
        double dh = 0.0;
        for (std::size_t i = 0; i < ha.values.size(); ++i) dh += std::norm(ha.values[i] - hb.values[i]);
        dh = std::sqrt(dh);
        LipschitzSample sample{dt / dl, dh / dl};
        rep.max_theta_over_low = std::max(rep.max_theta_over_low, sample.theta_over_low);
        rep.max_high_over_low = std::max(rep.max_high_over_low, sample.high_over_low);
        rep.samples.push_back(sample);
        ++rep.pairs_used;
    }
    return rep;
}

// Full diagnostic for a fitted parameter.
inline StabilityReport stability_report(const ModelInstance& theta_hat, const Measurement& y,
                                        int k_high, double a_bound,
                                        std::size_t lipschitz_pairs = 0,
                                        std::uint64_t seed = 0) {
    StabilityReport rep;
    auto cert = convexity_certificate(theta_hat, y);
    rep.sigma_min_jacobian = cert.sigma_min_jacobian;
    rep.xi_norm = cert.xi_norm;
    rep.noise_threshold = cert.noise_threshold;
    rep.hessian_lambda_min = cert.lambda_min;
    rep.hessian_lambda_max = cert.lambda_max;
    rep.c_prime = dph_bound(theta_hat, k_high, a_bound);
    if (lipschitz_pairs > 0) {
        std::mt19937_64 rng(seed);
        RegionSpec region{theta_hat, a_bound};
        auto lip = empirical_lipschitz(region, y.grid.k_max(), k_high, lipschitz_pairs, rng);
        rep.lipschitz_ratio_samples.reserve(lip.samples.size());
        for (const auto& s : lip.samples) rep.lipschitz_ratio_samples.push_back(s.high_over_low);
    }
    return rep;
}

}  // namespace modelsr
