#pragma once

// Nonlinear least-squares recovery: phi(theta) = 1/2 ||P_L(theta) - y||^2
// minimized by Nesterov accelerated gradient descent with backtracking,
// adaptive restart on objective increase, position wrapping each iterate,
// and re-initialization of chirp centers leaving (0,1).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "modelsr/core.hpp"
#include "modelsr/models.hpp"

namespace modelsr {

struct SolveOptions {
    int max_iters = 20000;
    // <= 0 means auto: backtracking from 1/L with L = ||J(theta0)||_F^2
    double step_size = 0.0;
    double tol_residual = 1e-7;  // on phi
    double tol_grad = 1e-12;
    std::uint64_t seed = 0;  // drives chirp-center re-initialization draws
    // admissibility is reported against this noise level when provided
    std::optional<double> sigma;
};

struct SolveReport {
    ModelInstance theta_hat;
    std::vector<double> objective_history;  // accepted iterates, non-increasing
    double grad_norm_final = 0.0;
    int iterations = 0;
    bool admissible = false;
    double sigma_used = 0.0;
    int reinit_count = 0;

    explicit SolveReport(ModelInstance m) : theta_hat(std::move(m)) {}
};

inline VectorXcd residual(const ModelInstance& model, const Measurement& y) {
    Measurement g = forward(model, y.grid);
    VectorXcd r(g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) r[i] = g.values[i] - y.values[i];
    return r;
}

inline double objective(const ModelInstance& model, const Measurement& y) {
    auto g = forward_precise(model, y.grid);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < g.size(); ++i) acc += std::norm(g[i] - cplxl(y.values[i]));
    return static_cast<double>(0.5L * acc);
}

// grad phi = Re{ conj(J)^T (g(theta) - y) }
inline VectorXd gradient(const ModelInstance& model, const Measurement& y) {
    MatrixXcd J = jacobian(model, y.grid);
    return (J.adjoint() * residual(model, y)).real();
}

// ||P_L(theta) - y|| < sigma, strict.
inline bool admissible(const ModelInstance& model, const Measurement& y, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("admissible: sigma must be > 0");
    return residual(model, y).norm() < sigma;
}

namespace detail {

// Wrap position coordinates into [0,1) in the flat representation; chirp
// centers are handled by the re-initialization policy instead.
inline void wrap_positions(const ModelInstance& proto, VectorXd& theta) {
    auto wrap_range = [&theta](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            theta[static_cast<Eigen::Index>(i)] =
                WrapPosition::wrap(theta[static_cast<Eigen::Index>(i)]).value;
    };
    if (const auto* p = std::get_if<PointSourceParams>(&proto)) {
        wrap_range(p->n(), 2 * p->n());
    } else if (const auto* p2 = std::get_if<FriParams>(&proto)) {
        std::size_t N = p2->total_sources();
        wrap_range(N, 2 * N);
    } else if (const auto* p3 = std::get_if<GaussParams>(&proto)) {
        wrap_range(2 * p3->n(), 3 * p3->n());
    }
}

// Redraw chirp centers that escaped (0,1); returns how many were redrawn.
inline int reinit_chirp_centers(const ModelInstance& proto, VectorXd& theta,
                                std::mt19937_64& rng) {
    const auto* p = std::get_if<ChirpParams>(&proto);
    if (!p) return 0;
    int count = 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = p->n();
    for (std::size_t j = 0; j < n; ++j) {
        auto idx = static_cast<Eigen::Index>(4 * n + j);
        if (!(theta[idx] > 0.0 && theta[idx] < 1.0)) {
            double draw;
            do { draw = unit(rng); } while (draw == 0.0);
            theta[idx] = draw;
            ++count;
        }
    }
    return count;
}

}  // namespace detail

inline SolveReport nesterov_solve(const ModelInstance& model_init, const Measurement& y,
                                  const SolveOptions& opts) {
    if (opts.max_iters < 1) throw std::invalid_argument("nesterov_solve: max_iters must be >= 1");
    if (!(opts.tol_residual > 0.0) || !(opts.tol_grad > 0.0))
        throw std::invalid_argument("nesterov_solve: tolerances must be > 0");
    for (const auto& v : y.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("nesterov_solve: non-finite measurement");
    validate(model_init);

    std::mt19937_64 rng(opts.seed);
    VectorXd theta = flatten(model_init);
    detail::wrap_positions(model_init, theta);

    auto eval_phi = [&](const VectorXd& t) {
        return objective(unflatten(model_init, t, false), y);
    };
    auto eval_grad = [&](const VectorXd& t) {
        return gradient(unflatten(model_init, t, false), y);
    };

    double step = opts.step_size;
    if (!(step > 0.0)) {
        double L = jacobian(model_init, y.grid).squaredNorm();
        step = L > 0.0 ? 1.0 / L : 1.0;
    }

    SolveReport report(model_init);
    double phi = eval_phi(theta);
    if (!std::isfinite(phi)) throw std::runtime_error("nesterov_solve: non-finite objective at init");
    report.objective_history.push_back(phi);

    // Monotone accelerated scheme: gradient steps are taken at a lookahead
    // point; the accepted iterate never increases the objective, and the
    // lookahead keeps extrapolating through the raw candidate so momentum
    // survives rejections. On an objective increase the momentum resets.
    VectorXd theta_prev = theta;
    VectorXd look = theta;  // lookahead point
    double t_momentum = 1.0;
    VectorXd grad(theta.size());
    int rejected_in_a_row = 0;
    int escapes = 0;
    double window_phi = phi;
    int iter = 0;

    for (; iter < opts.max_iters; ++iter) {
        if (phi < opts.tol_residual) break;

        grad = eval_grad(look);
        double gnorm = grad.norm();
        if (!std::isfinite(gnorm)) {
            report.theta_hat = unflatten(model_init, theta, false);
            throw std::runtime_error("nesterov_solve: non-finite gradient");
        }
        if (gnorm < opts.tol_grad) { grad = eval_grad(theta); break; }

        double phi_look = eval_phi(look);
        double s = step;
        VectorXd cand, best;
        double phi_cand, phi_best = std::numeric_limits<double>::infinity(), s_best = s;
        for (int bt = 0;; ++bt) {
            cand = look - s * grad;
            detail::wrap_positions(model_init, cand);
            report.reinit_count += detail::reinit_chirp_centers(model_init, cand, rng);
            phi_cand = eval_phi(cand);
            if (std::isfinite(phi_cand) && phi_cand < phi_best) {
                phi_best = phi_cand;
                best = cand;
                s_best = s;
            }
            if (std::isfinite(phi_cand) && phi_cand <= phi_look - 0.5 * s * gnorm * gnorm) break;
            s *= 0.5;
            if (bt >= 60) {
                // sufficient decrease unresolvable; fall back to the lowest
                // objective seen along the ray
                cand = best;
                phi_cand = phi_best;
                s = s_best;
                break;
            }
        }
        step = std::min(2.0 * s, 1e12);  // let the step grow back

        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
        bool stalled = false;
        if (phi_cand < phi) {
            rejected_in_a_row = 0;
            theta_prev = theta;
            theta = cand;
            phi = phi_cand;
            look = theta + ((t_momentum - 1.0) / t_next) * (theta - theta_prev);
            detail::wrap_positions(model_init, look);
            report.reinit_count += detail::reinit_chirp_centers(model_init, look, rng);
            t_momentum = t_next;
        } else {
            // candidate would raise the objective: keep the iterate, reset
            // momentum, and retry as plain gradient descent from it
            t_momentum = 1.0;
            theta_prev = theta;
            look = theta;
            // repeated rejections mean bare gradient steps from the iterate
            // cannot lower phi; the step keeps doubling between retries, so a
            // handful of retries exhausts the step sizes worth probing
            if (++rejected_in_a_row >= 8) {
                rejected_in_a_row = 0;
                stalled = true;
            }
        }
        // glacial progress is a stall in slow motion: check the improvement
        // over a trailing window and hand it to the same recovery path
        if (iter % 200 == 199) {
            if (window_phi - phi < 1e-8 * phi) {
                stalled = true;
                t_momentum = 1.0;
                look = theta;
            }
            window_phi = phi;
        }
        if (stalled) {
            // the iterate sits at or crawls toward a critical point: escape
            // along a negative curvature direction of grad^2 phi if one
            // exists, polish with damped Gauss-Newton rounds if the point
            // looks like a minimum, and stop when neither helps
            if (++escapes <= 60) {
                ModelInstance at = unflatten(model_init, theta, false);
                MatrixXcd J = jacobian(at, y.grid);
                VectorXcd r = residual(at, y);
                MatrixXcd M = J.adjoint() * J;
                auto Hs = model_hessians(at, y.grid);
                for (std::size_t k = 0; k < Hs.size(); ++k)
                    M += std::conj(r[static_cast<Eigen::Index>(k)]) * Hs[k];
                Eigen::MatrixXd Hphi = 0.5 * (M.real() + M.real().transpose());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hphi);
                double lo = es.eigenvalues()[0];
                double hi = es.eigenvalues()[es.eigenvalues().size() - 1];
                bool moved = false;
                auto try_step = [&](const VectorXd& d) {
                    double alpha = 1.0;
                    for (int bt = 0; bt < 80 && !moved; ++bt, alpha *= 0.5) {
                        for (double sgn : {1.0, -1.0}) {
                            VectorXd trial = theta + sgn * alpha * d;
                            detail::wrap_positions(model_init, trial);
                            report.reinit_count +=
                                detail::reinit_chirp_centers(model_init, trial, rng);
                            double phi_t = eval_phi(trial);
                            if (std::isfinite(phi_t) && phi_t < phi) {
                                theta_prev = theta;
                                theta = trial;
                                phi = phi_t;
                                look = theta;
                                moved = true;
                                break;
                            }
                        }
                    }
                };
                if (lo < -1e-12 * std::max(1.0, std::fabs(hi))) {
                    try_step(es.eigenvectors().col(0));
                } else if (hi > 0.0) {
                    // positive semidefinite stall: the iterate sits in a flat,
                    // often curved valley where line searches along any fixed
                    // direction cannot resolve progress. Polish with damped
                    // Gauss-Newton rounds, keeping the best step over a
                    // damping sweep each round.
                    const auto m = static_cast<Eigen::Index>(theta.size());
                    for (int lm = 0; lm < 300 && phi >= opts.tol_residual; ++lm) {
                        ModelInstance cur = unflatten(model_init, theta, false);
                        MatrixXcd Jl = jacobian(cur, y.grid);
                        VectorXcd rl = residual(cur, y);
                        Eigen::MatrixXd Hgn = (Jl.adjoint() * Jl).real();
                        VectorXd gl = (Jl.adjoint() * rl).real();
                        double hmax = Hgn.diagonal().maxCoeff();
                        if (!(hmax > 0.0)) break;
                        double phi_b = phi;
                        VectorXd best_t;
                        for (int k = -6; k <= 44; ++k) {
                            double mu = hmax * std::pow(10.0, -0.5 * k);
                            Eigen::MatrixXd A = Hgn + mu * Eigen::MatrixXd::Identity(m, m);
                            VectorXd trial = theta + A.ldlt().solve(-gl);
                            detail::wrap_positions(model_init, trial);
                            report.reinit_count +=
                                detail::reinit_chirp_centers(model_init, trial, rng);
                            double phi_t = eval_phi(trial);
                            if (std::isfinite(phi_t) && phi_t < phi_b) {
                                phi_b = phi_t;
                                best_t = trial;
                            }
                        }
                        if (!(phi_b < phi)) break;
                        theta_prev = theta;
                        theta = best_t;
                        phi = phi_b;
                        look = theta;
                        report.objective_history.push_back(phi);
                        moved = true;
                    }
                }
                if (!moved) break;
            } else {
                break;
            }
        }
        report.objective_history.push_back(phi);
    }

    report.iterations = iter;
    report.grad_norm_final = eval_grad(theta).norm();
    report.theta_hat = unflatten(model_init, theta, false);
    // the chirp envelope is even in the width, so report the positive sign
    if (auto* ch = std::get_if<ChirpParams>(&report.theta_hat))
        for (auto& c : ch->components) c.width = std::fabs(c.width);
    if (opts.sigma) {
        report.sigma_used = *opts.sigma;
        report.admissible = admissible(report.theta_hat, y, *opts.sigma);
    }
    return report;
}

// Initial guess for a solve: positions shifted by +/- position_offset with
// independent equiprobable signs, amplitudes at the midpoint of their
// admissible interval, widths kept at truth.
struct AmplitudeInterval {
    double lo = 1.0, hi = 2.0;
    double midpoint() const { return 0.5 * (lo + hi); }
};

inline ModelInstance perturb_init(const ModelInstance& truth, double position_offset,
                                  std::mt19937_64& rng,
                                  AmplitudeInterval amp = AmplitudeInterval{}) {
    if (position_offset < 0.0)
        throw std::invalid_argument("perturb_init: offset must be >= 0");
    std::bernoulli_distribution coin(0.5);
    auto shift = [&](WrapPosition x) {
        double sgn = coin(rng) ? 1.0 : -1.0;
        return WrapPosition::wrap(x.value + sgn * position_offset);
    };
    ModelInstance out = truth;
    std::visit(
        [&](auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointSourceParams>) {
                for (double& a : p.amplitudes) a = amp.midpoint();
                for (auto& x : p.positions) x = shift(x);
            } else if constexpr (std::is_same_v<T, FriParams>) {
                for (auto& o : p.orders) {
                    // the admissible amplitude interval applies to the
                    // monopole block; derivative blocks keep their true
                    // amplitudes, whose scale the (2*pi*k)^r gain sets
                    if (o.order == 0)
                        for (double& a : o.amplitudes) a = amp.midpoint();
                    for (auto& x : o.positions) x = shift(x);
                }
            } else if constexpr (std::is_same_v<T, GaussParams>) {
                for (double& w : p.weights) w = amp.midpoint();
                for (auto& x : p.means) x = shift(x);
            } else {
                // centers play the position role; amplitudes have no
                // admissible interval here, so they stay at truth along with
                // phases and widths
                for (auto& c : p.components) {
                    double sgn = coin(rng) ? 1.0 : -1.0;
                    double moved = c.center + sgn * position_offset;
                    if (!(moved > 0.0 && moved < 1.0)) moved = c.center - sgn * position_offset;
                    c.center = moved;
                }
            }
        },
        out);
    return out;
}

}  // namespace modelsr
