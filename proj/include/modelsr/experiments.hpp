#pragma once

// Experiment harness: noise generation at a target SNR, seeded trial
// orchestration, error metrics via optimal matching, reference scenario
// presets, and CSV/JSON/SVG emission. Trials run concurrently with
// counter-split per-trial RNGs, so results do not depend on scheduling.

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "modelsr/core.hpp"
#include "modelsr/io.hpp"
#include "modelsr/matching.hpp"
#include "modelsr/models.hpp"
#include "modelsr/render.hpp"
#include "modelsr/solver.hpp"
#include "modelsr/svg.hpp"

namespace modelsr {

// --- seeding ---

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(master ^ splitmix64(counter + 1));
}

// --- noise ---

// Complex Gaussian noise rescaled so 10*log10(||signal|| / ||noise||) hits
// the target exactly. Returns (noise, sigma = ||noise||).
inline std::pair<Measurement, double> gen_noise(const Measurement& signal, double target_snr_db,
                                                std::mt19937_64& rng) {
    double snorm = signal.norm();
    if (snorm == 0.0) throw std::invalid_argument("gen_noise: zero signal");
    std::normal_distribution<double> gauss(0.0, 1.0);
    Measurement noise(signal.grid);
    double nn = 0.0;
    for (auto& v : noise.values) {
        v = cplx(gauss(rng), gauss(rng));
        nn += std::norm(v);
    }
    nn = std::sqrt(nn);
    if (nn == 0.0) throw std::runtime_error("gen_noise: degenerate draw");
    double target_norm = snorm * std::pow(10.0, -target_snr_db / 10.0);
    double scale = target_norm / nn;
    for (auto& v : noise.values) v *= scale;
    return {std::move(noise), target_norm};
}

inline double realized_snr_db(const Measurement& signal, const Measurement& noise) {
    return 10.0 * std::log10(signal.norm() / noise.norm());
}

// --- configuration ---

struct NoiseSpec {
    std::optional<double> snr_db;
    std::optional<double> sigma;
};

enum class AmplitudeDraw { fixed, uniform_1_2 };

struct ExperimentConfig {
    std::string scenario = "custom";
    ModelInstance truth = PointSourceParams{{1.0}, {WrapPosition(0.5)}};
    int k_low = 10;
    int k_high = 100;
    NoiseSpec noise{20.0, std::nullopt};
    int trials = 20;
    std::uint64_t seed = 0;
    double init_offset_rl = 0.4;         // position perturbation in RL units
    double chirp_center_offset = 0.02;   // absolute center offset for the chirp model
    AmplitudeDraw amplitude_draw = AmplitudeDraw::uniform_1_2;
    bool balance_fri_norms = true;  // scale higher-pole amplitudes to the monopole block norm
    SolveOptions solver;
    std::string out_dir = "out";
};

inline void validate(const ExperimentConfig& c) {
    if (c.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (c.noise.snr_db.has_value() == c.noise.sigma.has_value())
        throw std::invalid_argument("config: exactly one of snr_db / sigma must be given");
    if (c.k_high < c.k_low) throw std::invalid_argument("config: k_high must be >= k_low");
    validate(c.truth);
}

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double realized_snr_db = 0.0;
    std::vector<double> position_errors;
    std::vector<double> amplitude_errors;
    double final_residual = 0.0;  // phi at theta_hat
    int iterations = 0;
    bool admissible = false;
    int reinit_count = 0;
    ModelInstance truth = PointSourceParams{{1.0}, {WrapPosition(0.5)}};
    ModelInstance theta_hat = PointSourceParams{{1.0}, {WrapPosition(0.5)}};
    std::string error;  // nonempty if the solve failed
};

struct ScenarioResult {
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    // grouping labels for boxplots (e.g. monopole/dipole/quadrupole)
    std::vector<std::string> group_labels;
    std::vector<std::vector<std::size_t>> group_columns;  // error column indices per group
};

// --- per-model position/amplitude views for error matching ---

namespace detail {

struct SourceView {
    std::vector<std::vector<WrapPosition>> position_groups;
    std::vector<std::vector<double>> amplitude_groups;
    std::vector<std::string> labels;
};

inline SourceView source_view(const ModelInstance& m) {
    SourceView v;
    if (const auto* p = std::get_if<PointSourceParams>(&m)) {
        v.position_groups = {p->positions};
        v.amplitude_groups = {p->amplitudes};
        v.labels = {"sources"};
    } else if (const auto* p2 = std::get_if<FriParams>(&m)) {
        for (const auto& o : p2->orders) {
            v.position_groups.push_back(o.positions);
            v.amplitude_groups.push_back(o.amplitudes);
            v.labels.push_back("order " + std::to_string(o.order));
        }
    } else if (const auto* p3 = std::get_if<GaussParams>(&m)) {
        v.position_groups = {p3->means};
        v.amplitude_groups = {p3->weights};
        v.labels = {"components"};
    } else {
        const auto& p4 = std::get<ChirpParams>(m);
        std::vector<WrapPosition> centers;
        std::vector<double> amps;
        for (const auto& c : p4.components) {
            centers.push_back(WrapPosition::wrap(c.center));
            amps.push_back(std::hypot(c.amp_re, c.amp_im));
        }
        v.position_groups = {centers};
        v.amplitude_groups = {amps};
        v.labels = {"components"};
    }
    return v;
}

// Scale the amplitudes of each FRI order block so its noiseless
// low-resolution signal matches the order-0 block in l2 norm.
inline void balance_fri_block_norms(FriParams& p, const FrequencyGrid& low) {
    if (p.orders.size() < 2 || p.orders.front().order != 0) return;
    FriParams mono{{p.orders.front()}, p.amplitude_bound};
    double ref = forward(mono, low).norm();
    for (std::size_t i = 1; i < p.orders.size(); ++i) {
        FriParams block{{p.orders[i]}, p.amplitude_bound};
        double norm = forward(block, low).norm();
        if (norm == 0.0) continue;
        double scale = ref / norm;
        for (double& a : p.orders[i].amplitudes) a *= scale;
    }
}

// Draw trial amplitudes according to config policy.
inline ModelInstance draw_truth(const ExperimentConfig& cfg, std::mt19937_64& rng) {
    ModelInstance truth = cfg.truth;
    if (cfg.amplitude_draw == AmplitudeDraw::uniform_1_2) {
        std::uniform_real_distribution<double> u12(1.0, 2.0);
        std::visit(
            [&](auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, PointSourceParams>) {
                    for (double& a : p.amplitudes) a = u12(rng);
                } else if constexpr (std::is_same_v<T, FriParams>) {
                    for (auto& o : p.orders)
                        for (double& a : o.amplitudes) a = u12(rng);
                } else if constexpr (std::is_same_v<T, GaussParams>) {
                    for (double& w : p.weights) w = u12(rng);
                }
                // chirp amplitudes stay as configured
            },
            truth);
    }
    if (auto* p = std::get_if<FriParams>(&truth); p && cfg.balance_fri_norms)
        balance_fri_block_norms(*p, FrequencyGrid(cfg.k_low));
    return truth;
}

inline int env_thread_cap() {
    if (const char* s = std::getenv("MODELSR_THREADS")) {
        int v = std::atoi(s);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace detail

inline TrialResult run_trial(const ExperimentConfig& cfg, int trial_index) {
    TrialResult res;
    res.trial = trial_index;
    res.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial_index));
    std::mt19937_64 rng(res.seed);
    try {
        ModelInstance truth = detail::draw_truth(cfg, rng);
        res.truth = truth;
        FrequencyGrid low(cfg.k_low);
        Measurement clean = forward(truth, low);

        Measurement noise(low);
        double sigma;
        if (cfg.noise.snr_db) {
            auto [n, s] = gen_noise(clean, *cfg.noise.snr_db, rng);
            noise = std::move(n);
            sigma = s;
        } else {
            auto [n, s] = gen_noise(clean, 0.0, rng);
            noise = std::move(n);
            double scale = *cfg.noise.sigma / s;
            for (auto& v : noise.values) v *= scale;
            sigma = *cfg.noise.sigma;
        }
        Measurement y = clean;
        bool noiseless = sigma == 0.0;
        if (!noiseless)
            for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += noise.values[i];
        res.realized_snr_db = noiseless ? std::numeric_limits<double>::infinity()
                                        : realized_snr_db(clean, noise);

        double offset = std::holds_alternative<ChirpParams>(truth)
                            ? cfg.chirp_center_offset
                            : cfg.init_offset_rl * rayleigh_length(cfg.k_low);
        ModelInstance init = perturb_init(truth, offset, rng);

        SolveOptions opts = cfg.solver;
        opts.seed = derive_seed(res.seed, 0x5eed);
        if (!noiseless) opts.sigma = sigma;
        SolveReport rep = nesterov_solve(init, y, opts);

        res.theta_hat = rep.theta_hat;
        res.final_residual = rep.objective_history.back();
        res.iterations = rep.iterations;
        res.admissible = rep.admissible;
        res.reinit_count = rep.reinit_count;

        auto tv = detail::source_view(truth);
        auto ev = detail::source_view(rep.theta_hat);
        for (std::size_t g = 0; g < tv.position_groups.size(); ++g) {
            auto me = match_errors(ev.position_groups[g], tv.position_groups[g],
                                   &ev.amplitude_groups[g], &tv.amplitude_groups[g]);
            res.position_errors.insert(res.position_errors.end(), me.position_errors.begin(),
                                       me.position_errors.end());
            res.amplitude_errors.insert(res.amplitude_errors.end(), me.amplitude_errors.begin(),
                                        me.amplitude_errors.end());
        }
    } catch (const std::exception& e) {
        res.error = e.what();
    }
    return res;
}

inline ScenarioResult run_scenario(const ExperimentConfig& cfg) {
    validate(cfg);
    ScenarioResult out;
    out.config = cfg;
    out.trials.resize(static_cast<std::size_t>(cfg.trials));

    int workers = std::min(detail::env_thread_cap(), cfg.trials);
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            int t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            out.trials[static_cast<std::size_t>(t)] = run_trial(cfg, t);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    auto view = detail::source_view(cfg.truth);
    std::size_t col = 0;
    for (std::size_t g = 0; g < view.position_groups.size(); ++g) {
        out.group_labels.push_back(view.labels[g]);
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < view.position_groups[g].size(); ++j) cols.push_back(col++);
        out.group_columns.push_back(std::move(cols));
    }
    return out;
}

// --- presets ---

// K_L = 10, five groups of two sources: 1 RL within a group, 3 RL between
// groups (the layout closes exactly around the circle).
inline ExperimentConfig preset_point_stability(double snr_db = 20.0) {
    ExperimentConfig cfg;
    cfg.scenario = "point-grouped";
    cfg.k_low = 10;
    cfg.k_high = 100;
    double rl = rayleigh_length(cfg.k_low);
    PointSourceParams p;
    for (int g = 0; g < 5; ++g) {
        double base = 0.025 + 4.0 * rl * g;
        p.amplitudes.push_back(1.5);
        p.positions.push_back(WrapPosition::wrap(base));
        p.amplitudes.push_back(1.5);
        p.positions.push_back(WrapPosition::wrap(base + rl));
    }
    cfg.truth = p;
    cfg.noise = {snr_db, std::nullopt};
    cfg.trials = 20;
    cfg.init_offset_rl = 0.4;
    cfg.solver.max_iters = 50000;
    cfg.solver.tol_residual = 1e-10;
    return cfg;
}

// K_L = 10: five monopoles, two dipoles, one quadrupole; higher-pole
// amplitudes scaled to match the monopole block's low-resolution l2 norm.
inline ExperimentConfig preset_fri_mixed(double snr_db = 30.0) {
    ExperimentConfig cfg;
    cfg.scenario = "fri-mixed";
    cfg.k_low = 10;
    cfg.k_high = 50;
    FriParams p;
    p.orders.push_back({0,
                        {1.5, 1.5, 1.5, 1.5, 1.5},
                        {WrapPosition(0.1), WrapPosition(0.15), WrapPosition(0.45),
                         WrapPosition(0.55), WrapPosition(0.9)}});
    p.orders.push_back({1, {1.5, 1.5}, {WrapPosition(0.7), WrapPosition(0.8)}});
    p.orders.push_back({2, {1.5}, {WrapPosition(0.3)}});
    cfg.truth = p;
    cfg.noise = {snr_db, std::nullopt};
    cfg.trials = 20;
    cfg.init_offset_rl = 0.4;
    cfg.solver.max_iters = 50000;
    cfg.solver.tol_residual = 1e-10;
    return cfg;
}

// 128-point endpoint FFT grid, K_L = 16 (33 low-frequency samples, RL = 1/32),
// four chirped-Gaussian components with the reference centers/widths.
inline ExperimentConfig preset_chirp_general(double snr_db = 11.35) {
    ExperimentConfig cfg;
    cfg.scenario = "chirp-general";
    cfg.k_low = 16;
    cfg.k_high = 63;
    ChirpParams p;
    p.fft_grid_size = 128;
    p.endpoint_grid = true;
    double centers[4] = {0.2, 0.4, 0.6, 0.8};
    double widths[4] = {0.02, 0.03, 0.01, 0.01};
    double quad[4] = {40.0, -25.0, 60.0, 15.0};
    double lin[4] = {12.0, -8.0, 20.0, -15.0};
    for (int j = 0; j < 4; ++j)
        p.components.push_back({1.0, 0.5, quad[j], lin[j], centers[j], widths[j]});
    cfg.truth = p;
    cfg.noise = {snr_db, std::nullopt};
    cfg.trials = 20;
    cfg.chirp_center_offset = 0.02;
    cfg.amplitude_draw = AmplitudeDraw::fixed;
    cfg.solver.max_iters = 8000;
    cfg.solver.tol_residual = 1e-10;
    return cfg;
}

inline ExperimentConfig preset(const std::string& name) {
    if (name == "point-grouped") return preset_point_stability();
    if (name == "fri-mixed") return preset_fri_mixed();
    if (name == "chirp-general") return preset_chirp_general();
    throw std::invalid_argument("unknown preset '" + name + "'");
}

// --- emission ---

inline void write_trials_csv(const ScenarioResult& r, std::ostream& os) {
    std::size_t npos = 0, namp = 0;
    for (const auto& t : r.trials) {
        npos = std::max(npos, t.position_errors.size());
        namp = std::max(namp, t.amplitude_errors.size());
    }
    os << "trial,seed,realized_snr_db,final_residual,iterations,admissible,reinit_count";
    for (std::size_t i = 0; i < npos; ++i) os << ",pos_err_" << i;
    for (std::size_t i = 0; i < namp; ++i) os << ",amp_err_" << i;
    os << ",error\n";
    for (const auto& t : r.trials) {
        os << t.trial << ',' << t.seed << ',' << format_g17(t.realized_snr_db) << ','
           << format_g17(t.final_residual) << ',' << t.iterations << ','
           << (t.admissible ? 1 : 0) << ',' << t.reinit_count;
        for (std::size_t i = 0; i < npos; ++i)
            os << ',' << (i < t.position_errors.size() ? format_g17(t.position_errors[i]) : "");
        for (std::size_t i = 0; i < namp; ++i)
            os << ',' << (i < t.amplitude_errors.size() ? format_g17(t.amplitude_errors[i]) : "");
        os << ',' << t.error << '\n';
    }
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<double> all_position_errors(const ScenarioResult& r) {
    std::vector<double> v;
    for (const auto& t : r.trials)
        if (t.error.empty())
            v.insert(v.end(), t.position_errors.begin(), t.position_errors.end());
    return v;
}

inline json summary_json(const ScenarioResult& r) {
    json j;
    j["scenario"] = r.config.scenario;
    j["trials"] = r.trials.size();
    j["seed"] = r.config.seed;
    int failures = 0;
    std::vector<double> snrs, residuals;
    for (const auto& t : r.trials) {
        if (!t.error.empty()) { ++failures; continue; }
        snrs.push_back(t.realized_snr_db);
        residuals.push_back(t.final_residual);
    }
    j["failed_trials"] = failures;
    j["median_realized_snr_db"] = median_of(snrs);
    j["median_final_residual"] = median_of(residuals);
    j["median_position_error"] = median_of(all_position_errors(r));
    json groups = json::array();
    for (std::size_t g = 0; g < r.group_labels.size(); ++g) {
        std::vector<double> errs;
        for (const auto& t : r.trials) {
            if (!t.error.empty()) continue;
            for (std::size_t c : r.group_columns[g])
                if (c < t.position_errors.size()) errs.push_back(t.position_errors[c]);
        }
        groups.push_back({{"label", r.group_labels[g]}, {"median_position_error", median_of(errs)}});
    }
    j["groups"] = groups;
    return j;
}

// Physical-domain figure for one trial: truth (red) vs reconstruction (blue).
inline void emit_profile_figure(const TrialResult& t, int k_high, std::size_t points,
                                const std::string& title, const std::string& path) {
    PhysicalGrid grid(points);
    auto truth_sig = synthesize(extrapolate(t.truth, k_high), grid);
    auto recon_sig = synthesize(extrapolate(t.theta_hat, k_high), grid);
    svg::Series red, blue;
    red.color = "red";
    blue.color = "blue";
    for (std::size_t i = 0; i < points; ++i) {
        double x = grid.point(i);
        red.x.push_back(x);
        red.y.push_back(truth_sig[i].real());
        blue.x.push_back(x);
        blue.y.push_back(recon_sig[i].real());
    }
    svg::write_line_plot({red, blue}, title, path);
}

// Writes trials.csv, summary.json, a position-error boxplot, and a physical
// profile figure for the last successful trial. A metadata sidecar carries
// everything non-deterministic so trials.csv stays byte-stable under a seed.
inline void emit(const ScenarioResult& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream f(out_dir + "/trials.csv");
        if (!f) throw std::runtime_error("cannot write " + out_dir + "/trials.csv");
        write_trials_csv(r, f);
    }
    {
        std::ofstream f(out_dir + "/summary.json");
        f << summary_json(r).dump(2) << '\n';
    }
    {
        std::ofstream f(out_dir + "/run_meta.json");
        json meta;
        meta["generated_unix_time"] = static_cast<long long>(std::time(nullptr));
        f << meta.dump(2) << '\n';
    }
    std::vector<std::vector<double>> groups;
    std::vector<std::string> labels;
    for (std::size_t g = 0; g < r.group_labels.size(); ++g) {
        std::vector<double> errs;
        for (const auto& t : r.trials) {
            if (!t.error.empty()) continue;
            for (std::size_t c : r.group_columns[g])
                if (c < t.position_errors.size()) errs.push_back(t.position_errors[c]);
        }
        if (!errs.empty()) {
            groups.push_back(std::move(errs));
            labels.push_back(r.group_labels[g]);
        }
    }
    if (!groups.empty())
        svg::write_boxplot(groups, labels, "position reconstruction error",
                           out_dir + "/position_errors.svg");

    const TrialResult* last = nullptr;
    for (const auto& t : r.trials)
        if (t.error.empty()) last = &t;
    if (!last) return;
    if (std::holds_alternative<ChirpParams>(last->theta_hat)) {
        // the chirp figure evaluates fitted components directly on fine grids
        for (std::size_t pts : {std::size_t{128}, std::size_t{4096}}) {
            const auto& fit = std::get<ChirpParams>(last->theta_hat);
            const auto& tru = std::get<ChirpParams>(last->truth);
            svg::Series red, blue;
            red.color = "red";
            blue.color = "blue";
            for (std::size_t i = 0; i < pts; ++i) {
                double x = static_cast<double>(i) / static_cast<double>(pts - 1);
                cplx fv{}, tv{};
                for (const auto& c : fit.components)
                    fv += cplx(c.amp_re, c.amp_im) * detail::chirp_envelope(c, x);
                for (const auto& c : tru.components)
                    tv += cplx(c.amp_re, c.amp_im) * detail::chirp_envelope(c, x);
                red.x.push_back(x);
                red.y.push_back(std::abs(tv));
                blue.x.push_back(x);
                blue.y.push_back(std::abs(fv));
            }
            svg::write_line_plot({red, blue}, "signal magnitude, " + std::to_string(pts) + " points",
                                 out_dir + "/profile_" + std::to_string(pts) + ".svg");
        }
    } else {
        std::size_t pts = std::max<std::size_t>(512, static_cast<std::size_t>(4 * r.config.k_high));
        emit_profile_figure(*last, r.config.k_high, pts, "resolution-enhanced profile",
                            out_dir + "/profile_high.svg");
        emit_profile_figure(*last, r.config.k_low, pts, "low-resolution profile",
                            out_dir + "/profile_low.svg");
    }
}

}  // namespace modelsr
