#pragma once

// JSON serialization for model descriptions, solve reports, and stability
// reports. Model files carry a `model` tag (point|fri|gauss|chirp) plus
// parameter arrays and round-trip losslessly.

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "modelsr/models.hpp"
#include "modelsr/solver.hpp"
#include "modelsr/stability.hpp"

namespace modelsr {

using nlohmann::json;

inline json to_json(const ModelInstance& m) {
    json j;
    j["model"] = model_tag(m);
    if (const auto* p = std::get_if<PointSourceParams>(&m)) {
        j["amplitudes"] = p->amplitudes;
        json pos = json::array();
        for (auto x : p->positions) pos.push_back(x.value);
        j["positions"] = pos;
        j["amplitude_bound"] = p->amplitude_bound;
    } else if (const auto* p2 = std::get_if<FriParams>(&m)) {
        json orders = json::array();
        for (const auto& o : p2->orders) {
            json jo;
            jo["order"] = o.order;
            jo["amplitudes"] = o.amplitudes;
            json pos = json::array();
            for (auto x : o.positions) pos.push_back(x.value);
            jo["positions"] = pos;
            orders.push_back(jo);
        }
        j["orders"] = orders;
        j["amplitude_bound"] = p2->amplitude_bound;
    } else if (const auto* p3 = std::get_if<GaussParams>(&m)) {
        j["weights"] = p3->weights;
        j["stddevs"] = p3->stddevs;
        json pos = json::array();
        for (auto x : p3->means) pos.push_back(x.value);
        j["means"] = pos;
    } else {
        const auto& p4 = std::get<ChirpParams>(m);
        json comps = json::array();
        for (const auto& c : p4.components)
            comps.push_back({{"amp_re", c.amp_re},
                             {"amp_im", c.amp_im},
                             {"quad_phase", c.quad_phase},
                             {"lin_phase", c.lin_phase},
                             {"center", c.center},
                             {"width", c.width}});
        j["components"] = comps;
        j["fft_grid_size"] = p4.fft_grid_size;
        j["endpoint_grid"] = p4.endpoint_grid;
    }
    return j;
}

inline ModelInstance model_from_json(const json& j) {
    const std::string tag = j.at("model").get<std::string>();
    if (tag == "point") {
        PointSourceParams p;
        p.amplitudes = j.at("amplitudes").get<std::vector<double>>();
        for (double v : j.at("positions").get<std::vector<double>>())
            p.positions.push_back(WrapPosition::wrap(v));
        p.amplitude_bound = j.value("amplitude_bound", 2.0);
        validate(p);
        return p;
    }
    if (tag == "fri") {
        FriParams p;
        for (const auto& jo : j.at("orders")) {
            FriOrder o;
            o.order = jo.at("order").get<int>();
            o.amplitudes = jo.at("amplitudes").get<std::vector<double>>();
            for (double v : jo.at("positions").get<std::vector<double>>())
                o.positions.push_back(WrapPosition::wrap(v));
            p.orders.push_back(std::move(o));
        }
        p.amplitude_bound = j.value("amplitude_bound", 2.0);
        validate(p);
        return p;
    }
    if (tag == "gauss") {
        GaussParams p;
        p.weights = j.at("weights").get<std::vector<double>>();
        p.stddevs = j.at("stddevs").get<std::vector<double>>();
        for (double v : j.at("means").get<std::vector<double>>())
            p.means.push_back(WrapPosition::wrap(v));
        validate(p);
        return p;
    }
    if (tag == "chirp") {
        ChirpParams p;
        for (const auto& jc : j.at("components")) {
            ChirpComponent c;
            c.amp_re = jc.at("amp_re").get<double>();
            c.amp_im = jc.at("amp_im").get<double>();
            c.quad_phase = jc.at("quad_phase").get<double>();
            c.lin_phase = jc.at("lin_phase").get<double>();
            c.center = jc.at("center").get<double>();
            c.width = jc.at("width").get<double>();
            p.components.push_back(c);
        }
        p.fft_grid_size = j.at("fft_grid_size").get<std::size_t>();
        p.endpoint_grid = j.value("endpoint_grid", false);
        validate(p);
        return p;
    }
    throw std::invalid_argument("model_from_json: unknown model tag '" + tag + "'");
}

inline json to_json(const SolveReport& r) {
    json j;
    j["theta_hat"] = to_json(r.theta_hat);
    j["objective_history"] = r.objective_history;
    j["grad_norm_final"] = r.grad_norm_final;
    j["iterations"] = r.iterations;
    j["admissible"] = r.admissible;
    j["sigma_used"] = r.sigma_used;
    j["reinit_count"] = r.reinit_count;
    return j;
}

inline json to_json(const StabilityReport& r) {
    json j;
    j["c_prime"] = r.c_prime;
    j["sigma_min_jacobian"] = r.sigma_min_jacobian;
    j["xi_norm"] = r.xi_norm;
    j["noise_threshold"] = r.noise_threshold;
    j["hessian_lambda_min"] = r.hessian_lambda_min;
    j["hessian_lambda_max"] = r.hessian_lambda_max;
    j["lipschitz_ratio_samples"] = r.lipschitz_ratio_samples;
    return j;
}

}  // namespace modelsr
