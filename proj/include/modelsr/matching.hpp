#pragma once

// Minimum-cost perfect matching for source-to-source error assignment.
// Sizes are small (a handful of sources), so exact subset DP is fine.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "modelsr/core.hpp"

namespace modelsr {

// cost is row-major n x n; returns column assigned to each row.
inline std::vector<int> optimal_assignment(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) return {};
    if (n > 20) throw std::invalid_argument("optimal_assignment: too many sources for exact DP");
    const std::size_t full = std::size_t{1} << n;
    const double inf = std::numeric_limits<double>::infinity();
    // dp[mask]: best cost assigning rows 0..popcount(mask)-1 to columns in mask
    std::vector<double> dp(full, inf);
    std::vector<int> choice(full, -1);
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < full; ++mask) {
        if (dp[mask] == inf) continue;
        std::size_t row = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (row == n) continue;
        for (std::size_t col = 0; col < n; ++col) {
            if (mask & (std::size_t{1} << col)) continue;
            std::size_t next = mask | (std::size_t{1} << col);
            double c = dp[mask] + cost[row][col];
            if (c < dp[next]) {
                dp[next] = c;
                choice[next] = static_cast<int>(col);
            }
        }
    }
    std::vector<int> assign(n, -1);
    std::size_t mask = full - 1;
    for (std::size_t row = n; row-- > 0;) {
        int col = choice[mask];
        assign[row] = col;
        mask &= ~(std::size_t{1} << static_cast<std::size_t>(col));
    }
    return assign;
}

struct MatchedErrors {
    std::vector<double> position_errors;   // wrap metric, per true source
    std::vector<double> amplitude_errors;  // same assignment
};

// Errors after optimal matching under the wrap metric. Truth order is kept.
inline MatchedErrors match_errors(const std::vector<WrapPosition>& estimated,
                                  const std::vector<WrapPosition>& truth,
                                  const std::vector<double>* est_amps = nullptr,
                                  const std::vector<double>* true_amps = nullptr) {
    if (estimated.size() != truth.size())
        throw std::invalid_argument("match_errors: source count mismatch");
    const std::size_t n = truth.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i][j] = wrap_distance(truth[i], estimated[j]);
    auto assign = optimal_assignment(cost);
    MatchedErrors out;
    out.position_errors.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.position_errors[i] = cost[i][static_cast<std::size_t>(assign[i])];
    if (est_amps && true_amps) {
        out.amplitude_errors.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out.amplitude_errors[i] =
                std::fabs((*true_amps)[i] - (*est_amps)[static_cast<std::size_t>(assign[i])]);
    }
    return out;
}

}  // namespace modelsr
