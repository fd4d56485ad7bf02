#include "olapsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "olapsim/errors.hpp"

namespace olapsim {

namespace {

std::size_t weighted_choice(std::span<const std::size_t> eligible, const std::vector<double>& weights,
                            RandomStream& stream) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double target = stream.uniform01() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return eligible[i];
    }
    return eligible[last_positive];
}

}  // namespace

std::string_view to_string(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::FlowWeighted: return "flow_weighted";
        case PolicyKind::RoundRobin: return "round_robin";
        case PolicyKind::LeastOutstanding: return "least_outstanding";
        case PolicyKind::ResponseTimeWeighted: return "response_time_weighted";
    }
    return "unknown";
}

std::string_view to_string(FlowSplit split) noexcept {
    return split == FlowSplit::Deterministic ? "deterministic" : "random";
}

std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
    for (auto k : {PolicyKind::FlowWeighted, PolicyKind::RoundRobin, PolicyKind::LeastOutstanding,
                   PolicyKind::ResponseTimeWeighted}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::size_t pick(const PolicyConfig& policy, PolicyState& state, std::span<const std::size_t> eligible,
                 std::span<const double> flow_row, RandomStream& stream) {
    if (eligible.size() == 1) {
        state.last_pick = eligible.front();
        return eligible.front();
    }
    std::size_t chosen = eligible.front();
    switch (policy.kind) {
        case PolicyKind::FlowWeighted: {
            std::vector<double> w(eligible.size());
            bool any = false;
            for (std::size_t i = 0; i < eligible.size(); ++i) {
                w[i] = flow_row[eligible[i]];
                any = any || w[i] > 0.0;
            }
            if (!any) throw NoEligibleServer("no eligible server carries a positive flow weight");
            if (policy.flow_split == FlowSplit::Random) {
                chosen = weighted_choice(eligible, w, stream);
                break;
            }
            // Smooth weighted round-robin: every eligible server earns its
            // weight, the richest is picked and pays back the total.
            const double total = std::accumulate(w.begin(), w.end(), 0.0);
            std::size_t best = 0;
            for (std::size_t i = 0; i < eligible.size(); ++i) {
                state.credit[eligible[i]] += w[i] / total;
                if (state.credit[eligible[i]] > state.credit[eligible[best]]) best = i;
            }
            chosen = eligible[best];
            state.credit[chosen] -= 1.0;
            break;
        }
        case PolicyKind::RoundRobin: {
            if (state.last_pick) {
                const auto it = std::upper_bound(eligible.begin(), eligible.end(), *state.last_pick);
                chosen = it == eligible.end() ? eligible.front() : *it;
            }
            break;
        }
        case PolicyKind::LeastOutstanding: {
            for (std::size_t s : eligible) {
                if (state.outstanding[s] < state.outstanding[chosen]) chosen = s;
            }
            break;
        }
        case PolicyKind::ResponseTimeWeighted: {
            std::vector<double> w(eligible.size(), 0.0);
            double sum = 0.0;
            std::size_t known = 0;
            for (std::size_t i = 0; i < eligible.size(); ++i) {
                if (state.observed[eligible[i]]) {
                    w[i] = 1.0 / state.ewma[eligible[i]];
                    sum += w[i];
                    ++known;
                }
            }
            const double fill = known ? sum / static_cast<double>(known) : 1.0;
            for (std::size_t i = 0; i < eligible.size(); ++i) {
                if (!state.observed[eligible[i]]) w[i] = fill;
            }
            chosen = weighted_choice(eligible, w, stream);
            break;
        }
    }
    state.last_pick = chosen;
    return chosen;
}

void observe_dispatch(PolicyState& state, std::size_t server) { ++state.outstanding.at(server); }

void observe_completion(const PolicyConfig& policy, PolicyState& state, std::size_t server, Seconds processing_time) {
    if (state.outstanding.at(server) == 0) {
        throw InvariantViolation("completion observed for server " + std::to_string(server) +
                                 " with no outstanding queries");
    }
    if (!(processing_time > 0.0)) throw std::invalid_argument("processing time must be > 0");
    --state.outstanding[server];
    if (!state.observed[server]) {
        state.ewma[server] = processing_time;
        state.observed[server] = 1;
    } else {
        state.ewma[server] = policy.ewma_alpha * processing_time + (1.0 - policy.ewma_alpha) * state.ewma[server];
    }
}

std::vector<double> steady_share(const PolicyConfig& policy, std::span<const double> speed_factors,
                                 std::span<const double> flow_row, Seconds base_service_time, double aggregate_rate) {
    const std::size_t n = speed_factors.size();
    if (policy.kind == PolicyKind::FlowWeighted) {
        std::vector<double> share(flow_row.begin(), flow_row.end());
        const double total = std::accumulate(share.begin(), share.end(), 0.0);
        for (double& s : share) s /= total;
        return share;
    }
    if (policy.kind != PolicyKind::ResponseTimeWeighted) {
        throw std::invalid_argument("steady_share supports flow_weighted and response_time_weighted only");
    }

    auto target_for = [&](const std::vector<double>& share) {
        std::vector<double> inv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double service = base_service_time / speed_factors[i];
            const double rho = aggregate_rate * share[i] * service;
            // Saturated servers get a vanishing weight rather than a pole.
            const double wait = rho < 1.0 ? rho * service / (2.0 * (1.0 - rho)) : 1e12;
            inv[i] = 1.0 / (service + wait);
        }
        const double total = std::accumulate(inv.begin(), inv.end(), 0.0);
        for (double& v : inv) v /= total;
        return inv;
    };

    std::vector<double> share(n, 1.0 / static_cast<double>(n));
    for (int iter = 0; iter < 10000; ++iter) {
        const auto target = target_for(share);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = 0.5 * share[i] + 0.5 * target[i];
            delta = std::max(delta, std::abs(next - share[i]));
            share[i] = next;
        }
        if (delta < 1e-9) return share;
    }
    throw NonConvergence("response-time share iteration did not converge in 10^4 steps");
}

}  // namespace olapsim
