#pragma once

#include <vector>

#include "caladin/aladin.hpp"
#include "caladin/diagnostics.hpp"
#include "caladin/problem.hpp"

namespace caladin {

struct AdmmAgentState {
    Vec x;
    Vec lambda;
};

enum class AdmmOrder {
    DualFirst,       ///< lambda+ = lambda + rho (x+ - z), then z+ = mean(x+ + lambda+/rho)
    AggregateFirst,  ///< z+ = mean(x+ + lambda/rho), then lambda+ = lambda + rho (x+ - z+)
};

std::vector<AdmmAgentState> initial_admm_agents(std::size_t num_agents, Eigen::Index dim);

/// One consensus ADMM round. Agents solve
///   x+ = argmin f_i(x) + lambda^T x + rho/2 ||x - z||^2,
/// upload x+, and receive z+ back; the master mirrors each lambda_i.
/// Energy (when options.reference is set) uses the metric rho*I.
IterationRecord admm_round(AdmmOrder order, const ConsensusProblem& problem, std::vector<AdmmAgentState>& agents,
                           CoordinatorState& coord, const RoundOptions& options);

inline IterationRecord admm_round_dual_first(const ConsensusProblem& problem, std::vector<AdmmAgentState>& agents,
                                             CoordinatorState& coord, const RoundOptions& options)
{
    return admm_round(AdmmOrder::DualFirst, problem, agents, coord, options);
}

inline IterationRecord admm_round_aggregate_first(const ConsensusProblem& problem,
                                                  std::vector<AdmmAgentState>& agents, CoordinatorState& coord,
                                                  const RoundOptions& options)
{
    return admm_round(AdmmOrder::AggregateFirst, problem, agents, coord, options);
}

}  // namespace caladin
