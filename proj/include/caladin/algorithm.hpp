#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace caladin {

enum class Algorithm {
    BfgsAladin,
    ReducedAladin,
    MatrixProxAladin,
    AdmmDualFirst,
    AdmmAggregateFirst,
    /// Consensus ALADIN that uploads x, g and B directly. Only used for
    /// communication comparison tables; it is never executed.
    DirectQpAladin,
};

/// CLI name, e.g. "bfgs-aladin".
std::string_view algorithm_name(Algorithm algo);

std::optional<Algorithm> parse_algorithm(std::string_view name);

bool is_aladin(Algorithm algo);

}  // namespace caladin
