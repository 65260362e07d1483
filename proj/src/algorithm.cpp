#include "caladin/algorithm.hpp"

#include <array>
#include <utility>

namespace caladin {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kNames{{
    {Algorithm::BfgsAladin, "bfgs-aladin"},
    {Algorithm::ReducedAladin, "reduced-aladin"},
    {Algorithm::MatrixProxAladin, "matrix-prox-aladin"},
    {Algorithm::AdmmDualFirst, "admm-dual-first"},
    {Algorithm::AdmmAggregateFirst, "admm-aggregate-first"},
    {Algorithm::DirectQpAladin, "direct-qp-aladin"},
}};

}  // namespace

std::string_view algorithm_name(Algorithm algo)
{
    for (const auto& [a, name] : kNames) {
        if (a == algo) {
            return name;
        }
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    for (const auto& [a, n] : kNames) {
        if (n == name && a != Algorithm::DirectQpAladin) {
            return a;
        }
    }
    return std::nullopt;
}

bool is_aladin(Algorithm algo)
{
    return algo == Algorithm::BfgsAladin || algo == Algorithm::ReducedAladin ||
           algo == Algorithm::MatrixProxAladin;
}

}  // namespace caladin
