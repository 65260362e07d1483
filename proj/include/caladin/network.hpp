#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "caladin/linalg.hpp"

namespace caladin {

/// Simulated star network between the agents and the master. Every payload
/// passes through upload()/download(), which count the scalars moved.
class CommChannel {
public:
    Vec upload(const Vec& payload)
    {
        up_ += payload.size();
        return payload;
    }

    Vec download(const Vec& payload)
    {
        down_ += payload.size();
        return payload;
    }

    std::int64_t floats_up() const { return up_; }
    std::int64_t floats_down() const { return down_; }

    void reset()
    {
        up_ = 0;
        down_ = 0;
    }

private:
    std::int64_t up_ = 0;
    std::int64_t down_ = 0;
};

/// A local solve that did not reach its tolerance.
class SubproblemFailure : public std::runtime_error {
public:
    SubproblemFailure(std::size_t agent, int round, const std::string& detail)
        : std::runtime_error("agent " + std::to_string(agent) + " failed in round " + std::to_string(round) +
                             ": " + detail),
          agent_(agent),
          round_(round)
    {
    }

    std::size_t agent() const { return agent_; }
    int round() const { return round_; }

private:
    std::size_t agent_;
    int round_;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers with a static
/// contiguous partition. If several calls throw, the exception of the lowest
/// index is rethrown after all workers finish, so failures do not depend on
/// scheduling.
template <typename Fn>
void parallel_for_agents(std::size_t count, unsigned threads, Fn&& fn)
{
    std::vector<std::exception_ptr> errors(count);
    auto body = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::min<std::size_t>(std::max(1U, threads), count);
    if (workers <= 1) {
        body(0, count);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            if (begin < end) {
                pool.emplace_back(body, begin, end);
            }
        }
    }

    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace caladin
