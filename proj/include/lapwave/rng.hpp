#pragma once

#include <cstdint>
#include <random>

namespace lapwave {

// Deterministic generator: mt19937_64 plus fixed mappings, so a seed pins
// the exact byte stream (std::normal_distribution is not portable across
// standard library implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform01();
    // uniform in (0, 1], safe as a log argument
    double uniform01_open0();
    // standard normal via the Box-Muller pair, second value cached
    double gaussian();
    // uniform integer in [0, bound)
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lapwave
