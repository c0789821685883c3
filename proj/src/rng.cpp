#include "lapwave/rng.hpp"

#include <cmath>
#include <numbers>

namespace lapwave {

double Rng::uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform01_open0() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01_open0();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // rejection keeps the distribution exact and the stream reproducible
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % bound;
}

} // namespace lapwave
