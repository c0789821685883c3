#pragma once

#include <stdexcept>
#include <string>

namespace lapwave {

// Malformed input files. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t line = 0)
        : std::runtime_error(std::move(msg)), line(line) {}
    std::size_t line;
};

// Invalid run configuration (step size, sample count, scheme mismatch).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// State norm exceeded the blow-up guard during integration.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::string msg, long long step)
        : std::runtime_error(std::move(msg)), step(step) {}
    long long step;
};

// Violation of the message-passing contract in the distributed simulator.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lapwave
