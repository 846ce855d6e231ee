#ifndef TASKENT_ERRORS_HPP
#define TASKENT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace taskent {

// Error classes map onto distinct CLI exit codes (see tools/).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace taskent

#endif
