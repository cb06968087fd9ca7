#ifndef FIBRELAY_ERRORS_HPP
#define FIBRELAY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fibrelay {

// Error categories map 1:1 onto CLI exit codes.

// Bad input: malformed config file, out-of-range parameter, violated
// quadrature/CFL bound the user can fix. Exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A structural precondition of the model does not hold for the requested
// parameters (e.g. belt speed at or above an admissibility bound). Exit code 2.
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative method failed to converge. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace fibrelay

#endif
