#ifndef CSQFC_ERRORS_HPP
#define CSQFC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csqfc {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Index outside a valid range (channel numbers, cutoffs).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed or inconsistent configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// A schedule or plan that cannot be realized with the given resources.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A waveform or histogram that does not contain the feature being measured.
class MeasurementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csqfc

#endif
