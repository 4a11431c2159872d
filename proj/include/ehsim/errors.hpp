#ifndef EHSIM_ERRORS_HPP
#define EHSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ehsim {

// Thrown when a runtime contract that the controllers are supposed to
// guarantee (energy causality, nonnegative battery) is broken. This is a
// bug indicator, not a recoverable condition.
class contract_violation : public std::logic_error {
public:
    explicit contract_violation(const std::string& what) : std::logic_error(what) {}
};

// Configuration file problems: malformed line, unknown key, bad value.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ehsim

#endif
