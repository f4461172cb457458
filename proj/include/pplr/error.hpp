#pragma once

#include <stdexcept>
#include <string>

namespace pplr {

// Caller broke a documented precondition (bad dimensions, invalid index set,
// out-of-range parameter). The CLI maps this to exit code 2.
class ContractViolation : public std::invalid_argument {
public:
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical fit could not produce a usable answer (non-finite objective,
// singular design for an unpenalized MLE, complete separation).
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// Problems reading or interpreting an input table.
class LoadError : public std::runtime_error {
public:
    explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

} // namespace pplr
