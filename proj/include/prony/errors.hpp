#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace prony {

/// Raised when a caller breaks an operation's precondition (shapes, degrees,
/// duplicate nodes).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientMeasurements : public std::runtime_error {
public:
    InsufficientMeasurements(long required_L, long actual_L)
        : std::runtime_error("not enough measurements: need L >= " + std::to_string(required_L) +
                             ", got L = " + std::to_string(actual_L)),
          required_L_(required_L), actual_L_(actual_L) {}

    long required_L() const noexcept { return required_L_; }
    long actual_L() const noexcept { return actual_L_; }

private:
    long required_L_;
    long actual_L_;
};

/// A root of the annihilating polynomial that has no preimage in the
/// instance's parameter domain. Usually a sign of model mismatch or noise.
class SpuriousRoot : public std::runtime_error {
public:
    SpuriousRoot(std::complex<double> root, const std::string& why)
        : std::runtime_error("spurious root (" + std::to_string(root.real()) + ", " +
                             std::to_string(root.imag()) + "): " + why),
          root_(root), reason_(why) {}

    std::complex<double> root() const noexcept { return root_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::complex<double> root_;
    std::string reason_;
};

class SymbolNotInjective : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prony
