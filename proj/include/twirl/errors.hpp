#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace twirl {

// Base of all library errors. name() is the stable identifier the CLI
// prints and scripts can match on; what() carries the diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// A precondition on user input failed (validation, exit code 2 in the CLI).
class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what) : Error("InvalidParameter", what) {}
};

// No constant-rate rotating solution exists at these parameters.
class NoRotatingSolution : public Error {
public:
    explicit NoRotatingSolution(const std::string& what) : Error("NoRotatingSolution", what) {}
};

// The supplied phase does not satisfy the rotating-solution relation.
class NotASolution : public Error {
public:
    explicit NotASolution(const std::string& what) : Error("NotASolution", what) {}
};

class DegenerateDenominator : public Error {
public:
    explicit DegenerateDenominator(const std::string& what)
        : Error("DegenerateDenominator", what) {}
};

// Monodromy determinant disagrees with the damping identity; the
// integrator is misconfigured.
class DeterminantDrift : public Error {
public:
    explicit DeterminantDrift(const std::string& what) : Error("DeterminantDrift", what) {}
};

class BracketFailure : public Error {
public:
    explicit BracketFailure(const std::string& what) : Error("BracketFailure", what) {}
};

// Integration state left the finite range; last_good_tau is the time of
// the final finite state.
class NonFinite : public Error {
public:
    NonFinite(const std::string& what, double last_good_tau)
        : Error("NonFinite", what), last_good_tau_(last_good_tau) {}

    double last_good_tau() const noexcept { return last_good_tau_; }

private:
    double last_good_tau_;
};

class TooShort : public Error {
public:
    explicit TooShort(const std::string& what) : Error("TooShort", what) {}
};

class BranchMismatch : public Error {
public:
    explicit BranchMismatch(const std::string& what) : Error("BranchMismatch", what) {}
};

}  // namespace twirl
