#pragma once

#include <stdexcept>
#include <string>

namespace vpfocus {

/// Invalid argument to a numerical routine (non-finite input, r <= 0, negative mass, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A derived parameter set violates one of its constraints. `constraint()` names it.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string constraint, const std::string& what)
        : std::runtime_error(what), constraint_(std::move(constraint)) {}
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

/// A shell reached the r_min guard during integration.
class SingularityError : public std::runtime_error {
public:
    SingularityError(long shell, double radius, const std::string& what)
        : std::runtime_error(what), shell_(shell), radius_(radius) {}
    long shell() const noexcept { return shell_; }
    double radius() const noexcept { return radius_; }

private:
    long shell_;
    double radius_;
};

class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trajectory has no sign change of W.
class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vpfocus
