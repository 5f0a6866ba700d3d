#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace multierg {

/// Raised when a system description violates one or more model constraints.
/// Every violated constraint is listed, not only the first.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Raised when an iterative solver fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace multierg
