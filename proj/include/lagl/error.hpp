#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lagl {

enum class ErrorCategory {
    config,       // unreadable or inconsistent input
    argument,     // invalid argument to a pure function
    range,        // coordinate out of range or outside the grid domain
    degenerate,   // singular / collinear / too few points / empty region
    conflict,     // two regions claim the same node
    convergence,  // solver failed to meet its residual contract
};

inline std::string_view to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::argument: return "argument";
        case ErrorCategory::range: return "range";
        case ErrorCategory::degenerate: return "degenerate";
        case ErrorCategory::conflict: return "conflict";
        case ErrorCategory::convergence: return "convergence";
    }
    return "unknown";
}

/// Process exit code used by the command line tool for each category.
inline int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::argument: return 2;
        case ErrorCategory::range: return 3;
        case ErrorCategory::degenerate: return 3;
        case ErrorCategory::conflict: return 3;
        case ErrorCategory::convergence: return 4;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace lagl
