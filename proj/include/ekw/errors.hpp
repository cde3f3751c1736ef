#pragma once

#include <stdexcept>
#include <string>

namespace ekw {

// Exit-code contract used by the CLI: 0 success, 2 config, 3 numeric, 4 domain escape.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration, bad CLI usage, malformed files, violated preconditions of setup.
struct config_error : error {
    explicit config_error(const std::string& msg) : error(msg) {}
    static constexpr int exit_code = 2;
};

// Solver divergence, degenerate denominators, gate violations, consistency failures.
struct numeric_error : error {
    explicit numeric_error(const std::string& msg) : error(msg) {}
    static constexpr int exit_code = 3;
};

// A computed point left the evaluation domain.
struct domain_escape : error {
    explicit domain_escape(const std::string& msg) : error(msg) {}
    static constexpr int exit_code = 4;
};

} // namespace ekw
