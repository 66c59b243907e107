#pragma once

#include <stdexcept>
#include <string>

namespace steipcn {

// Violated precondition or shape contract of a library operation.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (CSV/edge list/config).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// I/O failure or corrupt binary container.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steipcn
