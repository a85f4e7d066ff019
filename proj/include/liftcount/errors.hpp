#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "liftcount/numeric.hpp"

namespace liftcount {

/// Grammar or semantic error in formula or model text. Positions are 1-based.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column),
          message_(message) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// A well-formed formula that a particular engine cannot handle
/// (constants or equality on the lifted path, free variables in a query...).
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No world has positive weight: zero partition function or an
/// unsatisfiable cardinality constraint.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numeric residue (imaginary part, negative probability) exceeded its
/// tolerance. Indicates an upstream numeric fault.
struct residue_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// World enumeration refused because the ground atom count is above the cap.
class brute_cap_error : public std::runtime_error {
public:
    brute_cap_error(std::size_t atoms, std::size_t cap)
        : std::runtime_error("brute-force enumeration refused: " + std::to_string(atoms) +
                             " ground atoms exceeds cap of " + std::to_string(cap)),
          atoms_(atoms) {}
    std::size_t atoms() const { return atoms_; }

private:
    std::size_t atoms_;
};

}  // namespace liftcount
