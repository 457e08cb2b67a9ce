// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sbp {

/// Shape or dimension mismatch between arguments (wrong n_tx, non-square, ...).
class StructuralError : public std::invalid_argument {
public:
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numeric parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Iterative solver did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sbp
