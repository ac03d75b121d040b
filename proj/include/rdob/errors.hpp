#pragma once

#include <stdexcept>
#include <string>

namespace rdob {

// Thrown when a computation is mathematically undefined or diverges at the
// given inputs (pole hit, singular resolvent, divergent recursion, overflow).
// Precondition/validation failures use std::invalid_argument instead.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rdob
