#pragma once

#include <stdexcept>
#include <string>

namespace playcomm {

// Raised for malformed or inconsistent user-supplied inputs (files, flags).
// The CLI maps this (and std::invalid_argument) to exit code 2; everything
// else exits 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace playcomm
