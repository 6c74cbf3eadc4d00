#pragma once

#include <stdexcept>
#include <string>

namespace cityscan {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invalid input data: bad coordinates, bad CSV rows, bad GeoJSON.
class InputError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (negative radius, k == 0, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace cityscan
