#pragma once

#include <stdexcept>
#include <string>

namespace vegopt {

// Bad or missing user input: files, config values, series too short.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A contract the library itself is supposed to maintain has been broken.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace vegopt
