#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Bad or inconsistent user input (config files, CLI values, parameter
// combinations).  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical invariant was violated at run time (norm loss, boundary
// leakage, non-physical density matrix, ...).  The CLI maps this to exit
// code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}
