#pragma once
#include <stdexcept>
#include <string>

namespace fsel {

// Exception families; the CLI maps them to exit codes 2, 3 and 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fsel
