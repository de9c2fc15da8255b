#pragma once

#include <stdexcept>
#include <string>

namespace peakseg {

// Error taxonomy shared by all modules. The CLI maps InputError to exit
// status 1 and StorageError to exit status 2.

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};

struct StorageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LookupError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

}  // namespace peakseg
