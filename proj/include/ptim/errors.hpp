#pragma once

#include <stdexcept>
#include <string>

namespace ptim {

// Malformed or out-of-range input: bad files, schema violations, invalid ids.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model evaluated outside the region where it is defined (e.g. s <= q in
// the queueing delay model, no free vehicles for a stage problem).
class ModelDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An exhaustive search refused to run because its space exceeds the cap.
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptim
