#pragma once

#include <stdexcept>
#include <string>

namespace genlearn {

// Base of every error raised by the library. The CLI maps the subclasses
// onto exit codes.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain arguments.
class invalid_input : public error {
 public:
  using error::error;
};

// A kernel / functional / representation combination that is not supported,
// e.g. a Laplacian on the min kernel.
class capability_error : public error {
 public:
  using error::error;
};

// A solver asked to handle data it is not built for (non-square loss in the
// closed-form solver, ...).
class invalid_method : public error {
 public:
  using error::error;
};

// Breakdown of a numerical routine. Carries the partial value when one
// exists.
class numerical_error : public error {
 public:
  numerical_error(const std::string& what, double partial = 0.0)
      : error(what), partial_value(partial) {}
  double partial_value;
};

class convergence_error : public error {
 public:
  using error::error;
};

// Unreadable input files or unwritable outputs.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace genlearn
