#pragma once

#include <stdexcept>
#include <string>

namespace wisheig {

// Every error thrown by the library derives from wisheig::error so callers
// (the CLI in particular) can map them to a single exit status.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class domain_error : public error {
 public:
  using error::error;
};

// A hypergeometric parameter makes a denominator Pochhammer symbol vanish.
class parameter_error : public error {
 public:
  using error::error;
};

// Request exceeds a configured capacity (maximum degree, memory budget).
class resource_error : public error {
 public:
  using error::error;
};

class index_error : public error {
 public:
  using error::error;
};

// Coincident eigenvalues where a formula needs distinct ones.
class degeneracy_error : public error {
 public:
  using error::error;
};

// A series whose terms cannot be integrated or summed at the requested point.
class divergence_error : public error {
 public:
  using error::error;
};

namespace detail {

[[noreturn]] inline void throw_domain(const std::string& what) { throw domain_error(what); }

inline void require(bool ok, const char* what) {
  if (!ok) throw domain_error(what);
}

}  // namespace detail
}  // namespace wisheig
