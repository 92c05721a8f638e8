#pragma once

#include <stdexcept>
#include <string>

namespace cbbre {

enum class ErrorKind {
  Parameter,    // inconsistent or out-of-range inputs
  Domain,       // argument outside the function's domain
  Unsupported,  // operation not defined for this mechanism
  Instability,  // numerics refused (e.g. oscillatory kernel at small time)
  Method,       // requested method invalid for these parameters
  Solver,       // ODE/quadrature failed to converge
  Regime,       // wrong asymptotic/conditioning regime
  Schema        // configuration document invalid
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace cbbre
