#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace magpauli {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
  cplx z() const { return {x, y}; }
  static PlanarPoint of(cplx z) { return {z.real(), z.imag()}; }
};

enum class ErrorKind { Schema, Numerical, Singular, Domain };

// Exit codes of the CLI are derived from the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace magpauli
