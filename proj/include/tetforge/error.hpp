#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tetforge {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-manifold faces, bad connectivity, dangling surface triangles.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  using Error::Error;
};

class DegenerateNormal : public Error {
 public:
  DegenerateNormal(const std::string& what, std::size_t vertex)
      : Error(what), vertex_(vertex) {}

  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

/// A quality evaluated at or below the barrier level.
class BarrierViolation : public Error {
 public:
  BarrierViolation(const std::string& what, std::ptrdiff_t tet = -1)
      : Error(what), tet_(tet) {}

  /// Offending tet id, or -1 when raised on a bare quality value.
  std::ptrdiff_t tet() const noexcept { return tet_; }

 private:
  std::ptrdiff_t tet_;
};

/// Linear system could not be made positive definite.
class NoProgress : public Error {
 public:
  using Error::Error;
};

}  // namespace tetforge
