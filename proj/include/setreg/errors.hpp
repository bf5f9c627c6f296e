#pragma once

#include <stdexcept>
#include <string>

namespace setreg {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

struct ValidationError : Error {
  // names the offending field so scenario authors can find it
  ValidationError(const std::string& field, const std::string& msg)
      : Error(field + ": " + msg), field(field) {}
  std::string field;
};

struct MembershipError : Error {
  explicit MembershipError(const std::string& msg) : Error(msg) {}
};

struct NonConvexError : Error {
  explicit NonConvexError(const std::string& msg) : Error(msg) {}
};

struct EmptyIntersection : Error {
  explicit EmptyIntersection(const std::string& msg) : Error(msg) {}
};

struct InsufficientData : Error {
  explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

}  // namespace setreg
