#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace multitrek {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the directed part of a graph has a cycle. The cycle is
/// reported as a closed walk, e.g. [1, 2, 3, 1].
class CycleError : public Error {
 public:
  explicit CycleError(std::vector<int> cycle)
      : Error(describe(cycle)), cycle_(std::move(cycle)) {}

  const std::vector<int>& cycle() const noexcept { return cycle_; }

 private:
  static std::string describe(const std::vector<int>& cycle) {
    std::string s = "directed cycle:";
    for (int v : cycle) s += " " + std::to_string(v);
    return s;
  }

  std::vector<int> cycle_;
};

/// JSON document does not match the expected schema. `path()` is a JSON
/// pointer to the offending element.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// An enumeration would exceed its configured item cap.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t cap)
      : Error(what + " exceeds budget of " + std::to_string(cap)), cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class NotCubical : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class MissingOrder : public Error {
 public:
  explicit MissingOrder(int order)
      : Error("no noise cumulants of order " + std::to_string(order)) {}
};

/// The combinatorial and algebraic routes disagreed. This always indicates
/// a defect in the implementation.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

class OrderUnsupported : public Error {
 public:
  explicit OrderUnsupported(int order)
      : Error("cumulant order " + std::to_string(order) + " not supported") {}
};

class InvalidBootstrapCount : public Error {
 public:
  InvalidBootstrapCount() : Error("bootstrap resample count must be positive") {}
};

/// Malformed query arguments (unequal set sizes, unknown vertices, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace multitrek
