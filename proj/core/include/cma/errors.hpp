#pragma once

#include <stdexcept>
#include <string>

namespace cma {

struct NonSpdError : std::runtime_error {
  explicit NonSpdError(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteError : std::runtime_error {
  explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOutOfRangeError : std::out_of_range {
  explicit IndexOutOfRangeError(const std::string& what) : std::out_of_range(what) {}
};

struct BracketNotFoundError : std::runtime_error {
  explicit BracketNotFoundError(const std::string& what) : std::runtime_error(what) {}
};

struct RegimeMismatchError : std::runtime_error {
  explicit RegimeMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroDistanceError : std::runtime_error {
  explicit ZeroDistanceError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cma
