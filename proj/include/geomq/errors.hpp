#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace geomq {

/// Raised where an expression needs P above the node threshold and finds it below.
class NodeError : public std::runtime_error
{
public:
  NodeError(const std::string & what, Eigen::Index where = -1)
      : std::runtime_error(what), index_(where)
  {}

  /// Linear grid index of the offending point, or -1 when not tied to one.
  Eigen::Index index() const noexcept { return index_; }

private:
  Eigen::Index index_;
};

class GridError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// P failed validation (negative samples, or mass too far from one to renormalize).
class StateError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

class PositivityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class KahlerError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace geomq
