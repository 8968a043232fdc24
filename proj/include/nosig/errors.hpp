// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nosig {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Lookup of an unknown preparation, context, or outcome identifier.
class IndexError : public Error {
public:
  using Error::Error;
};

/// Structurally incompatible objects, or a table whose size does not match
/// its declared index sets.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Conditioning on an outcome whose probability vanishes.
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// Iterative algorithm hit its iteration cap; carries the final residuals.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double signaling_residual,
                   double simplex_residual, double last_move)
      : Error(what),
        signaling_residual(signaling_residual),
        simplex_residual(simplex_residual),
        last_move(last_move) {}

  double signaling_residual;
  double simplex_residual;
  double last_move;
};

/// No feasible perturbation exists (degenerate input point).
class ConstructionError : public Error {
public:
  using Error::Error;
};

/// Malformed input file; the message carries the parser's location info.
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace nosig
