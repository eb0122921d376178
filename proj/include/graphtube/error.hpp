#pragma once

#include <stdexcept>
#include <string>

namespace graphtube {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied a value outside the documented domain.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// Root bracketing or scanning could not produce the requested roots.
class SolverFailure : public Error {
public:
  using Error::Error;
};

/// Mesh construction would produce overlapping or degenerate pieces.
class GeometryError : public Error {
public:
  using Error::Error;
};

/// FEM assembly hit a degenerate element.
class AssemblyError : public Error {
public:
  using Error::Error;
};

/// Shift-invert eigensolver failed (factorization or convergence).
class EigenError : public Error {
public:
  using Error::Error;
};

/// Guard against problem sizes that would not fit the desk-scale budget.
class ResourceLimit : public Error {
public:
  using Error::Error;
};

} // namespace graphtube
