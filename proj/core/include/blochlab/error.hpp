#pragma once

#include <stdexcept>
#include <string>

namespace blochlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-positive width, odd grid, ...).
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// The dense eigensolver did not converge.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// Re-solving at twice the plane-wave cutoff moved a kept band beyond tolerance.
class CutoffError : public Error {
  public:
    using Error::Error;
};

/// Neighbouring Bloch functions could not be phase aligned (band crossing or coarse grid).
class GaugeError : public Error {
  public:
    using Error::Error;
};

/// Bloch functions were requested from a band structure that has no plane-wave basis.
class MissingBasisError : public Error {
  public:
    using Error::Error;
};

/// Exact-shift evolution was asked for a time that is not a multiple of the k spacing.
class IncommensurateTimeError : public Error {
  public:
    using Error::Error;
};

/// A state used where a real-valued amplitude is required was not real.
class NotRealValuedError : public Error {
  public:
    using Error::Error;
};

/// Two states or grids that must match do not.
class GridMismatchError : public Error {
  public:
    using Error::Error;
};

/// The wave-packet has significant weight at the edge of its spatial grid.
class CoverageError : public Error {
  public:
    using Error::Error;
};

/// Projection onto the kept bands left too much norm unaccounted for.
class ResidualError : public Error {
  public:
    using Error::Error;
};

/// The split-step integrator exceeded its absorbed-mass or step-halving budget.
class OracleBudgetError : public Error {
  public:
    using Error::Error;
};

/// Malformed band/state/config file.
class FormatError : public Error {
  public:
    using Error::Error;
};

} // namespace blochlab
