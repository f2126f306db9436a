#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace geopmp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, bad configuration, invalid data.
class ArgumentError : public Error
{
public:
  using Error::Error;
};

/// A user-supplied function produced a non-finite value or hit a domain error.
class EvaluationError : public Error
{
public:
  using Error::Error;
};

/// Newton iteration did not reach the requested tolerance.
class NoConvergenceError : public Error
{
public:
  NoConvergenceError(const std::string& what, double last_residual)
    : Error(what), last_residual_(last_residual)
  {}
  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

/// The control Hessian became (numerically) singular.
class RegularityError : public Error
{
public:
  using Error::Error;
};

/// Newton jumped away from the tracked branch of the feedback law.
class BranchSwitchError : public Error
{
public:
  using Error::Error;
};

/// Requested operation is outside what the implementation supports.
class UnsupportedError : public Error
{
public:
  using Error::Error;
};

/// Formats a vector as "(a, b, c)" for diagnostics.
std::string format_vector(const Vec& v);

/// Throws ArgumentError unless v.size() == expected.
void require_size(const Vec& v, Eigen::Index expected, const char* what);

}  // namespace geopmp
