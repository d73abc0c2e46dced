#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace plasmo {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using CVector3 = Eigen::Matrix<std::complex<Scalar>, 3, 1>;
template <typename Scalar>
using CMatrix3 = Eigen::Matrix<std::complex<Scalar>, 3, 3>;

using Vec3 = Vector3<double>;
using Mat3 = Matrix3<double>;
using CVec3 = CVector3<double>;
using CMat3 = CMatrix3<double>;
using Complex = std::complex<double>;

template <typename Scalar>
inline constexpr Scalar pi_v = Scalar(3.141592653589793238462643383279502884L);

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied a value outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy value
/// (pole hit, non-convergent quadrature, exact root evaluation).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Failure inside one stage of the imaging pipeline.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace plasmo
